"""Tests for the manufactured-solution cases.

The source terms are checked against nested finite differences of the exact
fields (independent of the symbolic derivation), and each case is run briefly
to confirm the injected sources actually hold the exact fields to scheme
accuracy.
"""

import numpy as np
import pytest

from swdisp.core import Boundary
from swdisp.manufactured import case_names, get_case, run_convergence_point


# ---------------------------------------------------------------------------
# registry


def test_case_registry_names():
    names = case_names()
    assert "manufactured-hydrostatic" in names
    assert "manufactured-nonhydro1" in names
    for name in names:
        case = get_case(name)
        assert case.name == name


def test_unknown_case_rejected():
    with pytest.raises(ValueError):
        get_case("manufactured-unobtainium")


def test_grid_and_initial_state():
    case = get_case("manufactured-hydrostatic")
    grid = case.grid(64)
    assert grid.n_cells == 64
    assert grid.boundary is Boundary.PERIODIC
    assert grid.x_max - grid.x_min == pytest.approx(case.length)
    state = case.initial_state(grid)
    x = grid.cell_centers
    assert state.t == 0.0
    np.testing.assert_allclose(state.H, case.exact_H(x, 0.0), rtol=0, atol=1e-15)
    np.testing.assert_allclose(
        state.q, case.exact_H(x, 0.0) * case.exact_u(x, 0.0), rtol=0, atol=1e-15)


# ---------------------------------------------------------------------------
# source terms vs. finite differences of the exact fields
#
# S_H must equal dH/dt + d(Hu)/dx and S_q must equal the full momentum
# residual of the exact fields, both evaluated here by central differences
# so a symbolic slip (sign, factor, missing term) cannot self-confirm.


def _fd_t(f, x, t, h):
    return (f(x, t + h) - f(x, t - h)) / (2.0 * h)


def _fd_x(f, x, t, h):
    return (f(x + h, t) - f(x - h, t)) / (2.0 * h)


def _fd_xx(f, x, t, h):
    return (f(x + h, t) - 2.0 * f(x, t) + f(x - h, t)) / h**2


@pytest.mark.parametrize("name", ["manufactured-hydrostatic",
                                  "manufactured-nonhydro1"])
def test_mass_source_matches_finite_differences(name):
    case = get_case(name)
    rng = np.random.default_rng(11)
    x = rng.uniform(0.0, case.length, size=40)
    t = 0.37
    h = 1e-5

    def flux(xx, tt):
        return case.exact_H(xx, tt) * case.exact_u(xx, tt)

    expected = _fd_t(case.exact_H, x, t, h) + _fd_x(flux, x, t, h)
    np.testing.assert_allclose(case.source_H(x, t), expected,
                               rtol=1e-6, atol=1e-9)


@pytest.mark.parametrize("name", ["manufactured-hydrostatic",
                                  "manufactured-nonhydro1"])
def test_momentum_source_matches_finite_differences(name):
    case = get_case(name)
    g = case.params.g
    nu = case.params.nu
    rng = np.random.default_rng(12)
    x = rng.uniform(0.0, case.length, size=40)
    t = 0.53
    h = 1e-4

    def momentum(xx, tt):
        return case.exact_H(xx, tt) * case.exact_u(xx, tt)

    def advective(xx, tt):
        H = case.exact_H(xx, tt)
        u = case.exact_u(xx, tt)
        return H * u**2 + 0.5 * g * H**2

    def viscous_flux(xx, tt):
        return 4.0 * nu * case.exact_H(xx, tt) * _fd_x(case.exact_u, xx, tt, h)

    expected = (_fd_t(momentum, x, t, h) + _fd_x(advective, x, t, h)
                - _fd_x(viscous_flux, x, t, h))
    if name == "manufactured-nonhydro1":
        # flat bed at z0: the depth-integrated inertia of the vertical
        # acceleration adds (z0^3/3) d^3 u / dt dx^2
        z0 = case.bathymetry.profile.level
        hh = 1e-3

        def uxx(xx, tt):
            return _fd_xx(case.exact_u, xx, tt, hh)

        expected = expected + (z0**3 / 3.0) * _fd_t(uxx, x, t, hh)
    np.testing.assert_allclose(case.source_q(x, t), expected,
                               rtol=1e-4, atol=1e-6)


# ---------------------------------------------------------------------------
# the sources hold the exact fields to scheme accuracy


@pytest.mark.parametrize("name", ["manufactured-hydrostatic",
                                  "manufactured-nonhydro1"])
def test_short_run_tracks_exact_solution(name):
    # a sign error in either source would push the numerical fields away
    # from the exact ones at the O(1e-3) level over this horizon; the
    # discretization error itself sits orders of magnitude below that
    dx, err = run_convergence_point(get_case(name), 128, t_end=0.05)
    assert dx == pytest.approx(get_case(name).length / 128)
    assert 0.0 < err < 1e-4


def test_grid_refinement_is_second_order():
    case = get_case("manufactured-hydrostatic")
    _, e1 = run_convergence_point(case, 64, t_end=0.2)
    _, e2 = run_convergence_point(case, 128, t_end=0.2)
    order = np.log2(e1 / e2)
    assert 1.5 < order < 2.5
