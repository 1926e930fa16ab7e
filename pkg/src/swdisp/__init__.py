"""One-dimensional shallow-water solver with a hierarchy of model tiers:
viscous hydrostatic, two weakly dispersive (non-hydrostatic) extensions, and
the classical inviscid dispersive limit.
"""

__version__ = "0.1.0"
