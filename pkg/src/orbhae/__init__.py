"""Exact higher-genus Gromov-Witten potentials of [C^5/Z_5] and their anomaly equations.

Modules, bottom up:

    cyclo     exact arithmetic in Q(zeta5)
    series    truncated power series with D = x d/dx
    mirror    the I-function series and their identities
    freering  the polynomial ring of the potentials, D and evaluation
    intnum    psi-class intersection numbers
    graphs    stable graphs, decorations, flag values
    rmatrix   Frobenius data and the R-matrix table P~
    cohft     graph sums, t-derivatives, anomaly-equation checks
    cli       command line front end
"""
from .cyclo import Cyc, zeta_pow
from .series import Series, PrecisionError
from .mirror import MirrorData, build_all, check_identities
from .freering import Elem, d_derive, evaluate_to_series, partial_A2, partial_D2A1
from .intnum import psi_integral
from .graphs import StableGraph, decorations, enumerate_graphs, flag_assignments
from .rmatrix import RTable, build_rtable, DepthError
from .cohft import Potential, potential, t_derivative, hae_check, gw_expansion

__version__ = "0.1.0"

__all__ = [
    "Cyc",
    "zeta_pow",
    "Series",
    "PrecisionError",
    "MirrorData",
    "build_all",
    "check_identities",
    "Elem",
    "d_derive",
    "evaluate_to_series",
    "partial_A2",
    "partial_D2A1",
    "psi_integral",
    "StableGraph",
    "decorations",
    "enumerate_graphs",
    "flag_assignments",
    "RTable",
    "build_rtable",
    "DepthError",
    "Potential",
    "potential",
    "t_derivative",
    "hae_check",
    "gw_expansion",
]
