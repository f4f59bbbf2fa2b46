"""monodeform: numerical monodromy and deformation analysis for linear ODEs
with regular singularities.

Core pipeline: rational-coefficient systems (odecore) -> hypergeometric local
bases (hypergeom) -> analytic continuation along complex paths (transport) ->
deformation correction integrals, first-order monodromy shifts and cocycle
jumps (dyson) -> variation-of-parameters series oracle (varpar) -> weighted
eigenvalue shifts (spectral), all driveable from JSON problem files (cli).
"""

__version__ = "0.1.0"

from . import dyson, hypergeom, odecore, paths, quadrature, spectral, transport, varpar  # noqa: F401
from .odecore import MeromorphicSystem, PerturbationSpec, ScalarODE, companion  # noqa: F401
from .ratfun import ComplexPoly, RationalFn  # noqa: F401
