"""Numerical toolkit for the L^p Neumann problem for the d-bar operator on planar domains.

Modules: ``geometry`` (curves, domains, sampling), ``functions`` (boundary
data), ``quadrature``, ``cauchy`` (Cauchy integrals, principal-value
transform, Plemelj checks), ``hardy`` (membership tests), ``disc_rkhs``
(kernel theory on the unit disc), ``conformal`` (polynomial maps),
``neumann`` (the solver) and ``cli``.
"""
__version__ = "0.1.0"

from .cauchy import cauchy_exterior, cauchy_interior, hilbert_cauchy, plemelj_check
from .functions import BoundaryFunction
from .geometry import PlanarDomain, annulus, disc, polynomial_domain, sample
from .hardy import classify, exterior_vanishing_test, moment_test, neumann_test_multi
from .neumann import NeumannProblem, SolveOptions, residual_check, solve
