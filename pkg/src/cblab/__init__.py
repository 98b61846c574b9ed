"""Exact-arithmetic checks of Cayley-Bacharach statements on projective space."""

from __future__ import annotations

from .algebra import GF, QQ, ConfigurationError, Matrix, kernel_basis, rank, rref, solve
from .cb import (CIScenario, Split, ValidationError, all_splits, cb_propagates, li_degree,
                 mi_exponent, propagation, tv_check, tv_sweep, v1, v2)
from .detloci import DetScenario, FormMatrix, c1, c2, det_cb_check, det_sweep, phi
from .koszul import GradedComplex, differential_matrix, homology_dims, term_dim
from .polyring import Form, Parametrization, monomial_basis
from .scenarios import (ScenarioSpec, build_det_eleven_points, build_line_grid,
                        build_twisted_cubic)
from .vanishing import PointJet, PointVanish, SubvarietyJet, basis_h0, h0

__version__ = "0.1.0"
