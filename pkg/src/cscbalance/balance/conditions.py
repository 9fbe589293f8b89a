from dataclasses import dataclass
from typing import Union
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64, einsum
from numpy.linalg import norm, matrix_rank
from scipy.linalg import eigh
from cscbalance._interfaces import KahlerModel
from cscbalance.halgebra.algebra import (
    Configuration,
    EffectiveWeights,
    effective_weights,
    weighted_moment_sum,
)


TOL_RES: float = 1.0e-10
TOL_PD_RELATIVE: float = 1.0e-9


@dataclass()
class ConditionReport:
    """Verdicts on the genericity (i), balancing (ii) and general position (iii) conditions"""

    __slots__ = [
        "genericity",
        "rank",
        "span_dim",
        "balancing",
        "residual",
        "general_position",
        "min_eigenvalue",
        "tol_res",
        "tol_pd",
    ]
    genericity: bool
    rank: int
    span_dim: int
    balancing: bool
    residual: float
    general_position: bool
    min_eigenvalue: float
    tol_res: float
    tol_pd: float

    @property
    def all_hold(self) -> bool:
        return self.genericity and self.balancing and self.general_position

    def to_dict(self) -> dict:
        return {
            "genericity": self.genericity,
            "rank": self.rank,
            "span_dim": self.span_dim,
            "balancing": self.balancing,
            "residual": self.residual,
            "general_position": self.general_position,
            "min_eigenvalue": self.min_eigenvalue,
            "tol_res": self.tol_res,
            "tol_pd": self.tol_pd,
            "all_hold": self.all_hold,
        }


def default_tol_pd(model: KahlerModel, eff: EffectiveWeights) -> float:
    return TOL_PD_RELATIVE * float(np.sum(eff)) * model.gram_scale


def weighted_gram_sum(model: KahlerModel, points: Arr[f64], eff: EffectiveWeights) -> Arr[f64]:
    return einsum("n,nij->ij", eff, model.gram_at(points))


def least_nontrivial_eigenvalue(model: KahlerModel, H: Arr[f64]) -> float:
    """Smallest eigenvalue of H restricted to the directions acting nontrivially"""
    Q = model.nontrivial_basis
    return float(eigh(Q.T @ H @ Q, eigvals_only=True)[0])


def check_conditions(
    model: KahlerModel,
    config: Configuration,
    tol_res: float = TOL_RES,
    tol_pd: Union[float, None] = None,
) -> ConditionReport:
    eff = effective_weights(config)
    if tol_pd is None:
        tol_pd = default_tol_pd(model, eff)
    moments = model.moment_at(config.points)
    rank = int(matrix_rank(moments))
    residual = float(norm(weighted_moment_sum(moments, eff)))
    lam = least_nontrivial_eigenvalue(model, weighted_gram_sum(model, config.points, eff))
    return ConditionReport(
        genericity=rank == model.span_dim,
        rank=rank,
        span_dim=model.span_dim,
        balancing=residual <= tol_res,
        residual=residual,
        general_position=lam > tol_pd,
        min_eigenvalue=lam,
        tol_res=tol_res,
        tol_pd=tol_pd,
    )
