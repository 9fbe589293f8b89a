import enum
import logging
from dataclasses import dataclass, field
from typing import List, Union
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64, einsum
from numpy.linalg import norm
from scipy.linalg import cho_factor, cho_solve, eigh
from cscbalance._exceptions import ConfigurationError
from cscbalance._interfaces import KahlerModel
from cscbalance.balance.conditions import TOL_RES, default_tol_pd
from cscbalance.halgebra.algebra import (
    Configuration,
    FlowParameter,
    MomentVector,
    as_flow_parameter,
    _never_equal,
    effective_weights,
    weighted_moment_sum,
)

logger = logging.getLogger(__name__)

_EPS: float = float(np.finfo(f64).eps)


class SolveStatus(str, enum.Enum):
    BALANCED = "BALANCED"
    DIVERGED_UNSTABLE = "DIVERGED_UNSTABLE"
    SINGULAR_JACOBIAN = "SINGULAR_JACOBIAN"
    MAX_ITER = "MAX_ITER"


@dataclass()
class SolverOptions:
    """Tolerances and limits for the balancing solvers

    Attributes:
        tol_res (float): balanced once the moment-sum norm is at most this
        tol_pd (float | None): nondegeneracy threshold, None for 1e-9 * sum(c_j) * gram_scale
        max_iter (int): Newton iterations
        divergence_bound (float): |s| beyond this with a nonzero residual means unstable
        armijo (float): sufficient-decrease constant of the line search
        backtrack (float): step reduction factor of the line search
        min_step (float): smallest step length tried
        bisect_xtol (float): bracket width at which the two-point bisection stops
    """

    tol_res: float = TOL_RES
    tol_pd: Union[float, None] = None
    max_iter: int = 100
    divergence_bound: float = 50.0
    armijo: float = 1.0e-4
    backtrack: float = 0.5
    min_step: float = 1.0e-12
    bisect_xtol: float = 1.0e-14

    def validate(self) -> "SolverOptions":
        if not self.tol_res > 0.0:
            raise ConfigurationError(f"tol_res must be > 0, got {self.tol_res}")
        if self.tol_pd is not None and not self.tol_pd >= 0.0:
            raise ConfigurationError(f"tol_pd must be >= 0, got {self.tol_pd}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not self.divergence_bound > 0.0:
            raise ConfigurationError(f"divergence_bound must be > 0, got {self.divergence_bound}")
        if not 0.0 < self.armijo < 1.0:
            raise ConfigurationError(f"armijo must lie in (0, 1), got {self.armijo}")
        if not 0.0 < self.backtrack < 1.0:
            raise ConfigurationError(f"backtrack must lie in (0, 1), got {self.backtrack}")
        if not 0.0 < self.min_step <= 1.0:
            raise ConfigurationError(f"min_step must lie in (0, 1], got {self.min_step}")
        if not self.bisect_xtol > 0.0:
            raise ConfigurationError(f"bisect_xtol must be > 0, got {self.bisect_xtol}")
        return self


@dataclass()
class SolveReport:
    """Outcome of a balancing solve

    Attributes:
        status (SolveStatus): verdict
        s_star (Arr[f64, (d,)]): last flow parameter, the minimizer when BALANCED
        flowed_points (Arr[f64, (n, k)]): the configuration's points flowed by s_star
        residual_history (List[float]): moment-sum norm at every iterate
        newton_steps (int): Newton steps taken (bisection iterations for the two-point solver)
        min_eigenvalue (float): least nontrivial Hessian eigenvalue at the last factorized iterate
    """

    status: SolveStatus
    s_star: FlowParameter
    flowed_points: Arr[f64]
    residual_history: List[float] = field(default_factory=list)
    newton_steps: int = 0
    min_eigenvalue: float = float("nan")

    @property
    def residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float("nan")

    @property
    def balanced(self) -> bool:
        return self.status is SolveStatus.BALANCED

    def flowed_configuration(self, config: Configuration) -> Configuration:
        """The orbit representative; distinct points stay distinct under a biholomorphism"""
        return config.with_points(self.flowed_points, point_eq=_never_equal)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "s_star": self.s_star.tolist(),
            "s_norm": float(norm(self.s_star)),
            "flowed_points": self.flowed_points.tolist(),
            "residual": self.residual,
            "residual_history": list(self.residual_history),
            "newton_steps": self.newton_steps,
            "min_eigenvalue": self.min_eigenvalue,
        }


def flow_configuration(model: KahlerModel, config: Configuration, s: FlowParameter) -> Arr[f64]:
    return model.flow(config.points, as_flow_parameter(s, model.dim_d))


def s_map(model: KahlerModel, config: Configuration, s: FlowParameter) -> MomentVector:
    """Weighted moment sum of the flowed points, sum_j c_j moment_at(flow(p_j, s))"""
    flowed = flow_configuration(model, config, s)
    return weighted_moment_sum(model.moment_at(flowed), effective_weights(config))


def s_jacobian(model: KahlerModel, config: Configuration, s: FlowParameter) -> Arr[f64]:
    """kappa * sum_j c_j gram_at(flow(p_j, s)), the s-derivative of s_map"""
    flowed = flow_configuration(model, config, s)
    G = model.gram_at(flowed)
    return model.kappa * einsum("n,nij->ij", effective_weights(config), G)


def total_potential(model: KahlerModel, config: Configuration, s: FlowParameter) -> float:
    """F(s) = sum_j c_j kempf_ness_at(p_j, s); gradient s_map, Hessian s_jacobian"""
    K = model.kempf_ness_at(config.points, as_flow_parameter(s, model.dim_d))
    return float(effective_weights(config) @ K)


def _line_search(
    model: KahlerModel,
    config: Configuration,
    s: Arr[f64],
    step: Arr[f64],
    slope: float,
    f0: float,
    opts: SolverOptions,
) -> float:
    # absorbs roundoff in F once the decrease drops below machine precision
    slack = 16.0 * _EPS * (1.0 + abs(f0))
    alpha = 1.0
    while alpha >= opts.min_step:
        f = total_potential(model, config, s + alpha * step)
        if f <= f0 + opts.armijo * alpha * slope + slack:
            return alpha
        alpha = alpha * opts.backtrack
    return opts.min_step


def _damped_newton(
    model: KahlerModel,
    config: Configuration,
    opts: SolverOptions,
    s0: Union[FlowParameter, None] = None,
) -> SolveReport:
    opts.validate()
    eff = effective_weights(config)
    tol_pd = opts.tol_pd if opts.tol_pd is not None else default_tol_pd(model, eff)
    Q = model.nontrivial_basis
    r = Q.shape[1]
    s = np.zeros(model.dim_d, dtype=f64) if s0 is None else as_flow_parameter(s0, model.dim_d)
    history: List[float] = []
    status = SolveStatus.MAX_ITER
    lam = float("nan")
    steps = 0
    for k in range(opts.max_iter + 1):
        g = s_map(model, config, s)
        res = float(norm(g))
        history.append(res)
        if res <= opts.tol_res:
            status = SolveStatus.BALANCED
            break
        if norm(s) > opts.divergence_bound:
            status = SolveStatus.DIVERGED_UNSTABLE
            break
        if k == opts.max_iter:
            break
        H = Q.T @ s_jacobian(model, config, s) @ Q
        spectrum = eigh(H, eigvals_only=True)
        lam = float(spectrum[0])
        # above rounding level, also for tol_pd = 0
        floor = max(tol_pd, 64.0 * r * _EPS * max(1.0, float(abs(spectrum[-1]))))
        if lam <= tol_pd or lam < floor:
            if k == 0 and lam <= tol_pd:
                # a field vanishing at every point keeps vanishing along the flow
                status = SolveStatus.SINGULAR_JACOBIAN
                break
            # flat along a divergent ray, shift the spectrum up to the floor
            H = H + (floor - lam) * np.eye(r)
        step = -Q @ cho_solve(cho_factor(H), Q.T @ g)
        f0 = total_potential(model, config, s)
        alpha = _line_search(model, config, s, step, float(g @ step), f0, opts)
        s = s + alpha * step
        steps = steps + 1
        logger.debug(
            "newton %d: residual=%.3e lambda_min=%.3e alpha=%.3e |s|=%.3e",
            k, res, lam, alpha, norm(s),
        )
    logger.debug("balancing solve finished: %s after %d steps", status.value, steps)
    return SolveReport(
        status=status,
        s_star=s,
        flowed_points=flow_configuration(model, config, s),
        residual_history=history,
        newton_steps=steps,
        min_eigenvalue=lam,
    )


def solve_balance(
    model: KahlerModel,
    config: Configuration,
    opts: Union[SolverOptions, None] = None,
    s0: Union[FlowParameter, None] = None,
) -> SolveReport:
    """Find s with s_map(s) = 0 by minimizing the convex total Kempf-Ness potential

    Damped Newton with Armijo backtracking in the subspace of nontrivial directions.
    SINGULAR_JACOBIAN when the Hessian is degenerate at the start (a field vanishes
    at every point), DIVERGED_UNSTABLE when |s| leaves the divergence bound.
    """
    return _damped_newton(model, config, opts if opts else SolverOptions(), s0)


def rebalance_orbit(
    model: KahlerModel,
    config: Configuration,
    opts: Union[SolverOptions, None] = None,
) -> SolveReport:
    """Move the configuration along its complexified torus orbit to a balanced one

    When BALANCED, report.flowed_configuration(config) is the balanced representative
    q_j = flow(p_j, s*).
    DIVERGED_UNSTABLE marks configurations outside the orbit of the moment-map zero set.
    """
    return _damped_newton(model, config, opts if opts else SolverOptions())
