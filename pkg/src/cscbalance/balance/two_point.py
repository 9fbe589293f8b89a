import logging
from typing import List, Tuple, Union
import numpy as np
from numpy import float64 as f64
from scipy.optimize import bisect
from cscbalance._exceptions import ConfigurationError, DomainError
from cscbalance._interfaces import KahlerModel
from cscbalance.balance.solver import (
    SolverOptions,
    SolveReport,
    SolveStatus,
    flow_configuration,
    s_jacobian,
    s_map,
)
from cscbalance.halgebra.algebra import Configuration

logger = logging.getLogger(__name__)


def target_heights(
    a_minus: float, a_plus: float, a1: float, a2: float, m: int
) -> Tuple[float, float]:
    """Heights of a balanced pair with weights (a1, a2) on [a_minus, a_plus]

    z1 = a_minus a_plus c2 / sqrt((a_minus c1)^2 + (a_plus c2)^2)
    z2 = -a_plus a_minus c1 / sqrt((a_minus c1)^2 + (a_plus c2)^2)

    with c_j = a_j^(m-1). Then a_minus < z1 < 0 < z2 < a_plus and c1 z1 + c2 z2 = 0.
    """
    if not (np.isfinite(a_minus) and np.isfinite(a_plus) and a_minus < 0.0 < a_plus):
        raise DomainError(f"need a_minus < 0 < a_plus, got [{a_minus}, {a_plus}]")
    if not (a1 > 0.0 and a2 > 0.0 and np.isfinite(a1) and np.isfinite(a2)):
        raise ConfigurationError(f"weights must be finite and positive, got ({a1}, {a2})")
    if int(m) != m or m < 2:
        raise ConfigurationError(f"complex dimension m must be an integer >= 2, got {m}")
    c1 = float(a1) ** (int(m) - 1)
    c2 = float(a2) ** (int(m) - 1)
    k = a_minus * a_plus / np.hypot(a_minus * c1, a_plus * c2)
    z1 = float(np.clip(k * c2, a_minus, 0.0))
    z2 = float(np.clip(-k * c1, 0.0, a_plus))
    return z1, z2


def two_point_configuration(
    model: KahlerModel, z1: float, z2: float, a1: float, a2: float, m: int
) -> Configuration:
    """Two points on different fibres, so equal heights are allowed"""
    if model.dim_d != 1 or model.point_dim != 1:
        raise DomainError("two-point configurations need a model with a single symmetry field")
    return model.configuration([[z1], [z2]], [a1, a2], m, labels=["p1", "p2"])


def bisect_two_points(
    model: KahlerModel,
    z1: float,
    z2: float,
    a1: float,
    a2: float,
    m: int,
    opts: Union[SolverOptions, None] = None,
) -> SolveReport:
    """Balance two points under the Euler field by bisection in the flow time

    r(t) = c1 z1(t) + c2 z2(t) has derivative c1 psi(z1(t)) + c2 psi(z2(t)) >= 0,
    so a bracket found by doubling |t| on the side where r changes sign holds the
    unique root. Both heights on one endpoint section keep r constant, reported
    as DIVERGED_UNSTABLE, as is any pair with no sign change inside the divergence
    bound. newton_steps counts bisection iterations.
    """
    opts = (opts if opts else SolverOptions()).validate()
    config = two_point_configuration(model, z1, z2, a1, a2, m)
    history: List[float] = []

    def residual(t: float) -> float:
        val = float(s_map(model, config, np.array([t], dtype=f64))[0])
        history.append(abs(val))
        return val

    def report(status: SolveStatus, t: float, steps: int) -> SolveReport:
        s = np.array([t], dtype=f64)
        logger.debug("two-point bisection finished: %s at t=%.17g", status.value, t)
        return SolveReport(
            status=status,
            s_star=s,
            flowed_points=flow_configuration(model, config, s),
            residual_history=history,
            newton_steps=steps,
            min_eigenvalue=float(s_jacobian(model, config, s)[0, 0]),
        )

    r0 = residual(0.0)
    if abs(r0) <= opts.tol_res:
        return report(SolveStatus.BALANCED, 0.0, 0)
    # r is nondecreasing, the root lies on the side opposite to the sign of r(0)
    direction = -1.0 if r0 > 0.0 else 1.0
    near, far = 0.0, 1.0
    while True:
        r_far = residual(direction * far)
        if abs(r_far) <= opts.tol_res:
            return report(SolveStatus.BALANCED, direction * far, 0)
        if np.sign(r_far) != np.sign(r0):
            break
        if far >= opts.divergence_bound:
            return report(SolveStatus.DIVERGED_UNSTABLE, direction * far, 0)
        near, far = far, min(2.0 * far, opts.divergence_bound)
    lo, hi = sorted((direction * near, direction * far))
    logger.debug("two-point bracket [%.6g, %.6g]", lo, hi)
    t, info = bisect(
        residual, lo, hi, xtol=opts.bisect_xtol, maxiter=opts.max_iter,
        full_output=True, disp=False,
    )
    final = residual(t)
    if abs(final) <= opts.tol_res:
        status = SolveStatus.BALANCED
    else:
        status = SolveStatus.MAX_ITER
    return report(status, float(t), int(info.iterations))
