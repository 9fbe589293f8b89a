import csv
import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Sequence, Tuple, Union
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64
from numpy.linalg import norm
from cscbalance._exceptions import ConfigurationError, DomainError, PreconditionError
from cscbalance._interfaces import KahlerModel
from cscbalance.balance.conditions import check_conditions
from cscbalance.balance.solver import SolverOptions, rebalance_orbit, s_map, solve_balance
from cscbalance.balance.two_point import target_heights, two_point_configuration
from cscbalance.halgebra.algebra import Configuration

logger = logging.getLogger(__name__)

MAX_EXEMPLARS: int = 5
INFEASIBLE: str = "INFEASIBLE"
DIAGONAL: str = "DIAGONAL"
WITNESSED: str = "WITNESSED"
NOT_WITNESSED: str = "NOT_WITNESSED"


@dataclass()
class ExperimentSpec:
    """Inputs of an experiment, recorded verbatim in its report

    Attributes:
        kind (str): certify, sample or surjectivity
        model (dict): model descriptor
        base (dict | None): base configuration, for experiments around one
        samples (int): number of samples or grid nodes
        seed (int | None): RNG seed, None for deterministic grids
        grid (int | None): nodes per weight axis
        radius (float | None): relative radius of the weight ball
        workers (int): threads evaluating samples
    """

    kind: str
    model: dict
    base: Union[dict, None] = None
    samples: int = 1
    seed: Union[int, None] = None
    grid: Union[int, None] = None
    radius: Union[float, None] = None
    workers: int = 1

    def validate(self) -> "ExperimentSpec":
        if int(self.samples) != self.samples or self.samples < 1:
            raise ConfigurationError(f"sample count must be a positive integer, got {self.samples}")
        if self.seed is not None and (int(self.seed) != self.seed or self.seed < 0):
            raise ConfigurationError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.grid is not None and (int(self.grid) != self.grid or self.grid < 1):
            raise ConfigurationError(f"grid must be a positive integer, got {self.grid}")
        if self.radius is not None and not (np.isfinite(self.radius) and self.radius > 0.0):
            raise ConfigurationError(f"radius must be positive, got {self.radius}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigurationError(f"workers must be a positive integer, got {self.workers}")
        return self

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "model": self.model,
            "base": self.base,
            "samples": self.samples,
            "seed": self.seed,
            "grid": self.grid,
            "radius": self.radius,
            "workers": self.workers,
        }


@dataclass()
class SampleRecord:
    __slots__ = ["index", "verdict", "residual", "s_norm", "iterations", "generic", "weights", "points"]
    index: int
    verdict: str
    residual: float
    s_norm: float
    iterations: int
    generic: Union[bool, None]
    weights: List[float]
    points: List[List[float]]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "verdict": self.verdict,
            "residual": self.residual,
            "s_norm": self.s_norm,
            "iterations": self.iterations,
            "generic": self.generic,
            "weights": self.weights,
            "points": self.points,
        }


@dataclass()
class ExperimentReport:
    """Per-sample verdicts of an experiment and their summary

    success_fraction is successes / samples exactly. wall_clock is measured but
    left out of to_dict unless asked for, so seeded reports are reproducible byte
    for byte.
    """

    spec: ExperimentSpec
    records: List[SampleRecord] = field(default_factory=list)
    success: str = "BALANCED"
    wall_clock: float = 0.0
    genericity_fraction: Union[float, None] = None
    certified_radius: Union[float, None] = None

    @property
    def seed(self) -> Union[int, None]:
        return self.spec.seed

    @property
    def verdicts(self) -> List[str]:
        return [r.verdict for r in self.records]

    @property
    def successes(self) -> int:
        return sum(1 for r in self.records if r.verdict == self.success)

    @property
    def success_fraction(self) -> float:
        return self.successes / len(self.records)

    @property
    def failures(self) -> List[SampleRecord]:
        return [r for r in self.records if r.verdict != self.success]

    @property
    def all_succeeded(self) -> bool:
        return self.successes == len(self.records)

    def to_dict(self, timing: bool = False) -> dict:
        res = {
            "spec": self.spec.to_dict(),
            "seed": self.seed,
            "samples": len(self.records),
            "successes": self.successes,
            "success_fraction": self.success_fraction,
            "genericity_fraction": self.genericity_fraction,
            "certified_radius": self.certified_radius,
            "verdicts": self.verdicts,
            "failure_exemplars": [r.to_dict() for r in self.failures[:MAX_EXEMPLARS]],
        }
        if timing:
            res["wall_clock"] = self.wall_clock
        return res


def write_trace(report: ExperimentReport, path: str) -> None:
    """One CSV row per sample: index, verdict, residual, |s|, iterations"""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "verdict", "residual", "s_norm", "iterations"])
        for r in report.records:
            writer.writerow([r.index, r.verdict, format(r.residual, ".17g"), format(r.s_norm, ".17g"), r.iterations])


def _run(evaluate: Callable[[int], SampleRecord], count: int, workers: int) -> List[SampleRecord]:
    if workers == 1:
        return [evaluate(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, range(count)))


def _solve_record(
    index: int, model: KahlerModel, config: Configuration, opts: SolverOptions, rebalance: bool,
    generic: Union[bool, None] = None,
) -> SampleRecord:
    if rebalance:
        report = rebalance_orbit(model, config, opts)
    else:
        report = solve_balance(model, config, opts)
    return SampleRecord(
        index=index,
        verdict=report.status.value,
        residual=report.residual,
        s_norm=float(norm(report.s_star)),
        iterations=report.newton_steps,
        generic=generic,
        weights=config.weights.tolist(),
        points=config.points.tolist(),
    )


def _describe(model: KahlerModel) -> dict:
    try:
        return model.descriptor()
    except DomainError:
        return {"type": type(model).__name__, "profile": "callable"}


def _grid_factors(radius: float, grid: int) -> Arr[f64]:
    if grid == 1:
        return np.ones(1, dtype=f64)
    return np.linspace(1.0 - radius, 1.0 + radius, grid)


def _certified_radius(deviations: Arr[f64], ok: Arr[np.bool_], radius: float) -> float:
    """Largest grid deviation below the smallest failing one"""
    if np.all(ok):
        return radius
    worst = np.min(deviations[~ok])
    inside = deviations[deviations < worst]
    return float(np.max(inside)) if inside.size else 0.0


def certify_weight_openness(
    model: KahlerModel,
    config: Configuration,
    radius: float = 0.1,
    grid: int = 9,
    opts: Union[SolverOptions, None] = None,
    workers: int = 1,
) -> ExperimentReport:
    """Solve the balancing equation from the base points at every weight on a grid

    The grid is the product of linspace(1 - radius, 1 + radius, grid) relative
    factors over the n base weights. Nodes with a nonpositive weight are
    INFEASIBLE. The certified radius is the largest relative deviation (max over
    weights of |factor - 1|) below which every node balanced.
    """
    spec = ExperimentSpec(
        "certify", _describe(model), config.to_dict(), int(grid) ** config.n,
        None, grid, radius, workers,
    ).validate()
    opts = (opts if opts else SolverOptions()).validate()
    base = check_conditions(model, config, opts.tol_res, opts.tol_pd)
    if not base.all_hold:
        failed = [k for k in ("genericity", "balancing", "general_position") if not getattr(base, k)]
        raise PreconditionError(f"base configuration fails {', '.join(failed)}")
    if config.n < model.span_dim + 1:
        logger.warning(
            "%d points with a %d-dimensional moment span, the weight ball may be degenerate",
            config.n, model.span_dim,
        )
    factors = _grid_factors(radius, int(grid))
    nodes = [np.array(f, dtype=f64) for f in itertools.product(factors, repeat=config.n)]

    def evaluate(i: int) -> SampleRecord:
        w = config.weights * nodes[i]
        if np.any(w <= 0.0):
            return SampleRecord(i, INFEASIBLE, float("nan"), float("nan"), 0, None, w.tolist(), config.points.tolist())
        return _solve_record(i, model, config.with_weights(w), opts, rebalance=False)

    start = time.perf_counter()
    records = _run(evaluate, len(nodes), int(workers))
    elapsed = time.perf_counter() - start
    deviations = np.array([np.max(np.abs(f - 1.0)) for f in nodes])
    ok = np.array([r.verdict == "BALANCED" for r in records])
    report = ExperimentReport(
        spec, records, wall_clock=elapsed, certified_radius=_certified_radius(deviations, ok, radius),
    )
    logger.info(
        "certify: %d/%d grid nodes balanced, certified radius %.6g",
        report.successes, len(records), report.certified_radius,
    )
    return report


def sample_point_density(
    model: KahlerModel,
    weights: Union[Sequence[float], Arr[f64], float],
    n: int,
    samples: int = 1000,
    seed: int = 0,
    m: Union[int, None] = None,
    opts: Union[SolverOptions, None] = None,
    workers: int = 1,
) -> ExperimentReport:
    """Rebalance random n-point configurations and count how many reach BALANCED

    Sample i draws its points from default_rng([seed, i]) with the model's sampling
    measure, so the verdict sequence does not depend on the number of workers.
    Points on the diagonal are recorded as DIAGONAL. genericity_fraction counts
    samples whose moment vectors span.
    """
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    n = int(n)
    try:
        w = np.broadcast_to(np.asarray(weights, dtype=f64), (n,)).copy()
    except ValueError as err:
        raise ConfigurationError(f"weights do not match n = {n}: {err}") from err
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ConfigurationError(f"weights must be finite and positive, got {w}")
    m = m if m is not None else (model.complex_dim or 2)
    spec = ExperimentSpec(
        "sample", _describe(model), {"m": m, "n": n, "weights": w.tolist()},
        samples, seed, None, None, workers,
    ).validate()
    opts = (opts if opts else SolverOptions()).validate()
    if n < model.span_dim:
        logger.warning("%d points cannot span a %d-dimensional moment space", n, model.span_dim)
    labels = [f"p{j}" for j in range(n)]

    def evaluate(i: int) -> SampleRecord:
        rng = np.random.default_rng([int(seed), i])
        pts = model.sample_points(rng, n)
        try:
            config = model.configuration(pts, w, m, labels=labels)
        except ConfigurationError:
            return SampleRecord(i, DIAGONAL, float("nan"), float("nan"), 0, False, w.tolist(), pts.tolist())
        generic = check_conditions(model, config, opts.tol_res, opts.tol_pd).genericity
        return _solve_record(i, model, config, opts, rebalance=True, generic=generic)

    start = time.perf_counter()
    records = _run(evaluate, int(samples), int(workers))
    elapsed = time.perf_counter() - start
    generic = sum(1 for r in records if r.generic) / len(records)
    report = ExperimentReport(spec, records, wall_clock=elapsed, genericity_fraction=generic)
    logger.info(
        "sample: %d/%d balanced, genericity fraction %.4f",
        report.successes, len(records), generic,
    )
    return report


def witness_weight_surjectivity(
    model: KahlerModel,
    weight_pairs: Iterable[Tuple[float, float]],
    m: int = 2,
) -> ExperimentReport:
    """For each weight pair, place two points at the target heights and check all conditions

    Every positive pair is WITNESSED on a one-field model, so the projection of
    admissible (points, weights) to the weights covers the whole positive quadrant.
    """
    if model.point_dim != 1 or model.dim_d != 1:
        raise DomainError("weight surjectivity is witnessed on a model with a single symmetry field")
    pairs = [(float(a1), float(a2)) for a1, a2 in weight_pairs]
    spec = ExperimentSpec("surjectivity", _describe(model), {"m": m}, max(len(pairs), 1)).validate()
    if not pairs:
        raise ConfigurationError("no weight pairs given")
    records = []
    start = time.perf_counter()
    for i, (a1, a2) in enumerate(pairs):
        z1, z2 = target_heights(model.a_minus, model.a_plus, a1, a2, m)
        config = two_point_configuration(model, z1, z2, a1, a2, m)
        cond = check_conditions(model, config)
        records.append(SampleRecord(
            i, WITNESSED if cond.all_hold else NOT_WITNESSED, cond.residual, 0.0, 0,
            cond.genericity, [a1, a2], config.points.tolist(),
        ))
    report = ExperimentReport(spec, records, success=WITNESSED, wall_clock=time.perf_counter() - start)
    logger.info("surjectivity: %d/%d weight pairs witnessed", report.successes, len(records))
    return report


@dataclass()
class ResidualFloor:
    """Smallest |s_map| seen on a grid over the ball |s| <= radius"""

    __slots__ = ["min_residual", "s_at_min", "points_scanned", "radius"]
    min_residual: float
    s_at_min: Arr[f64]
    points_scanned: int
    radius: float

    def to_dict(self) -> dict:
        return {
            "min_residual": self.min_residual,
            "s_at_min": self.s_at_min.tolist(),
            "points_scanned": self.points_scanned,
            "radius": self.radius,
        }


def scan_residual_floor(
    model: KahlerModel,
    config: Configuration,
    radius: float = 10.0,
    points_per_axis: int = 21,
) -> ResidualFloor:
    """Grid scan of |s_map(s)| in the nontrivial directions, s = Q y with |y| <= radius

    A floor bounded away from zero certifies that no flow parameter in the ball balances.
    """
    if not radius > 0.0:
        raise ConfigurationError(f"radius must be positive, got {radius}")
    if int(points_per_axis) < 2:
        raise ConfigurationError(f"points_per_axis must be >= 2, got {points_per_axis}")
    Q = model.nontrivial_basis
    axis = np.linspace(-radius, radius, int(points_per_axis))
    best, best_s, count = np.inf, np.zeros(model.dim_d, dtype=f64), 0
    for y in itertools.product(axis, repeat=Q.shape[1]):
        y = np.array(y, dtype=f64)
        if norm(y) > radius:
            continue
        s = Q @ y
        res = float(norm(s_map(model, config, s)))
        count = count + 1
        if res < best:
            best, best_s = res, s
    logger.info("residual floor %.6g over %d grid points", best, count)
    return ResidualFloor(best, best_s, count, float(radius))
