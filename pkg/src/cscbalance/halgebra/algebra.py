from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Union
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64, einsum
from cscbalance._exceptions import ConfigurationError, ContractViolation

# Elements of h* and flow parameters are plain float arrays of length d.
MomentVector = Arr[f64]
FlowParameter = Arr[f64]
EffectiveWeights = Arr[f64]
PointPredicate = Callable[[Arr[f64], Arr[f64], float], bool]

POINT_TOL: float = 1.0e-12


def _frozen(arr: Arr[f64]) -> Arr[f64]:
    arr.flags.writeable = False
    return arr


def coordinate_point_eq(p: Arr[f64], q: Arr[f64], tol: float = POINT_TOL) -> bool:
    return bool(np.max(np.abs(p - q)) <= tol)


@dataclass(init=False)
class SymmetryBasis:
    """Basis of the torus part of the algebra of hamiltonian holomorphic fields

    Attributes:
        dim_d (int): real dimension d
        labels (Tuple[str, ...]): one identifier per basis field
    """

    __slots__ = ["dim_d", "labels"]
    dim_d: int
    labels: Tuple[str, ...]

    def __init__(self, dim_d: int, labels: Union[Sequence[str], None] = None) -> None:
        if int(dim_d) < 1:
            raise ContractViolation(f"dim_d must be >= 1, got {dim_d}")
        if labels is None:
            labels = [f"xi_{k}" for k in range(dim_d)]
        labels = tuple(str(l) for l in labels)
        if len(labels) != dim_d:
            raise ContractViolation(f"expected {dim_d} labels, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ContractViolation(f"basis labels must be unique: {labels}")
        self.dim_d = int(dim_d)
        self.labels = labels


def as_flow_parameter(s: Union[Arr[f64], Sequence[float], float], dim_d: int) -> FlowParameter:
    res = np.atleast_1d(np.asarray(s, dtype=f64)).copy()
    if res.shape != (dim_d,):
        raise ContractViolation(f"flow parameter must have shape ({dim_d},), got {res.shape}")
    if not np.all(np.isfinite(res)):
        raise ContractViolation(f"flow parameter has non-finite entries: {res}")
    return res


def as_moment_vector(v: Union[Arr[f64], Sequence[float]], dim_d: int) -> MomentVector:
    res = np.atleast_1d(np.asarray(v, dtype=f64)).copy()
    if res.shape != (dim_d,):
        raise ContractViolation(f"moment vector must have shape ({dim_d},), got {res.shape}")
    if not np.all(np.isfinite(res)):
        raise ContractViolation(f"moment vector has non-finite entries: {res}")
    return res


@dataclass(init=False)
class Configuration:
    """n distinct model points with positive weights on a manifold of complex dimension m

    Attributes:
        m (int): complex dimension, m >= 2
        points (Arr[f64, (n, k)]): model coordinates, one row per point
        weights (Arr[f64, (n,)]): asymptotic weights a_j > 0
        labels (Tuple[str, ...]): opaque per-point tags (base fibre for fibred models);
            points with different labels are never identified
    """

    __slots__ = ["m", "points", "weights", "labels"]
    m: int
    points: Arr[f64]
    weights: Arr[f64]
    labels: Tuple[str, ...]

    def __init__(
        self,
        m: int,
        points: Union[Arr[f64], Sequence[Sequence[float]]],
        weights: Union[Arr[f64], Sequence[float]],
        labels: Union[Sequence[str], None] = None,
        point_eq: Union[PointPredicate, None] = None,
        tol: float = POINT_TOL,
    ) -> None:
        if int(m) != m or m < 2:
            raise ConfigurationError(f"complex dimension m must be an integer >= 2, got {m}")
        pts = np.asarray(points, dtype=f64)
        if pts.ndim == 1:
            pts = pts[:, np.newaxis]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ConfigurationError(f"points must be a non-empty (n, k) array, got {pts.shape}")
        w = np.atleast_1d(np.asarray(weights, dtype=f64))
        if w.shape != (pts.shape[0],):
            raise ConfigurationError(f"{pts.shape[0]} points but weights of shape {w.shape}")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise ConfigurationError("points and weights must be finite")
        if np.any(w <= 0.0):
            raise ConfigurationError(f"weights must be strictly positive, got {w}")
        if labels is None:
            labels = [""] * pts.shape[0]
        labels = tuple(str(l) for l in labels)
        if len(labels) != pts.shape[0]:
            raise ConfigurationError(f"{pts.shape[0]} points but {len(labels)} labels")
        same = point_eq if point_eq else coordinate_point_eq
        for a in range(pts.shape[0]):
            for b in range(a + 1, pts.shape[0]):
                if labels[a] == labels[b] and same(pts[a], pts[b], tol):
                    raise ConfigurationError(
                        f"points {a} and {b} coincide; configuration lies on the diagonal"
                    )
        self.m = int(m)
        self.points = _frozen(pts.copy())
        self.weights = _frozen(w.copy())
        self.labels = labels

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def with_weights(self, weights: Union[Arr[f64], Sequence[float]]) -> "Configuration":
        # points were validated distinct already
        return Configuration(self.m, self.points, weights, self.labels, point_eq=_never_equal)

    def with_points(
        self, points: Arr[f64], point_eq: Union[PointPredicate, None] = None
    ) -> "Configuration":
        return Configuration(self.m, points, self.weights, self.labels, point_eq=point_eq)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "labels": list(self.labels),
        }


def _never_equal(p: Arr[f64], q: Arr[f64], tol: float) -> bool:
    return False


def effective_weights(config: Configuration) -> EffectiveWeights:
    """c_j = a_j^(m-1), the exponents entering the balancing condition"""
    return config.weights ** (config.m - 1)


def weighted_moment_sum(
    moments: Union[Arr[f64], List[MomentVector]], eff: EffectiveWeights
) -> MomentVector:
    M = np.asarray(moments, dtype=f64)
    c = np.atleast_1d(np.asarray(eff, dtype=f64))
    if M.ndim != 2:
        raise ContractViolation(f"moments must be an (n, d) array, got shape {M.shape}")
    if M.shape[0] != c.shape[0] or c.ndim != 1:
        raise ContractViolation(
            f"{M.shape[0]} moment vectors but {c.shape} effective weights"
        )
    return einsum("n,ni->i", c, M)
