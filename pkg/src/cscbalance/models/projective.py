import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64, einsum
from scipy.linalg import null_space
from scipy.special import logsumexp, softmax
from cscbalance._exceptions import DomainError
from cscbalance._interfaces import KahlerModel, as_point_batch
from cscbalance.halgebra.algebra import SymmetryBasis, as_flow_parameter


class ProjectiveTorusModel(KahlerModel):
    """Complex projective space CP^m with the Fubini-Study metric and its diagonal torus

    Points are the squared moduli w_k = |z_k|^2 of homogeneous coordinates, k = 0..m,
    so a point is a nonnegative (m+1)-vector defined up to scale. With x = w / sum(w):

        moment_at(w)_k = x_k - 1/(m+1)                    (averages to zero over CP^m)
        gram_at(w)_jk  = x_j delta_jk - x_j x_k            (softmax Jacobian)
        flow(w, s)_k   = w_k exp(2 s_k), renormalized
        kempf_ness_at(w, s) = 1/2 log sum_k w_k exp(2 s_k) - sum(s)/(m+1)

    The constant direction s = (1, ..., 1) acts trivially; kappa = 2.

    Attributes:
        m (int): complex dimension
        basis (SymmetryBasis): d = m + 1 coordinate rotations
    """

    __slots__ = ["m", "basis", "_nontrivial", "_identity"]
    m: int
    basis: SymmetryBasis

    def __init__(self, m: int) -> None:
        if int(m) != m or m < 2:
            raise DomainError(f"complex dimension must be an integer >= 2, got {m}")
        self.m = int(m)
        self.basis = SymmetryBasis(self.m + 1, [f"rot_{k}" for k in range(self.m + 1)])
        self._nontrivial = null_space(np.ones((1, self.m + 1), dtype=f64))
        self._identity = np.eye(self.m + 1, dtype=f64)

    @property
    def point_dim(self) -> int:
        return self.m + 1

    @property
    def kappa(self) -> float:
        return 2.0

    @property
    def span_dim(self) -> int:
        return self.m

    @property
    def nontrivial_basis(self) -> Arr[f64]:
        return self._nontrivial

    @property
    def gram_scale(self) -> float:
        return 1.0

    @property
    def complex_dim(self) -> int:
        return self.m

    def canonical(self, points: Arr[f64]) -> Arr[f64]:
        w, single = as_point_batch(points, self.point_dim)
        if not np.all(np.isfinite(w)):
            raise DomainError("squared moduli must be finite")
        if np.any(w < 0.0):
            raise DomainError(f"squared moduli must be nonnegative, got {w[np.any(w < 0.0, axis=1)]}")
        total = w.sum(axis=1)
        if np.any(total <= 0.0):
            raise DomainError("a point needs at least one nonzero homogeneous coordinate")
        x = w / total[:, np.newaxis]
        return x[0] if single else x

    def _log_moduli(self, points: Arr[f64]):
        x = self.canonical(points)
        with np.errstate(divide="ignore"):
            return np.log(x)

    def moment_at(self, points: Arr[f64]) -> Arr[f64]:
        return self.canonical(points) - 1.0 / (self.m + 1)

    def gram_at(self, points: Arr[f64]) -> Arr[f64]:
        x, single = as_point_batch(self.canonical(points), self.point_dim)
        G = einsum("ni,ij->nij", x, self._identity) - einsum("ni,nj->nij", x, x)
        return G[0] if single else G

    def flow(self, points: Arr[f64], s: Arr[f64]) -> Arr[f64]:
        s = as_flow_parameter(s, self.dim_d)
        return softmax(2.0 * s + self._log_moduli(points), axis=-1)

    def kempf_ness_at(self, points: Arr[f64], s: Arr[f64]) -> Arr[f64]:
        s = as_flow_parameter(s, self.dim_d)
        # logsumexp shifts by max(2 s_k + log w_k) before exponentiating
        lse = logsumexp(2.0 * s + self._log_moduli(points), axis=-1)
        return 0.5 * lse - s.sum() / (self.m + 1)

    def sample_points(self, rng: np.random.Generator, n: int) -> Arr[f64]:
        """Flat Dirichlet, i.e. the Fubini-Study volume pushed to the moment simplex"""
        return rng.dirichlet(np.ones(self.m + 1, dtype=f64), size=n)

    def descriptor(self) -> dict:
        return {"type": "projective_torus", "m": self.m}
