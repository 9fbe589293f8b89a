import abc
from typing import Sequence, Union
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64
from cscbalance._exceptions import ConfigurationError, DomainError
from cscbalance.halgebra.algebra import (
    POINT_TOL,
    Configuration,
    SymmetryBasis,
)


class KahlerModel(abc.ABC):
    """Manifold with a torus of hamiltonian Killing fields

    Every evaluation takes a batch of points of shape (n, point_dim), or a single
    point of shape (point_dim,), and a flow parameter s of shape (d,).

    Methods:
        moment_at(points) : normalized Hamiltonians, shape (n, d)
        gram_at(points) : g(X_j, X_k) at each point, shape (n, d, d)
        flow(points, s) : imaginary-direction flow of the torus
        kempf_ness_at(points, s) : convex potential, s-gradient is moment_at(flow(points, s))
        point_eq(p, q, tol) : point identity on the manifold
    """

    basis: SymmetryBasis

    @property
    def dim_d(self) -> int:
        return self.basis.dim_d

    @property
    @abc.abstractmethod
    def point_dim(self) -> int:
        pass

    @property
    @abc.abstractmethod
    def kappa(self) -> float:
        """d/de moment_at(flow(p, e*e_k)) at e=0 equals kappa * gram_at(p)[:, k]"""
        pass

    @property
    @abc.abstractmethod
    def span_dim(self) -> int:
        """Dimension of the space the moment vectors live in"""
        pass

    @property
    @abc.abstractmethod
    def nontrivial_basis(self) -> Arr[f64]:
        """Orthonormal columns spanning the directions that act nontrivially, shape (d, r)"""
        pass

    @property
    @abc.abstractmethod
    def gram_scale(self) -> float:
        """Typical size of gram_at, sets the relative nondegeneracy tolerance"""
        pass

    @property
    def complex_dim(self) -> Union[int, None]:
        """Complex dimension fixed by the model, None if any m >= 2 is allowed"""
        return None

    @abc.abstractmethod
    def canonical(self, points: Arr[f64]) -> Arr[f64]:
        """Validate points and bring them to normal form, raises DomainError"""
        pass

    @abc.abstractmethod
    def moment_at(self, points: Arr[f64]) -> Arr[f64]:
        pass

    @abc.abstractmethod
    def gram_at(self, points: Arr[f64]) -> Arr[f64]:
        pass

    @abc.abstractmethod
    def flow(self, points: Arr[f64], s: Arr[f64]) -> Arr[f64]:
        pass

    @abc.abstractmethod
    def kempf_ness_at(self, points: Arr[f64], s: Arr[f64]) -> Arr[f64]:
        pass

    @abc.abstractmethod
    def sample_points(self, rng: np.random.Generator, n: int) -> Arr[f64]:
        """n random points from the model's documented sampling measure"""
        pass

    @abc.abstractmethod
    def descriptor(self) -> dict:
        """JSON descriptor that model_from_descriptor maps back to this model"""
        pass

    def point_eq(self, p: Arr[f64], q: Arr[f64], tol: float = POINT_TOL) -> bool:
        a, b = self.canonical(p), self.canonical(q)
        return bool(np.max(np.abs(a - b)) <= tol)

    def configuration(
        self,
        points: Union[Arr[f64], Sequence[Sequence[float]]],
        weights: Union[Arr[f64], Sequence[float]],
        m: Union[int, None] = None,
        labels: Union[Sequence[str], None] = None,
        tol: float = POINT_TOL,
    ) -> Configuration:
        if m is None:
            m = self.complex_dim
            if m is None:
                raise ConfigurationError("this model needs the complex dimension m")
        if self.complex_dim is not None and m != self.complex_dim:
            raise ConfigurationError(
                f"model has complex dimension {self.complex_dim}, configuration says {m}"
            )
        pts = np.asarray(points, dtype=f64)
        if pts.ndim == 1 and self.point_dim == 1:
            pts = pts[:, np.newaxis]
        if pts.ndim != 2 or pts.shape[1] != self.point_dim:
            raise DomainError(f"points must have shape (n, {self.point_dim}), got {pts.shape}")
        pts = self.canonical(pts)
        return Configuration(m, pts, weights, labels, point_eq=self.point_eq, tol=tol)


class MomentProfile(abc.ABC):
    """Profile psi >= 0 on [a_minus, a_plus] of a momentum-construction metric

    psi(height) is g(X, X) on the level set of the height, and the imaginary flow
    of the Euler field solves d(height)/dt = psi(height).

    Methods:
        psi(z) : profile values
        flow(z, t) : heights after flowing for time t
        potential(z, t) : integral of the flowed height over [0, t]
    """

    a_minus: float
    a_plus: float

    @property
    @abc.abstractmethod
    def name(self) -> str:
        pass

    @abc.abstractmethod
    def psi(self, z: Arr[f64]) -> Arr[f64]:
        pass

    @abc.abstractmethod
    def flow(self, z: Arr[f64], t: float) -> Arr[f64]:
        pass

    @abc.abstractmethod
    def potential(self, z: Arr[f64], t: float) -> Arr[f64]:
        pass


def as_point_batch(points: Arr[f64], point_dim: int):
    """Returns the points as an (n, point_dim) array and whether a single point was given"""
    p = np.asarray(points, dtype=f64)
    if p.ndim == 0 and point_dim == 1:
        return p.reshape(1, 1), True
    elif p.shape == (point_dim,):
        return p[np.newaxis, :], True
    elif p.ndim == 2 and p.shape[1] == point_dim:
        return p, False
    else:
        raise DomainError(f"points must have shape ({point_dim},) or (n, {point_dim}), got {p.shape}")
