from typing import Union
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64
from cscbalance._exceptions import DomainError
from cscbalance._interfaces import KahlerModel, MomentProfile, as_point_batch
from cscbalance.halgebra.algebra import SymmetryBasis, as_flow_parameter
from cscbalance.models.profiles import CallableProfile, make_profile


_ONE: Arr[f64] = np.ones((1, 1), dtype=f64)


class LeBrunProfileModel(KahlerModel):
    """Momentum-construction metric on P(L + O) with the Euler field as only symmetry

    A point is reduced to its height z in [a_minus, a_plus], the value of the
    normalized Hamiltonian of the Euler field; g(X, X) is constant on level sets,
    so the fibre point enters only through z and its base point is an opaque label
    carried by the Configuration. The zero and infinity sections sit at the
    endpoints, where psi and the field vanish. d = 1, kappa = 1.

    Attributes:
        a_minus (float): min height, < 0
        a_plus (float): max height, > 0
        profile (MomentProfile): psi with psi(a_minus) = psi(a_plus) = 0
    """

    __slots__ = ["a_minus", "a_plus", "profile", "basis", "_gram_scale"]
    a_minus: float
    a_plus: float
    profile: MomentProfile
    basis: SymmetryBasis

    def __init__(
        self,
        a_minus: float = -1.0,
        a_plus: float = 1.0,
        profile: Union[str, MomentProfile] = "quadratic",
    ) -> None:
        if isinstance(profile, str):
            profile = make_profile(profile, a_minus, a_plus)
        elif (profile.a_minus, profile.a_plus) != (a_minus, a_plus):
            raise DomainError(
                f"profile lives on [{profile.a_minus}, {profile.a_plus}], model on [{a_minus}, {a_plus}]"
            )
        self.a_minus = float(a_minus)
        self.a_plus = float(a_plus)
        self.profile = profile
        self.basis = SymmetryBasis(1, ["euler"])
        grid = np.linspace(self.a_minus, self.a_plus, 1001)
        self._gram_scale = float(np.max(profile.psi(grid)))

    @property
    def point_dim(self) -> int:
        return 1

    @property
    def kappa(self) -> float:
        return 1.0

    @property
    def span_dim(self) -> int:
        return 1

    @property
    def nontrivial_basis(self) -> Arr[f64]:
        return _ONE

    @property
    def gram_scale(self) -> float:
        return self._gram_scale

    def canonical(self, points: Arr[f64]) -> Arr[f64]:
        z, single = as_point_batch(points, 1)
        if not np.all(np.isfinite(z)):
            raise DomainError("heights must be finite")
        if np.any(z < self.a_minus) or np.any(z > self.a_plus):
            raise DomainError(f"heights must lie in [{self.a_minus}, {self.a_plus}], got {z.ravel()}")
        return z[0] if single else z

    def is_interior(self, height: float) -> bool:
        return self.a_minus < height < self.a_plus

    def moment_at(self, points: Arr[f64]) -> Arr[f64]:
        return np.array(self.canonical(points), dtype=f64)

    def gram_at(self, points: Arr[f64]) -> Arr[f64]:
        z = self.canonical(points)
        return self.profile.psi(z)[..., np.newaxis]

    def flow(self, points: Arr[f64], s: Arr[f64]) -> Arr[f64]:
        t = as_flow_parameter(s, 1)[0]
        return self.profile.flow(self.canonical(points), t)

    def kempf_ness_at(self, points: Arr[f64], s: Arr[f64]) -> Arr[f64]:
        t = as_flow_parameter(s, 1)[0]
        return self.profile.potential(self.canonical(points), t)[..., 0]

    def sample_points(self, rng: np.random.Generator, n: int) -> Arr[f64]:
        """Uniform heights on the open interval shrunk by 1e-3 of its width at each end"""
        margin = 1.0e-3 * (self.a_plus - self.a_minus)
        return rng.uniform(self.a_minus + margin, self.a_plus - margin, size=(n, 1))

    def descriptor(self) -> dict:
        if isinstance(self.profile, CallableProfile):
            raise DomainError("a callable profile has no JSON descriptor")
        return {
            "type": "lebrun_profile",
            "a_minus": self.a_minus,
            "a_plus": self.a_plus,
            "profile": self.profile.name,
        }
