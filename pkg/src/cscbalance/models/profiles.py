from typing import Callable, Tuple
import numpy as np
from numpy.typing import NDArray as Arr
from numpy import float64 as f64, pi, log
from cscbalance._exceptions import DomainError
from cscbalance._interfaces import MomentProfile


_LOG2: float = float(log(2.0))


def _log_cosh(x: Arr[f64]) -> Arr[f64]:
    return np.logaddexp(x, -x) - _LOG2


def _check_interval(a_minus: float, a_plus: float) -> None:
    if not (np.isfinite(a_minus) and np.isfinite(a_plus)):
        raise DomainError("profile endpoints must be finite")
    if not (a_minus < 0.0 < a_plus):
        raise DomainError(
            f"need a_minus < 0 < a_plus (the height averages to zero), got [{a_minus}, {a_plus}]"
        )


class QuadraticProfile(MomentProfile):
    """psi(z) = (z - a_minus)(a_plus - z)/2, i.e. (1 - z^2)/2 on [-1, 1]

    The flow is logistic, z(t) = mid + h tanh(artanh(u0) + h t/2) with
    h = (a_plus - a_minus)/2 and u0 = (z0 - mid)/h.
    """

    __slots__ = ["a_minus", "a_plus", "mid", "h"]
    a_minus: float
    a_plus: float
    mid: float
    h: float

    def __init__(self, a_minus: float = -1.0, a_plus: float = 1.0) -> None:
        _check_interval(a_minus, a_plus)
        self.a_minus = float(a_minus)
        self.a_plus = float(a_plus)
        self.mid = 0.5 * (self.a_plus + self.a_minus)
        self.h = 0.5 * (self.a_plus - self.a_minus)

    @property
    def name(self) -> str:
        return "quadratic"

    def psi(self, z: Arr[f64]) -> Arr[f64]:
        return 0.5 * (z - self.a_minus) * (self.a_plus - z)

    def _theta(self, z: Arr[f64]) -> Arr[f64]:
        u0 = np.clip((z - self.mid) / self.h, -1.0, 1.0)
        with np.errstate(divide="ignore"):
            return np.arctanh(u0)

    def flow(self, z: Arr[f64], t: float) -> Arr[f64]:
        u = np.tanh(self._theta(z) + 0.5 * self.h * t)
        return np.clip(self.mid + self.h * u, self.a_minus, self.a_plus)

    def potential(self, z: Arr[f64], t: float) -> Arr[f64]:
        theta = self._theta(z)
        interior = np.isfinite(theta)
        th = np.where(interior, theta, 0.0)
        moving = self.mid * t + 2.0 * (_log_cosh(th + 0.5 * self.h * t) - _log_cosh(th))
        # the endpoint sections are fixed, the height is constant along the flow
        return np.where(interior, moving, z * t)


class IntegratedProfile(MomentProfile):
    """Profile whose flow is integrated numerically

    Fixed-step classical RK4 on the augmented state (z, K) with z' = psi(z) and
    K' = z, step = step_fraction * (a_plus - a_minus) in flow time.
    """

    a_minus: float
    a_plus: float
    step: float

    def __init__(self, a_minus: float, a_plus: float, step_fraction: float = 1.0e-3) -> None:
        _check_interval(a_minus, a_plus)
        if step_fraction <= 0.0:
            raise DomainError(f"step_fraction must be positive, got {step_fraction}")
        self.a_minus = float(a_minus)
        self.a_plus = float(a_plus)
        self.step = step_fraction * (self.a_plus - self.a_minus)

    def _integrate(self, z0: Arr[f64], t: float) -> Tuple[Arr[f64], Arr[f64]]:
        nt = int(np.ceil(abs(t) / self.step))
        z = np.array(z0, dtype=f64)
        K = np.zeros_like(z)
        if nt == 0:
            return z, K
        dt = t / nt
        lo, hi = self.a_minus, self.a_plus
        for _ in range(nt):
            k1 = self.psi(z)
            z2 = np.clip(z + 0.5 * dt * k1, lo, hi)
            k2 = self.psi(z2)
            z3 = np.clip(z + 0.5 * dt * k2, lo, hi)
            k3 = self.psi(z3)
            z4 = np.clip(z + dt * k3, lo, hi)
            k4 = self.psi(z4)
            K = K + dt / 6.0 * (z + 2.0 * z2 + 2.0 * z3 + z4)
            z = np.clip(z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), lo, hi)
        return z, K

    def flow(self, z: Arr[f64], t: float) -> Arr[f64]:
        return self._integrate(z, t)[0]

    def potential(self, z: Arr[f64], t: float) -> Arr[f64]:
        return self._integrate(z, t)[1]


class SineProfile(IntegratedProfile):
    """psi(z) = h (a_plus - a_minus)/pi sin(pi (z - a_minus)/(a_plus - a_minus))

    Same endpoint slopes as the quadratic profile on the same interval.
    """

    __slots__ = ["width", "amplitude"]

    def __init__(self, a_minus: float = -1.0, a_plus: float = 1.0, step_fraction: float = 1.0e-3) -> None:
        super().__init__(a_minus, a_plus, step_fraction)
        self.width = self.a_plus - self.a_minus
        self.amplitude = 0.5 * self.width * self.width / pi

    @property
    def name(self) -> str:
        return "sine"

    def psi(self, z: Arr[f64]) -> Arr[f64]:
        return self.amplitude * np.sin(pi * (z - self.a_minus) / self.width)


class CallableProfile(IntegratedProfile):
    """User-supplied profile, checked for endpoint zeros and interior positivity"""

    __slots__ = ["func"]
    func: Callable[[Arr[f64]], Arr[f64]]

    def __init__(
        self,
        func: Callable[[Arr[f64]], Arr[f64]],
        a_minus: float = -1.0,
        a_plus: float = 1.0,
        step_fraction: float = 1.0e-3,
        tol: float = 1.0e-12,
    ) -> None:
        super().__init__(a_minus, a_plus, step_fraction)
        self.func = func
        ends = np.asarray(func(np.array([self.a_minus, self.a_plus])), dtype=f64)
        if np.any(np.abs(ends) > tol):
            raise DomainError(f"profile must vanish at both endpoints, got {ends}")
        inner = np.asarray(func(np.linspace(self.a_minus, self.a_plus, 257)[1:-1]), dtype=f64)
        if np.any(inner <= 0.0) or not np.all(np.isfinite(inner)):
            raise DomainError("profile must be finite and positive on the open interval")

    @property
    def name(self) -> str:
        return "callable"

    def psi(self, z: Arr[f64]) -> Arr[f64]:
        return np.asarray(self.func(z), dtype=f64)


PROFILES = {
    "quadratic": QuadraticProfile,
    "sine": SineProfile,
}


def make_profile(name: str, a_minus: float = -1.0, a_plus: float = 1.0) -> MomentProfile:
    if name not in PROFILES:
        raise DomainError(f"unknown profile '{name}', expected one of {sorted(PROFILES)}")
    return PROFILES[name](a_minus, a_plus)
