"""Material parameters, contrast scaling and low-frequency constants.

Also hosts the fundamental solution of the time-harmonic Lamé system in the
plane, its static limit and the two logarithmic correctors of its
small-frequency expansion.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, SingularityError
from .specfun import E_C


@dataclass(frozen=True)
class Medium:
    """Isotropic elastic medium with Lamé parameters and density."""

    lam: float
    mu: float
    rho: float

    def __post_init__(self):
        if not (self.mu > 0 and self.rho > 0 and self.lam + 2 * self.mu > 0):
            raise DomainError("require mu > 0, rho > 0 and lambda + 2 mu > 0")

    @property
    def c_s(self) -> float:
        return math.sqrt(self.mu / self.rho)

    @property
    def c_p(self) -> float:
        return math.sqrt((self.lam + 2 * self.mu) / self.rho)

    def scaled(self, contrast: "Contrast") -> "Medium":
        """Resonator material (lambda/delta, mu/delta, rho/epsilon)."""
        return Medium(
            self.lam / contrast.delta, self.mu / contrast.delta, self.rho / contrast.epsilon
        )


@dataclass(frozen=True)
class Contrast:
    """High-contrast scaling; tau = sqrt(delta/epsilon) should stay O(1)."""

    delta: float
    epsilon: float

    def __post_init__(self):
        if not (0 < self.delta <= 1 and 0 < self.epsilon <= 1):
            raise DomainError("delta and epsilon must lie in (0, 1]")
        if not 0.1 <= self.tau <= 10:
            warnings.warn(f"tau = {self.tau:g} is far from order one", stacklevel=2)

    @classmethod
    def from_tau(cls, delta: float, tau: float) -> "Contrast":
        return cls(delta, delta / tau**2)

    @property
    def tau(self) -> float:
        return math.sqrt(self.delta / self.epsilon)


def wave_numbers(m: Medium, omega):
    """Shear and pressure wave numbers (k_s, k_p) at frequency ``omega``."""
    omega = np.asarray(omega, dtype=complex)
    if np.any(omega == 0):
        raise DomainError("frequency must be nonzero")
    ks = omega * math.sqrt(m.rho / m.mu)
    kp = omega * math.sqrt(m.rho / (m.lam + 2 * m.mu))
    return specfun._out(ks), specfun._out(kp)


@dataclass(frozen=True)
class AsymptoticConstants:
    alpha1: float
    alpha2: float
    sigma1: float
    sigma2: float
    E_c: complex
    alpha: complex
    beta1: complex
    beta2: float
    beta3: float
    beta4: complex
    a_lame: complex
    b_lame: complex


def asymptotic_constants(m: Medium) -> AsymptoticConstants:
    lam, mu = m.lam, m.mu
    l2 = lam + 2 * mu
    pi = math.pi
    alpha1 = (1 / mu + 1 / l2) / (4 * pi)
    alpha2 = (1 / mu - 1 / l2) / (4 * pi)
    alpha = alpha1 / 2 * E_C + alpha2 / 2 - (math.log(mu) / mu + math.log(l2) / l2) / (8 * pi)
    beta2 = -(3 / mu**2 + 1 / l2**2) / (32 * pi)
    beta3 = (1 / mu**2 - 1 / l2**2) / (16 * pi)
    beta1 = (
        (E_C / 2 - 1) * beta2
        - beta3 / 8
        + (3 * math.log(mu) / mu**2 + math.log(l2) / l2**2) / (64 * pi)
    )
    beta4 = (2 * E_C - 3) * beta3 / 4 - (math.log(mu) / mu**2 - math.log(l2) / l2**2) / (32 * pi)
    a_lame = complex((2 * lam + 6 * mu) * beta2 + (3 * lam + 5 * mu) * beta3)
    b_lame = (
        beta1 * (2 * lam + 6 * mu)
        + beta2 * (lam + 5 * mu)
        + beta3 * (lam + mu)
        + beta4 * (3 * lam + 5 * mu)
    )
    return AsymptoticConstants(
        alpha1, alpha2, 2 * pi * alpha1, 2 * pi * alpha2, E_C, alpha,
        beta1, beta2, beta3, beta4, a_lame, b_lame,
    )


def gamma_omega(m: Medium, omega, scale: float = 1.0):
    """gamma = alpha1 ln(sqrt(rho) * scale * omega) + alpha (principal log)."""
    w = np.asarray(omega, dtype=complex) * scale
    if np.any((w.imag == 0) & (w.real <= 0)):
        raise DomainError("scale*omega on the branch cut of the logarithm")
    c = asymptotic_constants(m)
    return specfun._out(c.alpha1 * np.log(math.sqrt(m.rho) * w) + c.alpha)


def _radius(x):
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[..., 0], x[..., 1])
    if np.any(r == 0):
        raise SingularityError("kernel evaluated at x = 0")
    return x, r


def _outer(x, r):
    xh = x / r[..., None]
    return xh[..., :, None] * xh[..., None, :]


def green_tensor(m: Medium, omega, x):
    """Fundamental solution Gamma^omega(x) of the Lamé system (2x2, complex).

    The Hessian of H_0(k|x|) is formed analytically:
    grad grad g(r) = g'' xx^T/r^2 + (g'/r)(I - xx^T/r^2), with
    g' = -k H_1(kr) and g'' = k^2 (H_1(kr)/(kr) - H_0(kr)).
    ``x`` may be an array of points with trailing dimension 2.
    """
    omega = complex(omega)
    if omega == 0:
        raise DomainError("frequency must be nonzero")
    x, r = _radius(x)
    ks, kp = wave_numbers(m, omega)
    P = _outer(x, r)
    eye = np.eye(2)

    def hess(k):
        z = k * r
        h0, h1 = specfun.bessel_h1(0, z), specfun.bessel_h1(1, z)
        g1 = -k * h1
        g2 = k * k * (h1 / z - h0)
        return g2[..., None, None] * P + (g1 / r)[..., None, None] * (eye - P)

    h0s = specfun.bessel_h1(0, ks * r)
    return (
        -1j / (4 * m.mu) * h0s[..., None, None] * eye
        + 1j / (4 * omega**2 * m.rho) * (hess(kp) - hess(ks))
    )


def green_tensor_static(m: Medium, x):
    """Gamma(x) = alpha1 ln|x| I - alpha2 x x^T / |x|^2."""
    x, r = _radius(x)
    c = asymptotic_constants(m)
    return c.alpha1 * np.log(r)[..., None, None] * np.eye(2) - c.alpha2 * _outer(x, r)


def green_tensor_correctors(m: Medium, x):
    """The correctors (Gamma_1, Gamma_2) of the small-frequency expansion."""
    x, r = _radius(x)
    c = asymptotic_constants(m)
    xx = x[..., :, None] * x[..., None, :]
    r2 = (r * r)[..., None, None]
    lr = np.log(r)[..., None, None]
    eye = np.eye(2)
    g1 = c.beta2 * r2 * eye + c.beta3 * xx
    g2 = c.beta1 * r2 * eye + c.beta2 * lr * r2 * eye + c.beta3 * lr * xx + c.beta4 * xx
    return g1, g2
