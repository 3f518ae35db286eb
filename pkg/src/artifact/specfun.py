"""Cylinder functions of integer order and complex argument.

Values of J_n and H_n^(1) come from the AMOS routines wrapped by
``scipy.special``.  This module adds the conventions the rest of the package
relies on (reflection for negative orders, explicit domain errors, derivatives
via the three-term recursions) together with the small-argument series
machinery: power series with the logarithmic part of Y_n split off, the
coefficients of the double-series expansion of -(i/4) H_0, and the truncated
expansions of J_0, J_1, H_0 and H_1 used throughout the low-frequency
analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, SingularityError

EULER_GAMMA = float(np.euler_gamma)
#: E_c = 2*gamma - i*pi - 2 ln 2, the constant of the logarithmic expansions.
E_C = complex(2.0 * EULER_GAMMA - 2.0 * math.log(2.0), -math.pi)

MAX_ARGUMENT = 50.0
SERIES_RTOL = 1e-17
SERIES_MAX_TERMS = 60


def _check(z, allow_zero=True):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite argument")
    if np.any(np.abs(z) >= MAX_ARGUMENT):
        raise DomainError(f"|z| must be below {MAX_ARGUMENT}")
    if not allow_zero and np.any(z == 0):
        raise SingularityError("Hankel function is singular at z = 0")
    return z


def _reflect(n: int) -> tuple[int, int]:
    n = int(n)
    return abs(n), (-1) ** n if n < 0 else 1


def _out(value):
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def bessel_j(n: int, z):
    """J_n(z) for integer ``n``; negative orders via J_{-n} = (-1)^n J_n."""
    z = _check(z)
    m, sign = _reflect(n)
    return _out(sign * special.jv(m, z))


def bessel_h1(n: int, z):
    """Hankel function of the first kind H_n^(1)(z), principal branch."""
    z = _check(z, allow_zero=False)
    m, sign = _reflect(n)
    return _out(sign * special.hankel1(m, z))


def bessel_jp(n: int, z):
    """J_n'(z) from the average of the two recursions, (J_{n-1} - J_{n+1})/2."""
    z = _check(z)
    return _out(0.5 * (bessel_j(n - 1, z) - bessel_j(n + 1, z)))


def bessel_h1p(n: int, z):
    """H_n'(z) from (H_{n-1} - H_{n+1})/2."""
    z = _check(z, allow_zero=False)
    return _out(0.5 * (bessel_h1(n - 1, z) - bessel_h1(n + 1, z)))


def second_derivative(n: int, z, f, fp):
    """f'' from Bessel's equation, f'' = -f'/z - (1 - n^2/z^2) f."""
    z = np.asarray(z, dtype=complex)
    return -fp / z - (1.0 - n * n / z**2) * f


def cylinder_family(n: int, z, kind: str):
    """Return (f, f', f'') for ``kind`` in {'J', 'H'} at argument ``z``.

    Vectorised over ``z``; used by the modal kernels, which need all three.
    """
    if kind == "J":
        f, fp = bessel_j(n, z), bessel_jp(n, z)
    elif kind == "H":
        f, fp = bessel_h1(n, z), bessel_h1p(n, z)
    else:
        raise ValueError(f"unknown cylinder function kind {kind!r}")
    return f, fp, second_derivative(n, z, f, fp)


# --------------------------------------------------------------------------
# power series


def bessel_j_series(n: int, z):
    """Defining power series of J_n(z), summed to double-precision floor."""
    m, sign = _reflect(n)
    z = complex(z)
    half = z / 2.0
    term = half**m / math.factorial(m)
    total = term
    q = -half * half
    for k in range(1, SERIES_MAX_TERMS):
        term = term * q / (k * (k + m))
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            break
    return sign * total


@dataclass(frozen=True)
class YSplit:
    """Y_n(z) = laurent + log_factor * ln(z/2) + regular.

    ``laurent`` holds the negative powers, ``log_factor`` equals (2/pi) J_n(z)
    and ``regular`` is the remaining power series.  Keeping the pieces apart
    lets products such as J_n(a) Y_n(b) be formed without cancellation between
    the singular part and O(1) terms.
    """

    laurent: complex
    log_factor: complex
    regular: complex
    log_half_z: complex

    @property
    def value(self) -> complex:
        return self.laurent + self.log_factor * self.log_half_z + self.regular


def bessel_y_series(n: int, z) -> YSplit:
    """Ascending series of Y_n for n >= 0 with the logarithm split out."""
    m, sign = _reflect(n)
    z = complex(z)
    if z == 0:
        raise SingularityError("Y_n is singular at z = 0")
    half = z / 2.0
    q = half * half
    laurent = 0j
    for k in range(m):
        laurent += math.factorial(m - k - 1) / math.factorial(k) * q**k
    laurent *= -(half ** (-m)) / math.pi
    psi = [0.0] * (m + SERIES_MAX_TERMS + 2)
    psi[1] = -EULER_GAMMA
    for j in range(1, len(psi) - 1):
        psi[j + 1] = psi[j] + 1.0 / j
    regular = 0j
    term = 1.0 / math.factorial(m)
    for k in range(SERIES_MAX_TERMS):
        if k:
            term = term * (-q) / (k * (k + m))
        piece = (psi[k + 1] + psi[k + m + 1]) * term
        regular += piece
        if k and abs(piece) < SERIES_RTOL * abs(regular):
            break
    regular *= -(half**m) / math.pi
    log_factor = 2.0 / math.pi * bessel_j_series(m, z)
    return YSplit(sign * laurent, sign * log_factor, sign * regular, np.log(half))


def bessel_h1_series(n: int, z) -> complex:
    """H_n^(1)(z) = J_n(z) + i Y_n(z) from the ascending series."""
    return bessel_j_series(n, z) + 1j * bessel_y_series(n, z).value


# --------------------------------------------------------------------------
# expansion coefficients of -(i/4) H_0


@dataclass(frozen=True)
class SeriesCoefficients:
    """Coefficients of -(i/4)H_0(t) = sum_n c_n t^{2n} + b_n ln(t) t^{2n}."""

    order: int
    b: float
    c: complex


def hankel_series_coeffs(n: int) -> SeriesCoefficients:
    """b_n = (-1)^n / (2 pi 4^n (n!)^2), c_n = b_n (gamma - ln2 - i pi/2 - H_n).

    The same closed form covers n = 0, giving b_0 = 1/(2 pi) and
    c_0 = E_c/(4 pi); these are the values for which the double series
    reproduces -(i/4) H_0.
    """
    if n < 0:
        raise DomainError("order must be nonnegative")
    b = (-1) ** n / (2.0 * math.pi * 4.0**n * math.factorial(n) ** 2)
    harmonic = sum(1.0 / j for j in range(1, n + 1))
    c = b * complex(EULER_GAMMA - math.log(2.0) - harmonic, -math.pi / 2.0)
    return SeriesCoefficients(n, b, c)


def h0_double_series(t, terms: int = 4) -> complex:
    """Partial sum of the double series for -(i/4) H_0(t) with ``terms`` orders."""
    t = complex(t)
    total = 0j
    for n in range(terms):
        co = hankel_series_coeffs(n)
        total += (co.c + co.b * np.log(t)) * t ** (2 * n)
    return total


# --------------------------------------------------------------------------
# truncated small-argument expansions


def small_argument_expansion(name: str, t):
    """Truncated expansion of J0, J1, H0 or H1 and its first omitted term.

    Returns ``(value, omitted)``, where ``omitted`` is the magnitude of the
    first dropped term (it bounds the truncation error for small ``t``).
    """
    t = complex(t)
    lt = np.log(t)
    g = E_C + 2.0 * lt
    if name == "J0":
        value = 1 - t**2 / 4 + t**4 / 64 - t**6 / 2304
        omitted = abs(t) ** 8 / 147456
    elif name == "J1":
        value = t / 2 - t**3 / 16 + t**5 / 384
        omitted = abs(t) ** 7 / 18432
    elif name == "H0":
        value = (
            1j / math.pi * g
            - 1j * t**2 / (4 * math.pi) * (-2 + g)
            + 1j * t**4 / (64 * math.pi) * (-3 + g)
        )
        omitted = abs(t**6 / (2304 * math.pi) * (g - 11.0 / 3.0))
    elif name == "H1":
        value = (
            -2j / (math.pi * t)
            + 1j * t / (2 * math.pi) * (-1 + g)
            - 1j * t**3 / (16 * math.pi) * (-2.5 + g)
        )
        omitted = abs(t**5 / (384 * math.pi) * (g - 10.0 / 3.0))
    else:
        raise ValueError(f"no expansion for {name!r}")
    return value, float(omitted)


# --------------------------------------------------------------------------
# power-log series arithmetic


class LogSeries:
    """Finite sum  sum_{p, l} coef[p - pmin, l] x^p (ln x)^l.

    Used to carry products of cylinder functions symbolically in the
    frequency, so that singular powers which cancel in exact arithmetic can be
    removed before any floating-point evaluation.
    """

    __slots__ = ("pmin", "coef")

    def __init__(self, pmin: int, coef):
        coef = np.atleast_2d(np.asarray(coef, dtype=complex))
        self.pmin = int(pmin)
        self.coef = coef

    @classmethod
    def monomial(cls, c, p: int = 0) -> "LogSeries":
        return cls(p, [[c]])

    @property
    def pmax(self) -> int:
        return self.pmin + self.coef.shape[0] - 1

    def _aligned(self, other):
        lo = min(self.pmin, other.pmin)
        hi = max(self.pmax, other.pmax)
        L = max(self.coef.shape[1], other.coef.shape[1])
        a = np.zeros((hi - lo + 1, L), complex)
        b = np.zeros_like(a)
        a[self.pmin - lo : self.pmax - lo + 1, : self.coef.shape[1]] = self.coef
        b[other.pmin - lo : other.pmax - lo + 1, : other.coef.shape[1]] = other.coef
        return lo, a, b

    def __add__(self, other):
        if not isinstance(other, LogSeries):
            other = LogSeries.monomial(other)
        lo, a, b = self._aligned(other)
        return LogSeries(lo, a + b)

    __radd__ = __add__

    def __neg__(self):
        return LogSeries(self.pmin, -self.coef)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LogSeries):
            return LogSeries(self.pmin, self.coef * other)
        la, lb = self.coef.shape[1], other.coef.shape[1]
        out = np.zeros((self.coef.shape[0] + other.coef.shape[0] - 1, la + lb - 1), complex)
        for i in range(la):
            for j in range(lb):
                out[:, i + j] += np.convolve(self.coef[:, i], other.coef[:, j])
        return LogSeries(self.pmin + other.pmin, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return LogSeries(self.pmin, self.coef / c)

    def shift(self, p: int) -> "LogSeries":
        """Multiply by x^p."""
        return LogSeries(self.pmin + p, self.coef)

    def derivative(self) -> "LogSeries":
        """d/dx of the series: x^p ln^l x -> p x^{p-1} ln^l x + l x^{p-1} ln^{l-1} x."""
        P, L = self.coef.shape
        p = np.arange(self.pmin, self.pmin + P)[:, None]
        out = self.coef * p
        out[:, : L - 1] += self.coef[:, 1:] * np.arange(1, L)
        return LogSeries(self.pmin - 1, out)

    def rescale(self, sigma: float) -> "LogSeries":
        """Series in y for x = sigma * y (sigma > 0)."""
        P, L = self.coef.shape
        p = np.arange(self.pmin, self.pmin + P)
        ls = math.log(sigma)
        base = self.coef * (sigma ** p.astype(float))[:, None]
        out = np.zeros_like(base)
        for l in range(L):
            for j in range(l + 1):
                out[:, j] += base[:, l] * math.comb(l, j) * ls ** (l - j)
        return LogSeries(self.pmin, out)

    def drop_below(self, p: int) -> "LogSeries":
        """Remove all powers below x^p."""
        if p <= self.pmin:
            return self
        if p > self.pmax:
            return LogSeries(p, np.zeros((1, self.coef.shape[1])))
        return LogSeries(p, self.coef[p - self.pmin :])

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        lx = np.log(x)
        total = np.zeros(x.shape, complex)
        P, L = self.coef.shape
        for i in range(P - 1, -1, -1):
            c = 0
            for l in range(L - 1, -1, -1):
                c = c * lx + self.coef[i, l]
            total = total * x + c
        return total * x**self.pmin


def cylinder_log_series(n: int, kind: str, terms: int = 14) -> LogSeries:
    """Ascending series of J_n(z) or H_n^(1)(z) as a LogSeries in z."""
    m, sign = _reflect(n)
    jc = np.zeros((m + 2 * terms, 1), complex)
    for k in range(terms):
        jc[m + 2 * k, 0] = (-1) ** k / (4.0**k * 2.0**m * math.factorial(k) * math.factorial(k + m))
    J = LogSeries(0, jc)
    if kind == "J":
        return J * sign
    if kind != "H":
        raise ValueError(f"unknown cylinder function kind {kind!r}")
    # Y_m = laurent + (2/pi) J_m (ln z - ln 2) + regular
    lc = np.zeros((max(2 * m - 1, 1), 1), complex)
    for k in range(m):
        lc[2 * k, 0] = -math.factorial(m - k - 1) / math.factorial(k) * 2.0 ** (m - 2 * k) / math.pi
    laurent = LogSeries(-m, lc)
    psi = [0.0] * (m + terms + 2)
    psi[1] = -EULER_GAMMA
    for j in range(1, len(psi) - 1):
        psi[j + 1] = psi[j] + 1.0 / j
    rc = np.zeros((m + 2 * terms, 1), complex)
    for k in range(terms):
        rc[m + 2 * k, 0] = (
            -((-1) ** k) * (psi[k + 1] + psi[k + m + 1])
            / (math.pi * 4.0**k * 2.0**m * math.factorial(k) * math.factorial(k + m))
        )
    regular = LogSeries(0, rc)
    log_half = LogSeries(0, [[-math.log(2.0), 1.0]])
    Y = laurent + J * log_half * (2.0 / math.pi) + regular
    return (J + Y * 1j) * sign


def evaluate_log_series(series, x):
    """Evaluate several LogSeries at once; returns shape x.shape + (len(series),)."""
    return SeriesBundle.of(series)(x)


class SeriesBundle:
    """Stacked coefficients of several LogSeries sharing one power range."""

    __slots__ = ("pmin", "coef")

    def __init__(self, pmin: int, coef: np.ndarray):
        self.pmin = pmin
        self.coef = coef

    @classmethod
    def of(cls, series) -> "SeriesBundle":
        lo = min(t.pmin for t in series)
        hi = max(t.pmax for t in series)
        L = max(t.coef.shape[1] for t in series)
        C = np.zeros((len(series), hi - lo + 1, L), complex)
        for k, t in enumerate(series):
            C[k, t.pmin - lo : t.pmax - lo + 1, : t.coef.shape[1]] = t.coef
        return cls(lo, C)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        K, P, L = self.coef.shape
        xp = x[..., None] ** np.arange(self.pmin, self.pmin + P)
        lx = np.log(x)[..., None] ** np.arange(L)
        return np.einsum("...p,kpl,...l->...k", xp, self.coef, lx)
