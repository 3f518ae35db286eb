"""Modal action of single-layer potentials supported on a circle.

A density e^{in theta} v or e^{in theta} t on the circle |y| = R (v radial,
t tangential unit vectors) produces, at radius r, a field of the same
harmonic, U(r) e^{in theta} v + V(r) e^{in theta} t.  Every map here is a 2x2
matrix whose columns are the (v, t) densities and whose rows are the (v, t)
components of the result.  All time-harmonic maps broadcast over arrays of
frequencies; the trailing two axes are the 2x2 block.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .medium import Medium, asymptotic_constants, wave_numbers
from .specfun import LogSeries, SeriesBundle, bessel_h1, bessel_h1p, bessel_j, bessel_jp, cylinder_log_series

#: below this largest Bessel argument the maps come from the frequency series
Z_SERIES = 2.0


def _block(a, b, c, d):
    """Stack entries into [[a, b], [c, d]] along two trailing axes."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, d)))
    return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def _source_target(kind: str):
    # exterior points: regular J on the source circle, outgoing H at the target
    if kind == "ext":
        return (bessel_j, bessel_jp), (bessel_h1, bessel_h1p)
    return (bessel_h1, bessel_h1p), (bessel_j, bessel_jp)


def _n_over_z(n, f, fp, z, kind_is_j):
    """n f_n(z)/z, using the sum recursion for J so that z = 0 is allowed."""
    if kind_is_j:
        return 0.5 * (bessel_j(n - 1, z) + bessel_j(n + 1, z))
    return n * f / z


@dataclass(frozen=True)
class ModalBoundaryCoeffs:
    n: int
    alpha_1n: complex
    alpha_2n: complex
    alpha_3n: complex
    alpha_4n: complex

    def matrix(self):
        return _block(self.alpha_1n, self.alpha_3n, self.alpha_2n, self.alpha_4n)


@dataclass(frozen=True)
class NPModalCoeffs:
    n: int
    a_1n: complex
    a_2n: complex
    b_1n: complex
    b_2n: complex

    def matrix(self):
        return _block(self.a_1n, self.b_1n, self.a_2n, self.b_2n)


@dataclass(frozen=True)
class ModalTransfer:
    n: int
    source_radius: float
    target_radius: float
    value_map: np.ndarray
    traction_map: np.ndarray
    value_map_s: np.ndarray
    value_map_p: np.ndarray


def _check(omega, R):
    omega = np.asarray(omega, dtype=complex)
    if np.any(omega == 0):
        raise DomainError("frequency must be nonzero")
    if R <= 0:
        raise DomainError("radius must be positive")
    return omega


def boundary_coeffs(m: Medium, omega, R: float, n: int) -> ModalBoundaryCoeffs:
    """Single layer of e^{in theta}v, e^{in theta}t evaluated on its own circle."""
    omega = _check(omega, R)
    if np.any(series_argument(m, omega, R, R) <= Z_SERIES):
        v = _transfer(m, omega, R, n, R, "ext").value_map
        return ModalBoundaryCoeffs(n, v[..., 0, 0], v[..., 1, 0], v[..., 0, 1], v[..., 1, 1])
    ks, kp = wave_numbers(m, omega)
    Js, Jsp, Hs, Hsp = bessel_j(n, ks * R), bessel_jp(n, ks * R), bessel_h1(n, ks * R), bessel_h1p(n, ks * R)
    Jp, Jpp, Hp, Hpp = bessel_j(n, kp * R), bessel_jp(n, kp * R), bessel_h1(n, kp * R), bessel_h1p(n, kp * R)
    pre = math.pi / (2 * omega**2 * m.rho)
    a1 = -1j * pre / R * (n * n * Js * Hs + kp**2 * R**2 * Jpp * Hpp)
    a2 = n * pre * (ks * Js * Hsp + kp * Jpp * Hp)
    a3 = -n * pre * (ks * Jsp * Hs + kp * Jp * Hpp)
    a4 = -1j * pre / R * (ks**2 * R**2 * Jsp * Hsp + n * n * Jp * Hp)
    return ModalBoundaryCoeffs(n, a1, a2, a3, a4)


def traction_coeffs(m: Medium, omega, R: float, n: int, r: float, kind: str = "ext", _direct: bool = False):
    """(g1, g2, g3, g4) at radius r for a density on the circle of radius R.

    ``kind='ext'`` is the outward conormal traction for r >= R; ``kind='int'``
    evaluates r <= R with the source factors J -> H and target factors
    H -> J swapped.
    """
    omega = _check(omega, R)
    if r <= 0:
        raise DomainError("traction needs r > 0")
    if not _direct and np.any(series_argument(m, omega, R, r) <= Z_SERIES):
        tr = _transfer(m, omega, R, n, r, kind).traction_map
        return tr[..., 0, 0], tr[..., 1, 0], tr[..., 0, 1], tr[..., 1, 1]
    ks, kp = wave_numbers(m, omega)
    (S, Sp), (T, Tp) = _source_target(kind)
    mu, rho, x = m.mu, m.rho, r
    c = math.pi / (2 * omega**2 * rho * x * x)
    Ts, Tsp = T(n, ks * x), Tp(n, ks * x)
    Tq, Tqp = T(n, kp * x), Tp(n, kp * x)
    w2 = omega**2 * rho * x * x
    g1 = 1j * c * (
        2 * mu * n * n * S(n, ks * R) * (Ts - ks * x * Tsp)
        + Sp(n, kp * R) * kp * R * (Tq * (w2 - 2 * mu * n * n) + 2 * kp * mu * x * Tqp)
    )
    g2 = -n * mu * c * (
        S(n, ks * R) * Ts * (ks**2 * x * x - 2 * n * n)
        + 2 * ks * x * S(n, ks * R) * Tsp
        + 2 * kp * R * Sp(n, kp * R) * (Tq - kp * x * Tqp)
    )
    g3 = n * c * (
        S(n, kp * R) * Tq * (w2 - 2 * mu * n * n)
        + 2 * mu * kp * x * S(n, kp * R) * Tqp
        + 2 * mu * ks * R * Sp(n, ks * R) * (Ts - ks * x * Tsp)
    )
    g4 = 1j * mu * c * (
        2 * n * n * S(n, kp * R) * (Tq - kp * x * Tqp)
        + ks * R * Sp(n, ks * R) * (ks**2 * x * x * Ts + 2 * ks * x * Tsp - 2 * n * n * Ts)
    )
    return g1, g2, g3, g4


def np_coeffs(m: Medium, omega, R: float, n: int) -> NPModalCoeffs:
    """Modal Neumann-Poincare coefficients, K* = (exterior traction) - I/2."""
    g1, g2, g3, g4 = traction_coeffs(m, omega, R, n, R, "ext")
    return NPModalCoeffs(n, g1 - 0.5, g2, g3, g4 - 0.5)


def _transfer_direct(m, omega, R, n, r, kind):
    ks, kp = wave_numbers(m, omega)
    (S, Sp), (T, Tp) = _source_target(kind)
    is_j = kind == "int"
    zs, zp = ks * r, kp * r
    Ts, Tsp = T(n, zs) if r > 0 or is_j else None, Tp(n, zs)
    Tq, Tqp = T(n, zp), Tp(n, zp)
    if r == 0:
        nTs = _n_over_z(n, None, None, zs, True)
        nTq = _n_over_z(n, None, None, zp, True)
    else:
        nTs = _n_over_z(n, Ts, Tsp, zs, is_j)
        nTq = _n_over_z(n, Tq, Tqp, zp, is_j)
    psi_s = (2 * nTs, 2j * Tsp)
    psi_p = (2 * Tqp, 2j * nTq)
    pre = 1.0 / (4 * omega**2 * m.rho * R)
    cv_s = -1j * math.pi * pre * n * ks * R * S(n, ks * R)
    cv_p = -1j * math.pi * pre * kp**2 * R**2 * Sp(n, kp * R)
    ct_s = -math.pi * pre * ks**2 * R**2 * Sp(n, ks * R)
    ct_p = -math.pi * pre * n * kp * R * S(n, kp * R)
    vs = _block(cv_s * psi_s[0], ct_s * psi_s[0], cv_s * psi_s[1], ct_s * psi_s[1])
    vp = _block(cv_p * psi_p[0], ct_p * psi_p[0], cv_p * psi_p[1], ct_p * psi_p[1])
    if r > 0:
        g1, g2, g3, g4 = traction_coeffs(m, omega, R, n, r, kind, _direct=True)
        tr = _block(g1, g3, g2, g4)
    else:
        tr = np.full(vs.shape, np.nan, dtype=complex)
    return vs + vp, tr, vs, vp


@functools.lru_cache(maxsize=4096)
def _series_maps(m: Medium, R: float, n: int, r: float, kind: str):
    """Value and traction maps as series in omega.

    Every entry is a sum of products of one J and one H factor times
    omega^-2; the negative powers cancel exactly between the shear and
    pressure parts and are removed here instead of in floating point.
    Returns (value, traction, value_s, value_p) as nested 2x2 lists.
    """
    src, tgt = ("J", "H") if kind == "ext" else ("H", "J")
    ss, sp = math.sqrt(m.rho / m.mu), math.sqrt(m.rho / (m.lam + 2 * m.mu))
    w = LogSeries.monomial(1.0, 1)
    Sz = cylinder_log_series(n, src)
    Tz = cylinder_log_series(n, tgt)
    Szp, Tzp = Sz.derivative(), Tz.derivative()
    Tzpp = Tzp.derivative()
    nTz = (Tz * n).shift(-1)
    nTzp = nTz.derivative()

    pre = LogSeries.monomial(1.0 / (4 * m.rho * R), -2)
    cv_s = pre * (w * (ss * R)) * Sz.rescale(ss * R) * (-1j * math.pi * n)
    cv_p = pre * (w * (sp * R)) * (w * (sp * R)) * Szp.rescale(sp * R) * (-1j * math.pi)
    ct_s = pre * (w * (ss * R)) * (w * (ss * R)) * Szp.rescale(ss * R) * (-math.pi)
    ct_p = pre * (w * (sp * R)) * Sz.rescale(sp * R) * (-math.pi * n)
    if r > 0:
        psi_s = (nTz.rescale(ss * r) * 2, Tzp.rescale(ss * r) * 2j)
        psi_p = (Tzp.rescale(sp * r) * 2, nTz.rescale(sp * r) * 2j)
        dpsi_s = (nTzp.rescale(ss * r) * (w * 2 * ss), Tzpp.rescale(ss * r) * (w * 2j * ss))
        dpsi_p = (Tzpp.rescale(sp * r) * (w * 2 * sp), nTzp.rescale(sp * r) * (w * 2j * sp))
    else:
        psi_s = (_at_zero(nTz) * 2, _at_zero(Tzp) * 2j)
        psi_p = (_at_zero(Tzp) * 2, _at_zero(nTz) * 2j)
        dpsi_s = dpsi_p = None
    cols_s, cols_p = (cv_s, ct_s), (cv_p, ct_p)
    vs = [[cols_s[j] * psi_s[i] for j in range(2)] for i in range(2)]
    vp = [[cols_p[j] * psi_p[i] for j in range(2)] for i in range(2)]
    val = [[(vs[i][j] + vp[i][j]).drop_below(0) for j in range(2)] for i in range(2)]
    if dpsi_s is None:
        return _bundle(val), None, _bundle(vs), _bundle(vp)
    tr = [[None, None], [None, None]]
    for j in range(2):
        U = cols_s[j] * psi_s[0] + cols_p[j] * psi_p[0]
        V = cols_s[j] * psi_s[1] + cols_p[j] * psi_p[1]
        dU = cols_s[j] * dpsi_s[0] + cols_p[j] * dpsi_p[0]
        dV = cols_s[j] * dpsi_s[1] + cols_p[j] * dpsi_p[1]
        srr, srt = polar_traction(m, n, r, U, dU, V, dV)
        tr[0][j], tr[1][j] = srr.drop_below(0), srt.drop_below(0)
    return _bundle(val), _bundle(tr), _bundle(vs), _bundle(vp)


def _bundle(maps):
    return SeriesBundle.of([maps[i][j] for i in range(2) for j in range(2)])


def _at_zero(series: LogSeries) -> LogSeries:
    """Value at z = 0 of a series without negative powers or logarithms."""
    if series.pmin > 0:
        return LogSeries.monomial(0.0)
    return LogSeries.monomial(series.coef[-series.pmin, 0])


def _eval_maps(bundle, omega):
    v = bundle(omega)
    return v.reshape(v.shape[:-1] + (2, 2))


def series_argument(m: Medium, omega, R: float, r: float):
    """Largest Bessel argument |k| max(r, R) entering a transfer."""
    ss = math.sqrt(m.rho / min(m.mu, m.lam + 2 * m.mu))
    return np.abs(omega) * ss * max(r, R)


def _transfer(m, omega, R, n, r, kind):
    omega = _check(omega, R)
    small = series_argument(m, omega, R, r) <= Z_SERIES
    if not np.any(small):
        vals = _transfer_direct(m, omega, R, n, r, kind)
    else:
        val, tr, vs, vp = _series_maps(m, float(R), int(n), float(r), kind)
        shape = omega.shape + (2, 2)
        ser = (
            _eval_maps(val, omega),
            _eval_maps(tr, omega) if tr is not None else np.full(shape, np.nan, complex),
            _eval_maps(vs, omega),
            _eval_maps(vp, omega),
        )
        if np.all(small):
            vals = ser
        else:
            direct = _transfer_direct(m, np.where(small, 1.0, omega), R, n, r, kind)
            mask = small[..., None, None]
            vals = tuple(np.where(mask, a, b) for a, b in zip(ser, direct))
    return ModalTransfer(n, R, r, *vals)


def field_maps(m: Medium, omega: complex, R: float, n: int, r, kind: str):
    """Shear and pressure value maps at many radii (arrays over ``r``) for one frequency.

    Used for field evaluation, where radii are many and the frequency is fixed.
    ``kind='ext'`` needs r > R, ``kind='int'`` allows 0 <= r < R.  Unlike
    :func:`transfer` this evaluates the Bessel products directly, so relative
    accuracy of the sum degrades like machine epsilon / (k min(r, R))^2.
    """
    omega = complex(omega)
    r = np.asarray(r, dtype=float)
    ks, kp = wave_numbers(m, omega)
    (S, Sp), (T, Tp) = _source_target(kind)
    if kind == "ext":
        if np.any(r <= R):
            raise DomainError("exterior field maps need r > R")
        nT = lambda z: n * T(n, z) / z
    else:
        if np.any((r < 0) | (r >= R)):
            raise DomainError("interior field maps need 0 <= r < R")
        nT = lambda z: 0.5 * (bessel_j(n - 1, z) + bessel_j(n + 1, z))
    zs, zp = ks * r, kp * r
    pre = 1.0 / (4 * omega**2 * m.rho * R)
    cv_s = -1j * math.pi * pre * n * ks * R * S(n, ks * R)
    cv_p = -1j * math.pi * pre * kp**2 * R**2 * Sp(n, kp * R)
    ct_s = -math.pi * pre * ks**2 * R**2 * Sp(n, ks * R)
    ct_p = -math.pi * pre * n * kp * R * S(n, kp * R)
    psi_s = (2 * nT(zs), 2j * Tp(n, zs))
    psi_p = (2 * Tp(n, zp), 2j * nT(zp))
    vs = _block(cv_s * psi_s[0], ct_s * psi_s[0], cv_s * psi_s[1], ct_s * psi_s[1])
    vp = _block(cv_p * psi_p[0], ct_p * psi_p[0], cv_p * psi_p[1], ct_p * psi_p[1])
    return vs, vp


def exterior_transfer(m: Medium, omega, R: float, n: int, r: float) -> ModalTransfer:
    """Value and traction maps at radius r >= R (r = R is the exterior limit)."""
    if r < R:
        raise DomainError("exterior transfer needs r >= R")
    return _transfer(m, omega, R, n, r, "ext")


def interior_transfer(m: Medium, omega, R: float, n: int, r: float) -> ModalTransfer:
    """Value and traction maps at radius 0 <= r <= R (r = R is the interior limit)."""
    if not 0 <= r <= R:
        raise DomainError("interior transfer needs 0 <= r <= R")
    return _transfer(m, omega, R, n, r, "int")


def transfer(m: Medium, omega, R: float, n: int, r: float, side: str | None = None) -> ModalTransfer:
    """Dispatch on position; ``side`` ('in'/'out') picks the limit when r == R."""
    if r > R or (r == R and side == "out"):
        return exterior_transfer(m, omega, R, n, r)
    if r < R or side == "in":
        return interior_transfer(m, omega, R, n, r)
    raise DomainError("on-circle evaluation needs side='in' or 'out'")


def polar_traction(m: Medium, n: int, r, U, dU, V, dV):
    """Conormal traction on |x| = r of U(r)e^{in theta}v + V(r)e^{in theta}t.

    sigma_rr = (lam + 2 mu) U' + lam (U + i n V)/r,
    sigma_rt = mu (i n U/r + V' - V/r).
    """
    srr = (m.lam + 2 * m.mu) * dU + m.lam * (U + 1j * n * V) / r
    srt = m.mu * (1j * n * U / r + dV - V / r)
    return srr, srt


# --------------------------------------------------------------------------
# static kernel


def _pow(base_outer: bool, p: int, r: float, R: float):
    """(x^p, d/dr x^p) with x = R/r if ``base_outer`` else r/R."""
    if base_outer:
        v = (R / r) ** p
        return v, -p * v / r
    v = (r / R) ** p
    return v, p * v / r


def _iln(m: int, r: float, R: float, outside: bool):
    if m == 0:
        return (2 * math.pi * math.log(r), 2 * math.pi / r) if outside else (2 * math.pi * math.log(R), 0.0)
    v, d = _pow(outside, abs(m), r, R)
    return -math.pi / abs(m) * v, -math.pi / abs(m) * d


def _iw(m: int, r: float, R: float, outside: bool, conj: bool):
    """Fourier integrals of (x-y)/conj(x-y) (or its conjugate when ``conj``)."""
    v = d = 0.0
    terms = []
    if outside:
        if not conj:
            if m >= 0:
                terms.append((1, m))
            if m >= -1:
                terms.append((-1, m + 2))
        else:
            if m <= 0:
                terms.append((1, -m))
            if m <= 1:
                terms.append((-1, 2 - m))
    else:
        if not conj:
            if m <= -1:
                terms.append((-1, -m))
            if m <= -2:
                terms.append((1, -m - 2))
        else:
            if m >= 1:
                terms.append((-1, m))
            if m >= 2:
                terms.append((1, m - 2))
    for sgn, p in terms:
        a, b = _pow(outside, p, r, R)
        v += sgn * a
        d += sgn * b
    return 2 * math.pi * v, 2 * math.pi * d


@dataclass(frozen=True)
class StaticTransfer:
    n: int
    source_radius: float
    target_radius: float
    value_map: np.ndarray
    traction_map: np.ndarray


def static_transfer(m: Medium, R: float, r: float, n: int, side: str | None = None) -> StaticTransfer:
    """Static single layer (kernel alpha1 ln|x| I - alpha2 xx^T/|x|^2) modal maps.

    Closed form from the Fourier expansions of ln|x - y| and of
    (x - y)/conj(x - y) for concentric circles, written in the rotating
    components f+ = f1 + i f2, f- = f1 - i f2.  ``side`` selects the one-sided
    traction when r == R ('out' default).
    """
    if R <= 0 or r <= 0:
        raise DomainError("radii must be positive")
    outside = r > R or (r == R and side != "in")
    c = asymptotic_constants(m)
    a1, a2 = c.alpha1, c.alpha2
    val = np.zeros((2, 2), complex)
    dval = np.zeros((2, 2), complex)
    lp, dlp = _iln(n + 1, r, R, outside)
    lm, dlm = _iln(n - 1, r, R, outside)
    w, dw = _iw(n - 1, r, R, outside, conj=False)
    wb, dwb = _iw(n + 1, r, R, outside, conj=True)
    for col, (cv, ct) in enumerate(((1, 0), (0, 1))):
        A, B = cv + 1j * ct, cv - 1j * ct
        sp = R * ((a1 * lp - math.pi * a2 * (n + 1 == 0)) * A - a2 / 2 * w * B)
        sm = R * ((a1 * lm - math.pi * a2 * (n - 1 == 0)) * B - a2 / 2 * wb * A)
        dsp = R * (a1 * dlp * A - a2 / 2 * dw * B)
        dsm = R * (a1 * dlm * B - a2 / 2 * dwb * A)
        val[:, col] = ((sp + sm) / 2, (sp - sm) / 2j)
        dval[:, col] = ((dsp + dsm) / 2, (dsp - dsm) / 2j)
    srr, srt = polar_traction(m, n, r, val[0], dval[0], val[1], dval[1])
    return StaticTransfer(n, R, r, val, np.array([srr, srt]))
