"""Independent reference computations used by the tests.

Nothing here imports the package's kernels: the oracles use mpmath Bessel
functions at 40 digits, direct quadrature of the fundamental solution, or a
textbook displacement-potential mode matching.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

mp.mp.dps = 40


# ---------------------------------------------------------------- modal maps


def value_map(lam, mu, rho, om, R, n, r, kind):
    """Single layer of a density (c_v, c_t) e^{in theta} on |y| = R, read at radius r.

    Rows are the (v, t) components of the field, columns the density slots.
    """
    om = mp.mpc(om)
    ks = om * mp.sqrt(mp.mpf(rho) / mu)
    kp = om * mp.sqrt(mp.mpf(rho) / (lam + 2 * mu))
    J = lambda z: mp.besselj(n, z)
    Jp = lambda z: mp.besselj(n, z, 1)
    H = lambda z: mp.hankel1(n, z)
    Hp = lambda z: (mp.hankel1(n - 1, z) - mp.hankel1(n + 1, z)) / 2
    S, Sp, T, Tp = (J, Jp, H, Hp) if kind == "ext" else (H, Hp, J, Jp)
    pre = 1 / (4 * om**2 * rho * R)
    pi = mp.pi
    cvs = -1j * pi * pre * n * ks * R * S(ks * R)
    cvp = -1j * pi * pre * kp**2 * R**2 * Sp(kp * R)
    cts = -pi * pre * ks**2 * R**2 * Sp(ks * R)
    ctp = -pi * pre * n * kp * R * S(kp * R)
    ps = (2 * n * T(ks * r) / (ks * r), 2j * Tp(ks * r))
    pp = (2 * Tp(kp * r), 2j * n * T(kp * r) / (kp * r))
    return np.array(
        [[complex(cvs * ps[i] + cvp * pp[i]), complex(cts * ps[i] + ctp * pp[i])] for i in range(2)]
    )


# ---------------------------------------------------------------- quadrature


def _green(lam, mu, rho, om, x):
    """Fundamental solution from scipy-free mpmath Hankel functions (vectorised by loop)."""
    ks = om * np.sqrt(rho / mu)
    kp = om * np.sqrt(rho / (lam + 2 * mu))
    out = np.zeros((len(x), 2, 2), complex)
    for i, (a, b) in enumerate(x):
        r = float(np.hypot(a, b))
        P = np.array([[a * a, a * b], [a * b, b * b]]) / r**2
        hs0 = complex(mp.hankel1(0, ks * r))

        def hess(k):
            z = k * r
            h0, h1 = complex(mp.hankel1(0, z)), complex(mp.hankel1(1, z))
            g1 = -k * h1
            g2 = k * k * (h1 / z - h0)
            return g2 * P + (g1 / r) * (np.eye(2) - P)

        out[i] = -1j / (4 * mu) * hs0 * np.eye(2) + 1j / (4 * om**2 * rho) * (hess(kp) - hess(ks))
    return out


def quadrature_value_map(lam, mu, rho, om, R, n, r, theta=0.37, nodes=512):
    """Trapezoid rule for the single layer of (c_v, c_t) e^{in theta} at x = r e^{i theta}."""
    th = 2 * np.pi * np.arange(nodes) / nodes
    y = R * np.stack([np.cos(th), np.sin(th)], -1)
    x = r * np.array([np.cos(theta), np.sin(theta)])
    G = _green(lam, mu, rho, om, x[None, :] - y)
    w = 2 * np.pi * R / nodes
    vy = np.stack([np.cos(th), np.sin(th)], -1)
    ty = np.stack([-np.sin(th), np.cos(th)], -1)
    e = np.exp(1j * n * th)
    vx = np.array([np.cos(theta), np.sin(theta)])
    tx = np.array([-np.sin(theta), np.cos(theta)])
    out = np.zeros((2, 2), complex)
    for col, dens in enumerate((vy, ty)):
        u = w * np.einsum("kij,kj,k->i", G, dens, e)
        out[0, col] = (u @ vx) * np.exp(-1j * n * theta)
        out[1, col] = (u @ tx) * np.exp(-1j * n * theta)
    return out


def static_single_layer(alpha1, alpha2, R, i, comp):
    """Component ``comp`` of the static single layer of zeta_i, read at x = (R, 0).

    Kernel alpha1 ln|x| I - alpha2 x x^T/|x|^2; tanh-sinh handles the log
    singularity at the interval ends.
    """
    R, a1, a2 = mp.mpf(R), mp.mpf(alpha1), mp.mpf(alpha2)

    def f(th):
        y0, y1 = R * mp.cos(th), R * mp.sin(th)
        d = (R - y0, -y1)
        r2 = d[0] ** 2 + d[1] ** 2
        z = (1, 0) if i == 1 else (0, 1) if i == 2 else (y1, -y0)
        s = 1 / (2 * mp.pi * R) if i < 3 else 1 / (2 * mp.pi * R**3)
        row = [(a1 * mp.log(r2) / 2 if comp == b else 0) - a2 * d[comp] * d[b] / r2 for b in range(2)]
        return s * R * (row[0] * z[0] + row[1] * z[1])

    return float(mp.quad(f, [0, mp.pi, 2 * mp.pi]))


# ---------------------------------------------------------------- mode matching


def _cyl(kind, n, z):
    """(Z, Z', Z'') of J or H at z in mpmath."""
    if kind == "J":
        f, fp = mp.besselj(n, z), mp.besselj(n, z, 1)
    else:
        f = mp.hankel1(n, z)
        fp = (mp.hankel1(n - 1, z) - mp.hankel1(n + 1, z)) / 2
    return f, fp, -fp / z - (1 - mp.mpf(n) ** 2 / z**2) * f


def _potential_columns(lam, mu, rho, om, n, r, kind, wave):
    """(u_r, u_theta, s_rr, s_rtheta) of phi = Z_n(k_p r) or psi = Z_n(k_s r), harmonic n.

    u = grad phi + (d_y psi, -d_x psi).
    """
    n = mp.mpf(n)
    kp = om * mp.sqrt(mp.mpf(rho) / (lam + 2 * mu))
    ks = om * mp.sqrt(mp.mpf(rho) / mu)
    if wave == "p":
        k = kp
        f, fp, fpp = _cyl(kind, n, k * r)
        F, dF, d2F = f, k * fp, k * k * fpp
        ur, ut = dF, 1j * n / r * F
        dur = d2F
        dut = 1j * n * (dF / r - F / r**2)
        div = -k * k * F
    else:
        k = ks
        f, fp, fpp = _cyl(kind, n, k * r)
        G, dG, d2G = f, k * fp, k * k * fpp
        ur, ut = 1j * n / r * G, -dG
        dur = 1j * n * (dG / r - G / r**2)
        dut = -d2G
        div = 0
    srr = lam * div + 2 * mu * dur
    srt = mu * (1j * n / r * ur + dut - ut / r)
    return ur, ut, srr, srt


def mode_matching_det(radii, lam, mu, rho, delta, eps, om, n, torsion_only=False):
    """Determinant of the displacement/traction matching system for harmonic n.

    Region k lies between circles k-1 and k; odd regions are resonator
    material (lam/delta, mu/delta, rho/eps).  Exterior carries outgoing H,
    the innermost region regular J, the rest both.
    """
    om = mp.mpc(om)
    M = len(radii)

    def med(reg):
        return (lam / delta, mu / delta, rho / eps) if reg % 2 == 1 else (lam, mu, rho)

    waves = ("s",) if torsion_only else ("p", "s")
    rows_per = (1, 3) if torsion_only else (0, 1, 2, 3)
    cols = []
    for reg in range(M + 1):
        kinds = ("H",) if reg == 0 else ("J",) if reg == M else ("J", "H")
        cols += [(reg, kd, w) for kd in kinds for w in waves]
    A = mp.matrix(len(rows_per) * M, len(cols))
    for i, r in enumerate(radii):
        r = mp.mpf(r)
        for c, (reg, kd, w) in enumerate(cols):
            if reg not in (i, i + 1):
                continue
            sgn = 1 if reg == i + 1 else -1
            vals = _potential_columns(*med(reg), om, n, r, kd, w)
            for a, comp in enumerate(rows_per):
                A[len(rows_per) * i + a, c] += sgn * vals[comp]
    return mp.det(A)


def mp_muller(f, x0, tol=1e-13, maxit=40):
    """Plain Muller iteration in mpmath complex arithmetic."""
    xs = [mp.mpc(x0) * (1 - mp.mpf("1e-4")), mp.mpc(x0) * (1 + mp.mpf("1e-4")), mp.mpc(x0)]
    fs = [f(x) for x in xs]
    for _ in range(maxit):
        x2, x1, x0_ = xs
        f2, f1, f0 = fs
        h1, h2 = x1 - x2, x0_ - x1
        d1, d2 = (f1 - f2) / h1, (f0 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = mp.sqrt(b * b - 4 * f0 * a)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        dx = -2 * f0 / den
        xn = x0_ + dx
        xs = [x1, x0_, xn]
        fs = [f1, f0, f(xn)]
        if abs(dx) < tol * abs(xn):
            break
    return complex(xs[-1])


def equidistant(N, outer=2.0):
    radii = []
    for j in range(1, N + 1):
        radii += [outer - outer * (j - 1) / N, outer - outer * (2 * j - 1) / (2 * N)]
    return radii


def plane_wave_projection(kind, kvec_len, d, q, r, n, nodes=256):
    """Harmonic-n (v, t) coefficients of a plane wave on the circle |x| = r by FFT-free quadrature."""
    th = 2 * np.pi * np.arange(nodes) / nodes
    x = r * np.stack([np.cos(th), np.sin(th)], -1)
    pol = np.asarray(d if kind == "p" else q, float)
    u = np.exp(1j * kvec_len * (x @ np.asarray(d, float)))[:, None] * pol
    v = np.stack([np.cos(th), np.sin(th)], -1)
    t = np.stack([-np.sin(th), np.cos(th)], -1)
    e = np.exp(-1j * n * th)
    return complex(np.mean(np.sum(u * v, -1) * e)), complex(np.mean(np.sum(u * t, -1) * e))


__all__ = [
    "value_map",
    "quadrature_value_map",
    "mode_matching_det",
    "mp_muller",
    "equidistant",
    "plane_wave_projection",
    "static_single_layer",
]
