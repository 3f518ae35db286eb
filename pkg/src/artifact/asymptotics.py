"""Leading-order resonance conditions in the high-contrast limit.

Densities living on concentric circles are handled in the modal frame of
:mod:`artifact.diskkernels`: a density is a dict ``{n: (c_v, c_t)}`` over
the harmonics n in {-1, 0, 1}, which is where the rigid motions and the
kernel basis of the static Neumann-Poincare adjoint live.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np

from .assembly import ConcentricGeometry
from .detsolve import RootResult, ScanConfig, default_window, dedup, local_minima, muller_refine
from .diskkernels import static_transfer
from .errors import ConvergenceError, GeometryError, NearSingularError
from .medium import Contrast, Medium, asymptotic_constants, gamma_omega
from .specfun import _out

HARMONICS = (-1, 0, 1)

# modal matrices of the constant-density integral y -> gamma * int f, harmonics +-1
_GAMMA_BLOCK = {
    1: np.array([[1, -1j], [1j, 1]]),
    -1: np.array([[1, 1j], [-1j, 1]]),
}


def rigid_motion(i: int, r: float) -> dict:
    """Modal coefficients of xi_1 = e1, xi_2 = e2, xi_3 = (x2, -x1) on |x| = r."""
    z = np.zeros(2, complex)
    if i == 1:
        return {1: np.array([0.5, 0.5j]), -1: np.array([0.5, -0.5j]), 0: z}
    if i == 2:
        return {1: np.array([-0.5j, 0.5]), -1: np.array([0.5j, 0.5]), 0: z}
    if i == 3:
        return {1: z, -1: z, 0: np.array([0, -r], complex)}
    raise ValueError("rigid motion index must be 1, 2 or 3")


def pairing(f: dict, g: dict, r: float):
    """Bilinear pairing int_{|x|=r} f . g ds of two modal densities (batched over leading axes)."""
    return 2 * math.pi * r * sum(np.sum(f[n] * g[-n], axis=-1) for n in HARMONICS)


def _scale(d: dict, s) -> dict:
    return {n: s * v for n, v in d.items()}


@dataclass(frozen=True)
class KernelBasis:
    """zeta_i = xi_i/(2 pi r) (i = 1, 2), zeta_3 = xi_3/(2 pi r^3) on the circle of radius r.

    Biorthogonal to the rigid motions, (zeta_i, xi_j) = delta_ij.
    """

    r: float

    def xi(self, i: int) -> dict:
        return rigid_motion(i, self.r)

    def zeta(self, i: int) -> dict:
        s = 1 / (2 * math.pi * self.r) if i < 3 else 1 / (2 * math.pi * self.r**3)
        return _scale(rigid_motion(i, self.r), s)

    def gram(self) -> np.ndarray:
        """Matrix of (zeta_i, xi_j); the identity."""
        return np.array(
            [[pairing(self.zeta(i), self.xi(j), self.r) for j in (1, 2, 3)] for i in (1, 2, 3)]
        )


@functools.lru_cache(maxsize=1024)
def _static_map(m: Medium, R: float, r: float, n: int) -> np.ndarray:
    return static_transfer(m, R, r, n).value_map


def single_layer_hat(m: Medium, gamma, R: float, r: float, n: int) -> np.ndarray:
    """Modal map of S + gamma * int (the regularized low-frequency single layer)."""
    gamma = np.asarray(gamma, dtype=complex)
    out = np.broadcast_to(_static_map(m, float(R), float(r), int(n)), gamma.shape + (2, 2)).astype(complex)
    if n in _GAMMA_BLOCK:
        out = out + gamma[..., None, None] * (math.pi * R) * _GAMMA_BLOCK[n]
    return out


def apply_layer(m: Medium, gamma, R: float, r: float, density: dict) -> dict:
    return {
        n: np.einsum("...ij,...j->...i", single_layer_hat(m, gamma, R, r, n), density[n])
        for n in HARMONICS
    }


def static_disk_single_layer(m: Medium, R: float, i: int) -> float:
    """Eigenvalue of the static single layer on the circle of radius R for zeta_i."""
    if R <= 0:
        raise GeometryError("radius must be positive")
    c = asymptotic_constants(m)
    if i in (1, 2):
        return c.sigma1 * R * math.log(R) - c.sigma2 * R / 2
    if i == 3:
        return -R / (2 * m.mu)
    raise ValueError("index must be 1, 2 or 3")


def c_matrix(m: Medium, R: float) -> np.ndarray:
    """C_ij = (S[zeta_j], zeta_i) on the circle of radius R."""
    kb = KernelBasis(R)
    C = np.zeros((3, 3))
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            Sz = apply_layer(m, 0.0, R, R, kb.zeta(j))
            C[i - 1, j - 1] = pairing(Sz, kb.zeta(i), R).real
    return C


def c_matrix_disk(m: Medium, R: float) -> np.ndarray:
    c = asymptotic_constants(m)
    t = (c.sigma1 * math.log(R) - c.sigma2 / 2) / (2 * math.pi)
    return np.diag([t, t, -1 / (4 * math.pi * m.mu * R**2)])


def kernel_residual(m: Medium, R: float, i: int) -> float:
    """max |(-1/2 + K*)[zeta_i]| on the circle, from the interior static traction."""
    z = KernelBasis(R).zeta(i)
    res = [static_transfer(m, R, R, n, side="in").traction_map @ z[n] for n in HARMONICS]
    return float(max(np.abs(v).max() for v in res))


# --------------------------------------------------------------------------
# single disk


@dataclass(frozen=True)
class DiskCoefficients:
    p: np.ndarray
    m: np.ndarray
    medium: Medium
    contrast: Contrast
    R: float

    def q(self, omega) -> np.ndarray:
        c = asymptotic_constants(self.medium)
        L = c.sigma1 * math.log(self.R) - c.sigma2 / 2
        g = gamma_omega(self.medium, omega)
        gt = gamma_omega(self.medium, omega, scale=self.contrast.tau)
        q1 = (L + 2 * math.pi * gt) / (L + 2 * math.pi * g)
        return np.array([q1, q1, 1.0 + 0j])


def disk_leading_coeffs(m: Medium, c: Contrast, R: float) -> DiskCoefficients:
    k = asymptotic_constants(m)
    L = k.sigma1 * math.log(R) - k.sigma2 / 2
    area = math.pi * R**2
    p = np.array([k.a_lame * area, k.a_lame * area, 0.0])
    mm = np.array([k.b_lame * area - R**2 / 2 * L, k.b_lame * area - R**2 / 2 * L, R**2 / (8 * m.mu)])
    return DiskCoefficients(p, mm.astype(complex), m, c, R)


def _condition(m: Medium, c: Contrast, p, mm, q, omega):
    return (
        m.rho * omega**2 * np.log(omega) * p
        + m.rho * omega**2 * (math.log(math.sqrt(m.rho) * c.tau) * p + mm)
        - c.epsilon * q
    )


def _seed(m: Medium, c: Contrast, p: complex, mm: complex) -> complex:
    # fixed point of rho w^2 (p ln(sqrt(rho) tau w) + m) = eps
    w = math.sqrt(c.epsilon / (m.rho * abs(mm)))
    for _ in range(30):
        d = p * math.log(math.sqrt(m.rho) * c.tau * w) + mm
        w = abs(np.sqrt(c.epsilon / (m.rho * d)))
    return w


def _window(seed: float) -> ScanConfig:
    return ScanConfig(1, seed / 10, seed * 10, samples=2)


def disk_asymptotic_roots(m: Medium, c: Contrast, R: float) -> list:
    """Roots of the three scalar equations; i = 3 is solved in closed form."""
    co = disk_leading_coeffs(m, c, R)
    out = []
    for i in range(3):
        if i == 2:
            w = math.sqrt(c.epsilon / (m.rho * co.m[2].real))
            out.append(RootResult(complex(w), 1, 0.0, 0, "asymptotic", w))
            continue
        f = lambda w, i=i: _condition(m, c, co.p[i], co.m[i], co.q(w)[i], w) / c.epsilon
        s = _seed(m, c, co.p[i], co.m[i])
        r = muller_refine(f, s, _window(s), q=2, method="asymptotic")
        out.append(r)
    return out


# --------------------------------------------------------------------------
# nested resonators


@dataclass(frozen=True)
class LeadingMatrices:
    """P, M, Q of size 3N; index (i, m) -> (i - 1) * N + m for rigid motion i, resonator m."""

    P: np.ndarray
    M: np.ndarray
    Q: np.ndarray
    N: int

    def block(self, name: str, i: int, j: int) -> np.ndarray:
        A = getattr(self, name)
        N = self.N
        return A[(i - 1) * N : i * N, (j - 1) * N : j * N]


def _two_circle(m, gamma, ra, rb, da, db, tol=1e12):
    """Densities (s_a on ra, s_b on rb) with S[s_a] - S[s_b] = (da on ra, db on rb)."""
    sa, sb = {}, {}
    for n in HARMONICS:
        A = np.concatenate(
            [
                np.concatenate([single_layer_hat(m, gamma, ra, ra, n), -single_layer_hat(m, gamma, rb, ra, n)], -1),
                np.concatenate([single_layer_hat(m, gamma, ra, rb, n), -single_layer_hat(m, gamma, rb, rb, n)], -1),
            ],
            -2,
        )
        cond = np.max(np.linalg.cond(A))
        if not cond < tol:
            raise NearSingularError("adjoint density system is near singular", float(cond))
        rhs = np.broadcast_to(np.concatenate([da[n], db[n]]), A.shape[:-1])
        s = np.linalg.solve(A, rhs[..., None])[..., 0]
        sa[n], sb[n] = s[..., :2], s[..., 2:]
    return sa, sb


def adjoint_densities(geom: ConcentricGeometry, m: Medium, gamma, n_res: int, j: int) -> dict:
    """Densities varsigma for resonator n_res (0-based) and rigid motion j, keyed by circle index.

    Gap above: -S[s] = xi_j on the outer circle (first resonator), otherwise
    S[s_a] - S[s_b] = (0, xi_j) on (previous inner circle, this outer circle).
    Gap below (not for the last resonator): S[s_c] - S[s_d] = (0, -xi_j) on
    (this inner circle, next outer circle).
    """
    radii = geom.radii
    N = geom.n_resonators
    ip, im = 2 * n_res, 2 * n_res + 1
    zero = {h: np.zeros(2, complex) for h in HARMONICS}
    out = {}
    if n_res == 0:
        xi = rigid_motion(j, radii[ip])
        out[ip] = {}
        for h in HARMONICS:
            A = single_layer_hat(m, gamma, radii[ip], radii[ip], h)
            rhs = np.broadcast_to(xi[h], A.shape[:-1])
            out[ip][h] = -np.linalg.solve(A, rhs[..., None])[..., 0]
    else:
        out[ip - 1], out[ip] = _two_circle(m, gamma, radii[ip - 1], radii[ip], zero, rigid_motion(j, radii[ip]))
    if n_res < N - 1:
        target = _scale(rigid_motion(j, radii[im + 1]), -1)
        out[im], out[im + 1] = _two_circle(m, gamma, radii[im], radii[im + 1], zero, target)
    return out


def nested_leading_matrices(
    geom: ConcentricGeometry, m: Medium, c: Contrast, omega, blocks=(1, 2, 3)
) -> LeadingMatrices:
    """P, M, Q at ``omega`` (scalar or array; matrices gain its leading shape).

    Entries outside the requested rigid-motion ``blocks`` are left zero.
    """
    if geom.structure != "nested":
        raise GeometryError("nested geometry required")
    k = asymptotic_constants(m)
    N = geom.n_resonators
    radii = geom.radii
    omega = np.asarray(omega, dtype=complex)
    g = np.asarray(gamma_omega(m, omega))
    gt = np.asarray(gamma_omega(m, omega, scale=c.tau))
    P = np.zeros(omega.shape + (3 * N, 3 * N), complex)
    M = np.zeros_like(P)
    Q = np.zeros_like(P)
    sig = {(n, j): adjoint_densities(geom, m, g, n, j) for n in range(N) for j in blocks}
    for mi in range(N):
        Rp, Rm = radii[2 * mi], radii[2 * mi + 1]
        area = math.pi * (Rp**2 - Rm**2)
        L = k.sigma1 * math.log(Rp) - k.sigma2 / 2
        for i in blocks:
            a = (i - 1) * N + mi
            if i < 3:
                P[..., a, a] = k.a_lame * area
                M[..., a, a] = area * (k.b_lame - L / (2 * math.pi))
            else:
                M[..., a, a] = (Rp**4 - Rm**4) / (8 * m.mu * Rp**2)
            zeta = KernelBasis(Rp).zeta(i)
            fields = {ci: apply_layer(m, gt, Rp, radii[ci], zeta) for ci in (2 * mi, 2 * mi + 1)}
            for ni in range(N):
                for j in blocks:
                    dens = sig[(ni, j)]
                    tot = 0
                    for ci, sgn in ((2 * mi, 1.0), (2 * mi + 1, -1.0)):
                        if ci in dens:
                            tot = tot + sgn * pairing(fields[ci], dens[ci], radii[ci])
                    Q[..., a, (j - 1) * N + ni] = -tot
    return LeadingMatrices(P, M, Q, N)


def nested_condition(geom, m: Medium, c: Contrast, omega, block: int | None = None):
    """rho w^2 ln w P + rho w^2 (ln(sqrt(rho) tau) P + M) - eps Q, optionally one rigid-motion block."""
    omega = np.asarray(omega, dtype=complex)
    lm = nested_leading_matrices(geom, m, c, omega, (1, 2, 3) if block is None else (block,))
    P, M, Q = lm.P, lm.M, lm.Q
    if block is not None:
        sl = slice((block - 1) * lm.N, block * lm.N)
        P, M, Q = P[..., sl, sl], M[..., sl, sl], Q[..., sl, sl]
    w = omega[..., None, None]
    return _condition(m, c, P, M, Q, w)


def nested_asymptotic_roots(
    geom, m: Medium, c: Contrast, window: tuple | None = None, samples: int = 2000
) -> list:
    """3N leading-order frequencies: rotational block (q = 1) and translational block (q = 2, doubled)."""
    lo, hi = window or default_window(c.delta)
    N = geom.n_resonators
    scale = c.epsilon**N
    out = []
    for block, q in ((3, 1), (1, 2)):
        f = lambda w, b=block: _out(np.linalg.det(nested_condition(geom, m, c, w, b)) / scale)
        cfg = ScanConfig(q, lo, hi, samples)
        grid = cfg.grid
        vals = np.abs(f(grid.astype(complex)))
        roots = []
        for idx in local_minima(vals):
            try:
                roots.append(muller_refine(f, grid[idx], cfg, q=q, method="asymptotic"))
            except ConvergenceError:
                continue
        mult = 2 if q == 2 else 1
        roots = [replace(r, multiplicity=mult) for r in roots if lo <= r.omega.real <= hi]
        out += dedup(roots)
    return out
