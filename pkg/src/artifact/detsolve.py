"""Resonances as roots of the channel determinants.

Roots are seeded from local minima of the normalized determinant on a real
frequency grid and refined in the complex plane by Muller's method.  Channel
q = 3 is never scanned: its determinant coincides with that of q = 2 (the
two systems differ by a reflection), so every q = 2 root is reported with
multiplicity two.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .assembly import ConcentricGeometry, assemble
from .errors import ConvergenceError, DomainError
from .medium import Contrast, Medium

CHUNK = 256


@dataclass(frozen=True)
class ScanConfig:
    q: int
    omega_min: float
    omega_max: float
    samples: int = 4000
    refine_tol: float = 1e-12
    max_iter: int = 60

    def __post_init__(self):
        if self.q not in (1, 2, 3):
            raise DomainError("channel must be 1, 2 or 3")
        if not 0 < self.omega_min < self.omega_max:
            raise DomainError("need 0 < omega_min < omega_max")
        if self.samples < 2:
            raise DomainError("need at least two samples")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.samples)

    @property
    def scanned_channel(self) -> int:
        return 2 if self.q == 3 else self.q


@dataclass(frozen=True)
class RootResult:
    omega: complex
    q: int
    residual: float
    iterations: int
    method: str
    seed: float
    converged: bool = True
    multiplicity: int = 1
    certified: bool = True


def det_exponent(geom: ConcentricGeometry) -> float:
    """Power of delta used to normalize the determinant: (N + 1)/2."""
    return (geom.n_resonators + 1) / 2


def scaled_det(geom, m: Medium, c: Contrast, omega, q: int):
    """det A^(q)(omega) / delta^((N+1)/2), complex and vectorized over omega."""
    sign, logabs = np.linalg.slogdet(assemble(geom, m, c, omega, q).matrix)
    out = sign * np.exp(logabs - det_exponent(geom) * math.log(c.delta))
    return out[()] if np.ndim(out) == 0 else out


def normalized_det(geom, m: Medium, c: Contrast, omega, q: int):
    """f~(omega) = |det A^(q)(omega)| / delta^((N+1)/2)."""
    return np.abs(scaled_det(geom, m, c, omega, q))


def _evaluate_grid(geom, m, c, q, grid, threads):
    chunks = [grid[i : i + CHUNK] for i in range(0, len(grid), CHUNK)]
    work = lambda w: normalized_det(geom, m, c, w, q)
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]
    return np.concatenate(parts)


def scan_grid(cfg: ScanConfig, geom, m, c, threads: int = 1):
    """Grid and f~ values over the scan window of ``cfg``."""
    grid = cfg.grid
    return grid, _evaluate_grid(geom, m, c, cfg.scanned_channel, grid, threads)


def local_minima(values) -> list:
    v = np.asarray(values)
    idx = np.nonzero((v[1:-1] < v[:-2]) & (v[1:-1] < v[2:]))[0] + 1
    return idx.tolist()


def scan_minima(cfg: ScanConfig, geom, m, c, threads: int = 1) -> list:
    """Strictly interior local minima of f~ on the grid, ascending."""
    grid, vals = scan_grid(cfg, geom, m, c, threads)
    return [float(grid[i]) for i in local_minima(vals)]


def muller_refine(f, seed, cfg: ScanConfig, q: int | None = None, method: str = "exact") -> RootResult:
    """Muller iteration from seed*(1 - 1e-4), seed*(1 + 1e-4), seed.

    Stops once |delta omega| < cfg.refine_tol.  Leaving a disc of ten window
    widths around the window centre raises ConvergenceError; running out of
    iterations returns a result flagged ``converged=False``.
    """
    seed = complex(seed)
    centre = 0.5 * (cfg.omega_min + cfg.omega_max)
    reach = 10.0 * (cfg.omega_max - cfg.omega_min)
    xs = [seed * (1 - 1e-4), seed * (1 + 1e-4), seed]
    fs = [complex(f(x)) for x in xs]
    x_new = seed
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        x2, x1, x0 = xs
        f2, f1, f0 = fs
        if f0 == 0:
            converged = True
            x_new = x0
            break
        h1, h2 = x1 - x2, x0 - x1
        d1, d2 = (f1 - f2) / h1, (f0 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4 * f0 * a)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            raise ConvergenceError("Muller step undefined (flat interpolant)")
        dx = -2 * f0 / den
        x_new = x0 + dx
        if not cmath.isfinite(x_new) or abs(x_new - centre) > reach:
            raise ConvergenceError(f"Muller iterate {x_new:.6g} left the search region")
        xs = [x1, x0, x_new]
        fs = [f1, f0, complex(f(x_new))]
        if abs(dx) < cfg.refine_tol:
            converged = True
            break
    return RootResult(
        omega=complex(x_new),
        q=cfg.q if q is None else q,
        residual=float(abs(f(x_new))),
        iterations=it,
        method=method,
        seed=float(seed.real),
        converged=converged,
    )


def dedup(roots, tol: float = 1e-9) -> list:
    out = []
    for r in sorted(roots, key=lambda r: (r.omega.real, r.omega.imag)):
        if out and abs(out[-1].omega - r.omega) < tol:
            if r.residual < out[-1].residual:
                out[-1] = r
            continue
        out.append(r)
    return out


def find_resonances(cfg: ScanConfig, geom, m, c, threads: int = 1) -> list:
    """Scan, refine each seed, merge near-duplicates and certify.

    A root is certified when f~ there is below 1e-6 times the median of f~
    over the scan grid.  Roots whose real part leaves the window are dropped;
    seeds whose iteration diverged come last with a NaN frequency.
    """
    q = cfg.scanned_channel
    grid, vals = scan_grid(cfg, geom, m, c, threads)
    seeds = [float(grid[i]) for i in local_minima(vals)]
    level = 1e-6 * float(np.median(vals))
    fn = lambda w: scaled_det(geom, m, c, w, q)

    def refine(s):
        try:
            return muller_refine(fn, s, cfg, q=q)
        except ConvergenceError:
            return RootResult(complex(math.nan, math.nan), q, math.inf, cfg.max_iter, "exact", s, converged=False)

    if threads and threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = list(pool.map(refine, seeds))
    else:
        found = [refine(s) for s in seeds]
    mult = 2 if q == 2 else 1
    kept = [
        replace(r, multiplicity=mult, certified=r.converged and r.residual < level)
        for r in found
        if cfg.omega_min <= r.omega.real <= cfg.omega_max
    ]
    lost = [replace(r, multiplicity=mult, certified=False) for r in found if not cmath.isfinite(r.omega)]
    return dedup(kept) + lost


def default_window(delta: float, q: int | None = None) -> tuple:
    """Scan window [0.001, 0.04] at delta = 1e-5, scaled by sqrt(delta/1e-5)."""
    s = math.sqrt(delta / 1e-5)
    return 0.001 * s, 0.04 * s


def expand_multiplicity(roots) -> list:
    """Frequencies counted with multiplicity (q = 2 roots appear as q = 2 and q = 3)."""
    out = []
    for r in roots:
        out.append(r)
        if r.multiplicity == 2:
            out.append(replace(r, q=3))
    return out
