"""Scattered and total displacement fields of the concentric resonators.

The incident wave is expanded in angular harmonics |n| <= n_max; each
harmonic is an independent transmission system.  Inside region k the field
is the sum of the single layers from its two bounding circles; in the
exterior the incident plane wave is added in closed form.  Shear and
pressure parts are the Psi^s and Psi^p contributions of every layer plus
the matching part of the incident wave.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diskkernels as dk
from .assembly import ConcentricGeometry, IncidentWave, assemble_mode, incident_rhs, region_medium, solve_densities
from .errors import DomainError, NearSingularError
from .medium import Contrast, Medium

log = logging.getLogger(__name__)

N_MAX = 8
POLAR_NODES = 64
COMPONENTS = (0, 1)


@dataclass
class FieldGrid:
    points: np.ndarray
    values: np.ndarray
    regions: np.ndarray
    labels: list
    u_s: np.ndarray
    u_p: np.ndarray
    length_scale: float = 1.0
    evaluator: object = field(default=None, repr=False)


@dataclass(frozen=True)
class ModeAmplitudes:
    resonator: int
    varrho: tuple

    @property
    def magnitude(self) -> float:
        return max(abs(v) for v in self.varrho)


def solve_scattering(geom, m: Medium, c: Contrast, omega, wave: IncidentWave, n_max: int = N_MAX) -> dict:
    """Densities for every harmonic |n| <= n_max, keyed by n (layout of ``assemble_mode``)."""
    out = {}
    for n in range(-n_max, n_max + 1):
        sys = assemble_mode(geom, m, c, omega, n, COMPONENTS)
        rhs = incident_rhs(geom, m, omega, wave, n=n, components=COMPONENTS)
        out[n] = solve_densities(sys, rhs)
    return out


def _sources(geom: ConcentricGeometry, region: int):
    # (circle, slot, kind) of the layers that represent the field in ``region``
    src = []
    if region >= 1:
        src.append((region - 1, 0, "int"))
    if region < geom.M:
        src.append((region, 1, "ext"))
    return src


def radial_profiles(geom, m: Medium, c: Contrast, omega, densities: dict, region: int, n: int, r):
    """(U_s, V_s, U_p, V_p) of harmonic n of the scattered field at radii ``r`` inside ``region``."""
    r = np.asarray(r, float)
    med = region_medium(geom, m, c, region)
    x = densities.get(n)
    out = np.zeros((4,) + r.shape, complex)
    if x is None:
        return out
    for circ, slot, kind in _sources(geom, region):
        col = (2 * circ + slot) * 2
        dens = x[col : col + 2]
        if not np.any(dens):
            continue
        vs, vp = dk.field_maps(med, omega, geom.radii[circ], n, r, kind)
        s = vs @ dens
        p = vp @ dens
        out += np.stack([s[..., 0], s[..., 1], p[..., 0], p[..., 1]])
    return out


def _region_labels(geom, r, tol):
    reg = np.zeros(r.shape, int)
    for R in geom.radii:
        if np.any(np.abs(r - R) < tol * geom.radii[0]):
            raise DomainError("evaluation point on an interface")
        reg += r < R
    return reg


def evaluate_field(geom, m: Medium, c: Contrast, omega, densities: dict, wave: IncidentWave, points) -> FieldGrid:
    """Total field and its shear/pressure split at ``points`` (shape (P, 2))."""
    pts = np.atleast_2d(np.asarray(points, float))
    r = np.hypot(pts[:, 0], pts[:, 1])
    th = np.arctan2(pts[:, 1], pts[:, 0])
    reg = _region_labels(geom, r, 1e-9)
    us = np.zeros(pts.shape, complex)
    up = np.zeros(pts.shape, complex)
    v = np.stack([np.cos(th), np.sin(th)], -1)
    t = np.stack([-np.sin(th), np.cos(th)], -1)
    for k in np.unique(reg):
        sel = reg == k
        for n in densities:
            Us, Vs, Up, Vp = radial_profiles(geom, m, c, omega, densities, int(k), n, r[sel])
            e = np.exp(1j * n * th[sel])[:, None]
            us[sel] += e * (Us[:, None] * v[sel] + Vs[:, None] * t[sel])
            up[sel] += e * (Up[:, None] * v[sel] + Vp[:, None] * t[sel])
    ext = reg == 0
    if np.any(ext):
        us[ext] += wave.evaluate(m, omega, pts[ext], part="s")
        up[ext] += wave.evaluate(m, omega, pts[ext], part="p")
    labels = [geom.region_label(int(k)) for k in reg]

    def again(p):
        return evaluate_field(geom, m, c, omega, densities, wave, p)

    return FieldGrid(pts, us + up, reg, labels, us, up, geom.radii[0], again)


def _jacobian(grid_fn, x, h, attr):
    # fourth-order central differences of the field component ``attr``
    offs = np.array([-2, -1, 1, 2]) * h
    w = np.array([1, -8, 8, -1]) / (12 * h)
    J = np.zeros((len(x), 2, 2), complex)
    for d in range(2):
        stencil = np.repeat(x[:, None, :], 4, axis=1)
        stencil[:, :, d] += offs
        vals = getattr(grid_fn(stencil.reshape(-1, 2)), attr).reshape(len(x), 4, 2)
        J[:, :, d] = np.einsum("s,psc->pc", w, vals)
    return J


def sp_split_check(grid: FieldGrid, h: float | None = None) -> dict:
    """Finite-difference div u_s and curl u_p at the grid points.

    Both are reported relative to the local field scale |grad u_part| + |u|/L,
    L the outer radius; the default step is 1e-3 L (fourth-order stencil).
    """
    if grid.evaluator is None:
        raise ValueError("grid carries no evaluator")
    x = grid.points
    L = grid.length_scale
    h = 1e-3 * L if h is None else h
    Js = _jacobian(grid.evaluator, x, h, "u_s")
    Jp = _jacobian(grid.evaluator, x, h, "u_p")
    div_s = Js[:, 0, 0] + Js[:, 1, 1]
    curl_p = Jp[:, 1, 0] - Jp[:, 0, 1]
    base = np.linalg.norm(grid.values, axis=1) / L
    sc_s = np.linalg.norm(Js.reshape(len(x), -1), axis=1) + base
    sc_p = np.linalg.norm(Jp.reshape(len(x), -1), axis=1) + base
    rel_div = np.abs(div_s) / np.where(sc_s > 0, sc_s, 1)
    rel_curl = np.abs(curl_p) / np.where(sc_p > 0, sc_p, 1)
    return {
        "div_us": div_s,
        "curl_up": curl_p,
        "rel_div_us": rel_div,
        "rel_curl_up": rel_curl,
        "max_rel_div_us": float(rel_div.max()),
        "max_rel_curl_up": float(rel_curl.max()),
        "step": h,
    }


def polar_grid(r_in: float, r_out: float, nr: int = POLAR_NODES, nt: int = POLAR_NODES):
    """Gauss-Legendre radii, uniform angles and area weights on an annulus."""
    xg, wg = np.polynomial.legendre.leggauss(nr)
    rr = 0.5 * (r_out - r_in) * xg + 0.5 * (r_out + r_in)
    wr = 0.5 * (r_out - r_in) * wg * rr
    th = 2 * math.pi * np.arange(nt) / nt
    R, T = np.meshgrid(rr, th, indexing="ij")
    W = wr[:, None] * np.full(nt, 2 * math.pi / nt)[None, :]
    pts = np.stack([R * np.cos(T), R * np.sin(T)], -1).reshape(-1, 2)
    return pts, W.reshape(-1), rr, wr


def resonator_fields(geom, m, c, omega, densities, wave, j: int, nodes: int = POLAR_NODES):
    Rp, Rm = geom.resonator_radii(j)
    pts, w, _, _ = polar_grid(Rm, Rp, nodes, nodes)
    return evaluate_field(geom, m, c, omega, densities, wave, pts), w


def mode_amplitudes(geom, m, c, omega, densities, j: int, wave: IncidentWave | None = None) -> ModeAmplitudes:
    """Projections varrho_i = <u, xi_i>/<xi_i, xi_i> over resonator j (1-based)."""
    wave = wave or IncidentWave()
    grid, w = resonator_fields(geom, m, c, omega, densities, wave, j)
    x = grid.points
    xis = [np.array([1.0, 0.0]) + 0 * x, np.array([0.0, 1.0]) + 0 * x, np.stack([x[:, 1], -x[:, 0]], -1)]
    out = []
    for xi in xis:
        num = np.sum(w * np.sum(grid.values * xi, -1))
        den = np.sum(w * np.sum(xi * xi, -1))
        out.append(complex(num / den))
    return ModeAmplitudes(j, tuple(out))


def _region_intervals(geom, norm_region):
    """List of (region index, r_in, r_out) making up ``norm_region``."""
    radii = list(geom.radii) + [0.0]
    if norm_region in (None, "resonators"):
        return [(k, radii[k], radii[k - 1]) for k in range(1, geom.M + 1) if geom.is_resonator(k)]
    if norm_region == "inside":
        return [(k, radii[k], radii[k - 1]) for k in range(1, geom.M + 1)]
    if isinstance(norm_region, (tuple, list)) and len(norm_region) == 2:
        lo, hi = map(float, norm_region)
        out = []
        for k in range(geom.M + 1):
            a = radii[k] if k < geom.M else 0.0
            b = radii[k - 1] if k >= 1 else math.inf
            s, e = max(a, lo), min(b, hi)
            if e > s:
                out.append((k, s, e))
        return out
    raise ValueError(f"unknown norm region {norm_region!r}")


def field_norms(geom, m, c, omega, densities, wave, norm_region="resonators", nodes: int = POLAR_NODES):
    """(||u_S||, ||u_P||) in L2 over ``norm_region``.

    Angular integration is exact by Parseval in the rotating components,
    radial integration uses Gauss-Legendre nodes per region.
    """
    tot_s = tot_p = 0.0
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    for k, a, b in _region_intervals(geom, norm_region):
        rr = 0.5 * (b - a) * xg + 0.5 * (b + a)
        wr = 0.5 * (b - a) * wg * rr
        for n in densities:
            Us, Vs, Up, Vp = radial_profiles(geom, m, c, omega, densities, k, n, rr)
            if k == 0:
                iU, _, iV, _ = wave.modal(m, omega, rr, n, part="s")
                Us, Vs = Us + iU, Vs + iV
                iU, _, iV, _ = wave.modal(m, omega, rr, n, part="p")
                Up, Vp = Up + iU, Vp + iV
            tot_s += 2 * math.pi * np.sum(wr * (np.abs(Us) ** 2 + np.abs(Vs) ** 2))
            tot_p += 2 * math.pi * np.sum(wr * (np.abs(Up) ** 2 + np.abs(Vp) ** 2))
    return math.sqrt(tot_s), math.sqrt(tot_p)


def enhancement_scan(
    geom, m, c, wave, omega_grid, norm_region="resonators", n_max: int = N_MAX, threads: int = 1
) -> list:
    """[(omega, ||u_S||, ||u_P||)] over a real frequency grid; failed solves give NaN."""

    def one(w):
        try:
            dens = solve_scattering(geom, m, c, w, wave, n_max)
            ns, np_ = field_norms(geom, m, c, w, dens, wave, norm_region)
        except NearSingularError as exc:
            log.warning("omega=%g: %s", w, exc)
            ns = np_ = math.nan
        return float(np.real(w)), ns, np_

    grid = list(omega_grid)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, grid))
    return [one(w) for w in grid]


def coefficient_of_variation(values) -> float:
    mag = np.linalg.norm(np.asarray(values), axis=-1)
    return float(np.std(mag) / np.mean(mag))
