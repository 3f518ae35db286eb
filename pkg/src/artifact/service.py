"""Request handlers and the HTTP app.

The handlers are plain functions from a :class:`RunConfig` to a response
model; the CLI calls them in-process and the FastAPI app exposes the same
functions over HTTP.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from fastapi import FastAPI, HTTPException

from . import asymptotics, detsolve, fields
from .errors import ArtifactError, ConfigError, ConvergenceError, DomainError, NearSingularError
from .schemas import (
    ROOT_REF,
    AsymptoticRow,
    AsymptoticTable,
    DetScan,
    FieldPoint,
    FieldResult,
    NormRow,
    NormScan,
    ResonanceRow,
    ResonanceTable,
    RunConfig,
)


@dataclass
class Problem:
    geom: object
    medium: object
    contrast: object


def problem(cfg: RunConfig) -> Problem:
    try:
        return Problem(cfg.geometry.build(), cfg.medium.build(), cfg.contrast.build())
    except (ArtifactError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _num(x) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def scan_config(cfg: RunConfig, q: int) -> detsolve.ScanConfig:
    lo, hi = cfg.scan.window(q, cfg.contrast.delta)
    s = cfg.scan
    return detsolve.ScanConfig(q, lo, hi, s.samples, s.refine_tol, s.max_iter)


def exact_roots(cfg: RunConfig, q: int, threads: int = 1) -> list:
    p = problem(cfg)
    return detsolve.find_resonances(scan_config(cfg, q), p.geom, p.medium, p.contrast, threads)


def asymptotic_roots(cfg: RunConfig) -> dict:
    """Leading-order roots keyed by channel (1 or 2), each sorted by real part."""
    p = problem(cfg)
    if p.geom.structure == "single":
        found = asymptotics.disk_asymptotic_roots(p.medium, p.contrast, p.geom.radii[0])
        rot = [r for r in found if r.q == 1]
        trans = detsolve.dedup([r for r in found if r.q == 2], tol=1e-8 * abs(found[0].omega))
        trans = [replace(r, multiplicity=2) for r in trans]
        out = {1: rot, 2: trans}
    else:
        lo, hi = cfg.scan.window(1, cfg.contrast.delta)
        lo2, hi2 = cfg.scan.window(2, cfg.contrast.delta)
        window = (min(lo, lo2), max(hi, hi2))
        found = asymptotics.nested_asymptotic_roots(
            p.geom, p.medium, p.contrast, window, cfg.scan.asymptotic_samples
        )
        out = {1: [r for r in found if r.q == 1], 2: [r for r in found if r.q == 2]}
    return {q: sorted(v, key=lambda r: r.omega.real) for q, v in out.items()}


def handle_resonances(cfg: RunConfig, threads: int = 1) -> ResonanceTable:
    asym = asymptotic_roots(cfg)
    rows = []
    complete = True
    for q in (1, 2):
        ex = exact_roots(cfg, q, threads)
        good = [r for r in ex if cmath.isfinite(r.omega)]
        bad = [r for r in ex if not cmath.isfinite(r.omega)]
        ordered = good + bad
        ap = asym.get(q, [])
        for j in range(max(len(ordered), len(ap))):
            e = ordered[j] if j < len(ordered) else None
            a = ap[j] if j < len(ap) else None
            ok = e is not None and e.converged and e.certified
            complete &= ok
            rows.append(
                ResonanceRow(
                    j=j + 1,
                    q=q,
                    re_exact=_num(e.omega.real) if e else None,
                    im_exact=_num(e.omega.imag) if e else None,
                    re_asym=_num(a.omega.real) if a else None,
                    im_asym=_num(a.omega.imag) if a else None,
                    res_exact=_num(e.residual) if e else None,
                    res_asym=_num(a.residual) if a else None,
                    multiplicity=2 if q == 2 else 1,
                    converged=ok,
                )
            )
    return ResonanceTable(rows=rows, complete=complete)


def handle_asymptotic(cfg: RunConfig) -> AsymptoticTable:
    rows = []
    complete = True
    for q, roots in asymptotic_roots(cfg).items():
        for j, r in enumerate(roots, 1):
            complete &= r.converged
            rows.append(
                AsymptoticRow(
                    j=j,
                    q=q,
                    re_asym=_num(r.omega.real),
                    im_asym=_num(r.omega.imag),
                    res_asym=_num(r.residual),
                    multiplicity=r.multiplicity,
                )
            )
    return AsymptoticTable(rows=rows, complete=complete)


def handle_scan_det(cfg: RunConfig, threads: int = 1) -> DetScan:
    p = problem(cfg)
    lo1, hi1 = cfg.scan.window(1, cfg.contrast.delta)
    lo2, hi2 = cfg.scan.window(2, cfg.contrast.delta)
    base = detsolve.ScanConfig(1, min(lo1, lo2), max(hi1, hi2), cfg.scan.samples)
    grid, f1 = detsolve.scan_grid(base, p.geom, p.medium, p.contrast, threads)
    _, f2 = detsolve.scan_grid(
        detsolve.ScanConfig(2, base.omega_min, base.omega_max, base.samples), p.geom, p.medium, p.contrast, threads
    )
    return DetScan(omega=grid.tolist(), f1=np.asarray(f1, float).tolist(), f2=np.asarray(f2, float).tolist())


def resolve_omega(cfg: RunConfig, threads: int = 1) -> float:
    """Real frequency of a field run: an explicit value or Re of a referenced root."""
    spec = cfg.incident.omega
    if spec is None or spec == "scan":
        raise ConfigError("incident.omega must be a number or 'root:q=Q,j=J' for a field snapshot")
    m = ROOT_REF.match(spec)
    if not m:
        return float(spec)
    q, j = int(m.group(1)), int(m.group(2))
    roots = [r for r in exact_roots(cfg, q, threads) if cmath.isfinite(r.omega)]
    if not 1 <= j <= len(roots):
        raise DomainError(f"{spec}: only {len(roots)} roots found in channel {q}")
    root = roots[j - 1]
    if not root.converged:
        raise ConvergenceError(f"{spec}: root refinement did not converge")
    return float(root.omega.real)


def field_points(cfg: RunConfig, geom) -> np.ndarray:
    """Cell-centred square grid; points within 1e-9 r1 of a circle are dropped."""
    n = cfg.output.grid
    L = cfg.output.extent * geom.radii[0]
    h = 2 * L / n
    ax = -L + h * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(ax, ax[::-1])
    pts = np.stack([X.ravel(), Y.ravel()], -1)
    r = np.hypot(pts[:, 0], pts[:, 1])
    keep = np.all(np.abs(r[:, None] - np.asarray(geom.radii)[None, :]) >= 1e-9 * geom.radii[0], axis=1)
    return pts[keep]


def _pair(v) -> tuple:
    return (float(v[0].real), float(v[0].imag), float(v[1].real), float(v[1].imag))


def handle_field(cfg: RunConfig, threads: int = 1) -> FieldResult:
    p = problem(cfg)
    omega = resolve_omega(cfg, threads)
    wave = cfg.incident.build()
    dens = fields.solve_scattering(p.geom, p.medium, p.contrast, omega, wave, cfg.incident.n_max)
    pts = field_points(cfg, p.geom)
    grid = fields.evaluate_field(p.geom, p.medium, p.contrast, omega, dens, wave, pts)
    out = [
        FieldPoint(
            x=float(x[0]),
            y=float(x[1]),
            region=lab,
            u=_pair(u),
            u_s=_pair(s),
            u_p=_pair(pp),
        )
        for x, lab, u, s, pp in zip(grid.points, grid.labels, grid.values, grid.u_s, grid.u_p)
    ]
    return FieldResult(omega=omega, radii=list(p.geom.radii), points=out)


def handle_norms(cfg: RunConfig, threads: int = 1) -> NormScan:
    p = problem(cfg)
    inc = cfg.incident
    lo, hi = cfg.scan.window(1, cfg.contrast.delta)
    lo = inc.norm_omega_min or lo
    hi = inc.norm_omega_max or hi
    if not 0 < lo < hi:
        raise ConfigError("empty norm scan window")
    grid = np.linspace(lo, hi, inc.norm_samples)
    res = fields.enhancement_scan(
        p.geom, p.medium, p.contrast, inc.build(), grid, inc.norm_region, inc.n_max, threads
    )
    rows = [NormRow(omega=w, norm_s=_num(s), norm_p=_num(pp)) for w, s, pp in res]
    return NormScan(rows=rows, complete=all(r.norm_s is not None for r in rows))


# ---------------------------------------------------------------- HTTP


def _guard(fn, *args):
    try:
        return fn(*args)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except (ConvergenceError, NearSingularError) as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except ArtifactError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="artifact", version="0.1.0")

    @app.post("/resonances", response_model=ResonanceTable)
    def resonances(cfg: RunConfig) -> ResonanceTable:
        return _guard(handle_resonances, cfg)

    @app.post("/asymptotic", response_model=AsymptoticTable)
    def asymptotic(cfg: RunConfig) -> AsymptoticTable:
        return _guard(handle_asymptotic, cfg)

    @app.post("/scan-det", response_model=DetScan)
    def scan_det(cfg: RunConfig) -> DetScan:
        return _guard(handle_scan_det, cfg)

    @app.post("/field", response_model=FieldResult)
    def field(cfg: RunConfig) -> FieldResult:
        return _guard(handle_field, cfg)

    @app.post("/field-norms", response_model=NormScan)
    def field_norms(cfg: RunConfig) -> NormScan:
        return _guard(handle_norms, cfg)

    return app


app = create_app()
