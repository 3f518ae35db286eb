"""Command-line client: parse a run configuration, call a handler, write CSV.

Every run also writes ``<command>.cfg`` next to its CSV, the fully resolved
configuration; passing it back through ``--config`` repeats the run.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import service
from .config import PRESETS, echo, load_config
from .errors import ArtifactError, ConfigError, ConvergenceError, NearSingularError

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("artifact")


def fmt(x) -> str:
    """Scientific notation with 9 significant digits; missing values are 'nan'."""
    if x is None or not math.isfinite(x):
        return "nan"
    return f"{x:.8e}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _resonances(cfg, out: Path, args) -> int:
    table = service.handle_resonances(cfg, args.threads)
    rows = sorted(table.rows, key=lambda r: (r.q, math.inf if r.re_exact is None else r.re_exact))
    write_csv(
        out / cfg.output.resonances,
        ["j", "q", "re_exact", "im_exact", "re_asym", "im_asym", "res_exact", "res_asym"],
        [
            [r.j, r.q]
            + [fmt(v) for v in (r.re_exact, r.im_exact, r.re_asym, r.im_asym, r.res_exact, r.res_asym)]
            for r in rows
        ],
    )
    return EXIT_OK if table.complete else EXIT_SOLVER


def _asymptotic(cfg, out: Path, args) -> int:
    table = service.handle_asymptotic(cfg)
    write_csv(
        out / cfg.output.asymptotic,
        ["j", "q", "re_asym", "im_asym", "res_asym"],
        [[r.j, r.q] + [fmt(v) for v in (r.re_asym, r.im_asym, r.res_asym)] for r in table.rows],
    )
    return EXIT_OK if table.complete else EXIT_SOLVER


def _scan_det(cfg, out: Path, args) -> int:
    scan = service.handle_scan_det(cfg, args.threads)
    write_csv(
        out / cfg.output.scan_det,
        ["omega", "f1", "f2"],
        [[fmt(w), fmt(a), fmt(b)] for w, a, b in zip(scan.omega, scan.f1, scan.f2)],
    )
    return EXIT_OK


def _field(cfg, out: Path, args) -> int:
    if cfg.incident.omega == "scan":
        scan = service.handle_norms(cfg, args.threads)
        write_csv(
            out / cfg.output.norms,
            ["omega", "norm_s", "norm_p"],
            [[fmt(r.omega), fmt(r.norm_s), fmt(r.norm_p)] for r in scan.rows],
        )
        return EXIT_OK if scan.complete else EXIT_SOLVER
    res = service.handle_field(cfg, args.threads)
    header = ["x", "y", "region"]
    for part in ("u", "us", "up"):
        for comp in ("x", "y"):
            header += [f"re_{part}{comp}", f"im_{part}{comp}"]
    write_csv(
        out / cfg.output.field,
        header,
        [[fmt(p.x), fmt(p.y), p.region] + [fmt(v) for v in p.u + p.u_s + p.u_p] for p in res.points],
    )
    if args.svg:
        (out / cfg.output.svg).write_text(render_svg(res, cfg.output.grid), encoding="utf-8", newline="\n")
    return EXIT_OK


# ---------------------------------------------------------------- SVG

_RAMP = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]], float)


def _colour(t: float) -> str:
    t = min(max(t, 0.0), 1.0) * (len(_RAMP) - 1)
    i = min(int(t), len(_RAMP) - 2)
    c = _RAMP[i] + (t - i) * (_RAMP[i + 1] - _RAMP[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def render_svg(res, n: int, size: int = 600) -> str:
    """|u| on the sample grid with a linear colour scale; circles drawn on top."""
    pts = np.array([[p.x, p.y] for p in res.points])
    mag = np.array([math.hypot(math.hypot(p.u[0], p.u[1]), math.hypot(p.u[2], p.u[3])) for p in res.points])
    L = float(np.max(np.abs(pts))) if len(pts) else 1.0
    L *= n / (n - 1) if n > 1 else 1.0
    cell = size / n
    lo, hi = float(mag.min()), float(mag.max())
    span = hi - lo if hi > lo else 1.0
    scale = size / (2 * L)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"<title>|u| at omega = {res.omega:.9g} (min {lo:.4g}, max {hi:.4g})</title>",
    ]
    for (x, y), v in zip(pts, mag):
        px = (x + L) * scale - cell / 2
        py = (L - y) * scale - cell / 2
        parts.append(
            f'<rect x="{px:.2f}" y="{py:.2f}" width="{cell + 0.05:.2f}" height="{cell + 0.05:.2f}" '
            f'fill="{_colour((v - lo) / span)}"/>'
        )
    for R in res.radii:
        parts.append(
            f'<circle cx="{size / 2:.2f}" cy="{size / 2:.2f}" r="{R * scale:.2f}" '
            'fill="none" stroke="white" stroke-width="1"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------- entry point

COMMANDS = {
    "resonances": _resonances,
    "scan-det": _scan_det,
    "field": _field,
    "asymptotic": _asymptotic,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description="Resonances and fields of nested elastic resonators.")
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("--config", type=Path, help="sectioned key = value file")
    p.add_argument("--preset", choices=list(PRESETS), help="built-in configuration, overridden by --config")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads for frequency grids")
    p.add_argument("--svg", action="store_true", help="also render an |u| heatmap (field)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else None
        if text is None and args.preset is None:
            raise ConfigError("give --config, --preset or both")
        cfg = load_config(text, args.preset, str(args.config) if args.config else "<preset>")
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    stem = args.command.replace("-", "_")
    (out / f"{stem}.cfg").write_text(echo(cfg), encoding="utf-8", newline="\n")
    try:
        code = COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NearSingularError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if code == EXIT_SOLVER:
        print("solver failure: some roots did not converge (rows marked nan)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
