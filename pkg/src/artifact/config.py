"""Sectioned ``key = value`` run configuration, presets and the config echo.

A hand parser is used instead of :mod:`configparser` so that every error
can point at the offending line, including validation errors raised after
parsing.
"""

from __future__ import annotations

from pydantic import ValidationError

from .errors import ConfigError
from .schemas import RunConfig

SECTIONS = ("geometry", "medium", "contrast", "scan", "incident", "output")
# text key -> model field, where they differ
_ALIASES = {("medium", "lambda"): "lam"}
_LISTS = {("geometry", "radii"), ("incident", "direction")}

_TABLE = "[geometry]\npreset = nested-equidistant\nN = 4\nouter = 2\n[medium]\nlambda = 2\nmu = 1\nrho = 1\n"

PRESETS = {
    "table1": _TABLE + "[contrast]\ndelta = 1e-5\ntau = 1\n",
    "table2": _TABLE + "[contrast]\ndelta = 1e-4\ntau = 1\n",
    "table3": _TABLE + "[contrast]\ndelta = 1e-6\ntau = 1\n",
    "fig2": _TABLE + "[contrast]\ndelta = 1e-5\ntau = 1\n[scan]\nomega_min = 1e-3\nomega_max = 4e-2\nsamples = 2000\n",
    "fig3": _TABLE + "[contrast]\ndelta = 1e-5\ntau = 1\n[scan]\nomega_min = 1e-4\nomega_max = 4e-2\nsamples = 2000\n",
    "fig4": _TABLE
    + "[contrast]\ndelta = 1e-6\ntau = 1\n[incident]\nkind = mixed\ndirection = 1, 0\nomega = scan\n"
    + "norm_omega_min = 3e-4\nnorm_omega_max = 1.25e-2\nnorm_samples = 200\n",
    "fig5": _TABLE
    + "[contrast]\ndelta = 1e-6\ntau = 1\n[incident]\nkind = mixed\ndirection = 1, 0\nomega = scan\n"
    + "norm_omega_min = 3e-4\nnorm_omega_max = 1.25e-2\nnorm_samples = 200\n",
    "fig6": _TABLE + "[contrast]\ndelta = 1e-6\ntau = 1\n[incident]\nkind = mixed\ndirection = 1, 0\nomega = root:q=1,j=1\n",
    "fig7": _TABLE + "[contrast]\ndelta = 1e-6\ntau = 1\n[incident]\nkind = mixed\ndirection = 1, 0\nomega = root:q=2,j=1\n",
    "disk": "[geometry]\npreset = disk\nouter = 2\n[medium]\nlambda = 2\nmu = 1\nrho = 1\n"
    + "[contrast]\ndelta = 1e-6\nepsilon = 1e-6\n[scan]\nomega_min = 1e-4\nomega_max = 5e-3\n",
}


def parse_text(text: str, source: str = "<config>") -> tuple[dict, dict]:
    """Nested dict of raw values plus a (section, key) -> line number map."""
    data: dict = {}
    lines: dict = {}
    section = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{source}:{no}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"{source}:{no}: unknown section [{section}]")
            data.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{no}: expected key = value, got {raw.strip()!r}")
        if section is None:
            raise ConfigError(f"{source}:{no}: key outside any section")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{no}: empty key")
        field = _ALIASES.get((section, key), key)
        if (section, field) in _LISTS:
            value = [v.strip() for v in value.split(",") if v.strip()]
        data[section][field] = value
        lines[(section, field)] = no
    return data, lines


def merge(base: dict, over: dict) -> dict:
    out = {k: dict(v) for k, v in base.items()}
    for sec, vals in over.items():
        out.setdefault(sec, {}).update(vals)
    return out


def _validate(data: dict, lines: dict, source: str) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        msgs = []
        for err in exc.errors():
            loc = tuple(str(p) for p in err["loc"])
            no = lines.get(loc[:2]) if len(loc) >= 2 else None
            where = f"{source}:{no}" if no else source
            msgs.append(f"{where}: {'.'.join(loc) or 'config'}: {err['msg']}")
        raise ConfigError("\n".join(msgs)) from None


def load_config(text: str | None = None, preset: str | None = None, source: str = "<config>") -> RunConfig:
    """Preset values overridden by ``text``; either may be omitted."""
    data: dict = {}
    lines: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        data, _ = parse_text(PRESETS[preset], f"preset:{preset}")
    if text is not None:
        over, lines = parse_text(text, source)
        user = over.get("contrast", {})
        if data.get("contrast") and ("tau" in user or "epsilon" in user):
            data["contrast"].pop("tau", None)
            data["contrast"].pop("epsilon", None)
        data = merge(data, over)
    cfg = _validate(data, lines, source)
    try:
        for q in (1, 2):
            cfg.scan.window(q, cfg.contrast.delta)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ", ".join(_fmt(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


def echo(cfg: RunConfig) -> str:
    """Complete config text; loading it reproduces ``cfg`` exactly."""
    out = []
    dump = cfg.model_dump()
    for sec in SECTIONS:
        out.append(f"[{sec}]")
        for key, val in dump[sec].items():
            if val is None:
                continue
            name = next((k for (s, k), f in _ALIASES.items() if s == sec and f == key), key)
            out.append(f"{name} = {_fmt(val)}")
    return "\n".join(out) + "\n"
