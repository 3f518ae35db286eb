"""Request and response models shared by the HTTP service and the CLI."""

from __future__ import annotations

import math
import re
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .assembly import ConcentricGeometry, IncidentWave
from .detsolve import default_window
from .errors import GeometryError
from .medium import Contrast, Medium

ROOT_REF = re.compile(r"^root:q=([123]),j=(\d+)$")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometrySpec(_Strict):
    preset: Literal["nested-equidistant", "disk", "explicit"] = "nested-equidistant"
    N: int = Field(4, ge=1)
    outer: float = Field(2.0, gt=0)
    radii: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.preset == "explicit" and not self.radii:
            raise ValueError("explicit geometry needs radii")
        try:
            self.build()
        except GeometryError as exc:
            raise ValueError(str(exc)) from exc
        return self

    def build(self) -> ConcentricGeometry:
        if self.preset == "disk":
            return ConcentricGeometry.single_disk(self.outer)
        if self.preset == "explicit":
            kind = "single" if len(self.radii) == 1 else "nested"
            return ConcentricGeometry(tuple(self.radii), kind)
        return ConcentricGeometry.nested_equidistant(self.N, self.outer)


class MediumSpec(_Strict):
    lam: float = 2.0
    mu: float = Field(1.0, gt=0)
    rho: float = Field(1.0, gt=0)

    def build(self) -> Medium:
        return Medium(self.lam, self.mu, self.rho)


class ContrastSpec(_Strict):
    delta: float = Field(1e-5, gt=0, le=1)
    tau: Optional[float] = Field(None, gt=0)
    epsilon: Optional[float] = Field(None, gt=0, le=1)

    @model_validator(mode="after")
    def _one_of(self):
        if (self.tau is None) == (self.epsilon is None):
            raise ValueError("give exactly one of tau and epsilon")
        return self

    def build(self) -> Contrast:
        if self.tau is not None:
            return Contrast.from_tau(self.delta, self.tau)
        return Contrast(self.delta, self.epsilon)


class ScanSpec(_Strict):
    omega_min: Optional[float] = Field(None, gt=0)
    omega_max: Optional[float] = Field(None, gt=0)
    q1_omega_min: Optional[float] = Field(None, gt=0)
    q1_omega_max: Optional[float] = Field(None, gt=0)
    q2_omega_min: Optional[float] = Field(None, gt=0)
    q2_omega_max: Optional[float] = Field(None, gt=0)
    samples: int = Field(4000, ge=2)
    refine_tol: float = Field(1e-12, gt=0)
    max_iter: int = Field(60, ge=1)
    asymptotic_samples: int = Field(2000, ge=2)

    def window(self, q: int, delta: float) -> tuple:
        lo, hi = default_window(delta)
        lo = self.omega_min or lo
        hi = self.omega_max or hi
        ch = 2 if q == 3 else q
        lo = getattr(self, f"q{ch}_omega_min") or lo
        hi = getattr(self, f"q{ch}_omega_max") or hi
        if not lo < hi:
            raise ValueError(f"empty scan window for q={ch}: [{lo}, {hi}]")
        return lo, hi


class IncidentSpec(_Strict):
    kind: Literal["p", "s", "mixed"] = "mixed"
    direction: tuple[float, float] = (1.0, 0.0)
    amplitude: float = 1.0
    omega: Optional[str] = None
    n_max: int = Field(8, ge=0, le=40)
    norm_samples: int = Field(200, ge=2)
    norm_omega_min: Optional[float] = Field(None, gt=0)
    norm_omega_max: Optional[float] = Field(None, gt=0)
    norm_region: Literal["resonators", "inside"] = "resonators"

    @field_validator("direction")
    @classmethod
    def _unit(cls, d):
        n = math.hypot(*d)
        if n == 0:
            raise ValueError("direction must be nonzero")
        return (d[0] / n, d[1] / n)

    @field_validator("omega")
    @classmethod
    def _omega(cls, v):
        if v is None or v == "scan" or ROOT_REF.match(v):
            return v
        try:
            w = float(v)
        except ValueError:
            raise ValueError("omega must be a number, 'scan' or 'root:q=Q,j=J'") from None
        if not w > 0:
            raise ValueError("omega must be positive")
        return v

    def build(self) -> IncidentWave:
        return IncidentWave(self.kind, self.direction, None, self.amplitude)


class OutputSpec(_Strict):
    grid: int = Field(101, ge=2, le=2001)
    extent: float = Field(1.25, gt=0)
    resonances: str = "resonances.csv"
    scan_det: str = "scan_det.csv"
    field: str = "field.csv"
    norms: str = "field_norms.csv"
    asymptotic: str = "asymptotic.csv"
    svg: str = "field.svg"


class RunConfig(_Strict):
    geometry: GeometrySpec = GeometrySpec()
    medium: MediumSpec = MediumSpec()
    contrast: ContrastSpec = ContrastSpec(tau=1.0)
    scan: ScanSpec = ScanSpec()
    incident: IncidentSpec = IncidentSpec()
    output: OutputSpec = OutputSpec()


# ---------------------------------------------------------------- responses


class ResonanceRow(BaseModel):
    j: int
    q: int
    re_exact: Optional[float]
    im_exact: Optional[float]
    re_asym: Optional[float]
    im_asym: Optional[float]
    res_exact: Optional[float]
    res_asym: Optional[float]
    multiplicity: int = 1
    converged: bool = True


class ResonanceTable(BaseModel):
    rows: list[ResonanceRow]
    complete: bool


class AsymptoticRow(BaseModel):
    j: int
    q: int
    re_asym: Optional[float]
    im_asym: Optional[float]
    res_asym: Optional[float]
    multiplicity: int = 1


class AsymptoticTable(BaseModel):
    rows: list[AsymptoticRow]
    complete: bool


class DetScan(BaseModel):
    omega: list[float]
    f1: list[float]
    f2: list[float]


class FieldPoint(BaseModel):
    x: float
    y: float
    region: str
    u: tuple[float, float, float, float]
    u_s: tuple[float, float, float, float]
    u_p: tuple[float, float, float, float]


class FieldResult(BaseModel):
    omega: float
    radii: list[float]
    points: list[FieldPoint]


class NormRow(BaseModel):
    omega: float
    norm_s: Optional[float]
    norm_p: Optional[float]


class NormScan(BaseModel):
    rows: list[NormRow]
    complete: bool
