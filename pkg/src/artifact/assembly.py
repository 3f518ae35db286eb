"""Transmission systems for a single disk or N nested annular resonators.

Region k (k = 0 is the exterior, k = M the innermost disk) lies between
circles k-1 and k.  Its field is a sum of single layers: the "inner"
density of circle k-1 and the "outer" density of circle k.  Every circle
carries one row block for displacement continuity and one for traction
continuity, each written as (inside limit) - (outside limit); only the
outermost circle receives incident data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diskkernels as dk
from .errors import GeometryError, NearSingularError
from .medium import Contrast, Medium, wave_numbers
from .specfun import bessel_j, bessel_jp, second_derivative

CHANNEL_HARMONIC = {1: 0, 2: 1, 3: -1}


@dataclass(frozen=True)
class ConcentricGeometry:
    """Strictly decreasing circle radii; ``structure`` is 'single' or 'nested'."""

    radii: tuple
    structure: str = "nested"

    def __post_init__(self):
        r = tuple(float(v) for v in self.radii)
        object.__setattr__(self, "radii", r)
        if not r or any(v <= 0 for v in r) or any(a <= b for a, b in zip(r, r[1:])):
            raise GeometryError("radii must be positive and strictly decreasing")
        if self.structure == "single":
            if len(r) != 1:
                raise GeometryError("a single disk has exactly one circle")
        elif self.structure == "nested":
            if len(r) % 2:
                raise GeometryError("nested geometry needs an even number of circles")
        else:
            raise GeometryError(f"unknown structure {self.structure!r}")

    @classmethod
    def single_disk(cls, R: float) -> "ConcentricGeometry":
        return cls((R,), "single")

    @classmethod
    def nested_equidistant(cls, N: int, outer: float = 2.0) -> "ConcentricGeometry":
        """r_j^+ = a - a(j-1)/N, r_j^- = a - a(2j-1)/(2N) with a the outer radius."""
        if N < 1:
            raise GeometryError("need at least one resonator")
        radii = []
        for j in range(1, N + 1):
            radii += [outer - outer * (j - 1) / N, outer - outer * (2 * j - 1) / (2 * N)]
        return cls(tuple(radii), "nested")

    @property
    def M(self) -> int:
        return len(self.radii)

    @property
    def n_resonators(self) -> int:
        return 1 if self.structure == "single" else self.M // 2

    def is_resonator(self, region: int) -> bool:
        return region % 2 == 1

    def region_of(self, r: float) -> int:
        """Region index of radius r (r must not lie on a circle)."""
        return int(sum(1 for R in self.radii if r < R))

    def region_label(self, region: int) -> str:
        if region == 0:
            return "exterior"
        if self.structure == "single":
            return "disk"
        if region % 2 == 1:
            return f"annulus {(region + 1) // 2}"
        if region == self.M:
            return "core"
        return f"gap {region // 2}"

    def resonator_radii(self, j: int) -> tuple:
        """(outer, inner) radii of resonator j (1-based); inner is 0 for a disk."""
        if self.structure == "single":
            return self.radii[0], 0.0
        return self.radii[2 * j - 2], self.radii[2 * j - 1]


@dataclass(frozen=True)
class IncidentWave:
    """Plane wave u = amp_s q e^{i k_s x.d} + amp_p d e^{i k_p x.d}.

    ``kind`` 'p' and 's' keep one part; 'mixed' keeps both (equal amplitude).
    """

    kind: str = "mixed"
    direction: tuple = (1.0, 0.0)
    polarization: tuple | None = None
    amplitude: complex = 1.0

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        if self.kind not in ("p", "s", "mixed"):
            raise ValueError(f"unknown wave kind {self.kind!r}")
        if abs(np.linalg.norm(d) - 1) > 1e-12:
            raise ValueError("direction must be a unit vector")
        q = self.polarization
        if q is None:
            object.__setattr__(self, "polarization", (-d[1], d[0]))
        else:
            q = np.asarray(q, float)
            if abs(np.linalg.norm(q) - 1) > 1e-12 or abs(q @ d) > 1e-12:
                raise ValueError("polarization must be a unit vector orthogonal to d")

    @property
    def theta_d(self) -> float:
        return math.atan2(self.direction[1], self.direction[0])

    @property
    def s_sign(self) -> float:
        d, q = self.direction, self.polarization
        return float(np.sign(-d[1] * q[0] + d[0] * q[1]))

    def modal(self, m: Medium, omega, r, n: int, part: str | None = None):
        """Radial profiles (U, U', V, V') of harmonic n of the incident field at radius r."""
        ks, kp = wave_numbers(m, omega)
        a_n = 1j**n * np.exp(-1j * n * self.theta_d) * self.amplitude
        U = dU = V = dV = 0
        if self.kind in ("p", "mixed") and part in (None, "p"):
            z = kp * r
            f, fp = bessel_j(n, z), bessel_jp(n, z)
            fpp = second_derivative(n, z, f, fp)
            nf = 0.5 * (bessel_j(n - 1, z) + bessel_j(n + 1, z))  # n J_n(z)/z
            U = U - 1j * a_n * fp
            dU = dU - 1j * a_n * kp * fpp
            V = V + a_n * nf
            dV = dV + a_n * n * (fp * kp / z - f / (z * r))
        if self.kind in ("s", "mixed") and part in (None, "s"):
            z = ks * r
            f, fp = bessel_j(n, z), bessel_jp(n, z)
            fpp = second_derivative(n, z, f, fp)
            nf = 0.5 * (bessel_j(n - 1, z) + bessel_j(n + 1, z))
            b = a_n * self.s_sign
            U = U - b * nf
            dU = dU - b * n * (fp * ks / z - f / (z * r))
            V = V - 1j * b * fp
            dV = dV - 1j * b * ks * fpp
        return U, dU, V, dV

    def evaluate(self, m: Medium, omega, points, part: str | None = None):
        """Cartesian field at ``points`` (shape (..., 2))."""
        ks, kp = wave_numbers(m, omega)
        x = np.asarray(points, float)
        d = np.asarray(self.direction)
        q = np.asarray(self.polarization)
        xd = x @ d
        out = np.zeros(x.shape, complex)
        if self.kind in ("p", "mixed") and part in (None, "p"):
            out += self.amplitude * np.exp(1j * kp * xd)[..., None] * d
        if self.kind in ("s", "mixed") and part in (None, "s"):
            out += self.amplitude * np.exp(1j * ks * xd)[..., None] * q
        return out


@dataclass
class ModalSystem:
    """Dense transmission matrix for one harmonic (stacked over frequencies)."""

    q: int | None
    n: int
    components: tuple
    matrix: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.matrix.shape[-1]


def region_medium(geom: ConcentricGeometry, m: Medium, c: Contrast, region: int) -> Medium:
    return m.scaled(c) if region >= 1 and geom.is_resonator(region) else m


def _unknown(circle: int, slot: int, d: int) -> int:
    return (2 * circle + slot) * d


def assemble_mode(
    geom: ConcentricGeometry,
    m: Medium,
    c: Contrast,
    omega,
    n: int,
    components=(0, 1),
    traction_scale: float | None = None,
) -> ModalSystem:
    """System for harmonic ``n`` restricted to ``components`` (0 = v, 1 = t)."""
    omega = np.asarray(omega, dtype=complex)
    comps = tuple(components)
    d = len(comps)
    M = geom.M
    scale = geom.radii[0] if traction_scale is None else traction_scale
    A = np.zeros(omega.shape + (2 * M * d, 2 * M * d), complex)
    sel = np.ix_(comps, comps)
    media = [region_medium(geom, m, c, k) for k in range(M + 1)]
    for i, r in enumerate(geom.radii):
        rd, rt = 2 * i * d, 2 * i * d + d
        for side, reg, sign in (("in", i + 1, 1.0), ("out", i, -1.0)):
            sources = []
            if reg >= 1:
                sources.append((reg - 1, 0))
            if reg < M:
                sources.append((reg, 1))
            for circ, slot in sources:
                R = geom.radii[circ]
                tm = dk.transfer(media[reg], omega, R, n, r, side if circ == i else None)
                col = _unknown(circ, slot, d)
                A[..., rd : rd + d, col : col + d] += sign * tm.value_map[(...,) + sel]
                A[..., rt : rt + d, col : col + d] += sign * scale * tm.traction_map[(...,) + sel]
    return ModalSystem(None, n, comps, A, {"traction_scale": scale})


def assemble(geom, m, c, omega, q: int, traction_scale: float | None = None) -> ModalSystem:
    """Channel system: q = 1 is n = 0 (t only); q = 2, 3 are n = +1, -1 with (v, t)."""
    if q not in CHANNEL_HARMONIC:
        raise GeometryError(f"channel must be 1, 2 or 3, got {q}")
    n = CHANNEL_HARMONIC[q]
    comps = (1,) if q == 1 else (0, 1)
    sys = assemble_mode(geom, m, c, omega, n, comps, traction_scale)
    sys.q = q
    return sys


def incident_rhs(geom, m: Medium, omega, wave: IncidentWave, q: int | None = None, *, n=None, components=None, traction_scale=None):
    """Right-hand side: harmonic data of u^i and its traction on the outer circle."""
    if q is not None:
        n = CHANNEL_HARMONIC[q]
        components = (1,) if q == 1 else (0, 1)
    comps = tuple(components)
    d = len(comps)
    r1 = geom.radii[0]
    scale = r1 if traction_scale is None else traction_scale
    omega = np.asarray(omega, dtype=complex)
    U, dU, V, dV = wave.modal(m, omega, r1, n)
    srr, srt = dk.polar_traction(m, n, r1, U, dU, V, dV)
    vals = np.stack(np.broadcast_arrays(U, V), -1)[..., comps]
    tr = np.stack(np.broadcast_arrays(srr, srt), -1)[..., comps]
    f = np.zeros(omega.shape + (2 * geom.M * d,), complex)
    f[..., :d] = vals
    f[..., d : 2 * d] = scale * tr
    return f


@dataclass(frozen=True)
class DetValue:
    """det = phase * exp(logabs); ``mantissa * 10**exponent`` as a decimal pair."""

    phase: complex
    logabs: float

    @property
    def exponent(self) -> int:
        return int(math.floor(self.logabs / math.log(10))) if np.isfinite(self.logabs) else 0

    @property
    def mantissa(self) -> complex:
        if not np.isfinite(self.logabs):
            return 0j
        return self.phase * math.exp(self.logabs - self.exponent * math.log(10))

    @property
    def value(self) -> complex:
        return self.phase * math.exp(self.logabs) if np.isfinite(self.logabs) else 0j


def determinant(sys_or_matrix):
    """LU determinant with log-scaled magnitude (numpy slogdet)."""
    A = sys_or_matrix.matrix if isinstance(sys_or_matrix, ModalSystem) else np.asarray(sys_or_matrix)
    phase, logabs = np.linalg.slogdet(A)
    if np.ndim(phase) == 0:
        return DetValue(complex(phase), float(logabs))
    return [DetValue(complex(p), float(l)) for p, l in zip(np.ravel(phase), np.ravel(logabs))]


def solve_densities(sys: ModalSystem, rhs, cond_limit: float = 1e14):
    """Solve A x = f for one frequency; raise NearSingularError past ``cond_limit``."""
    A = np.asarray(sys.matrix)
    f = np.asarray(rhs, complex)
    if A.ndim != 2:
        raise ValueError("solve_densities expects a single-frequency system")
    if not np.any(f):
        return np.zeros_like(f)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_limit:
        raise NearSingularError(f"condition number {cond:.3e} exceeds {cond_limit:.1e}", cond)
    x = np.linalg.solve(A, f)
    return x
