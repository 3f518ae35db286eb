import math

import numpy as np
import pytest

import oracles
from artifact.assembly import ConcentricGeometry
from artifact.asymptotics import (
    KernelBasis,
    adjoint_densities,
    apply_layer,
    c_matrix,
    c_matrix_disk,
    disk_asymptotic_roots,
    disk_leading_coeffs,
    kernel_residual,
    nested_asymptotic_roots,
    nested_condition,
    nested_leading_matrices,
    pairing,
    rigid_motion,
    single_layer_hat,
    static_disk_single_layer,
)
from artifact.errors import GeometryError
from artifact.medium import Contrast, Medium, asymptotic_constants, gamma_omega
from artifact.specfun import E_C

M = Medium(2.0, 1.0, 1.0)
K = asymptotic_constants(M)

# single disk R = 2, delta = eps = 1e-6: mode-matching oracle roots (frozen)
DISK_EXACT_Q1 = 1.41419640e-3 - 4.44e-9j
DISK_EXACT_Q2 = 3.18565173e-4 - 3.47464917e-5j

# nested N = 4, delta = 1e-5, tau = 1: mode-matching oracle roots (frozen)
EXACT_Q1 = [5.47058073e-3, 1.52009193e-2, 2.22071020e-2, 2.70620011e-2]
EXACT_Q2 = [
    1.48313466e-3 - 2.03183933e-4j,
    1.75254291e-2 - 3.3914582e-5j,
    2.94470538e-2 - 1.47867e-5j,
    3.72580224e-2 - 3.81722e-6j,
]


def test_static_disk_values():
    assert static_disk_single_layer(M, 1.0, 3) == pytest.approx(-0.5)
    assert static_disk_single_layer(M, 1.0, 1) == pytest.approx(-0.5 * (1 - 0.25) / 2)
    with pytest.raises(GeometryError):
        static_disk_single_layer(M, 0.0, 1)


@pytest.mark.parametrize("R,i", [(1.0, 3), (1.0, 1), (2.0, 1), (2.0, 2), (1.5, 3)])
def test_static_disk_vs_quadrature(R, i):
    # S[zeta_i] = lambda_i zeta_i; read the nonzero component at x = (R, 0)
    comp, zval = {1: (0, 1 / (2 * math.pi * R)), 2: (1, 1 / (2 * math.pi * R)), 3: (1, -R / (2 * math.pi * R**3))}[i]
    ref = oracles.static_single_layer(K.alpha1, K.alpha2, R, i, comp) / zval
    assert static_disk_single_layer(M, R, i) == pytest.approx(ref, rel=1e-10)
    other = oracles.static_single_layer(K.alpha1, K.alpha2, R, i, 1 - comp)
    assert abs(other) < 1e-14


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 3.7])
def test_c_matrix_disk_form(R):
    C = c_matrix(M, R)
    assert np.allclose(C, C.T, atol=1e-12)
    assert np.allclose(C, c_matrix_disk(M, R), rtol=1e-8, atol=1e-12)
    for i in (1, 2, 3):
        # diagonal entry = lambda_i (zeta_i, zeta_i)
        zz = pairing(KernelBasis(R).zeta(i), KernelBasis(R).zeta(i), R).real
        assert C[i - 1, i - 1] == pytest.approx(static_disk_single_layer(M, R, i) * zz, rel=1e-10)


def test_c_singular_radius_keeps_layer_invertible():
    R = math.exp(K.sigma2 / (2 * K.sigma1))
    assert abs(static_disk_single_layer(M, R, 1)) < 1e-14
    assert abs(np.linalg.det(c_matrix(M, R))) < 1e-14
    g = gamma_omega(M, 1e-3)
    for n in (-1, 0, 1):
        cond = np.linalg.cond(single_layer_hat(M, g, R, R, n))
        assert np.isfinite(cond) and cond < 1e6


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_kernel_space(R, i):
    assert kernel_residual(M, R, i) < 1e-8


def test_biorthogonality():
    for R in (0.7, 2.0):
        assert np.allclose(KernelBasis(R).gram(), np.eye(3), atol=1e-14)
    with pytest.raises(ValueError):
        rigid_motion(4, 1.0)


def test_rigid_motion_modes_by_fft():
    r, nodes = 1.3, 64
    th = 2 * np.pi * np.arange(nodes) / nodes
    x = r * np.stack([np.cos(th), np.sin(th)], -1)
    v = np.stack([np.cos(th), np.sin(th)], -1)
    t = np.stack([-np.sin(th), np.cos(th)], -1)
    fields = {1: np.tile([1.0, 0.0], (nodes, 1)), 2: np.tile([0.0, 1.0], (nodes, 1)), 3: np.stack([x[:, 1], -x[:, 0]], -1)}
    for i, u in fields.items():
        modes = rigid_motion(i, r)
        for n in (-1, 0, 1):
            e = np.exp(-1j * n * th)
            got = [np.mean(np.sum(u * v, -1) * e), np.mean(np.sum(u * t, -1) * e)]
            assert np.allclose(got, modes[n], atol=1e-14)


def test_disk_leading_coeffs():
    co = disk_leading_coeffs(M, Contrast(1e-6, 1e-6), 2.0)
    assert co.m[2] == pytest.approx(0.5)
    assert co.p[2] == 0
    assert np.allclose(co.q(1e-3), 1.0)
    co2 = disk_leading_coeffs(M, Contrast(1e-6, 1e-6 / 4), 2.0)
    q = co2.q(1e-3)
    assert q[2] == 1 and abs(q[0] - 1) > 1e-3 and q[0] == q[1]


def test_disk_roots():
    delta = 1e-6
    roots = disk_asymptotic_roots(M, Contrast(delta, delta), 2.0)
    assert len(roots) == 3
    assert roots[2].omega == pytest.approx(math.sqrt(8e-6) / 2, rel=1e-12)
    assert roots[0].omega == pytest.approx(roots[1].omega, rel=1e-14)
    assert abs(roots[2].omega - DISK_EXACT_Q1) / abs(DISK_EXACT_Q1) < 1e-2
    assert abs(roots[0].omega - DISK_EXACT_Q2) / abs(DISK_EXACT_Q2) < 1e-2
    # translational condition in Bessel-expansion form, exact and asymptotic roots
    R = 2.0
    for w in (roots[0].omega, DISK_EXACT_Q2):
        ks, kp = w, w / 2
        rhs = -(R * R / 8) * (ks**2 * (E_C + 2 * np.log(ks * R)) + kp**2 * (E_C + 2 * np.log(kp * R)))
        assert abs(rhs - delta) / delta < 1e-2


def test_matrices_block_structure():
    geom = ConcentricGeometry.nested_equidistant(4)
    lm = nested_leading_matrices(geom, M, Contrast.from_tau(1e-5, 1.0), 0.01)
    N = 4
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            for name in ("P", "M"):
                B = lm.block(name, i, j)
                off = B - np.diag(np.diag(B))
                assert not np.any(off)
                if i != j:
                    assert not np.any(B)
            Q = lm.block("Q", i, j)
            for a in range(N):
                for b in range(N):
                    if abs(a - b) > 1:
                        assert Q[a, b] == 0
    assert np.any(lm.block("Q", 1, 1)) and np.any(lm.block("Q", 3, 3))
    with pytest.raises(GeometryError):
        nested_leading_matrices(ConcentricGeometry.single_disk(1.0), M, Contrast(1e-5, 1e-5), 0.01)


def test_single_annulus_p_by_area_quadrature():
    """P_ij = a_lame (contour integral of zeta_i) . (area integral of xi_j)."""
    geom = ConcentricGeometry.nested_equidistant(1, 2.0)
    Rp, Rm = geom.radii
    lm = nested_leading_matrices(geom, M, Contrast.from_tau(1e-5, 1.0), 0.01)
    nr, nt = 64, 64
    # Gauss-Legendre in r, trapezoid in theta
    xr, wr = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * (Rp - Rm) * xr + 0.5 * (Rp + Rm)
    wr = 0.5 * (Rp - Rm) * wr
    th = 2 * np.pi * np.arange(nt) / nt
    X = r[:, None] * np.cos(th)[None]
    Y = r[:, None] * np.sin(th)[None]
    W = (wr * r)[:, None] * (2 * np.pi / nt)
    xi = {1: (np.ones_like(X), np.zeros_like(X)), 2: (np.zeros_like(X), np.ones_like(X)), 3: (Y, -X)}
    area = {j: np.array([np.sum(W * xi[j][0]), np.sum(W * xi[j][1])]) for j in xi}
    ct, st = np.cos(th), np.sin(th)
    s = {1: 1 / (2 * math.pi * Rp), 2: 1 / (2 * math.pi * Rp), 3: 1 / (2 * math.pi * Rp**3)}
    zx = {1: (np.ones(nt), np.zeros(nt)), 2: (np.zeros(nt), np.ones(nt)), 3: (Rp * st, -Rp * ct)}
    loop = {i: s[i] * Rp * 2 * np.pi / nt * np.array([np.sum(zx[i][0]), np.sum(zx[i][1])]) for i in zx}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            ref = K.a_lame * loop[i] @ area[j]
            assert lm.P[i - 1, j - 1] == pytest.approx(ref, abs=1e-12 * abs(K.a_lame) * math.pi * Rp**2)


def test_adjoint_densities_reproduce_boundary_data():
    geom = ConcentricGeometry.nested_equidistant(3)
    g = gamma_omega(M, 0.01)
    radii = geom.radii
    for nres in range(3):
        for j in (1, 2, 3):
            dens = adjoint_densities(geom, M, g, nres, j)
            ip = 2 * nres
            keys = sorted(dens)
            # each pair of circles bounding a gap: S[s_upper] - S[s_lower] on both circles
            pairs = [(k, k + 1) for k in keys if k + 1 in dens and k % 2 == 1]
            for a, b in pairs:
                for ci in (a, b):
                    u = {
                        n: apply_layer(M, g, radii[a], radii[ci], dens[a])[n]
                        - apply_layer(M, g, radii[b], radii[ci], dens[b])[n]
                        for n in (-1, 0, 1)
                    }
                    if ci == ip:
                        want = rigid_motion(j, radii[ci])
                    elif ci == ip + 2 and b == ip + 2:
                        want = {n: -v for n, v in rigid_motion(j, radii[ci]).items()}
                    else:
                        want = {n: np.zeros(2) for n in (-1, 0, 1)}
                    for n in (-1, 0, 1):
                        assert np.allclose(u[n], want[n], atol=1e-8)
            if nres == 0:
                u = apply_layer(M, g, radii[0], radii[0], dens[0])
                for n in (-1, 0, 1):
                    assert np.allclose(-u[n], rigid_motion(j, radii[0])[n], atol=1e-8)


def test_nested_roots_track_exact():
    geom = ConcentricGeometry.nested_equidistant(4)
    roots = nested_asymptotic_roots(geom, M, Contrast.from_tau(1e-5, 1.0))
    q1 = [r.omega for r in roots if r.q == 1]
    q2 = [r.omega for r in roots if r.q == 2]
    assert len(q1) == 4 and len(q2) == 4
    assert all(r.multiplicity == 2 for r in roots if r.q == 2)
    for got, ref in zip(q1, EXACT_Q1):
        assert abs(got - ref) / abs(ref) < 1e-3
    for got, ref in zip(q2, EXACT_Q2):
        assert abs(got - ref) / abs(ref) < 1e-3
    # roots of the block condition are roots of the full condition
    for w in q1[:1] + q2[:1]:
        full = nested_condition(geom, M, Contrast.from_tau(1e-5, 1.0), w)
        s = np.linalg.svd(full, compute_uv=False)
        assert s[-1] < 1e-8 * s[0]
