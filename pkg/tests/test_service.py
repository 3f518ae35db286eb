import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from artifact import service
from artifact.config import echo, load_config
from artifact.errors import ConfigError

DISK = load_config(preset="disk")


@pytest.fixture(scope="module")
def client():
    return TestClient(service.app)


def test_disk_resonances_handler():
    table = service.handle_resonances(DISK)
    assert table.complete and len(table.rows) == 2
    by_q = {r.q: r for r in table.rows}
    assert by_q[1].multiplicity == 1 and by_q[2].multiplicity == 2
    assert sum(r.multiplicity for r in table.rows) == 3
    assert by_q[1].re_exact == pytest.approx(1.41419640e-3, rel=1e-8)
    assert by_q[2].re_exact == pytest.approx(3.18565173e-4, rel=1e-8)
    assert abs(by_q[1].re_asym - by_q[1].re_exact) / by_q[1].re_exact < 1e-2


def test_asymptotic_matches_resonances_columns():
    res = service.handle_resonances(DISK)
    asy = service.handle_asymptotic(DISK)
    a = sorted((r.q, r.re_asym, r.im_asym) for r in res.rows)
    b = sorted((r.q, r.re_asym, r.im_asym) for r in asy.rows)
    assert a == b


def test_scan_det_grid_and_small_frequency_ordering():
    cfg = load_config("[scan]\nomega_min = 1e-6\nomega_max = 1e-4\nsamples = 50\n", "table1")
    scan = service.handle_scan_det(cfg)
    assert scan.omega[0] == 1e-6 and scan.omega[-1] == 1e-4
    ratio = np.array(scan.f2) / np.array(scan.f1)
    # f2 dominates toward zero frequency and the gap widens monotonically
    assert ratio[0] > 10
    assert np.all(np.diff(ratio) < 0)


def test_scan_det_minima_near_roots():
    cfg = load_config(preset="fig2")
    scan = service.handle_scan_det(cfg)
    w, f1 = np.array(scan.omega), np.array(scan.f1)
    idx = [i for i in range(1, len(f1) - 1) if f1[i] < f1[i - 1] and f1[i] < f1[i + 1]]
    roots = [5.47058073e-3, 1.52009193e-2, 2.22071020e-2, 2.70620011e-2]
    step = w[1] - w[0]
    assert len(idx) == 4
    for i, r in zip(idx, roots):
        assert abs(w[i] - r) <= step


def test_unit_contrast_field_is_incident():
    text = "[contrast]\ndelta = 1\nepsilon = 1\n[incident]\nomega = 0.3\nn_max = 14\n[output]\ngrid = 15\n"
    cfg = load_config(text, "disk")
    res = service.handle_field(cfg)
    wave = cfg.incident.build()
    pts = np.array([[p.x, p.y] for p in res.points])
    ref = wave.evaluate(service.problem(cfg).medium, 0.3, pts)
    got = np.array([[complex(p.u[0], p.u[1]), complex(p.u[2], p.u[3])] for p in res.points])
    assert np.abs(got - ref).max() < 1e-8


def _interior(res, label):
    pts = [p for p in res.points if p.region == label]
    xy = np.array([[p.x, p.y] for p in pts])
    u = np.array([[complex(p.u[0], p.u[1]), complex(p.u[2], p.u[3])] for p in pts])
    return xy, u


def test_field_patterns_at_roots():
    rot = service.handle_field(load_config("[output]\ngrid = 41\n", "fig6"))
    xy, u = _interior(rot, "annulus 1")
    th = np.arctan2(xy[:, 1], xy[:, 0])
    uv = np.abs(u[:, 0] * np.cos(th) + u[:, 1] * np.sin(th))
    ut = np.abs(-u[:, 0] * np.sin(th) + u[:, 1] * np.cos(th))
    assert ut.mean() > 10 * uv.mean()
    tr = service.handle_field(load_config("[output]\ngrid = 41\n", "fig7"))
    for j in range(1, 5):
        _, u = _interior(tr, f"annulus {j}")
        mag = np.linalg.norm(u, axis=1)
        assert mag.std() / mag.mean() < 0.3


def test_field_points_avoid_circles():
    cfg = load_config("[output]\ngrid = 40\nextent = 1\n", "table1")
    geom = service.problem(cfg).geom
    pts = service.field_points(cfg, geom)
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert np.min(np.abs(r[:, None] - np.array(geom.radii))) >= 1e-9 * 2.0
    assert len(pts) <= 1600


def test_resolve_omega_errors():
    with pytest.raises(ConfigError):
        service.resolve_omega(load_config(preset="fig4"))
    cfg = load_config("[incident]\nomega = root:q=1,j=9\n", "disk")
    with pytest.raises(Exception, match="only 1 roots"):
        service.resolve_omega(cfg)


def test_http_endpoints(client):
    body = load_config(preset="disk").model_dump()
    r = client.post("/resonances", json=body)
    assert r.status_code == 200
    assert len(r.json()["rows"]) == 2
    r = client.post("/asymptotic", json=body)
    assert r.status_code == 200 and r.json()["complete"]
    small = load_config("[scan]\nsamples = 20\n", "disk").model_dump()
    r = client.post("/scan-det", json=small)
    assert r.status_code == 200 and len(r.json()["omega"]) == 20
    f = load_config("[incident]\nomega = 0.001\n[output]\ngrid = 9\n", "disk").model_dump()
    r = client.post("/field", json=f)
    assert r.status_code == 200 and r.json()["omega"] == 0.001
    n = load_config(
        "[incident]\nomega = scan\nnorm_samples = 3\nnorm_omega_min = 1e-3\nnorm_omega_max = 2e-3\nn_max = 2\n", "disk"
    ).model_dump()
    r = client.post("/field-norms", json=n)
    assert r.status_code == 200 and len(r.json()["rows"]) == 3


def test_http_errors(client):
    body = load_config(preset="disk").model_dump()
    body["contrast"]["tau"] = 1.0
    assert client.post("/resonances", json=body).status_code == 422
    body = load_config(preset="fig4").model_dump()
    r = client.post("/field", json=body)
    assert r.status_code == 422 and "incident.omega" in r.json()["detail"]
    bad = load_config("[incident]\nomega = root:q=2,j=5\n", "disk").model_dump()
    assert client.post("/field", json=bad).status_code == 400


def test_echo_round_trip():
    for name in ("table1", "fig4", "fig7", "disk"):
        cfg = load_config(preset=name)
        again = load_config(echo(cfg))
        assert again == cfg
        assert echo(again) == echo(cfg)
    assert math.isclose(load_config(preset="table2").contrast.delta, 1e-4)
