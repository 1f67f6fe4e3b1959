import math

import numpy as np
import pytest

import kahlerlift as kl

ISQ = """
chart.n = 3
chart.c = 1
family.kind = inverse-sqrt
family.B = 1
A = 1
points = 4
t_max = 1
seed = 11
"""


def test_chart_metric_and_curvature():
    chart = kl.Chart(3, -1.0)
    x = np.array([0.2, -0.1, 0.3])
    m = chart.metric(x)
    sigma = 1 - 0.25 * x.dot(x)
    assert np.allclose(m["g"], np.eye(3) / sigma**2)
    assert m["gamma"].shape == (3, 3, 3)
    assert m["riemann"].shape == (3, 3, 3, 3)
    assert np.allclose(chart.christoffel_oracle(x), m["gamma"], atol=1e-8)
    k = chart.sectional_curvature(x, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    assert k == pytest.approx(-1.0, abs=1e-12)


def test_coefficients_inverse_sqrt_family():
    fam = kl.Family.inverse_sqrt(1.0, 1.0, 1.0)
    cs = kl.coefficients(fam, 1.0, 1.0)
    assert cs["b1"] == pytest.approx(0.0, abs=1e-14)
    assert cs["d1"] == pytest.approx(-1.0 / 3.0, rel=1e-12)
    assert cs["a1"] * cs["a2"] == pytest.approx(1.0, rel=1e-14)


def test_custom_family_matches_named_one():
    named = kl.Family.power_plus_constant(1.0, 2.0, 1.0)
    custom = kl.Family.custom(1.0, "t^2+1", lambda t: (t * t + 1.0, 2.0 * t))
    for t in (0.1, 0.5, 1.3):
        assert custom(t) == pytest.approx(named(t))
        assert custom.second_derivative(t) == pytest.approx(2.0, rel=1e-6)


def test_admissibility_failure_is_reported():
    adm = kl.check_admissibility(kl.Family.constant(1.0, 1.0), 1.0, 1.0)
    assert not adm["passed"]
    failing = [c for c in adm["conditions"] if not c["passed"]]
    assert failing[0]["first_failure_t"] == pytest.approx(0.5)


def test_geometry_identities_at_a_point():
    geo = kl.Geometry(kl.Chart(3, 1.0), kl.Family.inverse_sqrt(1.0, 1.0, 1.0))
    x = np.array([0.1, -0.2, 0.3])
    p = np.array([0.4, 0.5, -0.3])
    s = geo.structure(x, p)
    J, G = s["J"], s["G"]
    assert np.abs(J @ J + np.eye(6)).max() < 1e-10
    assert np.abs(J.T @ G @ J - G).max() < 1e-10
    assert geo.nijenhuis(x, p) < 1e-9
    assert geo.nijenhuis(x, p, oracle=True) < 1e-6
    assert np.abs(geo.ricci(x, p) - geo.einstein_constant * G).max() < 1e-9
    assert np.abs(geo.connection(x, p) - geo.koszul_oracle(x, p)).max() < 1e-6
    H = geo.holomorphic_sectional_curvature(x, p, np.arange(1.0, 7.0))
    assert math.isfinite(H)


def test_perturbed_b1_breaks_integrability():
    geo = kl.Geometry(kl.Chart(3, 1.0), kl.Family.inverse_sqrt(1.0, 1.0, 1.0), b1_shift=0.1)
    assert geo.nijenhuis(np.array([0.1, -0.2, 0.3]), np.array([0.4, 0.5, -0.3])) > 1e-3


def test_run_suite_report_shape_and_determinism():
    first = kl.run_suite(ISQ)
    second = kl.run_suite(ISQ)
    assert first == second
    report = kl.verify(ISQ)
    assert list(report)[:1] == ["config"]
    assert report["overall_pass"] is True
    assert report["runtime_ms"] is None
    names = [c["name"] for c in report["checks"]]
    assert names == kl.suite_checks()
    for c in report["checks"]:
        assert set(["name", "paper_ref", "points", "max_residual", "tolerance", "pass"]) <= set(c)


def test_overrides_and_bad_config():
    report = kl.verify(ISQ, {"points": 2, "chart.n": 2})
    assert report["config"]["points"] == 2
    assert report["config"]["chart.n"] == 2
    with pytest.raises(kl.ConfigError):
        kl.verify(ISQ, {"chart.m": 1})


def test_scan_hsc_csv():
    csv = kl.scan_hsc(ISQ, 20)
    lines = csv.strip().split("\n")
    assert lines[0] == "kind;point;x;p;t;direction;X;H"
    assert len(lines) == 1 + 4 * 20 + 3
    spread = float(lines[-1].split(";")[-1])
    assert spread > 1e-3
