import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legendrian_lab import curves as cv
from legendrian_lab.contact import GridSpec, legendrian_defect

PI = math.pi


def test_gamma_values():
    assert np.allclose(cv.gamma_m(2, 0.0), [-0.5, 0.5, -1 / 8], atol=1e-15)
    assert np.allclose(cv.gamma_m(1, 0.0), [-1, 1, -0.5], atol=1e-15)
    assert np.allclose(cv.gamma_inf(1.0), [0, 0, 1])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.floats(-1, 1))
def test_gamma_on_cylinder(m, t):
    x, y, _ = cv.gamma_m(m, t)
    assert x * x + y * y == pytest.approx(2 / m**2, abs=1e-12)


def test_gamma_rejects_nonpositive_m():
    with pytest.raises(ValueError):
        cv.gamma_m(0, 0.0)


def test_lambda_and_sigma_values():
    assert np.allclose(cv.lambda_i(2, 0.0, 0.5), [-0.5, 0.5, -1 / 8, 0.5, 0])
    assert np.allclose(cv.lambda_inf(0.2, -0.4), [0, 0, 0.2, -0.4, 0])
    assert np.allclose(cv.sigma(2, 0.0, 0.5), [-0.25, 0.25, -1 / 32], atol=1e-15)
    s_line = cv.lambda_map(2)
    assert np.all(cv.lambda_map(2).derivative((np.full(5, 0.3), np.linspace(-1, 1, 5)), 1)
                  == [0, 0, 0, 1, 0])
    assert s_line.dim == 5


@pytest.mark.parametrize("m", [2, 7, 22])
def test_surface_endpoints(m):
    t = np.linspace(-1, 1, 1001)
    assert np.abs(cv.sigma(m, t, 0.0) - cv.gamma_m(m, t)).max() == 0.0
    assert np.abs(cv.sigma(m, t, 1.0) - cv.gamma_inf(t)).max() <= 1e-15
    s = np.linspace(-1, 1, 7)[:, None]
    assert np.abs(cv.pi_embedding(m, t, s, 0.0) - cv.lambda_i(m, t, s)).max() == 0.0
    assert np.abs(cv.pi_embedding(m, t, s, 1.0) - cv.lambda_inf(t, s)).max() <= 1e-15


def test_sigma_contact_values():
    t, w = np.meshgrid(np.linspace(-1, 1, 101), np.linspace(0, 1, 51), indexing="ij")
    assert np.allclose(cv.sigma_contact_values(3, t, w), w * (2 - w), atol=1e-12)


def test_fibre_distance_to_axis_monotone_in_w():
    t = np.linspace(-1, 1, 301)[:, None]
    w = np.linspace(0, 1, 101)[None, :]
    dist = np.linalg.norm(cv.sigma(4, t, w) - cv.gamma_inf(t), axis=-1)
    assert np.all(np.diff(dist, axis=1) <= 1e-15)


def test_fibre_diameter_m8():
    d = cv.fiber_diameter(8, np.linspace(-1, 1, 401)).max()
    assert d <= math.sqrt(2) / 8 + 1 / (4 * 64)


def test_cusp_set_m2():
    cusps = cv.cusp_set(2)
    assert [c.t for c in cusps] == pytest.approx([-5 * PI / 16, -PI / 16, 3 * PI / 16])
    assert cv.tally(cusps) == (2, 1)
    vel = cv.gamma_m_velocity(2, np.array([c.t for c in cusps]))
    assert np.abs(vel[:, [0, 2]]).max() <= 1e-10


@pytest.mark.parametrize("m", range(2, 31))
def test_cusp_census(m):
    detected = cv.detect_cusps(m)
    assert cv.tally(detected) == cv.cusp_counts(m) == cv.tally(cv.cusp_set(m))
    # right cusps sit at x = +sqrt(2)/m and are local maxima of x
    for c in detected:
        assert (c.side == "right") == (c.x > 0)
        assert abs(abs(c.x) - math.sqrt(2) / m) < 1e-9


def test_m22_counts_and_filter():
    assert cv.cusp_counts(22) == (154, 154)
    assert cv.equidistribution_fraction(22) == pytest.approx(0.0309, abs=5e-4)
    assert cv.equidistribution_filter(range(2, 22)) == []
    assert 22 in cv.equidistribution_filter(range(2, 31))
    for m in cv.equidistribution_filter(range(2, 200)):
        k = 2 * math.floor(m * m / (2 * PI))
        assert cv.cusp_counts(m) == (k, k)


def test_crossings():
    assert cv.t_set(2) == pytest.approx([PI / 16])
    assert cv.z_axis_crossings(2) == pytest.approx([-3 * PI / 16, PI / 16, 5 * PI / 16])
    for m in (3, 11, 22):
        x = cv.gamma_m(m, np.array(cv.z_axis_crossings(m)))[:, 0]
        assert np.abs(x).max() <= 1e-12


@pytest.mark.parametrize("M", [2, 5, 22])
def test_two_cusps_between_consecutive_tset_points(M):
    ts = cv.t_set(M)
    cusp_t = [c.t for c in cv.cusp_set(M)]
    for a, b in zip(ts, ts[1:]):
        assert sum(a < t < b for t in cusp_t) == 2


def test_sequence_plan():
    assert cv.build_sequence_plan(1).ms == (22,)
    plan = cv.build_sequence_plan(4, GridSpec.uniform(20_001))
    assert plan.growth_ok()
    assert plan.partial_sums[-1] <= 4
    assert plan.tail_bound() < 4 / 2 ** (len(plan.ms) - 1)
    assert np.allclose(plan.distances, plan.measured, atol=1e-4)
    with pytest.raises(ValueError):
        cv.build_sequence_plan(0)


@pytest.mark.parametrize("m", range(2, 31, 4))
def test_gamma_legendrian(m):
    assert legendrian_defect(cv.gamma_map(m), GridSpec.uniform(10_000)) <= 1e-9


def test_curve_json_roundtrip():
    doc = cv.curve_to_json(cv.gamma_map(3), 101, kind="gamma", params={"m": 3})
    doc = json.loads(json.dumps(doc))
    assert doc["kind"] == "gamma" and len(doc["samples"]) == 101
    back = cv.curve_from_json(doc)
    t = np.linspace(-1, 1, 101)
    assert np.abs(back(t) - cv.gamma_m(3, t)).max() == 0.0
    with pytest.raises(ValueError):
        cv.curve_from_json({"samples": [[0, 1, 2, 3]]})
