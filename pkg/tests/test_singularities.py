import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legendrian_lab import curves as cv
from legendrian_lab import singularities as sg


def test_psi_examples():
    assert np.array_equal(sg.psi_delta(0.7, 0.0), [0.0, 0.0])
    assert sg.psi_singular_points(1.0) == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)])
    assert sg.psi_singular_points(-1.0) == []
    assert sg.psi_singular_points(0.0) == [0.0]


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 4.0))
def test_psi_cusps_at_root_three(delta):
    pts = sg.psi_singular_points(delta)
    assert pts == pytest.approx([-math.sqrt(delta / 3), math.sqrt(delta / 3)], rel=1e-9)
    for u in pts:
        assert np.abs(sg.psi_delta_du(delta, u)).max() <= 1e-9 * max(1, delta**2)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2))
def test_psi_front_is_legendrian(delta, u):
    # slope dz/dx of the front equals the y coordinate 15/4 (u^2 - delta/3)
    d = sg.psi_delta_du(delta, u)
    y = 3.75 * (u * u - delta / 3)
    assert d[1] == pytest.approx(y * d[0], abs=1e-9 * (1 + abs(d[1])))


def test_psi_derivatives_fd():
    h = 1e-6
    for delta, u in [(1.0, 0.3), (-0.5, 1.2), (2.0, -0.7)]:
        du = (sg.psi_delta(delta, u + h) - sg.psi_delta(delta, u - h)) / (2 * h)
        dd = (sg.psi_delta(delta + h, u) - sg.psi_delta(delta - h, u)) / (2 * h)
        assert np.allclose(du, sg.psi_delta_du(delta, u), atol=1e-7)
        assert np.allclose(dd, sg.psi_delta_ddelta(delta, u), atol=1e-7)


def test_cutoff():
    u = np.linspace(-5, 5, 1001)
    c = sg.cutoff(u)
    assert np.all(c[np.abs(u) <= 1] == 1) and np.all(c[np.abs(u) >= 2] == 0)
    assert np.all(sg.psi_delta_compact(1.0, u[np.abs(u) >= 2]) == 0)


def _rank(variant, x, u, t=0.0):
    return sg.numeric_rank(sg.wrinkle_jacobian(variant, np.atleast_1d(x), u, t))


def test_wrinkle_rank_on_sphere():
    for x, u in [((0.0, 0.0), 1 / math.sqrt(3)), ((0.6, 0.0), math.sqrt(0.64 / 3)), ((1.0, 0.0), 0.0)]:
        assert _rank("standard", x, u) == 2
    assert _rank("standard", (1.0, 0.0), 0.5) == 3
    assert _rank("standard", (0.0, 0.0), 0.0) == 3


def test_wrinkle_rank_off_sphere():
    rng = np.random.default_rng(4)
    for _ in range(50):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        # points on |x|^2 + 3u^2 = 1.5 are regular
        r = math.sqrt(1.5 / (d[0] ** 2 + d[1] ** 2 + 3 * d[2] ** 2))
        assert _rank("standard", r * d[:2], r * d[2]) == 3


def test_unfurled_swallowtail_at_equator():
    # at |x| = 1, u = 0 the u-column vanishes entirely
    jac = sg.wrinkle_jacobian("standard", np.array([0.0, 1.0]), 0.0)
    assert np.array_equal(jac[:, -1], np.zeros(4))


def test_jacobian_matches_fd():
    h = 1e-6
    for variant in sg.WRINKLE_VARIANTS:
        x, u, t = np.array([0.3, -0.4]), 0.2, 0.5
        jac = sg.wrinkle_jacobian(variant, x, u, t)
        cols = [(sg._wrinkle_map(variant, x + h * e, u, t) - sg._wrinkle_map(variant, x - h * e, u, t)) / (2 * h)
                for e in np.eye(2)]
        cols.append((sg._wrinkle_map(variant, x, u + h, t) - sg._wrinkle_map(variant, x, u - h, t)) / (2 * h))
        assert np.allclose(np.stack(cols, -1), jac, atol=1e-7)


def test_traced_locus_is_sphere():
    pts = sg.trace_singular_locus("standard", sg.ray_directions(3, 40))
    assert len(pts) == 40
    assert sg.locus_defect("standard", pts) < 1e-8
    assert sg.singular_set_diameter(pts) <= 2.0 + 1e-9


def test_inside_out_variant():
    assert _rank("inside-out", (0.0, 0.0), 0.0) == 3
    assert _rank("inside-out", (1.0, 0.0), 0.0) == 2
    pts = sg.trace_singular_locus("inside-out", sg.ray_directions(3, 40))
    assert pts and sg.locus_defect("inside-out", pts) < 1e-8


def test_embryo_family():
    assert sg.min_relative_singular_value("embryo", 2.0, t=-0.5, n=15) > 1e-3
    assert _rank("embryo", (0.0, 0.0), 0.0, 0.0) == 2
    assert sg.trace_singular_locus("embryo", sg.ray_directions(3, 20), t=-0.5) == []
    pts = sg.trace_singular_locus("embryo", sg.ray_directions(3, 20), t=0.3)
    assert len(pts) == 20 and sg.locus_defect("embryo", pts, t=0.3) < 1e-8
    # at t = 0 the only rank drop in a neighbourhood is the origin
    grid = np.linspace(-0.5, 0.5, 11)
    drops = [(a, b, c) for a in grid for b in grid for c in grid if _rank("embryo", (a, b), c) < 3]
    assert drops == [(0.0, 0.0, 0.0)]


def test_birth_model_legendrian_and_cusps():
    t = np.linspace(-1.5, 1.5, 301)
    for tau in (-1.0, 0.0, 1.0):
        pts = sg.zigzag_birth_model(t, tau)
        vel = sg.zigzag_birth_velocity(t, tau)
        assert np.abs(vel[:, 2] - pts[:, 1] * vel[:, 0]).max() < 1e-9
    vel = sg.zigzag_birth_velocity(np.array([-1, 1]) / math.sqrt(3), 1.0)
    assert np.abs(vel[:, [0, 2]]).max() < 1e-12
    assert np.array_equal(sg.zigzag_birth_model(0.0, 0.0), [0.0, 0.0, 0.0])


def test_lambda_box_inside_vk():
    for m in (2, 8, 22):
        assert sg.box_contains_box(sg.lambda_bounding_box(m), sg.vk_box(m))
        t = np.linspace(-1, 1, 2001)
        pts = cv.lambda_i(m, t[:, None], np.linspace(-1, 1, 5)[None, :]).reshape(-1, 5)
        lo, hi = np.array(sg.lambda_bounding_box(m)).T
        assert np.all(pts >= lo - 1e-12) and np.all(pts <= hi + 1e-12)


def test_chart_example():
    spec = sg.LooseChartSpec(0.0, 2, 2.0)
    corner = np.array([1.5 / 2, 1.5 / 2, 4.5 / 4, 1.5, 1.5])
    assert sg.loose_chart_unscale(spec, [0.5, 0.5, 0.5, 1.0, 1.0]) == pytest.approx(corner)
    inner = corner * 0.999
    assert sg.loose_chart_rescale(spec, inner) == pytest.approx(np.array([0.5, 0.5, 0.5, 1.0, 1.0]) * 0.999)
    with pytest.raises(ValueError):
        sg.loose_chart_rescale(spec, corner * 1.01)


def test_chart_validation():
    with pytest.raises(ValueError):
        sg.LooseChartSpec(0.0, 2, 1.0)
    with pytest.raises(ValueError):
        sg.LooseChartSpec(0.0, 2, 2.0, q0=1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-0.99, 0.99), min_size=5, max_size=5))
def test_rescale_round_trip(frac):
    spec = sg.LooseChartSpec(0.1, 5, 1.5, q0=0.2)
    lo, hi = np.array(spec.box).T
    pt = (lo + hi) / 2 + np.array(frac) * (hi - lo) / 2
    assert sg.loose_chart_unscale(spec, sg.loose_chart_rescale(spec, pt)) == pytest.approx(pt)


def test_pullback_factor():
    for m in (2, 8, 22):
        assert sg.pullback_factor_defect(sg.LooseChartSpec(0.0, m, 2.0)) < 1e-10


def test_admissible_centres_and_arcs():
    assert len(sg.admissible_centres(2)) == 2
    assert len(sg.admissible_centres(22)) == 307
    for z in sg.admissible_centres(2):
        arc = sg.chart_arc(sg.LooseChartSpec(z, 2, 2.0), 20001)
        assert arc["arcs"] == 1 and arc["cusps"] == 2
        assert sg.loose_chart_boxes(sg.LooseChartSpec(z, 2, 2.0))["inside_vk"]
