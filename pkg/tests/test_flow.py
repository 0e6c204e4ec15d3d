import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from legendrian_lab import curves as cv
from legendrian_lab import flow as fl
from legendrian_lab import schedules as sc
from legendrian_lab.contact import beta5
from legendrian_lab.schedules import ramp

RNG = np.random.default_rng(11)
POINTS = RNG.uniform(-0.8, 0.8, (300, 5))


@pytest.fixture(scope="module")
def iso():
    return fl.StretchIsotopy(8, 0.5, sc.build_lambda_schedule(0.5))


@pytest.mark.parametrize("name", sorted(fl.BUILTIN_HAMILTONIANS))
def test_field_identities(name):
    res = fl.verify_contact_field_identities(fl.builtin_hamiltonian(name), POINTS, 0.4)
    assert res["value_residual"] <= 1e-8 and res["form_residual"] <= 1e-8


@settings(max_examples=40, deadline=None)
@given(arrays(float, 5, elements=st.floats(-2, 2)))
def test_reeb_flow_moves_z(pt):
    v = fl.ContactField(fl.builtin_hamiltonian("one"))(pt)
    assert np.array_equal(v, [0, 0, 1, 0, 0])


def test_unknown_hamiltonian():
    with pytest.raises(ValueError, match="unknown"):
        fl.builtin_hamiltonian("nope")


def test_fd_identity_residual_small():
    ham = fl.builtin_hamiltonian("bump2")
    h = 1e-5
    grad = np.stack([(ham(POINTS + h * e, 0) - ham(POINTS - h * e, 0)) / (2 * h) for e in np.eye(5)], -1)
    assert np.abs(grad - ham.grad(POINTS, 0)).max() <= 1e-4


def test_integrator_is_fourth_order():
    vf = fl.ContactField(fl.builtin_hamiltonian("bump"))
    study = fl.step_halving_study(vf, POINTS[:4] * 0.5, 1.0, [0.1, 0.05, 0.025, 0.0125])
    assert all(12 <= r <= 20 for r in study["ratios"])


def test_linear_fields_integrate_exactly():
    vf = fl.ContactField(fl.builtin_hamiltonian("one"))
    end = fl.flow_map(vf, POINTS[:3], 0.7, 0.1)
    assert np.allclose(end - POINTS[:3], [0, 0, 0.7, 0, 0])


def test_integration_validation_and_truncation():
    vf = fl.ContactField(fl.builtin_hamiltonian("one"))
    with pytest.raises(ValueError):
        fl.integrate_flow(vf, np.zeros(5), 0, 1, 0.0)
    traj = fl.integrate_flow(vf, np.zeros(5), 0, 5, 0.1, box=[(-1, 1)] * 5)
    assert traj.truncated and traj.end[2] > 1


def test_contact_planes_transported():
    for name in ("yp", "bump"):
        res = fl.verify_conformal_pullback(fl.ContactField(fl.builtin_hamiltonian(name)), POINTS[:6], 1.0, 1e-3)
        assert res["max_angle_defect"] <= 1e-5


def test_identity_outside_support():
    ham = fl.builtin_hamiltonian("bump")
    far = RNG.uniform(-4, 4, (300, 5))
    assert fl.outside_support_motion(fl.ContactField(ham), ham, far, 1.0, 0.02) == 0.0


def test_stretch_velocity_matches_fd(iso):
    assert fl.compare_velocity(iso, (21, 21, 6))["relative_to_scale"] <= 1e-6


def test_velocity_annihilated_on_legendrian_edge(iso):
    res = fl.verify_velocity_annihilated_by_beta(iso, (21, 21, 6))
    assert res["w0_slice_max"] <= 1e-8


def test_obstruction_identity(iso):
    res = fl.verify_obstruction_identity(iso, (21, 21, 6))
    assert res["identity_residual_closed_form"] <= 1e-8
    assert res["identity_residual_fd"] <= 1e-6
    assert res["combination_plus_max"] <= 1e-10
    assert res["combination_minus_vs_prediction"] <= 1e-8


def test_normal_hamiltonian_conditions(iso):
    res = fl.verify_normal_hamiltonian(fl.build_normal_coordinate_hamiltonian(iso, 0.125), (5, 5, 3))
    r = res["residuals"]
    assert r["i"] <= 1e-12
    assert max(r["ii"], r["iii"], r["iv"], r["v"]) <= 1e-4
    # the opposite sign in condition (iii) does not hold
    assert r["iii_as_displayed"] > 1e-2


def test_normal_hamiltonian_vanishes_when_schedule_is_still(iso):
    ham = fl.build_normal_coordinate_hamiltonian(iso, 0.0)
    t, s, w = iso.grid((5, 5, 3), w_min=0.1)
    offsets = iso(t, s, w, 0.0) + 1e-3 * ham.direction(t, s, w)
    hints = np.stack([t, s, w], -1).reshape(-1, 3)
    assert np.abs(ham(offsets.reshape(-1, 5), hints)).max() == 0.0


def test_support_of_stationary_isotopy_is_empty():
    axes = [np.linspace(-1, 1, 21), np.linspace(-1, 1, 21)]
    rep = fl.isotopy_support_size(lambda t, s, tau: cv.lambda_i(2, t, s), axes, sc.HALVES)
    assert rep.sizes == [0.0, 0.0] and rep.component_counts == [0, 0]


def test_support_of_local_isotopy_is_one_component():
    def moving(t, s, tau):
        bump = ramp((t - 0.1) / 0.02) * (1 - ramp((t - 0.18) / 0.02))
        return cv.lambda_i(2, t, s) + (tau * bump)[..., None] * np.array([0, 0, 0.1, 0, 0])

    axes = [np.linspace(-1, 1, 401), np.linspace(-1, 1, 5)]
    rep = fl.isotopy_support_size(moving, axes, [(0.0, 1.0)])
    assert rep.component_counts == [1]
    arc = cv.lambda_i(2, np.linspace(0.1, 0.2, 200)[:, None], np.linspace(-1, 1, 5)[None, :])
    assert rep.sizes[0] >= fl.point_set_diameter(arc.reshape(-1, 5)) - 0.02


def test_point_set_diameter():
    pts = np.array([[0, 0, 0], [3, 4, 0], [1, 1, 0]], float)
    assert fl.point_set_diameter(pts) == 5.0
    big = RNG.normal(size=(500, 3))
    brute = np.sqrt(((big[:, None] - big[None]) ** 2).sum(-1)).max()
    assert fl.point_set_diameter(big) == pytest.approx(brute)


def test_extension_bound():
    assert fl.extension_c0_bound([0.0, 0.0], 0.01) == 0.01
    assert fl.extension_c0_bound([0.1, 0.2], 0.01) == pytest.approx(0.31)
    with pytest.raises(ValueError):
        fl.extension_c0_bound([0.1], 0.01)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_extension_bound_monotone(a, b, da, eps):
    assert fl.extension_c0_bound([a + da, b], eps) >= fl.extension_c0_bound([a, b], eps)
    assert fl.extension_c0_bound([a, b + da], eps) >= fl.extension_c0_bound([a, b], eps)


def test_quarter_supports_are_small(iso):
    axes = [np.linspace(-1, 1, 41), np.linspace(-1, 1, 41), np.linspace(0, 0.5, 4)]
    rep = fl.isotopy_support_size(iso, axes, [(i / 4, (i + 1) / 4) for i in range(4)], 3)
    assert max(rep.sizes) < 0.5
    assert min(rep.component_counts) > 1


def test_isotopy_stays_legendrian_at_start(iso):
    t, s, w = iso.grid((21, 21, 2))
    pts = iso(t[..., 0], s[..., 0], 0.0 * w[..., 0], 0.3)
    assert np.abs(beta5(pts, iso.d_dt(t[..., 0], s[..., 0], 0.0 * w[..., 0], 0.3))).max() <= 1e-8
