import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legendrian_lab import flow as fl
from legendrian_lab import schedules as sc


@pytest.mark.parametrize("eps", [0.9, 0.5, 0.2, 0.05])
def test_split_family_pieces_short(eps):
    a, b = sc.make_split_family(eps)
    bound = eps / math.sqrt(2)
    for fam in (a, b, a.complement(), b.complement()):
        assert fam.max_length < bound
    assert not a.contains(np.array([lo + 1e-9 for lo, _ in b])).any()


def test_split_family_example_width():
    a, b = sc.make_split_family(0.5)
    # smallest k with 3 * 2/(4k) < 0.5/sqrt(2) is 5
    assert a.lengths() == pytest.approx([0.1] * 5)
    assert b.complement().max_length == pytest.approx(0.3)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.3])
def test_split_family_rejects_eps(eps):
    with pytest.raises(ValueError):
        sc.make_split_family(eps)


def test_split_profile_values():
    a, b = sc.make_split_family(0.5)
    on_a = np.concatenate([np.linspace(lo, hi, 7) for lo, hi in a])
    on_b = np.concatenate([np.linspace(lo, hi, 7) for lo, hi in b])
    assert np.all(sc.split_profile(a, b, on_a) == 0.0)
    assert np.all(sc.split_profile(a, b, on_b) == 1.0)
    x = np.linspace(-1, 1, 4001)
    g = sc.split_profile(a, b, x)
    assert g.min() >= 0 and g.max() <= 1


@pytest.fixture(scope="module", params=[0.5, 0.3])
def schedule(request):
    return sc.build_lambda_schedule(request.param)


def test_schedule_invariants(schedule):
    res = sc.check_schedule(schedule, 120, 80)
    assert res["start_max"] == 0.0 and res["end_max"] == 0.0
    assert res["range"][0] >= 0 and res["range"][1] <= 1
    assert res["min_increment"] >= -1e-12
    assert res["rate_outside_quarter_boxes"] == 0.0
    assert max(res["quarter_diameters"]) < schedule.eps
    assert res["half_on_b"] == 0.0


def test_half_time_is_profile_of_t(schedule):
    t = np.linspace(-1, 1, 51)
    T, S = np.meshgrid(t, t, indexing="ij")
    assert np.allclose(schedule(T, S, 0.5), schedule.profile(T))


def test_dtau_matches_finite_difference(schedule):
    t = np.linspace(-1, 1, 31)
    T, S = np.meshgrid(t, t, indexing="ij")
    for tau in (0.1, 0.3, 0.62, 0.9):
        h = 1e-6
        fd = (schedule(T, S, tau + h) - schedule(T, S, tau - h)) / (2 * h)
        assert np.abs(fd - schedule.dtau(T, S, tau)).max() < 1e-5


def test_quarter_component_pattern():
    sched = sc.build_lambda_schedule(0.5)
    pos = len(sched.a.complement())
    below = len(sched.b.complement())
    counts = [len(q) for q in sched.quarter_boxes()]
    assert counts == [pos * pos, pos * below, below * pos, below * below]


def test_schedule_json_schema():
    doc = json.loads(json.dumps(sc.build_lambda_schedule(0.5).as_dict()))
    assert doc["epsilon"] == 0.5 and len(doc["quarters"]) == 4
    for quarter in doc["quarters"]:
        for comp in quarter["components"]:
            assert len(comp) == 2 and all(len(side) == 2 for side in comp)
            assert all(lo < hi for lo, hi in comp)


@pytest.mark.parametrize("m", [3, 8, 22, 50])
def test_step_one_sets(m):
    s0, s1 = sc.step_one_sets(m)
    assert min(s0.union(s1).complement().lengths()) > 4 / m
    assert s0.complement().max_length < 10 / m
    assert s1.complement().max_length < 10 / m


def test_step_one_sets_rejections():
    with pytest.raises(ValueError):
        sc.step_one_sets(2)
    with pytest.raises(ValueError, match="gap"):
        sc.validate_step_one_sets(8, sc.IntervalFamily(((-1.0, 0.0),)), sc.IntervalFamily(((0.1, 1.0),)))
    with pytest.raises(ValueError, match="10/m"):
        sc.validate_step_one_sets(8, sc.IntervalFamily(((-1.0, -0.5),)), sc.IntervalFamily(((0.5, 1.0),)))


def test_region_family():
    s0, s1 = sc.step_one_sets(8)
    u = [((-0.1, 0.1), (-0.1, 0.1), (0.2, 0.4))]
    reg = sc.region_family(8, s0, s1, 0.05, u)
    assert len(reg.components_a) == len(s0.complement())
    assert len(reg.components_b) == len(s1.complement())
    bound = math.sqrt(0.2**2 + 0.2**2 + 0.2**2 + (10 / 8) ** 2 + 0.1**2)
    assert max(reg.diameters("A") + reg.diameters("B")) < bound
    q_mid = sum(s0.complement().intervals[0]) / 2
    assert reg.contains(np.array([0, 0, 0.3, q_mid, 0]), "A")
    assert not reg.contains(np.array([0, 0, 0.3, q_mid, 0.06]), "A")


def test_step_one_lambda():
    s0, s1 = sc.step_one_sets(8)
    lam = sc.StepOneLambda(s0, s1)
    q1 = np.array([sum(iv) / 2 for iv in s1])
    q0 = np.array([sum(iv) / 2 for iv in s0])
    assert np.all(lam(q1, 0.0) == -1) and np.all(lam(q1, 0.5) == 1)
    assert np.all(lam(q0, 0.5) == -1) and np.all(lam(q0, 1.0) == 1)
    assert np.allclose(lam(q1, 0.25), 0) and np.allclose(lam(q0, 0.75), 0)
    assert np.all(lam.zeta(q1) == 0.25) and np.all(lam.zeta(q0) == 0.75)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 1), st.floats(0, 1))
def test_step_one_lambda_monotone_in_range(s, t0, t1):
    lam = sc.StepOneLambda(*sc.step_one_sets(8))
    lo, hi = sorted((t0, t1))
    a, b = float(lam(s, lo)), float(lam(s, hi))
    assert -1 <= a <= b <= 1


AXES = [np.linspace(-1, 1, 21), np.linspace(-1, 1, 105)]


def test_ibp_stationary_passes():
    cert = sc.ibp_check(lambda t, s, tau: sc.birth_isotopy(8)(t, s, 0.0), AXES, 1.0)
    assert cert.passed and cert.c0_distance == 0.0 and cert.smallest_passing_C == 0.0


def test_ibp_translation_fails():
    cert = sc.ibp_check(sc.translation_isotopy(2), AXES, 1.0)
    assert cert.c0_distance == pytest.approx(1.0)
    assert not cert.passed
    assert cert.as_dict()["component_counts"] == [1, 1]


def test_ibp_monotone_in_constant():
    birth = sc.ibp_check(sc.birth_isotopy(8), AXES, 1.0)
    support = fl.IsotopySupportReport(list(sc.HALVES), birth.diameters)
    cs = np.linspace(0.1, 4, 12) * birth.smallest_passing_C
    verdicts = [sc.ibp_check(sc.birth_isotopy(8), AXES, c, support=support).passed for c in cs]
    assert verdicts == sorted(verdicts)
    assert verdicts[0] is False and verdicts[-1] is True
