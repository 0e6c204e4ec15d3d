"""Verification suites, construction report and SVG front figures."""

from __future__ import annotations

import math
import os
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable
from xml.sax.saxutils import escape

import numpy as np

from . import curves as cv
from . import flow as fl
from . import schedules as sc
from . import singularities as sg
from . import zigzag as zz
from .contact import GridSpec, ParamMap, beta5, c0_distance, legendrian_defect

SUITES = ("curves", "flows", "zigzag", "schedules", "charts")
ENV_PREFIX = "LEGENDRIAN_LAB_"


class ConfigError(ValueError):
    """Bad suite configuration (maps to exit code 2)."""


@dataclass(frozen=True)
class SuiteConfig:
    quick: bool = False
    m_max: int = 30
    curve_n: int = 10_000
    surface_n: int = 300
    schedule_n: int = 200
    schedule_tau: int = 100
    seed: int = 0

    @classmethod
    def build(cls, quick: bool = False, m_max: int = 30, seed: int = 0,
              env: dict | None = None) -> "SuiteConfig":
        """Defaults, then environment overrides, then the quick-mode reduction."""
        env = os.environ if env is None else env
        values = {}
        for name in ("curve_n", "surface_n", "schedule_n", "schedule_tau"):
            raw = env.get(ENV_PREFIX + name.upper())
            if raw is None:
                continue
            try:
                values[name] = int(raw)
            except ValueError:
                raise ConfigError(f"{ENV_PREFIX + name.upper()} must be an integer, got {raw!r}") from None
            if values[name] < 8:
                raise ConfigError(f"{ENV_PREFIX + name.upper()} must be at least 8")
        if m_max < 2:
            raise ConfigError("m-max must be at least 2")
        cfg = cls(quick=quick, m_max=m_max, seed=seed, **values)
        if quick:
            cfg = replace(cfg, curve_n=max(cfg.curve_n // 4, 8), surface_n=max(cfg.surface_n // 4, 8),
                          schedule_n=max(cfg.schedule_n // 4, 8),
                          schedule_tau=max(cfg.schedule_tau // 4, 8))
        return cfg


@dataclass
class Check:
    id: str
    anchor: str
    value: Any
    threshold: Any
    passed: bool
    informational: bool = False
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return _clean(asdict(self))


@dataclass
class VerificationReport:
    suite: str
    config: SuiteConfig
    checks: list[Check] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def as_dict(self, include_timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "pass": self.passed,
            "environment": {**asdict(self.config), "rank_tolerance": sg.RANK_TOL},
            "checks": [c.as_dict() for c in self.checks],
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def table(self) -> str:
        rows = [("id", "status", "value", "threshold")]
        for c in self.checks:
            status = "info" if c.informational else ("PASS" if c.passed else "FAIL")
            rows.append((c.id, status, _short(c.value), _short(c.threshold)))
        widths = [max(len(r[k]) for r in rows) for k in range(4)]
        lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        n_fail = len(self.failures)
        lines.append(f"{self.suite}: {len(self.checks)} checks, {n_fail} failed")
        return "\n".join(lines)


def _short(v) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join(list(map(str, v))[:4]) + (", ..." if len(v) > 4 else "") + "}"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        inner = ", ".join(_short(x) for x in v[:6])
        return f"[{inner}{', ...' if len(v) > 6 else ''}]"
    return str(v)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _le(id_, anchor, value, threshold, **detail) -> Check:
    return Check(id_, anchor, float(value), float(threshold), bool(value <= threshold), detail=detail)


def _true(id_, anchor, ok, value=None, threshold=None, **detail) -> Check:
    return Check(id_, anchor, ok if value is None else value, threshold, bool(ok), detail=detail)


def _info(id_, anchor, value, **detail) -> Check:
    return Check(id_, anchor, value, None, True, informational=True, detail=detail)


def _monotone_decreasing(seq) -> bool:
    return all(b < a for a, b in zip(seq, seq[1:]))


# -- curves ---------------------------------------------------------------------


def suite_curves(cfg: SuiteConfig) -> list[Check]:
    checks = []
    grid = GridSpec.uniform(cfg.curve_n)
    ms = range(2, cfg.m_max + 1)
    defects = [legendrian_defect(cv.gamma_map(m), grid) for m in ms]
    checks.append(_le("curves.legendrian_defect", "Legendrian spiral gamma_m", max(defects), 1e-9,
                      per_m=dict(zip(ms, defects))))

    fine = GridSpec.uniform(10 * cfg.curve_n)
    errs = {}
    for m in (2, 5, 10, 22):
        errs[m] = abs(c0_distance(cv.gamma_map(m), cv.gamma_inf_map(), fine) - cv.c0_gamma_formula(m))
    checks.append(_le("curves.c0_law", "uniform convergence to the z-axis", max(errs.values()), 1e-4,
                      per_m=errs, grid=fine.counts[0]))
    checks.append(_le("curves.c0_m2", "uniform convergence to the z-axis",
                      abs(c0_distance(cv.gamma_map(2), cv.gamma_inf_map(), fine) - 0.718070), 1e-4))

    mismatches = []
    for m in ms:
        detected = cv.tally(cv.detect_cusps(m))
        closed = cv.cusp_counts(m)
        listed = cv.tally(cv.cusp_set(m))
        if not detected == closed == listed:
            mismatches.append({"m": m, "detected": detected, "closed_form": closed, "listed": listed})
    checks.append(_true("curves.cusp_census", "left/right cusp count formulas", not mismatches,
                        value=len(mismatches), threshold=0, mismatches=mismatches))
    checks.append(_true("curves.cusps_m2", "left/right cusp count formulas",
                        cv.cusp_counts(2) == (2, 1), value=list(cv.cusp_counts(2)), threshold=[2, 1]))
    frac = cv.equidistribution_fraction(22)
    checks.append(_true("curves.m22", "equidistribution filter",
                        cv.cusp_counts(22)[0] == 154 and bool(cv.equidistribution_filter([22]))
                        and abs(frac - 0.0309) < 5e-4,
                        value={"right": cv.cusp_counts(22)[0], "fraction": frac},
                        threshold={"right": 154, "fraction_in": [0, 0.125]}))

    t = np.linspace(-1, 1, cfg.curve_n)
    end_dev = max(max(float(np.abs(cv.sigma(m, t, 0.0) - cv.gamma_m(m, t)).max()),
                      float(np.abs(cv.sigma(m, t, 1.0) - cv.gamma_inf(t)).max())) for m in ms)
    checks.append(_le("curves.surface_endpoints", "stretching surface Sigma", end_dev, 1e-15))

    tt, ww = np.meshgrid(np.linspace(-1, 1, cfg.surface_n), np.linspace(0, 1, cfg.surface_n), indexing="ij")
    sig_err = max(float(np.abs(cv.sigma_contact_values(m, tt, ww) - ww * (2 - ww)).max()) for m in (2, 8, 22))
    checks.append(_le("curves.surface_contact_values", "stretching surface Sigma", sig_err, 1e-12))

    plan = cv.build_sequence_plan(3)
    fib = {}
    worst = 0.0
    for k, m in enumerate(plan.ms, start=1):
        d = float(cv.fiber_diameter(m, np.linspace(-1, 1, 401), samples=65).max())
        fib[m] = {"diameter": d, "c_times_2k": d * 2**k, "c_times_m": d * m}
        worst = max(worst, d - cv.c0_gamma_formula(m))
    checks.append(_le("curves.fiber_diameter", "fibres of Pi", worst, 1e-12,
                      note="fibre diameter minus sqrt(2/m^2 + 1/(4 m^4))", profile=fib))
    checks.append(_info("curves.fiber_constant", "fibres of Pi",
                        max(v["c_times_2k"] for v in fib.values()), profile=fib))
    return checks


# -- flows ----------------------------------------------------------------------


def suite_flows(cfg: SuiteConfig) -> list[Check]:
    checks = []
    rng = np.random.default_rng(cfg.seed)
    pts = rng.uniform(-0.8, 0.8, (200, 5))
    worst = {}
    for name in sorted(fl.BUILTIN_HAMILTONIANS):
        res = fl.verify_contact_field_identities(fl.builtin_hamiltonian(name), pts, tau=0.3)
        worst[name] = max(res["value_residual"], res["form_residual"])
    checks.append(_le("flows.field_identities", "contact Hamiltonian vector field",
                      max(worst.values()), 1e-8, per_hamiltonian=worst))

    starts = rng.uniform(-0.5, 0.5, (5, 5))
    ratios = {}
    for name in ("bump", "bump2"):
        study = fl.step_halving_study(fl.ContactField(fl.builtin_hamiltonian(name)), starts, 1.0,
                                      [0.1, 0.05, 0.025, 0.0125])
        ratios[name] = study["ratios"]
    flat = [r for rs in ratios.values() for r in rs]
    checks.append(_true("flows.rk4_order", "integrator order", all(12 <= r <= 20 for r in flat),
                        value=[min(flat), max(flat)], threshold=[12, 20], ratios=ratios))

    conformal = max(fl.verify_conformal_pullback(fl.ContactField(fl.builtin_hamiltonian(n)),
                                                 pts[:8], 1.0, 1e-3)["max_angle_defect"]
                    for n in ("yp", "bump", "bump2"))
    checks.append(_le("flows.plane_transport", "contactomorphism pulls back the form conformally",
                      conformal, 1e-5))

    far = rng.uniform(-3, 3, (400, 5))
    motion = max(fl.outside_support_motion(fl.ContactField(h), h, far, 1.0, 0.01)
                 for h in (fl.builtin_hamiltonian("bump"), fl.builtin_hamiltonian("bump2")))
    checks.append(_true("flows.support_identity", "compactly supported flows", motion == 0.0,
                        value=motion, threshold=0.0))

    sched = sc.build_lambda_schedule(0.5)
    iso = fl.StretchIsotopy(8, 0.5, sched)
    counts = (21, 21, 6) if cfg.quick else (41, 41, 11)
    vel = fl.compare_velocity(iso, counts)
    checks.append(_le("flows.stretch_velocity", "velocity of the stretching isotopy",
                      vel["relative_to_scale"], 1e-6, **vel))
    ann = fl.verify_velocity_annihilated_by_beta(iso, counts)
    checks.append(_le("flows.velocity_beta_w0_slice", "velocity of the stretching isotopy",
                      ann["w0_slice_max"], 1e-8, **ann))
    checks.append(_info("flows.velocity_beta_full_grid", "velocity of the stretching isotopy",
                        ann["fd_max"]))
    obs = fl.verify_obstruction_identity(iso, counts)
    checks.append(_le("flows.obstruction_identity", "obstruction identity along Gamma_tau",
                      obs["identity_residual_closed_form"], 1e-8, **obs))
    checks.append(_le("flows.compatibility", "compatibility combination", obs["combination_plus_max"],
                      1e-10))
    checks.append(_le("flows.compatibility_minus_form", "compatibility combination",
                      obs["combination_minus_vs_prediction"], 1e-8))

    ham = fl.build_normal_coordinate_hamiltonian(iso, 0.125)
    res = fl.verify_normal_hamiltonian(ham, (5, 5, 3) if cfg.quick else (7, 7, 4))
    conds = {k: v for k, v in res["residuals"].items() if k != "iii_as_displayed"}
    checks.append(_le("flows.normal_hamiltonian", "Hamiltonian conditions (i)-(v)",
                      max(conds.values()), 1e-4, residuals=res["residuals"],
                      max_condition=res["max_condition"]))
    checks.append(_info("flows.normal_hamiltonian_sign_as_displayed", "Hamiltonian condition (iii)",
                        res["residuals"]["iii_as_displayed"]))

    checks += extension_checks(cfg)
    return checks


def extension_checks(cfg: SuiteConfig, m: int = 8, eps: float = 0.5, slack: float = 1e-3) -> list[Check]:
    """Quarter supports of the stretching isotopy and the composed extension bound."""
    sched = sc.build_lambda_schedule(eps)
    iso = fl.StretchIsotopy(m, 0.5, sched)
    n = 31 if cfg.quick else 61
    axes = [np.linspace(-1, 1, n), np.linspace(-1, 1, n), np.linspace(0, 0.5, 6)]
    quarters = [(i / 4, (i + 1) / 4) for i in range(4)]
    rep = fl.isotopy_support_size(iso, axes, quarters, taus_per_interval=3 if cfg.quick else 5)
    sizes = rep.sizes
    k = int(math.floor(math.log2(m - 1)))
    c = max(sizes) * 2**k
    first = fl.extension_c0_bound(sizes[:2], slack)
    second = fl.extension_c0_bound(sizes[2:], slack)
    total = first + second
    monotone = (fl.extension_c0_bound([sizes[0] + 0.1, sizes[1]], slack) > first
                and fl.extension_c0_bound([sizes[0], sizes[1] + 0.1], slack) > first
                and fl.extension_c0_bound(sizes[:2], 2 * slack) == first + slack)
    return [
        _true("flows.quarter_supports", "support splitting by quarters", max(sizes) < eps,
              value=max(sizes), threshold=eps, report=rep.as_dict()),
        _true("flows.extension_bound", "four-piece triangle inequality", total < 4 * c / 2**k,
              value=total, threshold=4 * c / 2**k, c=c, k=k, halves=[first, second], slack=slack),
        _true("flows.extension_monotone", "extension bound", monotone),
    ]


# -- zig-zag --------------------------------------------------------------------


def _parabola() -> ParamMap:
    return ParamMap(lambda t: np.stack([t, t, t * t / 2], -1), [(-1.0, 1.0)], 3,
                    [lambda t: np.stack([np.ones_like(t), np.ones_like(t), t], -1)], name="parabola")


def suite_zigzag(cfg: SuiteConfig) -> list[Check]:
    checks = []
    grid = GridSpec.uniform(cfg.curve_n)
    target = cv.gamma_inf_map()
    r3, front, cusps = {}, {}, {}
    for M in (25, 50, 100, 200):
        approx = zz.approximate_curve(target, M, 0.01)
        if M == 50:
            checks.append(_le("zigzag.defect", "zig-zag approximation", legendrian_defect(approx, grid), 1e-9))
        r3[M] = c0_distance(approx, target, grid)
        front[M] = zz.front_distance(approx, target, cfg.curve_n)
        cusps[M] = approx.cusp_count
    checks.append(_le("zigzag.r3_distance", "zig-zag approximation of a transverse line", r3[50], 0.05,
                      note="sup distance in R^3 including the y coordinate"))
    checks.append(_le("zigzag.front_distance", "zig-zag approximation of a transverse line", front[50], 0.05))
    checks.append(_true("zigzag.r3_monotone", "zig-zag approximation", _monotone_decreasing(list(r3.values())),
                        value=list(r3.values())))
    checks.append(_true("zigzag.front_monotone", "zig-zag approximation",
                        _monotone_decreasing(list(front.values())), value=list(front.values())))
    checks.append(_true("zigzag.cusp_count", "two cusps per gap",
                        all(c == 2 * (M - 1) for M, c in cusps.items()), value=cusps))

    par = _parabola()
    par_err = {}
    for M in (25, 50, 100, 200):
        approx = zz.approximate_curve(par, M, 0.1 / M)
        par_err[M] = c0_distance(approx, par, grid)
    checks.append(_true("zigzag.legendrian_target_convergence", "zig-zag approximation",
                        _monotone_decreasing(list(par_err.values())), value=list(par_err.values())))
    g2 = {}
    for M in (25, 50, 100, 200):
        try:
            g2[M] = c0_distance(zz.approximate_curve(cv.gamma_map(2), M, 0.1 / M), cv.gamma_map(2), grid)
        except ValueError as exc:
            g2[M] = f"rejected: {exc}"
    checks.append(_info("zigzag.gamma2_convergence", "zig-zag approximation", g2,
                        note="gamma_2 has cusps, so its front is not a graph over x"))

    plan = zz.approximate_curve(par, 50, 0.002).plan
    checks.append(_info("zigzag.leg_lengths", "offset leg lengths", plan.leg_lengths()))

    ds = (0.04, 0.02) if cfg.quick else (0.04, 0.02, 0.01)
    consts, defects = {}, {}
    for d in ds:
        M = int(math.ceil(1 / d**2)) + 1
        fam = zz.ZigZagFamily(lambda t, s: cv.sigma(2, t, 0.875 + 0.125 * s), M, d)
        lifted = zz.lift_family_to_r5(fam, dt=fam.dt, check=(401, 3))
        T, S = np.meshgrid(np.linspace(-1, 1, 4 * M + 1), np.linspace(-1, 1, 5), indexing="ij")
        pts = lifted(T, S)
        consts[d] = float(np.abs(pts[..., 4]).max() / d)
        defects[d] = max(float(np.abs(beta5(pts, lifted.derivative((T, S), k))).max()) for k in (0, 1))
    checks.append(_le("zigzag.family_defect", "Legendrian lift of a family to R^5",
                      max(defects.values()), 1e-8, per_d=defects))
    spread = max(consts.values()) / min(consts.values())
    checks.append(_true("zigzag.contact_angle", "contact-angle bound", spread < 1.1,
                        value=max(consts.values()), threshold="ratio spread < 1.1",
                        constants=consts, note="max |p| / d with base spacing ~ 2 d^2"))
    return checks


# -- schedules ------------------------------------------------------------------


def suite_schedules(cfg: SuiteConfig) -> list[Check]:
    checks = []
    for eps in (0.5, 0.2, 0.1):
        a, b = sc.make_split_family(eps)
        lengths = max(a.max_length, b.max_length, a.complement().max_length, b.complement().max_length)
        checks.append(_true(f"schedules.split_family[{eps}]", "split families A and B",
                            lengths < eps / math.sqrt(2) and not _overlap(a, b),
                            value=lengths, threshold=eps / math.sqrt(2)))
        sched = sc.build_lambda_schedule(eps)
        res = sc.check_schedule(sched, cfg.schedule_n, cfg.schedule_tau)
        ok = (res["start_max"] <= 1e-15 and res["end_max"] <= 1e-15 and res["range"][0] >= 0
              and res["range"][1] <= 1 and res["min_increment"] >= -1e-12
              and res["rate_outside_quarter_boxes"] == 0.0 and res["half_on_b"] <= 1e-15)
        checks.append(_true(f"schedules.invariants[{eps}]", "lambda schedule", ok, value=res))
        diam = max(res["quarter_diameters"])
        checks.append(_true(f"schedules.quarter_diameters[{eps}]", "lambda schedule", diam < eps,
                            value=diam, threshold=eps))
        pattern = [len(q["components"]) for q in sched.as_dict()["quarters"]]
        pos = len(a.complement().intervals)
        below = len(b.complement().intervals)
        checks.append(_true(f"schedules.component_pattern[{eps}]", "lambda schedule",
                            pattern == [pos * pos, pos * below, below * pos, below * below], value=pattern))

    for m in (8, 22):
        s0, s1 = sc.step_one_sets(m)
        eps = 1.0 / (2 * m)
        boxes = [((-1.5 / m, 1.5 / m),) * 3, ((0.5, 0.6), (0.0, 0.1), (0.2, 0.3))]
        reg = sc.region_family(m, s0, s1, eps, boxes)
        n_ok = (len(reg.components_a) == len(boxes) * len(s0.complement())
                and len(reg.components_b) == len(boxes) * len(s1.complement()))
        bound = max(reg.box_diameter(b) for b in boxes)
        limit = math.sqrt(bound**2 + (10.0 / m) ** 2 + (2 * eps) ** 2)
        worst = max(reg.diameters("A") + reg.diameters("B"))
        checks.append(_true(f"schedules.region_family[{m}]", "region families", n_ok and worst <= limit,
                            value=worst, threshold=limit))

    ibp = ibp_checks(cfg)
    checks += ibp
    return checks


def _overlap(a, b) -> bool:
    return any(max(l0, l1) < min(h0, h1) for l0, h0 in a for l1, h1 in b)


def ibp_checks(cfg: SuiteConfig) -> list[Check]:
    n = 21 if cfg.quick else 41
    axes = [np.linspace(-1, 1, n), np.linspace(-1, 1, 5 * n)]
    checks = []
    still = sc.ibp_check(lambda t, s, tau: sc.birth_isotopy(8)(t, s, 0.0), axes, 1.0)
    checks.append(_true("schedules.ibp_stationary", "isotopy by parts", still.passed, value=still.as_dict()))
    moved = sc.ibp_check(sc.translation_isotopy(2), axes, 1.0)
    checks.append(_true("schedules.ibp_translation_fails", "isotopy by parts", not moved.passed,
                        value=moved.as_dict()))
    birth = sc.ibp_check(sc.birth_isotopy(8), axes, 1.0)
    c_min = birth.smallest_passing_C
    support = fl.IsotopySupportReport(list(sc.HALVES), birth.diameters)
    results = [sc.ibp_check(sc.birth_isotopy(8), axes, C, support=support).passed
               for C in (0.5 * c_min, 1.01 * c_min, 2 * c_min, 4 * c_min)]
    checks.append(_true("schedules.ibp_birth_model", "isotopy by parts", results == [False, True, True, True],
                        value=c_min, threshold="smallest passing C", certificate=birth.as_dict()))
    return checks


# -- charts and singularity models ----------------------------------------------


def suite_charts(cfg: SuiteConfig) -> list[Check]:
    checks = []
    errs = []
    for delta in (0.01, 0.3, 1.0, 2.5):
        pts = sg.psi_singular_points(delta)
        exact = [-math.sqrt(delta / 3), math.sqrt(delta / 3)]
        errs.append(max(abs(a - b) for a, b in zip(pts, exact)) if len(pts) == 2 else math.inf)
    none_neg = all(not sg.psi_singular_points(d) for d in (-0.01, -1.0, -3.0))
    checks.append(_true("charts.psi_singular_points", "plane curve psi_delta",
                        max(errs) <= 1e-10 and none_neg, value=max(errs), threshold=1e-10))
    checks.append(_info("charts.psi_delta_zero", "plane curve psi_delta", sg.psi_singular_points(0.0),
                        note="delta = 0 is singular at u = 0"))

    rays = 24 if cfg.quick else 60
    for variant, t in (("standard", 0.0), ("inside-out", 0.0), ("embryo", 0.1), ("embryo", 0.01)):
        pts = sg.trace_singular_locus(variant, sg.ray_directions(3, rays), t=t)
        checks.append(_true(f"charts.locus[{variant},{t}]", "wrinkle singular loci",
                            len(pts) > 0 and sg.locus_defect(variant, pts, t) <= 1e-6,
                            value=sg.locus_defect(variant, pts, t), threshold=1e-6, points=len(pts),
                            diameter=sg.singular_set_diameter(pts)))
    d1 = sg.singular_set_diameter(sg.trace_singular_locus("embryo", sg.ray_directions(3, rays), t=0.1))
    d2 = sg.singular_set_diameter(sg.trace_singular_locus("embryo", sg.ray_directions(3, rays), t=0.01))
    checks.append(_true("charts.embryo_shrinks", "embryo family", d2 < d1, value=[d1, d2]))
    neg = sg.min_relative_singular_value("embryo", 0.5, t=-0.1, n=11 if cfg.quick else 21)
    checks.append(_true("charts.embryo_negative", "embryo family", neg > sg.RANK_TOL, value=neg,
                        threshold=sg.RANK_TOL))
    ranks = [sg.numeric_rank(sg.wrinkle_jacobian("standard", np.zeros(2), u)) for u in (1 / math.sqrt(3), -1 / math.sqrt(3))]
    checks.append(_true("charts.wrinkle_cusp_rank", "wrinkle", ranks == [2, 2], value=ranks,
                        note="rank of a 4x3 Jacobian drops from 3 to 2"))

    u = np.linspace(-2, 2, 4001)
    front_err, defect = 0.0, 0.0
    for tau in (-1.0, -0.3, 0.2, 0.7, 1.5):
        pts = sg.zigzag_birth_model(u, tau)
        vel = sg.zigzag_birth_velocity(u, tau)
        front_err = max(front_err, float(np.abs(pts[:, [0, 2]] - sg.psi_delta(tau, u)).max()))
        defect = max(defect, float(np.abs(vel[:, 2] - pts[:, 1] * vel[:, 0]).max()))
    checks.append(_le("charts.birth_front", "zig-zag birth model", front_err, 0.0))
    checks.append(_le("charts.birth_legendrian", "zig-zag birth model", defect, 1e-10))

    spec = sg.LooseChartSpec(math.pi / 16, 2, 2.0)
    cube = spec.cube
    expect = ((-0.75, 0.75), (-0.75, 0.75), (math.pi / 16 - 9 / 8, math.pi / 16 + 9 / 8))
    box_err = max(abs(a - b) for iv, jv in zip(cube, expect) for a, b in zip(iv, jv))
    checks.append(_le("charts.cube_m2", "loose chart boxes", box_err, 1e-15))
    for m in (2, 22):
        for rho in (2.0, 6.0):
            checks += _chart_checks(m, rho)
    return checks


def _chart_checks(m: int, rho: float) -> list[Check]:
    rng = np.random.default_rng(m)
    corner_err, inverse_err, pull, arcs = 0.0, 0.0, 0.0, []
    contained = True
    centres = sg.admissible_centres(m)
    target = np.array([0.5, 0.5, 0.5, rho / 2, rho / 2])
    for z in centres:
        for q0 in (0.0, 0.4):
            spec = sg.LooseChartSpec(z, m, rho, q0)
            lo, hi = np.array(spec.box).T
            img = sg.loose_chart_rescale(spec, lo + (hi - lo) * (1 - 1e-12))
            corner_err = max(corner_err, float(np.abs(img - target).max()))
            pts = lo + (hi - lo) * rng.uniform(0.01, 0.99, (50, 5))
            back = sg.loose_chart_unscale(spec, sg.loose_chart_rescale(spec, pts))
            inverse_err = max(inverse_err, float(np.abs(back - pts).max()))
            pull = max(pull, sg.pullback_factor_defect(spec, 200))
            contained &= sg.box_contains_box(spec.cube, sg.vk_box(m)[:3])
        info = sg.chart_arc(sg.LooseChartSpec(z, m, rho), samples=20001 if m == 2 else 4001)
        arcs.append((info["arcs"], info["cusps"]))
    return [
        _le(f"charts.corner[{m},{rho}]", "rescaling contactomorphism", corner_err, 1e-10),
        _le(f"charts.inverse[{m},{rho}]", "rescaling contactomorphism", inverse_err, 1e-14),
        _le(f"charts.pullback[{m},{rho}]", "rescaling contactomorphism", pull, 1e-12),
        _true(f"charts.single_arc[{m},{rho}]", "loose chart meets one zig-zag",
              bool(arcs) and all(a == (1, 2) for a in arcs), value=len(centres),
              threshold="every admissible centre: 1 arc, 2 cusps"),
        _true(f"charts.inside_vk[{m},{rho}]", "loose chart containment", contained),
    ]


# -- construction report ----------------------------------------------------------


def construction_report(N: int, cfg: SuiteConfig | None = None) -> VerificationReport:
    if N < 1:
        raise ConfigError("N must be at least 1")
    cfg = cfg or SuiteConfig()
    rep = VerificationReport("construction", cfg)
    grid = GridSpec.uniform(cfg.curve_n)
    plan = cv.build_sequence_plan(N, grid)
    sums = plan.partial_sums
    rows = []
    for i, m in enumerate(plan.ms, start=1):
        fib = float(cv.fiber_diameter(m, np.linspace(-1, 1, 201), samples=33).max())
        eps = 1.0 / (2 * m)
        rows.append({
            "i": i, "m": m, "d_c0": plan.distances[i - 1], "d_c0_measured": plan.measured[i - 1],
            "partial_sum": sums[i - 1], "extension_bound_proxy": fl.extension_c0_bound([fib, fib], eps),
            "contained": _lambda_contained(m),
        })
    rep.checks.append(_true("construction.growth", "growth condition on m_i", plan.growth_ok(),
                            value=list(plan.ms)))
    rep.checks.append(_info("construction.table", "sequence plan", rows))
    formula_err = max(abs(a - b) for a, b in zip(plan.distances, plan.measured))
    rep.checks.append(_le("construction.distance_grid", "uniform convergence to the z-axis", formula_err, 1e-4))
    if N > 1:
        rep.checks.append(_true("construction.partial_sums", "summable distances",
                                all(b > a for a, b in zip(sums, sums[1:])) and math.isfinite(sums[-1]),
                                value=sums))
        rep.checks.append(_true("construction.tail", "Cauchy tail", plan.tail_bound() < 4 / 2 ** (N - 1),
                                value=plan.tail_bound(), threshold=4 / 2 ** (N - 1)))
    rep.checks.append(_true("construction.containment", "open sets V_i",
                            all(r["contained"] for r in rows), value=[r["contained"] for r in rows]))
    return rep


def _lambda_contained(m: int) -> bool:
    """Interval bound plus a sampled check that Im Lambda_m and Im Lambda_inf lie in the box V_m."""
    box = sg.vk_box(m)
    if not sg.box_contains_box(sg.lambda_bounding_box(m), box):
        return False
    t = np.linspace(-1, 1, 2001)
    s = np.linspace(-1, 1, 5)
    T, S = np.meshgrid(t, s, indexing="ij")
    lo, hi = np.array(box).T
    for pts in (cv.lambda_i(m, T, S), cv.lambda_inf(T, S)):
        if np.any(pts <= lo) or np.any(pts >= hi):
            return False
    return True


# -- running ------------------------------------------------------------------------


SUITE_FUNCS: dict[str, Callable[[SuiteConfig], list[Check]]] = {
    "curves": suite_curves,
    "flows": suite_flows,
    "zigzag": suite_zigzag,
    "schedules": suite_schedules,
    "charts": suite_charts,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> VerificationReport:
    cfg = cfg or SuiteConfig()
    if name not in SUITE_FUNCS and name != "all":
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    names = SUITES if name == "all" else (name,)
    rep = VerificationReport(name, cfg)
    for n in names:
        start = time.perf_counter()
        rep.checks += SUITE_FUNCS[n](cfg)
        rep.timing[n] = time.perf_counter() - start
    if name == "all":
        start = time.perf_counter()
        rep.checks += construction_report(3, cfg).checks
        rep.timing["construction"] = time.perf_counter() - start
    return rep


# -- SVG ------------------------------------------------------------------------------


@dataclass
class FrontFigure:
    title: str
    path: np.ndarray
    cusps: np.ndarray
    crossings: np.ndarray


def front_figure(source: str, arg: float | str | None = None, w: float = 0.0) -> FrontFigure:
    """Front data for gamma(m), sigma(m, w), psi(delta), birth(tau) or a curve JSON file."""
    if source == "gamma":
        m = int(arg)
        t = np.linspace(-1, 1, max(2001, 200 * m * m))
        pts = cv.gamma_m(m, t)
        cusps = np.array([[c.x, c.z] for c in cv.cusp_set(m)]).reshape(-1, 2)
        cross = cv.gamma_m(m, np.array(cv.z_axis_crossings(m)))[:, [0, 2]].reshape(-1, 2)
        return FrontFigure(f"gamma_{m}", pts[:, [0, 2]], cusps, cross)
    if source == "sigma":
        m = int(arg)
        t = np.linspace(-1, 1, max(2001, 200 * m * m))
        pts = cv.sigma(m, t, w)
        cusps = (np.array([[c.x, c.z] for c in cv.cusp_set(m)]).reshape(-1, 2) if w == 0.0
                 else np.zeros((0, 2)))
        return FrontFigure(f"sigma_{m}(w={w:g})", pts[:, [0, 2]], cusps, np.zeros((0, 2)))
    if source in ("psi", "birth"):
        delta = float(arg)
        u = np.linspace(-1.2, 1.2, 2001) * max(1.0, math.sqrt(abs(delta)))
        pts = sg.psi_delta(delta, u)
        sing = np.array(sg.psi_singular_points(delta) if delta > 0 else [])
        cusps = sg.psi_delta(delta, sing).reshape(-1, 2)
        return FrontFigure(f"{source}({delta:g})", pts, cusps, np.zeros((0, 2)))
    if source == "file":
        import json

        with open(str(arg), encoding="utf-8") as fh:
            curve = cv.curve_from_json(json.load(fh))
        t = np.linspace(*curve.bounds[0], 4001)
        pts = curve(t)[:, [0, 2]]
        dx = np.diff(pts[:, 0])
        flips = np.nonzero(np.sign(dx[:-1]) * np.sign(dx[1:]) < 0)[0] + 1
        return FrontFigure(curve.name, pts, pts[flips], np.zeros((0, 2)))
    raise ConfigError(f"unknown plot source {source!r}")


def render_svg(figs: list[FrontFigure], width: int = 420, height: int = 420) -> str:
    """Side-by-side panels; cusps are red circles (class 'cusp'), crossings blue squares."""
    pad = 20
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width * len(figs)}" height="{height}" '
             f'viewBox="0 0 {width * len(figs)} {height}">']
    for k, fig in enumerate(figs):
        allpts = np.vstack([fig.path, fig.cusps, fig.crossings])
        lo = allpts.min(axis=0)
        span = np.maximum(allpts.max(axis=0) - lo, 1e-12)
        scale = np.array([width - 2 * pad, height - 2 * pad - 16]) / span

        def tr(p, k=k, lo=lo, scale=scale):
            x = k * width + pad + (p[..., 0] - lo[0]) * scale[0]
            y = height - pad - (p[..., 1] - lo[1]) * scale[1]
            return np.stack([x, y], -1)

        xy = tr(fig.path)
        d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in xy)
        parts.append(f'<g class="panel"><text x="{k * width + pad}" y="{pad}" font-size="13">'
                     f'{escape(fig.title)}</text>')
        parts.append(f'<path class="front" d="{d}" fill="none" stroke="black" stroke-width="1"/>')
        for x, y in tr(fig.crossings):
            parts.append(f'<rect class="crossing" x="{x - 2:.2f}" y="{y - 2:.2f}" width="4" height="4" fill="blue"/>')
        for x, y in tr(fig.cusps):
            parts.append(f'<circle class="cusp" cx="{x:.2f}" cy="{y:.2f}" r="3" fill="red"/>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_front(sources: list[tuple[str, Any, float]], out: str) -> list[FrontFigure]:
    figs = [front_figure(src, arg, w) for src, arg, w in sources]
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(render_svg(figs))
    return figs
