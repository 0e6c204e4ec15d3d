"""Legendrian approximation of fronts by zig-zags.

A target curve is sampled at base points ``P_i`` on its front.  Between two
base points the front runs ``P_i -> Q_i^+ -> Q_{i+1}^- -> P_{i+1}`` where
``Q_i^± = P_i ± d (1, y_i)``.  Each leg is a graph over its chord of the
quintic model ``F``; where the x-direction reverses the junction becomes a
front cusp.  The Legendrian lift reads ``y`` off as the front slope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .contact import ParamMap, alpha3

SLOPE_POLE_TOL = 1e-12
VERTICAL_TOL = 1e-9


def model_f(a, b, t):
    """F(a, b, t) = t(1-t)(a(1-t)^2 - b t^2): zero at both ends, slope a at 0 and b at 1."""
    t = np.asarray(t, dtype=float)
    return t * (1 - t) * (a * (1 - t) ** 2 - b * t * t)


def model_f_dt(a, b, t):
    t = np.asarray(t, dtype=float)
    return a * (1 - t) ** 2 * (1 - 4 * t) - b * t * t * (3 - 4 * t)


def model_f_dtt(a, b, t):
    t = np.asarray(t, dtype=float)
    return -6.0 * (1 - 2 * t) * (a * (1 - t) + b * t)


def smoothstep(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3 - 2 * s)


def smoothstep_ds(s):
    s = np.clip(s, 0.0, 1.0)
    return 6 * s * (1 - s)


@dataclass(frozen=True)
class FrontSample:
    t: float
    x: float
    z: float
    y: float


@dataclass
class ZigZagPlan:
    """Base points, offsets and the three slopes of every gap."""

    samples: list[FrontSample]
    d: float
    q_plus: np.ndarray
    q_minus: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray

    @property
    def base_points(self) -> np.ndarray:
        return np.array([[s.x, s.z] for s in self.samples])

    @property
    def slopes(self) -> np.ndarray:
        return np.array([s.y for s in self.samples])

    @property
    def params(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def polygon(self) -> np.ndarray:
        """Vertices P_0, Q_0^+, Q_1^-, P_1, Q_1^+, ... of the polygonal path."""
        pts = [self.base_points[0]]
        for i in range(len(self.samples) - 1):
            pts += [self.q_plus[i], self.q_minus[i + 1], self.base_points[i + 1]]
        return np.array(pts)

    def leg_lengths(self) -> dict:
        """Offset-leg lengths next to both normalisations d and d*sqrt(1+y^2)."""
        base = self.base_points
        off_plus = np.linalg.norm(self.q_plus - base, axis=1)
        off_minus = np.linalg.norm(self.q_minus - base, axis=1)
        middle = np.linalg.norm(self.q_minus[1:] - self.q_plus[:-1], axis=1)
        scaled = self.d * np.sqrt(1 + self.slopes ** 2)
        return {
            "offset_over_d_max": float(max(off_plus.max(), off_minus.max()) / self.d),
            "offset_vs_d_sqrt_max_dev": float(np.max(np.abs(off_plus - scaled))),
            "middle_over_2d_range": [float(middle.min() / (2 * self.d)),
                                     float(middle.max() / (2 * self.d))],
        }


def plan_zigzag(samples: Sequence[FrontSample], d: float) -> ZigZagPlan:
    if d <= 0:
        raise ValueError("offset d must be positive")
    samples = sorted(samples, key=lambda s: s.t)
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    base = np.array([[s.x, s.z] for s in samples])
    y = np.array([s.y for s in samples])
    offset = d * np.stack([np.ones_like(y), y], axis=1)
    dx = np.diff(base[:, 0])
    dz = np.diff(base[:, 1])
    denom = dx - 2 * d
    bad = np.nonzero(np.abs(denom) <= 1e-12 * max(1.0, d))[0]
    if bad.size:
        raise ValueError(f"degenerate middle leg at gap {int(bad[0])}: dx - 2d = 0")
    m2 = (dz - d * (y[:-1] + y[1:])) / denom
    return ZigZagPlan(list(samples), float(d), base + offset, base - offset,
                      y[:-1].copy(), m2, y[1:].copy())


# -- legs ------------------------------------------------------------------
#
# A leg is P + frame @ (u, F(a, b, u)) for u in [0, 1].  Two frames:
#   shear:    [[dx, 0], [dz, dx]]           (graph over the chord's x-extent)
#   rotation: |PQ| * R_theta                 (graph over the rotated chord)


def _shear_leg(p, q, k_p, k_q):
    dx, dz = q[0] - p[0], q[1] - p[1]
    if dx == 0.0:
        raise ValueError("shear frame needs a leg with nonzero x-extent")
    c = dz / dx
    return np.array([[dx, 0.0], [dz, dx]]), k_p - c, k_q - c


def _rotated_coeff(k, cos_t, sin_t):
    den = cos_t + k * sin_t
    if abs(den) <= SLOPE_POLE_TOL:
        raise ValueError(f"slope {k} is perpendicular to the chord (pole of the interpolant)")
    return (k * cos_t - sin_t) / den


def _rotation_leg(p, q, k_p, k_q):
    vec = np.asarray(q, float) - np.asarray(p, float)
    length = float(np.hypot(*vec))
    cos_t, sin_t = vec / length
    frame = length * np.array([[cos_t, -sin_t], [sin_t, cos_t]])
    return frame, _rotated_coeff(k_p, cos_t, sin_t), _rotated_coeff(k_q, cos_t, sin_t)


@dataclass
class Interpolant:
    """Curve from P to Q leaving P with slope k_p and reaching Q with slope k_q."""

    p: tuple[float, float]
    q: tuple[float, float]
    k_p: float
    k_q: float
    frame: str = "rotation"

    def __post_init__(self):
        build = _rotation_leg if self.frame == "rotation" else _shear_leg
        self.matrix, self.a, self.b = build(np.asarray(self.p, float), np.asarray(self.q, float),
                                            self.k_p, self.k_q)

    @property
    def theta(self) -> float:
        return float(np.arctan2(self.q[1] - self.p[1], self.q[0] - self.p[0]))

    def point(self, t):
        t = np.asarray(t, dtype=float)
        local = np.stack([t, model_f(self.a, self.b, t)], axis=-1)
        return np.asarray(self.p, float) + local @ self.matrix.T

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        local = np.stack([np.ones_like(t), model_f_dt(self.a, self.b, t)], axis=-1)
        return local @ self.matrix.T


def interpolate_leg(itp: Interpolant, t):
    """Evaluate the interpolant at t in [0, 1]; returns (x, z)."""
    return itp.point(t)


# -- fronts -----------------------------------------------------------------


@dataclass
class FrontPath:
    """Piecewise front made of model legs glued at knots.

    Leg j lives on ``[knots[j], knots[j+1]]`` and is traversed with a smoothstep
    reparametrisation, so the velocity vanishes at every knot.  ``cusps``
    holds the knot parameters where the x-direction reverses.
    """

    knots: np.ndarray
    origins: np.ndarray
    frames: np.ndarray
    coeff_a: np.ndarray
    coeff_b: np.ndarray
    cusps: list[float] = field(default_factory=list)
    cusp_points: np.ndarray | None = None

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.origins, self.origins[-1] + self.frames[-1][:, 0]])

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        j = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.origins) - 1)
        width = self.knots[j + 1] - self.knots[j]
        s = (t - self.knots[j]) / width
        return j, smoothstep(s), smoothstep_ds(s) / width

    def xz(self, t) -> np.ndarray:
        j, u, _ = self._locate(t)
        a, b = self.coeff_a[j], self.coeff_b[j]
        local = np.stack([u, model_f(a, b, u)], axis=-1)
        return self.origins[j] + np.einsum("...ij,...j->...i", self.frames[j], local)

    def _slope_parts(self, j, u):
        fr = self.frames[j]
        fp = model_f_dt(self.coeff_a[j], self.coeff_b[j], u)
        dxu = fr[..., 0, 0] + fr[..., 0, 1] * fp
        dzu = fr[..., 1, 0] + fr[..., 1, 1] * fp
        return fr, fp, dxu, dzu

    def dxz(self, t) -> np.ndarray:
        j, u, du = self._locate(t)
        _, _, dxu, dzu = self._slope_parts(j, u)
        return np.stack([dxu * du, dzu * du], axis=-1)

    def slope(self, t) -> np.ndarray:
        """dz/dx along each leg; exact at the knots as well."""
        j, u, _ = self._locate(t)
        _, _, dxu, dzu = self._slope_parts(j, u)
        bad = np.abs(dxu) <= VERTICAL_TOL * np.abs(self.frames[j]).max(axis=(-1, -2))
        if np.any(bad):
            where = np.asarray(t, float)[np.nonzero(bad)] if np.ndim(t) else t
            raise ValueError(f"vertical tangency away from a cusp at t={np.ravel(where)[0]:.6g}")
        return dzu / dxu

    def slope_dt(self, t) -> np.ndarray:
        j, u, du = self._locate(t)
        fr, _, dxu, _ = self._slope_parts(j, u)
        fpp = model_f_dtt(self.coeff_a[j], self.coeff_b[j], u)
        det = fr[..., 0, 0] * fr[..., 1, 1] - fr[..., 0, 1] * fr[..., 1, 0]
        return fpp * det / dxu ** 2 * du

    def vertical_margin(self, samples: int = 257) -> float:
        """Smallest |dx/du| relative to the leg scale, over all legs."""
        u = np.linspace(0, 1, samples)
        fp = model_f_dt(self.coeff_a[:, None], self.coeff_b[:, None], u[None, :])
        dxu = self.frames[:, 0, 0, None] + self.frames[:, 0, 1, None] * fp
        scale = np.abs(self.frames).max(axis=(1, 2))[:, None]
        return float(np.min(np.abs(dxu) / scale))

    def sample(self, n: int = 2001) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(*self.domain, n)
        return t, self.xz(t)


def _reversal_knots(frames, coeff_a, coeff_b, knots):
    end_dx = frames[:, 0, 0] + frames[:, 0, 1] * model_f_dt(coeff_a, coeff_b, 1.0)
    start_dx = frames[:, 0, 0] + frames[:, 0, 1] * model_f_dt(coeff_a, coeff_b, 0.0)
    flips = np.nonzero(np.sign(end_dx[:-1]) * np.sign(start_dx[1:]) < 0)[0]
    return [float(knots[j + 1]) for j in flips]


def _leg_arrays(p, q, k_p, k_q, rotate):
    """Vectorised leg frames and model coefficients; ``rotate`` selects the rotation frame per leg."""
    vec = q - p
    dx, dz = vec[:, 0], vec[:, 1]
    frames = np.zeros((len(p), 2, 2))
    a = np.empty(len(p))
    b = np.empty(len(p))
    shear = ~rotate
    if np.any(shear & (dx == 0.0)):
        raise ValueError(f"shear leg {int(np.nonzero(shear & (dx == 0.0))[0][0])} has no x-extent")
    c = dz[shear] / dx[shear]
    frames[shear] = np.stack([np.stack([dx[shear], 0 * c], -1), np.stack([dz[shear], dx[shear]], -1)], -2)
    a[shear], b[shear] = k_p[shear] - c, k_q[shear] - c
    for j in np.nonzero(rotate)[0]:
        frames[j], a[j], b[j] = _rotation_leg(p[j], q[j], k_p[j], k_q[j])
    return frames, a, b


def front_from_legs(knots, legs) -> FrontPath:
    """legs: sequence of (P, Q, k_P, k_Q, frame) tuples, one per knot interval."""
    knots = np.asarray(knots, dtype=float)
    if len(knots) != len(legs) + 1:
        raise ValueError("need one more knot than legs")
    p = np.array([leg[0] for leg in legs], dtype=float)
    q = np.array([leg[1] for leg in legs], dtype=float)
    k_p = np.array([leg[2] for leg in legs], dtype=float)
    k_q = np.array([leg[3] for leg in legs], dtype=float)
    rotate = np.array([leg[4] == "rotation" for leg in legs])
    return _assemble(knots, p, q, k_p, k_q, rotate)


def _assemble(knots, p, q, k_p, k_q, rotate) -> FrontPath:
    frames, aa, bb = _leg_arrays(p, q, k_p, k_q, rotate)
    cusps = _reversal_knots(frames, aa, bb, knots)
    front = FrontPath(knots, p, frames, aa, bb, cusps)
    front.cusp_points = front.xz(np.array(cusps)) if cusps else np.zeros((0, 2))
    return front


def smooth_front(plan: ZigZagPlan, frame: str = "shear") -> FrontPath:
    """Replace the polygonal zig-zag by tangent-matched model legs.

    Every gap is split into thirds of its parameter interval.  The offset legs
    are straight with slope y_i; the middle leg leaves Q_i^+ with slope y_i and
    arrives at Q_{i+1}^- with slope y_{i+1}, so each junction is C^1 in the
    front and a reversal of x there is a cusp.
    """
    if frame not in ("shear", "rotation"):
        raise ValueError(f"unknown frame {frame!r}")
    base, y, t = plan.base_points, plan.slopes, plan.params
    gaps = len(base) - 1
    h = np.diff(t) / 3.0
    knots = np.concatenate([[t[0]], np.stack([t[:-1] + h, t[:-1] + 2 * h, t[1:]], 1).ravel()])
    # legs in order: P_i -> Q_i^+, Q_i^+ -> Q_{i+1}^-, Q_{i+1}^- -> P_{i+1}
    p = np.stack([base[:-1], plan.q_plus[:-1], plan.q_minus[1:]], 1).reshape(-1, 2)
    q = np.stack([plan.q_plus[:-1], plan.q_minus[1:], base[1:]], 1).reshape(-1, 2)
    k_p = np.stack([y[:-1], y[:-1], y[1:]], 1).ravel()
    k_q = np.stack([y[:-1], y[1:], y[1:]], 1).ravel()
    rotate = np.tile([False, frame == "rotation", False], gaps)
    return _assemble(knots, p, q, k_p, k_q, rotate)


@dataclass
class CallableFront:
    """A front given by x(t), z(t) with optional derivatives and known cusp parameters."""

    x: Callable
    z: Callable
    domain: tuple[float, float] = (-1.0, 1.0)
    dx: Callable | None = None
    dz: Callable | None = None
    cusps: list[float] = field(default_factory=list)

    def xz(self, t):
        return np.stack([self.x(np.asarray(t, float)), self.z(np.asarray(t, float))], axis=-1)

    def dxz(self, t):
        t = np.asarray(t, dtype=float)
        h = 1e-6 * (self.domain[1] - self.domain[0])
        dx = self.dx(t) if self.dx else (self.x(t + h) - self.x(t - h)) / (2 * h)
        dz = self.dz(t) if self.dz else (self.z(t + h) - self.z(t - h)) / (2 * h)
        return np.stack([dx, dz], axis=-1)

    def slope(self, t):
        t = np.asarray(t, dtype=float)
        d = self.dxz(t)
        dx, dz = d[..., 0], d[..., 1]
        scale = max(1.0, float(np.max(np.abs(d))))
        flat = np.abs(dx) <= VERTICAL_TOL * scale
        if not np.any(flat):
            return dz / dx
        if np.any(flat & (np.abs(dz) > 1e-6 * scale)):
            bad = np.ravel(np.broadcast_to(t, flat.shape)[flat & (np.abs(dz) > 1e-6 * scale)])
            raise ValueError(f"vertical tangency away from a cusp at t={bad[0]:.6g}")
        # both derivatives vanish: take the two-sided limit of dz/dx
        out = np.where(flat, 0.0, dz / np.where(flat, 1.0, dx))
        tt = np.broadcast_to(t, flat.shape)[flat]
        off = 1e-5 * (self.domain[1] - self.domain[0])
        lo, hi = self.dxz(tt - off), self.dxz(tt + off)
        out[flat] = 0.5 * (lo[..., 1] / lo[..., 0] + hi[..., 1] / hi[..., 0])
        return out

    def slope_dt(self, t):
        t = np.asarray(t, dtype=float)
        h = 1e-5 * (self.domain[1] - self.domain[0])
        return (self.slope(t + h) - self.slope(t - h)) / (2 * h)


class LegendrianCurve(ParamMap):
    """The Legendrian lift t -> (x, dz/dx, z) of a front."""

    def __init__(self, front, name: str = "lift"):
        self.front = front

        def point(t):
            xz = front.xz(t)
            return np.stack([xz[..., 0], front.slope(t), xz[..., 1]], axis=-1)

        def velocity(t):
            d = front.dxz(t)
            return np.stack([d[..., 0], front.slope_dt(t), d[..., 1]], axis=-1)

        super().__init__(point, [front.domain], 3, [velocity], name=name)

    @property
    def cusp_count(self) -> int:
        return len(self.front.cusps)


def lift_to_legendrian(front) -> LegendrianCurve:
    """Legendrian curve whose front is ``front``; y is the front slope."""
    if isinstance(front, FrontPath) and front.vertical_margin() <= VERTICAL_TOL:
        t = np.linspace(*front.domain, 20001)
        front.slope(t)
        raise ValueError("vertical tangency away from a cusp")
    return LegendrianCurve(front)


def approximate_curve(target: ParamMap, M: int, d: float, slope=None,
                      frame: str = "shear") -> LegendrianCurve:
    """Zig-zag Legendrian approximation of a curve in R^3.

    ``slope`` overrides the slope field (a callable of t or a constant);
    by default the target's own y-coordinate is used.
    """
    if target.arity != 1 or target.dim != 3:
        raise ValueError("target must be a curve in R^3")
    if M < 2:
        raise ValueError("need M >= 2 base points")
    lo, hi = target.bounds[0]
    t = np.linspace(lo, hi, M)
    pts = target(t)
    if slope is None:
        y = pts[:, 1]
    elif callable(slope):
        y = np.broadcast_to(np.asarray(slope(t), float), t.shape)
    else:
        y = np.full_like(t, float(slope))
    samples = [FrontSample(*v) for v in zip(t.tolist(), pts[:, 0].tolist(),
                                            pts[:, 2].tolist(), y.tolist())]
    plan = plan_zigzag(samples, d)
    curve = lift_to_legendrian(smooth_front(plan, frame))
    curve.plan = plan
    curve.name = f"zigzag({target.name},M={M},d={d:g})"
    return curve


def front_distance(f: ParamMap, g: ParamMap, n: int = 10001) -> float:
    """Sup distance between the (x, z) projections on a common grid."""
    t = np.linspace(*f.bounds[0], n)
    a, b = f(t), g(t)
    return float(np.max(np.hypot(a[:, 0] - b[:, 0], a[:, 2] - b[:, 2])))


def polygon_distance(front: FrontPath, plan: ZigZagPlan, per_leg: int = 201) -> float:
    """Largest distance from a leg of the smoothed front to its chord."""
    worst = 0.0
    poly = plan.polygon()
    u = np.linspace(0, 1, per_leg)
    for j in range(len(front.origins)):
        t = front.knots[j] + u * (front.knots[j + 1] - front.knots[j])
        pts = front.xz(t)
        chord = poly[j] + np.outer(smoothstep(u), poly[j + 1] - poly[j])
        worst = max(worst, float(np.max(np.linalg.norm(pts - chord, axis=1))))
    return worst


def offset_leg_deviation(front: FrontPath, plan: ZigZagPlan, per_leg: int = 201) -> float:
    """Largest distance from a base point reached along its two offset legs."""
    u = np.linspace(0, 1, per_leg)
    base = plan.base_points
    worst = 0.0
    for j in range(len(front.origins)):
        gap, kind = divmod(j, 3)
        if kind == 1:
            continue
        anchor = base[gap] if kind == 0 else base[gap + 1]
        t = front.knots[j] + u * (front.knots[j + 1] - front.knots[j])
        worst = max(worst, float(np.max(np.linalg.norm(front.xz(t) - anchor, axis=1))))
    return worst


# -- families in R^5 ---------------------------------------------------------


class LiftedFamily(ParamMap):
    """(t, s) -> (gamma_s(t), s, alpha(d gamma_s / ds)) in R^5."""

    def __init__(self, family: Callable, bounds, ds: Callable | None = None,
                 dt: Callable | None = None, h: float = 1e-6, name: str = "family"):
        self.family = family
        self.h = h
        self._ds = ds
        self._dt = dt

        def d_s(t, s):
            if self._ds is not None:
                return self._ds(t, s)
            return (family(t, s + h) - family(t, s - h)) / (2 * h)

        def d_t(t, s):
            if self._dt is not None:
                return self._dt(t, s)
            return (family(t + h, s) - family(t - h, s)) / (2 * h)

        def p_coord(t, s, pts=None):
            pts = family(t, s) if pts is None else pts
            return alpha3(pts, d_s(t, s))

        def point(t, s):
            t, s = np.broadcast_arrays(t, s)
            pts = family(t, s)
            return np.concatenate([pts, s[..., None], p_coord(t, s, pts)[..., None]], axis=-1)

        def partial_t(t, s):
            t, s = np.broadcast_arrays(t, s)
            dp = (p_coord(t + h, s) - p_coord(t - h, s)) / (2 * h)
            return np.concatenate([d_t(t, s), np.zeros_like(s)[..., None], dp[..., None]], axis=-1)

        def partial_s(t, s):
            t, s = np.broadcast_arrays(t, s)
            dp = (p_coord(t, s + h) - p_coord(t, s - h)) / (2 * h)
            return np.concatenate([d_s(t, s), np.ones_like(s)[..., None], dp[..., None]], axis=-1)

        self.p_coordinate = p_coord
        super().__init__(point, bounds, 5, [partial_t, partial_s], name=name)


def lift_family_to_r5(family: Callable, bounds=((-1.0, 1.0), (-1.0, 1.0)),
                      ds: Callable | None = None, dt: Callable | None = None,
                      tol: float = 1e-8, check: tuple[int, int] = (401, 21)) -> LiftedFamily:
    """Lift a family of Legendrian curves in R^3 to one Legendrian surface in R^5.

    ``family(t, s)`` returns points (x, y, z).  Every slice is checked on a
    ``check`` grid; a slice with contact defect above ``tol`` is rejected.
    """
    lifted = LiftedFamily(family, bounds, ds=ds, dt=dt)
    t = np.linspace(*bounds[0], check[0])
    for s in np.linspace(*bounds[1], check[1]):
        ss = np.full_like(t, s)
        defect = np.max(np.abs(alpha3(family(t, ss), lifted.derivative((t, ss), 0)[..., :3])))
        if defect > tol:
            raise ValueError(f"slice s={s:.6g} is not Legendrian (defect {defect:.3g})")
    return lifted


class ZigZagFamily:
    """Zig-zag approximations of a one-parameter family of curves, cached per s."""

    def __init__(self, target: Callable, M: int, d: float, t_bounds=(-1.0, 1.0)):
        self.target = target
        self.M = M
        self.d = d
        self.t_bounds = t_bounds
        self._cache: dict[float, LegendrianCurve] = {}

    def slice(self, s: float) -> LegendrianCurve:
        key = float(s)
        if key not in self._cache:
            curve = ParamMap(lambda t: self.target(t, np.full_like(t, key)), [self.t_bounds], 3)
            self._cache[key] = approximate_curve(curve, self.M, self.d)
        return self._cache[key]

    def __call__(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        out = np.empty(t.shape + (3,))
        for val in np.unique(s):
            mask = s == val
            out[mask] = self.slice(val)(t[mask])
        return out

    def dt(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        out = np.empty(t.shape + (3,))
        for val in np.unique(s):
            mask = s == val
            out[mask] = self.slice(val).derivative((t[mask],), 0)
        return out
