"""Model singularities (zig-zag births, wrinkles, embryos) and loose-chart geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .contact import beta5
from .curves import cusp_set, gamma_m, z_axis_crossings
from .schedules import ramp

RANK_TOL = 1e-8


def psi_delta(delta, u) -> np.ndarray:
    """Plane curve (u^3 - delta u, 9/4 u^5 - 5 delta/2 u^3 + 5 delta^2/4 u)."""
    delta = np.asarray(delta, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.stack([u**3 - delta * u,
                     2.25 * u**5 - 2.5 * delta * u**3 + 1.25 * delta**2 * u], axis=-1)


def psi_delta_du(delta, u) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.stack([3 * u**2 - delta,
                     11.25 * u**4 - 7.5 * delta * u**2 + 1.25 * delta**2], axis=-1)


def psi_delta_ddelta(delta, u) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.stack([-u + 0 * delta, -2.5 * u**3 + 2.5 * delta * u], axis=-1)


def cutoff(u):
    """1 for |u| <= 1, 0 for |u| >= 2, smooth in between."""
    return 1.0 - ramp(np.abs(np.asarray(u, dtype=float)) - 1.0)


def psi_delta_compact(delta, u) -> np.ndarray:
    """psi_delta damped to vanish for |u| >= 2."""
    return cutoff(u)[..., None] * psi_delta(delta, u)


def psi_singular_points(delta: float) -> list[float]:
    """Parameters where both derivative components vanish, found from polynomial roots."""
    dx = np.roots([3.0, 0.0, -delta])
    dz = np.poly1d([11.25, 0.0, -7.5 * delta, 0.0, 1.25 * delta**2])
    real = sorted({round(float(r.real), 15) for r in dx if abs(r.imag) < 1e-12})
    scale = max(1.0, abs(delta)) ** 2
    return [r for r in real if abs(dz(r)) <= 1e-10 * scale]


# -- wrinkles --------------------------------------------------------------------


WRINKLE_VARIANTS = {
    # variant -> (delta(x, t), d delta / d x factor)
    "standard": (lambda r2, t: 1.0 - r2, -2.0),
    "inside-out": (lambda r2, t: r2 - 1.0, 2.0),
    "embryo": (lambda r2, t: t - r2, -2.0),
}


def _wrinkle_map(variant, x, u, t=0.0):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.asarray(u, dtype=float)
    delta_fn, _ = WRINKLE_VARIANTS[variant]
    delta = delta_fn(np.sum(x * x, axis=-1), t)
    xb, _ = np.broadcast_arrays(x, u[..., None])
    return np.concatenate([xb, psi_delta(delta, u)], axis=-1)


def wrinkle(x, u) -> np.ndarray:
    """(x, psi_{1 - |x|^2}(u)); singular on the sphere |x|^2 + 3u^2 = 1."""
    return _wrinkle_map("standard", x, u)


def inside_out_wrinkle(x, u) -> np.ndarray:
    """(x, psi_{|x|^2 - 1}(u)); singular on the hyperboloid |x|^2 - 3u^2 = 1."""
    return _wrinkle_map("inside-out", x, u)


def embryo_family(t, x, u) -> np.ndarray:
    """(x, psi_{t - |x|^2}(u)); singular on |x|^2 + 3u^2 = t, empty for t < 0."""
    return _wrinkle_map("embryo", x, u, t)


def wrinkle_jacobian(variant: str, x, u, t: float = 0.0) -> np.ndarray:
    """Closed-form Jacobian of a wrinkle-type map, shape (k + 2, k + 1) for x in R^k."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = x.shape[-1]
    delta_fn, factor = WRINKLE_VARIANTS[variant]
    delta = delta_fn(float(x @ x), t)
    jac = np.zeros((k + 2, k + 1))
    jac[:k, :k] = np.eye(k)
    jac[k:, :k] = np.outer(psi_delta_ddelta(delta, u), factor * x)
    jac[k:, k] = psi_delta_du(delta, u)
    return jac


def numeric_rank(jac: np.ndarray, tol: float = RANK_TOL) -> int:
    sv = np.linalg.svd(jac, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


def _fd_column_u(variant, x, u, t, h=1e-6):
    return (_wrinkle_map(variant, x, u + h, t) - _wrinkle_map(variant, x, u - h, t))[..., -2] / (2 * h)


def trace_singular_locus(variant: str, directions, t: float = 0.0, r_max: float = 3.0,
                         samples: int = 600) -> list[np.ndarray]:
    """Points where the rank drops, found by root-finding along rays from the origin.

    ``directions`` are unit vectors in (x, u)-space.  Along each ray the
    x-entry of the u-column (central differences of the map, not the closed
    form) changes sign at a rank drop; brentq polishes it and the closed-form
    Jacobian confirms the drop.
    """
    found = []
    for d in np.atleast_2d(directions):
        d = np.asarray(d, dtype=float)

        def signed(r):
            return float(_fd_column_u(variant, r * d[:-1], r * d[-1], t))

        rs = np.linspace(1e-9, r_max, samples)
        vals = np.array([signed(r) for r in rs])
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            r = brentq(signed, rs[i], rs[i + 1], xtol=1e-14)
            pt = r * d
            sv = np.linalg.svd(wrinkle_jacobian(variant, pt[:-1], pt[-1], t), compute_uv=False)
            if sv[-1] < RANK_TOL * sv[0]:
                found.append(pt)
    return found


def locus_defect(variant: str, pts, t: float = 0.0) -> float:
    """Largest deviation of traced points from the analytic singular set."""
    if not len(pts):
        return 0.0
    pts = np.asarray(pts)
    r2 = np.sum(pts[:, :-1] ** 2, axis=1)
    u2 = pts[:, -1] ** 2
    if variant == "standard":
        err = np.sqrt(r2 + 3 * u2) - 1.0
    elif variant == "inside-out":
        err = np.sqrt(np.maximum(r2 - 3 * u2, 0.0)) - 1.0
    else:
        err = (r2 + 3 * u2) - t
    return float(np.abs(err).max())


def ray_directions(dim: int, count: int, seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def singular_set_diameter(pts) -> float:
    pts = np.asarray(pts)
    if len(pts) < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def min_relative_singular_value(variant: str, radius: float, t: float = 0.0, dim_x: int = 2,
                                n: int = 41) -> float:
    """Smallest sigma_min / sigma_max of the Jacobian over a grid in the ball of given radius."""
    axes = [np.linspace(-radius, radius, n)] * (dim_x + 1)
    worst = math.inf
    for pt in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, dim_x + 1):
        if pt @ pt > radius**2:
            continue
        sv = np.linalg.svd(wrinkle_jacobian(variant, pt[:-1], pt[-1], t), compute_uv=False)
        worst = min(worst, sv[-1] / sv[0])
    return worst


# -- zig-zag birth ----------------------------------------------------------------


def zigzag_birth_model(t, tau) -> np.ndarray:
    """(t^3 - tau t, 15/4 (t^2 - tau/3), 9/4 t^5 - 5 tau/2 t^3 + 5 tau^2/4 t)."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    front = psi_delta(tau, t)
    return np.stack([front[..., 0], 3.75 * (t * t - tau / 3.0), front[..., 1]], axis=-1)


def zigzag_birth_velocity(t, tau) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    d = psi_delta_du(tau, t)
    return np.stack([d[..., 0], 7.5 * t + 0 * tau, d[..., 1]], axis=-1)


# -- loose charts ----------------------------------------------------------------


def vk_box(m: int) -> tuple[tuple[float, float], ...]:
    """The box |x|,|y|,|p| < 10/m, |z|,|q| < 1 + 10/m around Im Lambda_m and Im Lambda_inf."""
    r = 10.0 / m
    return ((-r, r), (-r, r), (-1 - r, 1 + r), (-1 - r, 1 + r), (-r, r))


def box_contains_box(inner, outer) -> bool:
    return all(o_lo <= i_lo and i_hi <= o_hi for (i_lo, i_hi), (o_lo, o_hi) in zip(inner, outer))


def lambda_bounding_box(m: int) -> tuple[tuple[float, float], ...]:
    """Interval bounds for Im Lambda_m: |x|, |y| <= sqrt(2)/m, |z| <= 1 + 1/(2m^2), |q| <= 1, p = 0."""
    r = math.sqrt(2.0) / m
    zr = 1.0 + 1.0 / (2.0 * m * m)
    return ((-r, r), (-r, r), (-zr, zr), (-1.0, 1.0), (0.0, 0.0))


@dataclass(frozen=True)
class LooseChartSpec:
    z_center: float
    m: int
    rho: float
    q0: float = 0.0

    def __post_init__(self):
        if self.rho <= 1.0:
            raise ValueError("rho must exceed 1")
        if not -1.0 < self.q0 < 1.0:
            raise ValueError("q0 must lie in (-1, 1)")

    @property
    def cube(self) -> tuple[tuple[float, float], ...]:
        a = 1.5 / self.m
        c = 4.5 / self.m**2
        return ((-a, a), (-a, a), (self.z_center - c, self.z_center + c))

    @property
    def slab(self) -> tuple[tuple[float, float], ...]:
        b = 1.5 * self.rho / self.m
        return ((self.q0 - b, self.q0 + b), (-b, b))

    @property
    def box(self) -> tuple[tuple[float, float], ...]:
        return self.cube + self.slab

    def zero_section(self) -> tuple[tuple[float, float], ...]:
        return (self.slab[0], (0.0, 0.0))

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        inside = np.ones(pts.shape[:-1], dtype=bool)
        for k, (lo, hi) in enumerate(self.box):
            inside &= (pts[..., k] > lo) & (pts[..., k] < hi)
        return inside


def loose_chart_boxes(spec: LooseChartSpec) -> dict:
    box = spec.box
    return {
        "cube": [list(iv) for iv in spec.cube],
        "slab": [list(iv) for iv in spec.slab],
        "zero_section": [list(iv) for iv in spec.zero_section()],
        "inside_vk": box_contains_box(box, vk_box(spec.m)),
    }


def loose_chart_rescale(spec: LooseChartSpec, pt) -> np.ndarray:
    """Affine contactomorphism onto [-1/2,1/2]^3 x [-rho/2, rho/2]^2; pulls beta back to (m^2/9) beta."""
    pt = np.asarray(pt, dtype=float)
    if not np.all(spec.contains(pt)):
        raise ValueError("point outside the loose chart")
    a, b = spec.m / 3.0, spec.m**2 / 9.0
    shift = np.array([0.0, 0.0, spec.z_center, spec.q0, 0.0])
    return (pt - shift) * np.array([a, a, b, a, a])


def loose_chart_unscale(spec: LooseChartSpec, pt) -> np.ndarray:
    pt = np.asarray(pt, dtype=float)
    a, b = spec.m / 3.0, spec.m**2 / 9.0
    shift = np.array([0.0, 0.0, spec.z_center, spec.q0, 0.0])
    return pt / np.array([a, a, b, a, a]) + shift


def rescale_pushforward(spec: LooseChartSpec, v) -> np.ndarray:
    a, b = spec.m / 3.0, spec.m**2 / 9.0
    return np.asarray(v, dtype=float) * np.array([a, a, b, a, a])


def pullback_factor_defect(spec: LooseChartSpec, samples: int = 1000, seed: int = 3) -> float:
    """max |beta(Phi(pt), Phi_* v) - (m^2/9) beta(pt, v)| over random points and tangents."""
    rng = np.random.default_rng(seed)
    lo, hi = np.array(spec.box).T
    pts = lo + (hi - lo) * rng.uniform(0.02, 0.98, size=(samples, 5))
    v = rng.normal(size=(samples, 5))
    lhs = beta5(loose_chart_rescale(spec, pts), rescale_pushforward(spec, v))
    rhs = spec.m**2 / 9.0 * beta5(pts, v)
    return float(np.abs(lhs - rhs).max())


def admissible_centres(m: int) -> list[float]:
    """z-axis crossings of gamma_m whose two neighbouring cusps lie inside (-1, 1)."""
    half = math.pi / (2.0 * m * m)
    return [z for z in z_axis_crossings(m) if -1.0 < z - half and z + half < 1.0]


def chart_arc(spec: LooseChartSpec, samples: int = 200001) -> dict:
    """Parameters t with Lambda_m(t, q0) in the chart: arc count and cusps on it."""
    t = np.linspace(-1.0, 1.0, samples)
    pts = gamma_m(spec.m, t)
    cube = spec.cube
    inside = np.ones(t.shape, dtype=bool)
    for k in range(3):
        inside &= (pts[:, k] > cube[k][0]) & (pts[:, k] < cube[k][1])
    edges = np.diff(inside.astype(int))
    arcs = int((edges == 1).sum() + inside[0])
    lo = float(t[inside].min()) if inside.any() else math.nan
    hi = float(t[inside].max()) if inside.any() else math.nan
    cusps = [c.t for c in cusp_set(spec.m) if lo <= c.t <= hi]
    return {"arcs": arcs, "t_range": [lo, hi], "cusps": len(cusps)}
