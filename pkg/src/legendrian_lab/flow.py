"""Contact Hamiltonian fields on R^5, their flows, and the stretching isotopy.

For the form dz - y dx - p dq a function H generates the field

    X_H = (-H_y, y H_z + H_x, H - y H_y - p H_p, -H_p, p H_z + H_q)

in (x, y, z, q, p) order.  The stretching isotopy pushes the surface
Pi(t, s, w) along its w-fibres under the control of a lambda schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from .contact import beta5
from .curves import pi_embedding, sigma_dw

X, Y, Z, Q, P = range(5)


@dataclass
class Hamiltonian:
    """H(pt, tau) with gradient; ``box`` bounds its support when it is compact."""

    value: Callable
    gradient: Callable
    name: str = "H"
    box: tuple[tuple[float, float], ...] | None = None

    def __call__(self, pt, tau=0.0):
        return self.value(np.asarray(pt, dtype=float), tau)

    def grad(self, pt, tau=0.0):
        return self.gradient(np.asarray(pt, dtype=float), tau)


def _const(c):
    return Hamiltonian(lambda pt, tau: np.full(pt.shape[:-1], float(c)),
                       lambda pt, tau: np.zeros(pt.shape), name=f"const{c:g}")


def _coord(k, name):
    def grad(pt, tau):
        g = np.zeros(pt.shape)
        g[..., k] = 1.0
        return g

    return Hamiltonian(lambda pt, tau: pt[..., k].copy(), grad, name=name)


def _yp():
    def grad(pt, tau):
        g = np.zeros(pt.shape)
        g[..., Y] = pt[..., P]
        g[..., P] = pt[..., Y]
        return g

    return Hamiltonian(lambda pt, tau: pt[..., Y] * pt[..., P], grad, name="yp")


def bump(center: Sequence[float], radius: float, amplitude: float = 1.0, name: str = "bump") -> Hamiltonian:
    """A exp(1 - 1/(1 - r^2)) with r = |pt - center|/radius, zero for r >= 1."""
    c = np.asarray(center, dtype=float)

    def r2(pt):
        return np.sum((pt - c) ** 2, axis=-1) / radius**2

    def value(pt, tau):
        rr = r2(pt)
        inside = rr < 1.0
        safe = np.where(inside, 1.0 - rr, 1.0)
        return np.where(inside, amplitude * np.exp(1.0 - 1.0 / safe), 0.0)

    def grad(pt, tau):
        rr = r2(pt)
        inside = rr < 1.0
        safe = np.where(inside, 1.0 - rr, 1.0)
        h = np.where(inside, amplitude * np.exp(1.0 - 1.0 / safe), 0.0)
        factor = -h / safe**2
        return factor[..., None] * 2.0 * (pt - c) / radius**2

    box = tuple((float(ci - radius), float(ci + radius)) for ci in c)
    return Hamiltonian(value, grad, name=name, box=box)


BUILTIN_HAMILTONIANS: dict[str, Callable[[], Hamiltonian]] = {
    "zero": lambda: _const(0.0),
    "one": lambda: _const(1.0),
    "y": lambda: _coord(Y, "y"),
    "p": lambda: _coord(P, "p"),
    "yp": _yp,
    "bump": lambda: bump((0.1, -0.2, 0.0, 0.3, 0.1), 1.0, 1.0, name="bump"),
    "bump2": lambda: bump((0.4, 0.3, -0.2, -0.1, 0.2), 0.6, 0.7, name="bump2"),
}


def builtin_hamiltonian(name: str) -> Hamiltonian:
    try:
        return BUILTIN_HAMILTONIANS[name]()
    except KeyError:
        raise ValueError(f"unknown Hamiltonian {name!r}; choose from {sorted(BUILTIN_HAMILTONIANS)}") from None


class ContactField:
    """The contact vector field X_H."""

    def __init__(self, ham: Hamiltonian):
        self.ham = ham

    def __call__(self, pt, tau=0.0):
        pt = np.asarray(pt, dtype=float)
        h = self.ham(pt, tau)
        g = self.ham.grad(pt, tau)
        y, p = pt[..., Y], pt[..., P]
        return np.stack([
            -g[..., Y],
            y * g[..., Z] + g[..., X],
            h - y * g[..., Y] - p * g[..., P],
            -g[..., P],
            p * g[..., Z] + g[..., Q],
        ], axis=-1)


def contact_field_from_hamiltonian(ham: Hamiltonian) -> ContactField:
    return ContactField(ham)


def _dbeta_contract(pt, v):
    """Components of i_v d(beta) on the coordinate basis; d(beta) = dx^dy + dq^dp."""
    out = np.zeros(np.broadcast(pt, v).shape)
    out[..., X] = -v[..., Y]
    out[..., Y] = v[..., X]
    out[..., Q] = -v[..., P]
    out[..., P] = v[..., Q]
    return out


def _beta_covector(pt):
    pt = np.asarray(pt, dtype=float)
    cov = np.zeros(pt.shape)
    cov[..., X] = -pt[..., Y]
    cov[..., Z] = 1.0
    cov[..., Q] = -pt[..., P]
    return cov


def verify_contact_field_identities(ham: Hamiltonian, points, tau: float = 0.0) -> dict:
    """Residuals of beta(X_H) = H and i_X d(beta) = dH(R) beta - dH at the given points."""
    pts = np.asarray(points, dtype=float)
    field_ = ContactField(ham)
    v = field_(pts, tau)
    h = ham(pts, tau)
    g = ham.grad(pts, tau)
    value_res = np.abs(beta5(pts, v) - h)
    rhs = g[..., Z][..., None] * _beta_covector(pts) - g
    form_res = np.abs(_dbeta_contract(pts, v) - rhs).max(axis=-1)
    return {"hamiltonian": ham.name, "points": int(value_res.size),
            "value_residual": float(value_res.max()), "form_residual": float(form_res.max())}


@dataclass
class Trajectory:
    taus: np.ndarray
    points: np.ndarray
    truncated: bool = False

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]


def integrate_flow(vf: Callable, start, tau0: float, tau1: float, step: float,
                   box: Sequence[tuple[float, float]] | None = None) -> Trajectory:
    """Classical fourth-order Runge-Kutta with a fixed step; vectorised over starting points.

    If ``box`` is given the trajectory stops (flagged truncated) once any point leaves it.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    n = max(1, math.ceil(abs(tau1 - tau0) / step - 1e-12))
    h = (tau1 - tau0) / n
    x = np.array(start, dtype=float)
    taus, pts = [tau0], [x.copy()]
    lo = hi = None
    if box is not None:
        lo, hi = np.array(box, dtype=float).T
    tau = tau0
    for _ in range(n):
        k1 = vf(x, tau)
        k2 = vf(x + 0.5 * h * k1, tau + 0.5 * h)
        k3 = vf(x + 0.5 * h * k2, tau + 0.5 * h)
        k4 = vf(x + h * k3, tau + h)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        tau += h
        taus.append(tau)
        pts.append(x.copy())
        if lo is not None and (np.any(x < lo) or np.any(x > hi)):
            return Trajectory(np.array(taus), np.array(pts), True)
    return Trajectory(np.array(taus), np.array(pts), False)


def flow_map(vf, pts, tau: float, step: float) -> np.ndarray:
    return integrate_flow(vf, pts, 0.0, tau, step).end


def step_halving_study(vf, start, tau: float, steps: Sequence[float]) -> dict:
    """Endpoint differences between successive halvings and their ratios."""
    ends = [flow_map(vf, start, tau, h) for h in steps]
    errs = [float(np.max(np.abs(a - b))) for a, b in zip(ends, ends[1:])]
    ratios = [e0 / e1 for e0, e1 in zip(errs, errs[1:]) if e1 > 0]
    return {"steps": list(steps), "differences": errs, "ratios": ratios}


def kernel_basis(pt) -> np.ndarray:
    """Four vectors spanning ker(beta) at pt: d/dx + y d/dz, d/dy, d/dq + p d/dz, d/dp."""
    y, p = float(pt[Y]), float(pt[P])
    return np.array([[1, 0, y, 0, 0], [0, 1, 0, 0, 0], [0, 0, p, 1, 0], [0, 0, 0, 0, 1]], dtype=float)


def verify_conformal_pullback(vf, points, tau: float, step: float, fd: float = 1e-5) -> dict:
    """Transport ker(beta) by the linearised flow and measure how far it leaves ker(beta).

    The angle defect of a vector w at the image point is |beta(w)| / (|w| |beta|).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    worst = 0.0
    for pt in pts:
        basis = kernel_basis(pt)
        probes = np.concatenate([pt + fd * basis, pt - fd * basis])
        images = flow_map(vf, np.vstack([pt[None], probes]), tau, step)
        image_pt = images[0]
        jv = (images[1:5] - images[5:9]) / (2 * fd)
        cov = _beta_covector(image_pt)
        defect = np.abs(jv @ cov) / (np.linalg.norm(jv, axis=1) * np.linalg.norm(cov))
        worst = max(worst, float(defect.max()))
    return {"points": len(pts), "tau": tau, "step": step, "max_angle_defect": worst}


def outside_support_motion(vf, ham: Hamiltonian, points, tau: float, step: float) -> float:
    """Largest displacement of points lying outside the support box (0 for an exact identity)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    lo, hi = np.array(ham.box).T
    outside = np.any((pts < lo) | (pts > hi), axis=1)
    moved = flow_map(vf, pts[outside], tau, step) - pts[outside]
    return float(np.abs(moved).max(initial=0.0))


# -- stretching isotopy ---------------------------------------------------------


class StretchIsotopy:
    """Gamma_tau(t, s, w) = Pi(t, s, W) with W = w + lambda_tau(t, s)(w/w0 - w), w in [0, w0].

    ``schedule(t, s, tau)`` and ``schedule.dtau`` supply lambda and its tau-rate.
    At tau with lambda = 1 the fibre [0, w0] is stretched onto [0, 1].
    """

    def __init__(self, m: int, w0: float, schedule):
        if not 0.0 < w0 < 1.0:
            raise ValueError("w0 must lie in (0, 1)")
        self.m = m
        self.w0 = w0
        self.schedule = schedule
        self.bounds = ((-1.0, 1.0), (-1.0, 1.0), (0.0, w0))

    def stretch(self, t, s, w, tau):
        lam = self.schedule(t, s, tau)
        return w + lam * (w / self.w0 - w)

    def __call__(self, t, s, w, tau):
        return pi_embedding(self.m, t, s, self.stretch(t, s, w, tau))

    def velocity(self, t, s, w, tau) -> np.ndarray:
        """Closed form: d lambda/d tau (w/w0 - w) d Pi/d w at the stretched fibre coordinate."""
        t, s, w = np.broadcast_arrays(*(np.asarray(a, float) for a in (t, s, w)))
        rate = np.asarray(self.schedule.dtau(t, s, tau)) * (w / self.w0 - w)
        fibre = sigma_dw(self.m, t, self.stretch(t, s, w, tau))
        out = np.zeros(t.shape + (5,))
        out[..., :3] = rate[..., None] * fibre
        return out

    def fd_velocity(self, t, s, w, tau, h: float = 1e-6) -> np.ndarray:
        return (self(t, s, w, tau + h) - self(t, s, w, tau - h)) / (2 * h)

    def d_dw(self, t, s, w, tau, closed_form: bool = True, h: float = 1e-6) -> np.ndarray:
        if not closed_form:
            return (self(t, s, w + h, tau) - self(t, s, w - h, tau)) / (2 * h)
        t, s, w = np.broadcast_arrays(*(np.asarray(a, float) for a in (t, s, w)))
        lam = np.asarray(self.schedule(t, s, tau))
        out = np.zeros(t.shape + (5,))
        out[..., :3] = (1 + lam * (1 / self.w0 - 1))[..., None] * sigma_dw(self.m, t, self.stretch(t, s, w, tau))
        return out

    def d_dt(self, t, s, w, tau, h: float = 1e-6) -> np.ndarray:
        return (self(t + h, s, w, tau) - self(t - h, s, w, tau)) / (2 * h)

    def d_ds(self, t, s, w, tau, h: float = 1e-6) -> np.ndarray:
        return (self(t, s + h, w, tau) - self(t, s - h, w, tau)) / (2 * h)

    def grid(self, counts: Sequence[int], w_min: float = 0.0):
        axes = [np.linspace(-1, 1, counts[0]), np.linspace(-1, 1, counts[1]),
                np.linspace(w_min, self.w0, counts[2])]
        return np.meshgrid(*axes, indexing="ij")


def stretch_velocity(iso: StretchIsotopy, t, s, w, tau) -> np.ndarray:
    return iso.velocity(t, s, w, tau)


def compare_velocity(iso: StretchIsotopy, counts=(41, 41, 11), tau: float = 0.125) -> dict:
    t, s, w = iso.grid(counts)
    closed = iso.velocity(t, s, w, tau)
    fd = iso.fd_velocity(t, s, w, tau)
    scale = max(1.0, float(np.abs(fd).max()))
    return {"tau": tau, "max_abs_difference": float(np.abs(closed - fd).max()),
            "relative_to_scale": float(np.abs(closed - fd).max() / scale)}


def verify_velocity_annihilated_by_beta(iso: StretchIsotopy, counts=(41, 41, 11), tau: float = 0.125) -> dict:
    t, s, w = iso.grid(counts)
    pts = iso(t, s, w, tau)
    fd = np.abs(beta5(pts, iso.fd_velocity(t, s, w, tau)))
    closed = np.abs(beta5(pts, iso.velocity(t, s, w, tau)))
    edge = np.abs(beta5(pts[..., 0, :], iso.fd_velocity(t[..., 0], s[..., 0], w[..., 0], tau)))
    return {"tau": tau, "fd_max": float(fd.max()), "closed_form_max": float(closed.max()),
            "w0_slice_max": float(edge.max())}


def verify_obstruction_identity(iso: StretchIsotopy, counts=(41, 41, 11), tau: float = 0.125) -> dict:
    """Residual of the fibre identity and the two compatibility combinations.

    (C - S)(d/dx + y d/dz) - (S + C) d/dy equals m/(1 + (1/w0 - 1) lambda) dGamma/dw.
    With the velocity v, (C - S) dy(v) + (S + C) dx(v) vanishes; the combination with
    a minus sign equals -2 k cos(2 m^2 t)/m for k = d lambda/d tau (w/w0 - w).
    """
    m = iso.m
    t, s, w = iso.grid(counts)
    th = m * m * t
    sn, cs = np.sin(th), np.cos(th)
    pts = iso(t, s, w, tau)
    lhs = np.zeros(pts.shape)
    lhs[..., X] = cs - sn
    lhs[..., Y] = -(sn + cs)
    lhs[..., Z] = pts[..., Y] * (cs - sn)
    lam = iso.schedule(t, s, tau)
    factor = (m / (1 + (1 / iso.w0 - 1) * lam))[..., None]
    res_fd = np.abs(lhs - factor * iso.d_dw(t, s, w, tau, closed_form=False)).max()
    res_cf = np.abs(lhs - factor * iso.d_dw(t, s, w, tau)).max()
    v = iso.fd_velocity(t, s, w, tau)
    plus = (cs - sn) * v[..., Y] + (sn + cs) * v[..., X]
    minus = (cs - sn) * v[..., Y] - (sn + cs) * v[..., X]
    k = iso.schedule.dtau(t, s, tau) * (w / iso.w0 - w)
    predicted = -2 * k * np.cos(2 * th) / m
    return {
        "tau": tau,
        "identity_residual_fd": float(res_fd),
        "identity_residual_closed_form": float(res_cf),
        "combination_plus_max": float(np.abs(plus).max()),
        "combination_minus_max": float(np.abs(minus).max()),
        "combination_minus_vs_prediction": float(np.abs(minus - predicted).max()),
    }


# -- normal-coordinate Hamiltonian --------------------------------------------


class NormalHamiltonian:
    """H on a tube around Im Gamma_tau in offset coordinates.

    Points are written Gamma(t, s, w) + b e + c d/dp with
    e = (S + C) V1 + (C - S) V2, V1 = d/dx + y d/dz, V2 = d/dy, and
    H = b [(S + C) dy(v) - (C - S) dx(v)] for the velocity v at (t, s, w).
    Then dH(V1) = dy(v), dH(V2) = -dx(v) and H does not depend on q or p.
    """

    def __init__(self, iso: StretchIsotopy, tau: float, cond_max: float = 1e8):
        self.iso = iso
        self.tau = tau
        self.cond_max = cond_max

    def _phase(self, t):
        th = self.iso.m ** 2 * np.asarray(t, float)
        return np.sin(th), np.cos(th)

    def direction(self, t, s, w) -> np.ndarray:
        sn, cs = self._phase(t)
        y = self.iso(t, s, w, self.tau)[..., Y]
        e = np.zeros(np.shape(y) + (5,))
        e[..., X] = sn + cs
        e[..., Y] = cs - sn
        e[..., Z] = y * (sn + cs)
        return e

    def coefficient(self, t, s, w) -> np.ndarray:
        sn, cs = self._phase(t)
        v = self.iso.velocity(t, s, w, self.tau)
        return (sn + cs) * v[..., Y] - (cs - sn) * v[..., X]

    def chart(self, t, s, w, b, c) -> np.ndarray:
        pt = self.iso(t, s, w, self.tau) + np.asarray(b, float)[..., None] * self.direction(t, s, w)
        pt[..., P] = pt[..., P] + c
        return pt

    def frame(self, t, s, w) -> np.ndarray:
        """Columns Gamma_t, Gamma_s, Gamma_w, e, d/dp of the offset chart at b = c = 0."""
        iso, tau = self.iso, self.tau
        cols = [iso.d_dt(t, s, w, tau), iso.d_ds(t, s, w, tau), iso.d_dw(t, s, w, tau),
                self.direction(t, s, w), np.broadcast_to(np.eye(5)[P], np.shape(t) + (5,))]
        return np.stack(cols, axis=-1)

    def condition_number(self, t, s, w) -> np.ndarray:
        return np.linalg.cond(self.frame(t, s, w))

    def reference_frame_condition(self, t, s, w) -> np.ndarray:
        """Condition number of {V1, V2, Gamma_t, d/dq, d/dp}."""
        y = self.iso(t, s, w, self.tau)[..., Y]
        v1 = np.zeros(np.shape(y) + (5,))
        v1[..., X] = 1.0
        v1[..., Z] = y
        eye = np.broadcast_to(np.eye(5), np.shape(y) + (5, 5))
        cols = [v1, eye[..., Y], self.iso.d_dt(t, s, w, self.tau), eye[..., Q], eye[..., P]]
        return np.linalg.cond(np.stack(cols, axis=-1))

    def invert(self, pts, hints, iters: int = 40, tol: float = 1e-14):
        """Offset coordinates (t, s, w, b, c) of points, by batched Newton iteration on (t, w, b).

        ``hints`` holds a nearby (t, s, w) per point; s and c are read off directly.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        hints = np.broadcast_to(np.asarray(hints, dtype=float), pts.shape[:-1] + (3,))
        s, c = pts[:, Q], pts[:, P]
        t, w, b = hints[:, 0].copy(), hints[:, 2].copy(), np.zeros(len(pts))
        h = 1e-7
        for _ in range(iters):
            f = self.chart(t, s, w, b, c)[:, :3] - pts[:, :3]
            if np.max(np.abs(f)) < tol:
                break
            jac = np.stack([
                (self.chart(t + h, s, w, b, c) - self.chart(t - h, s, w, b, c))[:, :3] / (2 * h),
                (self.chart(t, s, w + h, b, c) - self.chart(t, s, w - h, b, c))[:, :3] / (2 * h),
                self.direction(t, s, w)[:, :3],
            ], axis=-1)
            delta = np.linalg.solve(jac, -f[..., None])[..., 0]
            t, w, b = t + delta[:, 0], w + delta[:, 1], b + delta[:, 2]
        return t, s, w, b, c

    def __call__(self, pts, hints) -> np.ndarray:
        t, s, w, b, _ = self.invert(pts, hints)
        return b * self.coefficient(t, s, w)

    def check_frame(self, t, s, w) -> np.ndarray:
        cond = np.atleast_1d(self.condition_number(t, s, w))
        if np.any(cond > self.cond_max):
            k = int(np.argmax(cond))
            loc = [float(np.ravel(a)[k]) for a in np.broadcast_arrays(t, s, w)]
            raise ValueError(f"offset frame degenerate at (t, s, w)={tuple(loc)}, cond {cond[k]:.3g}")
        return cond

    def directional(self, t, s, w, directions, h: float = 1e-4) -> np.ndarray:
        """Central differences of H at Gamma(t, s, w) along each direction (shape (..., k, 5))."""
        t, s, w = (np.ravel(a) for a in np.broadcast_arrays(t, s, w))
        self.check_frame(t, s, w)
        base = self.iso(t, s, w, self.tau)
        dirs = np.broadcast_to(directions, (len(t),) + np.shape(directions)[-2:])
        k = dirs.shape[1]
        hints = np.repeat(np.stack([t, s, w], -1), k, axis=0)
        plus = (base[:, None, :] + h * dirs).reshape(-1, 5)
        minus = (base[:, None, :] - h * dirs).reshape(-1, 5)
        return ((self(plus, hints) - self(minus, hints)) / (2 * h)).reshape(len(t), k)

    def gradient(self, t, s, w, h: float = 1e-4) -> np.ndarray:
        """Central-difference gradient of H at Gamma(t, s, w)."""
        return self.directional(t, s, w, np.eye(5), h)


def build_normal_coordinate_hamiltonian(iso: StretchIsotopy, tau: float) -> NormalHamiltonian:
    return NormalHamiltonian(iso, tau)


def verify_normal_hamiltonian(ham: NormalHamiltonian, counts=(7, 7, 4), h: float = 1e-4) -> dict:
    """Conditions along Gamma_tau, at grid points with w in (0, w0].

    (i) H vanishes on the image; (ii) dH(d/dy) = -dx(v); (iii) dH(d/dx + y d/dz) = dy(v);
    (iv) -y H_y = dz(v); (v) H_q = H_p = 0.  Derivatives are central differences
    with step h along the named directions.
    """
    iso, tau = ham.iso, ham.tau
    t, s, w = (a.ravel() for a in np.meshgrid(
        np.linspace(-0.95, 0.95, counts[0]), np.linspace(-0.95, 0.95, counts[1]),
        np.linspace(iso.w0 / counts[2], iso.w0, counts[2]), indexing="ij"))
    base = iso(t, s, w, tau)
    y = base[:, Y]
    v1 = np.zeros((len(t), 5))
    v1[:, X] = 1.0
    v1[:, Z] = y
    eye = np.broadcast_to(np.eye(5), (len(t), 5, 5))
    dirs = np.concatenate([v1[:, None, :], eye], axis=1)
    d = ham.directional(t, s, w, dirs, h)
    dv1, grad = d[:, 0], d[:, 1:]
    v = iso.velocity(t, s, w, tau)
    res = {
        "i": float(np.abs(ham(base, np.stack([t, s, w], -1))).max()),
        "ii": float(np.abs(grad[:, Y] + v[:, X]).max()),
        "iii": float(np.abs(dv1 - v[:, Y]).max()),
        "iii_as_displayed": float(np.abs(-dv1 - v[:, Y]).max()),
        "iv": float(np.abs(-y * grad[:, Y] - v[:, Z]).max()),
        "v": float(np.abs(grad[:, [Q, P]]).max()),
    }
    return {"tau": tau, "h": h, "points": len(t), "residuals": res,
            "max_condition": float(ham.condition_number(t, s, w).max()),
            "reference_frame_max_condition": float(ham.reference_frame_condition(t, s, w).max())}


# -- supports and sizes ---------------------------------------------------------


@dataclass
class IsotopySupportReport:
    """Per sub-interval: connected support components (by diameter) and the size."""

    subintervals: list[tuple[float, float]]
    diameters: list[list[float]] = field(default_factory=list)

    @property
    def sizes(self) -> list[float]:
        return [max(d, default=0.0) for d in self.diameters]

    @property
    def component_counts(self) -> list[int]:
        return [len(d) for d in self.diameters]

    def as_dict(self) -> dict:
        return {"subintervals": [list(iv) for iv in self.subintervals], "sizes": self.sizes,
                "component_counts": self.component_counts}


def point_set_diameter(pts: np.ndarray) -> float:
    """Euclidean diameter, via convex-hull vertices when the set is large."""
    pts = np.asarray(pts, dtype=float).reshape(-1, pts.shape[-1])
    if len(pts) < 2:
        return 0.0
    # drop constant coordinates so the hull is full-dimensional
    live = np.ptp(pts, axis=0) > 0
    sub = pts[:, live]
    if sub.shape[1] == 0:
        return 0.0
    cand = sub
    if len(sub) > 64 and sub.shape[1] >= 2:
        try:
            cand = sub[ConvexHull(sub).vertices]
        except QhullError:
            cand = sub[ConvexHull(sub, qhull_options="QJ").vertices]
    best = 0.0
    for i in range(0, len(cand), 512):
        diff = cand[i:i + 512, None, :] - cand[None, :, :]
        best = max(best, float(np.sqrt((diff ** 2).sum(-1)).max()))
    return best


def isotopy_support_size(iso: Callable, axes: Sequence[np.ndarray],
                         subintervals: Sequence[tuple[float, float]],
                         taus_per_interval: int = 5, threshold: float = 1e-10,
                         h: float = 1e-6) -> IsotopySupportReport:
    """Support components of an isotopy iso(*params, tau) on a parameter grid.

    A grid point is in the support of a sub-interval when its tau-velocity
    exceeds ``threshold`` at some sampled tau inside it.  Components are
    grid-connected sets (full neighbourhood); their image diameters are measured.
    """
    mesh = np.meshgrid(*axes, indexing="ij")
    report = IsotopySupportReport([tuple(map(float, iv)) for iv in subintervals])
    structure = np.ones((3,) * len(axes), dtype=bool)
    for lo, hi in subintervals:
        taus = lo + (np.arange(taus_per_interval) + 0.5) * (hi - lo) / taus_per_interval
        moving = np.zeros(mesh[0].shape, dtype=bool)
        images = []
        for tau in taus:
            vel = (iso(*mesh, tau + h) - iso(*mesh, tau - h)) / (2 * h)
            moving |= np.linalg.norm(vel, axis=-1) > threshold
            images.append(iso(*mesh, tau))
        labels, count = ndimage.label(moving, structure=structure)
        diams = []
        for k in range(1, count + 1):
            mask = labels == k
            pts = np.concatenate([img[mask] for img in images])
            diams.append(point_set_diameter(pts))
        report.diameters.append(sorted(diams, reverse=True))
    return report


def extension_c0_bound(report_or_sizes, eps: float) -> float:
    """size over [0, 1/2] + size over [1/2, 1] + eps."""
    sizes = report_or_sizes.sizes if isinstance(report_or_sizes, IsotopySupportReport) else report_or_sizes
    if len(sizes) != 2:
        raise ValueError("need the two half-interval sizes")
    return float(sizes[0] + sizes[1] + eps)
