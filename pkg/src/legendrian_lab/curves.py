"""Closed-form curve families, stretching surfaces and cusp analytics.

The Legendrian spirals ``gamma_m`` wind around the z-axis with radius
sqrt(2)/m and converge uniformly to the transverse line ``(0, 0, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .contact import GridSpec, ParamMap, alpha3, c0_distance

UNIT = (-1.0, 1.0)


def _phase(m, t):
    th = m * m * np.asarray(t, dtype=float)
    return np.sin(th), np.cos(th)


def gamma_m(m: int, t) -> np.ndarray:
    """The Legendrian spiral of frequency m evaluated at t."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    t = np.asarray(t, dtype=float)
    s, c = _phase(m, t)
    return np.stack(
        [(s - c) / m, (s + c) / m, t - np.cos(2 * m * m * t) / (2.0 * m * m)], axis=-1
    )


def gamma_m_velocity(m: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    s, c = _phase(m, t)
    return np.stack([m * (c + s), m * (c - s), 1.0 + np.sin(2 * m * m * t)], axis=-1)


def gamma_inf(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    zero = np.zeros_like(t)
    return np.stack([zero, zero, t], axis=-1)


def lambda_i(m: int, t, s) -> np.ndarray:
    """The product Legendrian (gamma_m(t), s, 0) in R^5."""
    t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
    return np.concatenate([gamma_m(m, t), s[..., None], np.zeros_like(s)[..., None]], axis=-1)


def lambda_inf(t, s) -> np.ndarray:
    t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
    zero = np.zeros_like(t)
    return np.stack([zero, zero, t, s, zero], axis=-1)


def sigma(m: int, t, w) -> np.ndarray:
    """Surface interpolating gamma_m (w=0) and the z-axis (w=1)."""
    t, w = np.broadcast_arrays(np.asarray(t, float), np.asarray(w, float))
    s, c = _phase(m, t)
    u = 1.0 - w
    return np.stack(
        [u * (s - c) / m, u * (s + c) / m, t - u * u * np.cos(2 * m * m * t) / (2.0 * m * m)],
        axis=-1,
    )


def sigma_dt(m: int, t, w) -> np.ndarray:
    t, w = np.broadcast_arrays(np.asarray(t, float), np.asarray(w, float))
    s, c = _phase(m, t)
    u = 1.0 - w
    return np.stack(
        [u * m * (c + s), u * m * (c - s), 1.0 + u * u * np.sin(2 * m * m * t)], axis=-1
    )


def sigma_dw(m: int, t, w) -> np.ndarray:
    t, w = np.broadcast_arrays(np.asarray(t, float), np.asarray(w, float))
    s, c = _phase(m, t)
    u = 1.0 - w
    return np.stack(
        [(c - s) / m, -(s + c) / m, u * np.cos(2 * m * m * t) / (m * m)], axis=-1
    )


def pi_embedding(m: int, t, s, w) -> np.ndarray:
    """(sigma(t, w), s, 0) in R^5."""
    t, s, w = np.broadcast_arrays(*(np.asarray(a, float) for a in (t, s, w)))
    return np.concatenate([sigma(m, t, w), s[..., None], np.zeros_like(s)[..., None]], axis=-1)


def _lift5(v3, s_component):
    zero = np.zeros(v3.shape[:-1])
    return np.concatenate([v3, (zero + s_component)[..., None], zero[..., None]], axis=-1)


def gamma_map(m: int) -> ParamMap:
    return ParamMap(lambda t: gamma_m(m, t), [UNIT], 3,
                    [lambda t: gamma_m_velocity(m, t)], name=f"gamma_{m}")


def gamma_inf_map() -> ParamMap:
    return ParamMap(gamma_inf, [UNIT], 3,
                    [lambda t: np.stack(np.broadcast_arrays(0.0, 0.0, np.ones_like(t)), -1)],
                    name="gamma_inf")


def lambda_map(m: int) -> ParamMap:
    return ParamMap(
        lambda t, s: lambda_i(m, t, s), [UNIT, UNIT], 5,
        [lambda t, s: _lift5(gamma_m_velocity(m, np.broadcast_arrays(t, s)[0]), 0.0),
         lambda t, s: _lift5(np.zeros(np.broadcast(t, s).shape + (3,)), 1.0)],
        name=f"Lambda_{m}",
    )


def lambda_inf_map() -> ParamMap:
    def dt(t, s):
        t, s = np.broadcast_arrays(t, s)
        return _lift5(np.stack([0 * t, 0 * t, 1 + 0 * t], -1), 0.0)

    def ds(t, s):
        return _lift5(np.zeros(np.broadcast(t, s).shape + (3,)), 1.0)

    return ParamMap(lambda_inf, [UNIT, UNIT], 5, [dt, ds], name="Lambda_inf")


def sigma_map(m: int) -> ParamMap:
    return ParamMap(lambda t, w: sigma(m, t, w), [UNIT, (0.0, 1.0)], 3,
                    [lambda t, w: sigma_dt(m, t, w), lambda t, w: sigma_dw(m, t, w)],
                    name=f"Sigma_{m}")


def pi_map(m: int) -> ParamMap:
    def dt(t, s, w):
        t, s, w = np.broadcast_arrays(t, s, w)
        return _lift5(sigma_dt(m, t, w), 0.0)

    def ds(t, s, w):
        return _lift5(np.zeros(np.broadcast(t, s, w).shape + (3,)), 1.0)

    def dw(t, s, w):
        t, s, w = np.broadcast_arrays(t, s, w)
        return _lift5(sigma_dw(m, t, w), 0.0)

    return ParamMap(lambda t, s, w: pi_embedding(m, t, s, w), [UNIT, UNIT, (0.0, 1.0)], 5,
                    [dt, ds, dw], name=f"Pi_{m}")


def sigma_contact_values(m: int, t, w) -> np.ndarray:
    """alpha(d sigma / dt); equals w(2 - w), zero only on the Legendrian edge w = 0."""
    return alpha3(sigma(m, t, w), sigma_dt(m, t, w))


def fiber_diameter(m: int, t, samples: int = 129) -> np.ndarray:
    """Diameter of the segment w -> Pi(t, s, w), w in [0, 1], by pairwise scan."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = np.linspace(0.0, 1.0, samples)
    pts = sigma(m, t[:, None], w[None, :])
    diff = pts[:, :, None, :] - pts[:, None, :, :]
    return np.sqrt((diff ** 2).sum(-1)).max(axis=(1, 2))


def c0_gamma_formula(m: int) -> float:
    """Exact sup distance between gamma_m and the z-axis."""
    return math.sqrt(2.0 / m**2 + 1.0 / (4.0 * m**4))


@dataclass(frozen=True)
class CuspRecord:
    t: float
    x: float
    z: float
    side: str


def cusp_set(m: int) -> list[CuspRecord]:
    """Cusps of the front of gamma_m, where m^2 t = i pi - pi/4."""
    scale = 4.0 * m * m / math.pi
    lo = math.floor((-scale + 1) / 4) - 1
    hi = math.ceil((scale + 1) / 4) + 1
    out = []
    for i in range(lo, hi + 1):
        t = (4 * i - 1) * math.pi / (4.0 * m * m)
        if -1.0 < t < 1.0:
            x = -math.sqrt(2.0) * math.cos(i * math.pi) / m
            out.append(CuspRecord(t, x, t, "right" if x > 0 else "left"))
    return out


def detect_cusps(m: int, samples: int | None = None) -> list[CuspRecord]:
    """Find cusps numerically: zeros of x'(t), classified by the sign change of x'."""
    samples = samples or max(20001, 60 * m * m)
    t = np.linspace(-1.0, 1.0, samples)
    xdot = lambda u: gamma_m_velocity(m, u)[..., 0]
    vals = xdot(t)
    out = []
    positive = vals >= 0
    for k in np.nonzero(positive[:-1] != positive[1:])[0]:
        root = brentq(xdot, t[k], t[k + 1], xtol=1e-15)
        x, _, z = gamma_m(m, root)
        side = "right" if positive[k] else "left"
        out.append(CuspRecord(float(root), float(x), float(z), side))
    return out


def cusp_counts(m: int) -> tuple[int, int]:
    """Closed-form (right, left) cusp counts."""
    r = m * m / (2 * math.pi)
    right = 1 + math.floor(r - 3 / 8) + math.floor(r + 3 / 8)
    left = 1 + math.floor(r - 1 / 8) + math.floor(r + 1 / 8)
    return right, left


def tally(records) -> tuple[int, int]:
    right = sum(1 for c in records if c.side == "right")
    return right, len(records) - right


def equidistribution_fraction(m: int) -> float:
    return math.fmod(m * m / (2 * math.pi), 1.0)


def equidistribution_filter(ms) -> list[int]:
    """The m whose m^2/(2 pi) mod 1 lies in (0, 1/8)."""
    return [m for m in ms if 0.0 < equidistribution_fraction(m) < 0.125]


def _arith_set(offset: int, step: int, m: int) -> list[float]:
    # values (step*k + offset) * pi / (4 m^2) inside (-1, 1)
    unit = math.pi / (4.0 * m * m)
    kmax = int(1.0 / (unit * step)) + 2
    vals = [(step * k + offset) * unit for k in range(-kmax, kmax + 1)]
    return sorted(v for v in vals if -1.0 < v < 1.0)


def z_axis_crossings(m: int) -> list[float]:
    """Parameters where the front of gamma_m meets the z-axis."""
    return _arith_set(1, 4, m)


def t_set(M: int) -> list[float]:
    """Every other z-axis crossing of gamma_M; consecutive points bracket one zig-zag."""
    return _arith_set(1, 8, M)


@dataclass
class SequencePlan:
    ms: tuple[int, ...]
    distances: tuple[float, ...] = field(default=())
    measured: tuple[float, ...] = field(default=())

    @property
    def partial_sums(self) -> list[float]:
        return list(np.cumsum(self.distances))

    def tail_bound(self) -> float:
        """Bound on the sum of distances past the plan: sum over i > N of 2/2^i."""
        return 2.0 / 2 ** len(self.ms)

    def growth_ok(self) -> bool:
        ms = self.ms
        return all(ms[i] > max(2 ** (i + 1), ms[i - 1] if i else 0) for i in range(len(ms)))


def build_sequence_plan(N: int, grid: GridSpec | None = None) -> SequencePlan:
    """Greedy least admissible m_1 < m_2 < ... with m_i > max(2^i, m_{i-1})."""
    if N < 1:
        raise ValueError("N must be at least 1")
    ms = []
    prev = 0
    for i in range(1, N + 1):
        m = max(2**i, prev) + 1
        while not equidistribution_filter([m]):
            m += 1
        ms.append(m)
        prev = m
    dists = tuple(c0_gamma_formula(m) for m in ms)
    measured = ()
    if grid is not None:
        measured = tuple(c0_distance(gamma_map(m), gamma_inf_map(), grid) for m in ms)
    return SequencePlan(tuple(ms), dists, measured)


# -- JSON exchange -------------------------------------------------------------


def curve_to_json(curve: ParamMap, n: int = 1001, kind: str | None = None,
                  params: dict | None = None) -> dict:
    """Sample a curve into {"kind", "params", "samples": [[t, x, y, z], ...]}."""
    if curve.arity != 1 or curve.dim != 3:
        raise ValueError("only curves in R^3 are exported")
    t = np.linspace(*curve.bounds[0], n)
    pts = curve(t)
    return {"kind": kind or curve.name or "curve", "params": dict(params or {}),
            "samples": [[float(a), *map(float, p)] for a, p in zip(t, pts)]}


def curve_from_json(doc: dict) -> ParamMap:
    """Piecewise-linear curve through the samples of a curve document."""
    data = np.asarray(doc["samples"], dtype=float)
    if data.ndim != 2 or data.shape[1] != 4 or len(data) < 2:
        raise ValueError("samples must be rows [t, x, y, z], at least two")
    if np.any(np.diff(data[:, 0]) <= 0):
        raise ValueError("sample parameters must increase")
    t = data[:, 0]

    def point(u):
        u = np.asarray(u, dtype=float)
        return np.stack([np.interp(u, t, data[:, k]) for k in (1, 2, 3)], axis=-1)

    return ParamMap(point, [(t[0], t[-1])], 3, name=str(doc.get("kind", "curve")))
