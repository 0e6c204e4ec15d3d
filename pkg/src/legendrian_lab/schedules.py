"""Support-splitting schedules: interval families, the lambda field and region families.

The scalar field ``lambda(t, s, tau)`` moves from 0 to 1 in four quarters.
During each quarter it only changes on a union of small squares, so an
isotopy driven by it has small support pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

UNIT = (-1.0, 1.0)


def smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _smoothstep_du(u):
    inside = (u > 0.0) & (u < 1.0)
    u = np.clip(u, 0.0, 1.0)
    return np.where(inside, 6.0 * u * (1.0 - u), 0.0)


def ramp(u):
    """Twice-composed smoothstep: 0 below 0, 1 above 1, C^2 at both ends."""
    return smoothstep(smoothstep(u))


def ramp_du(u):
    return _smoothstep_du(smoothstep(u)) * _smoothstep_du(u)


@dataclass(frozen=True)
class IntervalFamily:
    """Finite union of disjoint open intervals in [-1, 1], sorted."""

    intervals: tuple[tuple[float, float], ...]
    domain: tuple[float, float] = UNIT

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        for (a, b), (c, _) in zip(ivs, ivs[1:]):
            if b > c:
                raise ValueError(f"intervals ({a}, {b}) and ({c}, ...) overlap")
        if any(b <= a for a, b in ivs):
            raise ValueError("every interval needs positive length")
        object.__setattr__(self, "intervals", ivs)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def contains(self, x, relative: bool = False) -> np.ndarray:
        """Membership; with ``relative`` the intervals count as open in the domain,
        so an endpoint sitting on the domain boundary is included."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            left = (x >= a) if relative and a == lo else (x > a)
            right = (x <= b) if relative and b == hi else (x < b)
            out |= left & right
        return out

    def lengths(self) -> list[float]:
        return [b - a for a, b in self.intervals]

    @property
    def max_length(self) -> float:
        return max(self.lengths(), default=0.0)

    @property
    def measure(self) -> float:
        return float(sum(self.lengths()))

    def complement(self) -> "IntervalFamily":
        """Components of the domain minus this family (closed gaps stored as open intervals)."""
        lo, hi = self.domain
        cuts = [lo] + [v for iv in self.intervals for v in iv] + [hi]
        gaps = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if b > a]
        return IntervalFamily(tuple(gaps), self.domain)

    def union(self, other: "IntervalFamily") -> "IntervalFamily":
        return IntervalFamily(self.intervals + other.intervals, self.domain)

    def scaled(self, factor: float) -> "IntervalFamily":
        return IntervalFamily(tuple((a * factor, b * factor) for a, b in self.intervals),
                              (self.domain[0] * factor, self.domain[1] * factor))

    def as_list(self) -> list[list[float]]:
        return [[a, b] for a, b in self.intervals]


def make_split_family(eps: float) -> tuple[IntervalFamily, IntervalFamily]:
    """Disjoint A, B whose pieces and complements' pieces are all shorter than eps/sqrt(2).

    [-1, 1] is cut into periods of four equal pieces: A-block, gap, B-block, gap.
    The complement of A is then made of gap+B+gap runs of three pieces, so the
    piece width w must satisfy 3w < eps/sqrt(2).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    k = 1
    while 3.0 * (2.0 / (4 * k)) >= eps / math.sqrt(2.0):
        k += 1
    w = 2.0 / (4 * k)
    starts = [-1.0 + 4 * j * w for j in range(k)]
    a = IntervalFamily(tuple((s, s + w) for s in starts))
    b = IntervalFamily(tuple((s + 2 * w, s + 3 * w) for s in starts))
    return a, b


def split_profile(a: IntervalFamily, b: IntervalFamily, x) -> np.ndarray:
    """Smooth function equal to 0 on closure(A), 1 on closure(B), monotone across gaps.

    A and B must alternate, as produced by make_split_family.
    """
    x = np.asarray(x, dtype=float)
    blocks = sorted([(lo, hi, 0.0) for lo, hi in a] + [(lo, hi, 1.0) for lo, hi in b])
    out = np.full(x.shape, blocks[0][2])
    for (lo0, hi0, v0), (lo1, hi1, v1) in zip(blocks, blocks[1:]):
        if v0 == v1:
            raise ValueError("A and B blocks must alternate")
        out = np.where(x >= hi0, v0 + (v1 - v0) * ramp((x - hi0) / (lo1 - hi0)), out)
    last = blocks[-1]
    tail = last[1]
    if tail < a.domain[1]:
        # after the final block the profile returns to the value of the first block
        first_val = blocks[0][2]
        out = np.where(x >= tail, last[2] + (first_val - last[2]) * ramp((x - tail) / (a.domain[1] - tail)), out)
    return out


def _profile_derivative(a, b, x, h=1e-7):
    return (split_profile(a, b, x + h) - split_profile(a, b, x - h)) / (2 * h)


@dataclass
class LambdaSchedule:
    """lambda(t, s, tau) in [0, 1], rising through four quarters of [0, 1].

    With g = split_profile (0 on A, 1 on B) and phi_i = ramp(4 tau - i):
      quarter 0: phi_0 g(t) g(s)
      quarter 1: g(t) (1 - (1 - phi_1)(1 - g(s)))
      quarter 2: 1 - (1 - g(t))(1 - phi_2 g(s))
      quarter 3: 1 - (1 - phi_3)(1 - g(t))(1 - g(s))
    so lambda_{1/2} = g(t) and d lambda / d tau >= 0.
    """

    eps: float
    a: IntervalFamily
    b: IntervalFamily

    def profile(self, x):
        return split_profile(self.a, self.b, x)

    def __call__(self, t, s, tau, profiles=None):
        gt, gs = profiles if profiles is not None else (self.profile(t), self.profile(s))
        tau = np.asarray(tau, dtype=float)
        q = np.clip(np.floor(4 * tau), 0, 3)
        p0, p1, p2, p3 = (ramp(4 * tau - i) for i in range(4))
        vals = [
            p0 * gt * gs,
            gt * (1 - (1 - p1) * (1 - gs)),
            1 - (1 - gt) * (1 - p2 * gs),
            1 - (1 - p3) * (1 - gt) * (1 - gs),
        ]
        return _select(q, vals, np.broadcast(gt, gs, tau).shape)

    def dtau(self, t, s, tau, profiles=None):
        gt, gs = profiles if profiles is not None else (self.profile(t), self.profile(s))
        tau = np.asarray(tau, dtype=float)
        d = [4.0 * ramp_du(4 * tau - i) for i in range(4)]
        return d[0] * gt * gs + d[1] * gt * (1 - gs) + d[2] * (1 - gt) * gs + d[3] * (1 - gt) * (1 - gs)

    def quarter_boxes(self) -> list[list[tuple[tuple[float, float], tuple[float, float]]]]:
        """Per quarter, the product boxes that contain the support of d lambda / d tau."""
        pos = _level_components(self.a, self.b, positive=True)
        below = _level_components(self.a, self.b, positive=False)
        factors = [(pos, pos), (pos, below), (below, pos), (below, below)]
        return [[(bt, bs) for bt in ft for bs in fs] for ft, fs in factors]

    def quarter_diameters(self) -> list[float]:
        return [max(math.hypot(bt[1] - bt[0], bs[1] - bs[0]) for bt, bs in boxes)
                for boxes in self.quarter_boxes()]

    def as_dict(self) -> dict:
        return {
            "epsilon": self.eps,
            "quarters": [
                {"components": [[list(bt), list(bs)] for bt, bs in boxes]}
                for boxes in self.quarter_boxes()
            ],
        }


def _select(q, vals, shape):
    q = np.broadcast_to(q, shape)
    out = np.empty(shape)
    for i, v in enumerate(vals):
        mask = q == i
        out[mask] = np.broadcast_to(v, shape)[mask]
    return out if shape else float(out)


def _level_components(a, b, positive):
    """Components of {g > 0} (positive) or {g < 1}: runs between consecutive A (resp. B) blocks."""
    return list((a if positive else b).complement().intervals)


def build_lambda_schedule(eps: float) -> LambdaSchedule:
    a, b = make_split_family(eps)
    return LambdaSchedule(eps, a, b)


def check_schedule(sched: LambdaSchedule, n_ts: int = 200, n_tau: int = 100) -> dict:
    """Grid scan of the five schedule invariants."""
    t = np.linspace(-1, 1, n_ts)
    T, S = np.meshgrid(t, t, indexing="ij")
    taus = np.linspace(0, 1, n_tau + 1)
    prof = (sched.profile(T), sched.profile(S))
    lam = np.stack([sched(T, S, tau, prof) for tau in taus])
    boxes = sched.quarter_boxes()
    worst_outside = 0.0
    for tau in taus[:-1] + 0.5 / n_tau:
        q = min(int(4 * tau), 3)
        inside = np.zeros(T.shape, dtype=bool)
        for bt, bs in boxes[q]:
            inside |= (IntervalFamily((bt,)).contains(T, relative=True)
                       & IntervalFamily((bs,)).contains(S, relative=True))
        rate = np.abs(sched.dtau(T, S, tau, prof))
        worst_outside = max(worst_outside, float(rate[~inside].max(initial=0.0)))
    return {
        "start_max": float(np.abs(lam[0]).max()),
        "end_max": float(np.abs(lam[-1] - 1).max()),
        "range": [float(lam.min()), float(lam.max())],
        "min_increment": float(np.diff(lam, axis=0).min()),
        "rate_outside_quarter_boxes": worst_outside,
        "quarter_diameters": sched.quarter_diameters(),
        "half_on_b": float(np.abs(sched(sched.b.intervals[0][0] + 0 * S[0], S[0], 0.5) - 1).max()),
    }


# -- step-one sets and regions ------------------------------------------------


def step_one_sets(m: int, gap_factor: float = 4.1) -> tuple[IntervalFamily, IntervalFamily]:
    """Alternating S0/S1 blocks separated by gaps of width gap_factor/m.

    Requirements: components of [-1,1] minus (S0 u S1) longer than 4/m, and
    components of the complement of each S_j shorter than 10/m.
    """
    gap = gap_factor / m
    n_gaps = math.ceil(2.0 / gap) - 1
    if n_gaps < 1:
        raise ValueError(f"m={m} too small: no room for a gap of width {gap:.3g}")
    block = (2.0 - n_gaps * gap) / (n_gaps + 1)
    s0, s1 = [], []
    x = -1.0
    for j in range(n_gaps + 1):
        end = 1.0 if j == n_gaps else x + block
        (s0 if j % 2 == 0 else s1).append((x, end))
        x += block + gap
    fam0, fam1 = IntervalFamily(tuple(s0)), IntervalFamily(tuple(s1))
    validate_step_one_sets(m, fam0, fam1)
    return fam0, fam1


def validate_step_one_sets(m: int, s0: IntervalFamily, s1: IntervalFamily) -> None:
    for name, fam in (("S0", s0), ("S1", s1)):
        longest = fam.complement().max_length
        if longest >= 10.0 / m:
            raise ValueError(f"complement of {name} has a component of length {longest:.4g} >= 10/m")
    gaps = s0.union(s1).complement()
    shortest = min(gaps.lengths(), default=math.inf)
    if shortest <= 4.0 / m:
        raise ValueError(f"a gap between S0 and S1 has length {shortest:.4g} <= 4/m")


@dataclass
class RegionFamily5:
    """Product regions U x ([-1,1] minus S) x (-eps, eps) in R^5."""

    u_boxes: list[tuple[tuple[float, float], ...]]
    s0: IntervalFamily
    s1: IntervalFamily
    eps: float
    components_a: list = field(default_factory=list)
    components_b: list = field(default_factory=list)

    def __post_init__(self):
        self.components_a = [tuple(box) + (q, (-self.eps, self.eps))
                             for box in self.u_boxes for q in self.s0.complement()]
        self.components_b = [tuple(box) + (q, (-self.eps, self.eps))
                             for box in self.u_boxes for q in self.s1.complement()]

    @staticmethod
    def box_diameter(box) -> float:
        return math.sqrt(sum((hi - lo) ** 2 for lo, hi in box))

    def diameters(self, which: str = "A") -> list[float]:
        comps = self.components_a if which == "A" else self.components_b
        return [self.box_diameter(c) for c in comps]

    def contains(self, pts, which: str = "A") -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        comps = self.components_a if which == "A" else self.components_b
        inside = np.zeros(pts.shape[:-1], dtype=bool)
        for box in comps:
            here = np.ones(pts.shape[:-1], dtype=bool)
            for k, (lo, hi) in enumerate(box):
                here &= (pts[..., k] > lo) & (pts[..., k] < hi)
            inside |= here
        return inside


def region_family(m: int, s0: IntervalFamily, s1: IntervalFamily, eps: float,
                  u_boxes: Sequence[Sequence[tuple[float, float]]]) -> RegionFamily5:
    validate_step_one_sets(m, s0, s1)
    return RegionFamily5([tuple(tuple(map(float, side)) for side in box) for box in u_boxes],
                         s0, s1, float(eps))


# -- step-one lambda ---------------------------------------------------------


@dataclass
class StepOneLambda:
    """lambda(s, tau) in [-1, 1]: S1 moves during [0, 1/2], S0 during [1/2, 1].

    lambda = -1 + 2 [g(s) ramp(2 tau) + (1 - g(s)) ramp(2 tau - 1)], with g = 1
    on S1 and 0 on S0.  The zero level tau = zeta(s) sits at 1/4 over S1 and
    3/4 over S0.
    """

    s0: IntervalFamily
    s1: IntervalFamily

    def profile(self, s):
        return split_profile(self.s0, self.s1, s)

    def __call__(self, s, tau):
        g = self.profile(s)
        tau = np.asarray(tau, dtype=float)
        return -1.0 + 2.0 * (g * ramp(2 * tau) + (1 - g) * ramp(2 * tau - 1))

    def dtau(self, s, tau):
        g = self.profile(s)
        tau = np.asarray(tau, dtype=float)
        return 4.0 * (g * ramp_du(2 * tau) + (1 - g) * ramp_du(2 * tau - 1))

    def zeta(self, s):
        g = self.profile(s)
        return np.where(g >= 1.0, 0.25, np.where(g <= 0.0, 0.75, np.nan))


# -- isotopy by parts ---------------------------------------------------------


HALVES = ((0.0, 0.5), (0.5, 1.0))


@dataclass
class IbpCertificate:
    """Half-interval support diameters against the threshold (C/2) d_C0(start, end)."""

    diameters: list[list[float]]
    c0_distance: float
    C: float

    @property
    def threshold(self) -> float:
        return 0.5 * self.C * self.c0_distance

    @property
    def max_diameter(self) -> float:
        return max((max(d, default=0.0) for d in self.diameters), default=0.0)

    @property
    def passed(self) -> bool:
        return all(x < self.threshold for d in self.diameters for x in d)

    @property
    def smallest_passing_C(self) -> float:
        """Infimum of the constants that pass (pass requires C strictly above it)."""
        if self.c0_distance == 0.0:
            return 0.0 if self.max_diameter == 0.0 else math.inf
        return 2.0 * self.max_diameter / self.c0_distance

    def as_dict(self) -> dict:
        return {"C": self.C, "c0_distance": self.c0_distance, "threshold": self.threshold,
                "component_counts": [len(d) for d in self.diameters],
                "max_diameter": self.max_diameter, "smallest_passing_C": self.smallest_passing_C,
                "pass": self.passed}


def ibp_check(iso, axes: Sequence[np.ndarray], C: float, taus_per_interval: int = 5,
              support=None) -> IbpCertificate:
    """Isotopy-by-parts test for iso(*params, tau) sampled on the grid ``axes``.

    Pass a precomputed ``support`` report to re-test other constants cheaply.
    """
    from .flow import isotopy_support_size

    if support is None:
        support = isotopy_support_size(iso, axes, HALVES, taus_per_interval=taus_per_interval)
    mesh = np.meshgrid(*axes, indexing="ij")
    dist = float(np.linalg.norm(iso(*mesh, 0.0) - iso(*mesh, 1.0), axis=-1).max())
    return IbpCertificate([list(d) for d in support.diameters], dist, float(C))


def birth_isotopy(m: int, delta: float = 1.0, scale: float | None = None):
    """The step-one model isotopy (front birth in t, product in s) driven by StepOneLambda.

    ``scale`` shrinks the t-range so the model sits in a box of size ~ 1/m.
    """
    from .singularities import zigzag_birth_model

    s0, s1 = step_one_sets(m)
    lam = StepOneLambda(s0, s1)
    scale = 1.0 / m if scale is None else scale

    def iso(t, s, tau):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        curve = zigzag_birth_model(t, delta * lam(s, tau)) * scale
        zero = np.zeros(t.shape + (1,))
        return np.concatenate([curve, s[..., None], zero], axis=-1)

    return iso


def translation_isotopy(m: int, distance: float = 1.0):
    """Lambda_m pushed bodily along e_z; a single large support component."""
    from .curves import lambda_i

    def iso(t, s, tau):
        pts = lambda_i(m, t, s)
        return pts + np.array([0.0, 0.0, distance, 0.0, 0.0]) * np.asarray(tau, float)[..., None]

    return iso
