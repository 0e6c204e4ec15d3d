"""Contact forms on R^3 and R^5, Legendrian defects and sup-norm distances.

Points are numpy arrays whose last axis holds the coordinates, ``(x, y, z)``
on R^3 and ``(x, y, z, q, p)`` on R^5.  Everything is vectorised over the
leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

FD_RELATIVE_STEP = 1e-6


class NonFiniteError(ValueError):
    """A map produced NaN or inf at some parameter value."""

    def __init__(self, params):
        self.params = tuple(float(p) for p in params)
        super().__init__(f"non-finite evaluation at parameters {self.params}")


def alpha3(pt, v):
    """Evaluate dz - y dx at ``pt`` on the tangent ``v``."""
    pt = np.asarray(pt, dtype=float)
    v = np.asarray(v, dtype=float)
    return v[..., 2] - pt[..., 1] * v[..., 0]


def beta5(pt, v):
    """Evaluate dz - y dx - p dq at ``pt`` on the tangent ``v``."""
    pt = np.asarray(pt, dtype=float)
    v = np.asarray(v, dtype=float)
    return v[..., 2] - pt[..., 1] * v[..., 0] - pt[..., 4] * v[..., 3]


def contact_form(pt, v):
    """Dispatch to alpha3 or beta5 by the size of the last axis."""
    dim = np.shape(pt)[-1]
    if dim == 3:
        return alpha3(pt, v)
    if dim == 5:
        return beta5(pt, v)
    raise ValueError(f"no contact form on R^{dim}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform sample counts per parameter axis."""

    counts: tuple[int, ...]
    inclusive: bool = True

    def __post_init__(self):
        counts = tuple(int(n) for n in np.atleast_1d(self.counts))
        if any(n < 2 for n in counts):
            raise ValueError(f"grid needs at least 2 samples per axis, got {counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def uniform(cls, n: int, arity: int = 1, inclusive: bool = True) -> "GridSpec":
        return cls((n,) * arity, inclusive)

    def axes(self, bounds) -> list[np.ndarray]:
        if len(bounds) != len(self.counts):
            raise ValueError(f"grid has {len(self.counts)} axes, domain has {len(bounds)}")
        out = []
        for (lo, hi), n in zip(bounds, self.counts):
            if self.inclusive:
                out.append(np.linspace(lo, hi, n))
            else:
                out.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
        return out

    def mesh(self, bounds) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(bounds), indexing="ij")

    def as_dict(self) -> dict:
        return {"counts": list(self.counts), "inclusive": self.inclusive}


class ParamMap:
    """A map from a parameter box into R^3 or R^5.

    ``func(*params)`` takes broadcastable arrays and returns an array whose
    last axis has length ``dim``.  ``partials`` optionally lists one
    closed-form derivative per parameter, with the same signature.  Without
    them derivatives fall back to central differences with step
    ``1e-6 * (domain length)``.
    """

    def __init__(
        self,
        func: Callable[..., np.ndarray],
        bounds: Sequence[tuple[float, float]],
        dim: int,
        partials: Sequence[Callable[..., np.ndarray]] | None = None,
        name: str = "",
    ):
        self.func = func
        self.bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        self.dim = int(dim)
        if partials is not None and len(partials) != len(self.bounds):
            raise ValueError("need one partial derivative per parameter")
        self.partials = tuple(partials) if partials is not None else None
        self.name = name

    @property
    def arity(self) -> int:
        return len(self.bounds)

    @property
    def derivative_mode(self) -> str:
        return "closed-form" if self.partials is not None else "central-difference"

    def __call__(self, *params) -> np.ndarray:
        if len(params) != self.arity:
            raise TypeError(f"{self.name or 'map'} takes {self.arity} parameters")
        arrays = [np.asarray(p, dtype=float) for p in params]
        return np.asarray(self.func(*arrays), dtype=float)

    def fd_step(self, axis: int) -> float:
        lo, hi = self.bounds[axis]
        return FD_RELATIVE_STEP * (hi - lo)

    def fd_derivative(self, params, axis: int, h: float | None = None) -> np.ndarray:
        h = self.fd_step(axis) if h is None else h
        plus = [np.asarray(p, dtype=float) for p in params]
        minus = list(plus)
        plus[axis] = plus[axis] + h
        minus[axis] = minus[axis] - h
        return (self(*plus) - self(*minus)) / (2.0 * h)

    def derivative(self, params, axis: int) -> np.ndarray:
        if self.partials is None:
            return self.fd_derivative(params, axis)
        arrays = [np.asarray(p, dtype=float) for p in params]
        return np.asarray(self.partials[axis](*arrays), dtype=float)

    def restrict(self, axis: int, value: float) -> "ParamMap":
        """Freeze one parameter, giving a map of one lower arity."""
        keep = [i for i in range(self.arity) if i != axis]

        def insert(params):
            full = list(params)
            shape = np.broadcast(*params).shape if params else ()
            full.insert(axis, np.full(shape, float(value)))
            return full

        func = lambda *p: self.func(*insert(p))
        partials = None
        if self.partials is not None:
            partials = [
                (lambda i: (lambda *p: self.partials[i](*insert(p))))(i) for i in keep
            ]
        return ParamMap(func, [self.bounds[i] for i in keep], self.dim, partials,
                        name=f"{self.name}|p{axis}={value:g}")

    def sample(self, grid: GridSpec):
        """Return the parameter mesh and the evaluated points."""
        mesh = grid.mesh(self.bounds)
        return mesh, self(*mesh)


def _check_finite(values, mesh):
    bad = ~np.isfinite(values)
    if bad.ndim > len(mesh):
        bad = bad.any(axis=tuple(range(len(mesh), bad.ndim)))
    if bad.any():
        idx = tuple(np.argwhere(bad)[0])
        raise NonFiniteError([m[idx] for m in mesh])


def form_values(curve: ParamMap, grid: GridSpec, axis: int = 0) -> np.ndarray:
    """Contact form evaluated on the tangent along ``axis`` at every grid point."""
    mesh, pts = curve.sample(grid)
    _check_finite(pts, mesh)
    tangent = curve.derivative(mesh, axis)
    _check_finite(tangent, mesh)
    return contact_form(pts, tangent)


def legendrian_defect(curve: ParamMap, grid: GridSpec, axes: Sequence[int] | None = None) -> float:
    """Grid maximum of |contact form(tangent)| over the requested parameter axes."""
    axes = range(curve.arity) if axes is None else axes
    return max(float(np.max(np.abs(form_values(curve, grid, a)))) for a in axes)


def transverse_check(curve: ParamMap, grid: GridSpec) -> bool:
    """True iff the contact form is strictly positive on the tangent at every grid point."""
    return bool(np.all(form_values(curve, grid, 0) > 0.0))


def c0_distance(f: ParamMap, g: ParamMap, grid: GridSpec) -> float:
    """Grid maximum of the Euclidean distance |f(u) - g(u)|."""
    if f.bounds != g.bounds:
        raise ValueError(f"domain mismatch: {f.bounds} vs {g.bounds}")
    if f.dim != g.dim:
        raise ValueError(f"codomain mismatch: R^{f.dim} vs R^{g.dim}")
    mesh = grid.mesh(f.bounds)
    diff = f(*mesh) - g(*mesh)
    _check_finite(diff, mesh)
    return float(np.max(np.sqrt(np.sum(diff * diff, axis=-1))))
