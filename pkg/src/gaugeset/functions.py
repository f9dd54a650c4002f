"""Vector-valued integrands on [0, 1], scalar weights and determined multifunctions.

Every integrand exposes ``dim`` and ``eval_many(ts) -> (len(ts), dim)`` so
Riemann sums can be evaluated column-wise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .convex_geometry import Segment, hausdorff_segments, positive_part
from .partitions import MeasurableSet, _check_breakpoints, piece_index


def _check_t(ts):
    ts = np.asarray(ts, dtype=float)
    if np.any(ts < 0.0) or np.any(ts > 1.0) or np.any(np.isnan(ts)):
        raise ValueError("evaluation points must lie in [0, 1]")
    return ts


@dataclass(frozen=True, eq=False)
class StepVectorFunction:
    """Piecewise constant g with pieces [0, b_0], (b_0, b_1], ..., (b_{m-1}, 1]."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = _check_breakpoints(self.breakpoints)
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        if vals.shape[0] != bp.size + 1:
            raise ValueError("a step function needs one value per piece")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, x) -> "StepVectorFunction":
        return cls([], [np.asarray(x, dtype=float).reshape(-1)])

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([[0.0], self.breakpoints, [1.0]])

    @property
    def piece_lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    def eval_many(self, ts) -> np.ndarray:
        ts = _check_t(ts)
        return self.values[piece_index(self.breakpoints, ts)]

    def __call__(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    def describe(self) -> str:
        return f"Step(pieces={self.values.shape[0]},dim={self.dim})"


@dataclass(frozen=True)
class DerivativePathological:
    """g = F' for F(t) = t^2 sin(1/t^2), F(0) = 0.

    g(t) = 2t sin(1/t^2) - (2/t) cos(1/t^2) for t > 0 and g(0) = 0.  It is
    Henstock integrable with integral sin(1) but |g| is not Lebesgue
    integrable, so g is not McShane integrable.
    """

    dim: int = 1

    def eval_many(self, ts) -> np.ndarray:
        ts = _check_t(ts)
        out = np.zeros(ts.shape)
        pos = ts > 0
        t = ts[pos]
        inv2 = 1.0 / (t * t)
        out[pos] = 2.0 * t * np.sin(inv2) - (2.0 / t) * np.cos(inv2)
        return out.reshape(-1, 1)

    def __call__(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    @staticmethod
    def primitive(t: float) -> float:
        return 0.0 if t == 0 else t * t * math.sin(1.0 / (t * t))

    def describe(self) -> str:
        return "DerivativePathological"


@dataclass(frozen=True, eq=False)
class ScalarWeight:
    """Step function [0, 1] -> [lo, hi], by default [0, 1]-valued."""

    breakpoints: np.ndarray
    values: np.ndarray
    bound: float = 1.0
    unit: bool = True

    def __post_init__(self):
        bp = _check_breakpoints(self.breakpoints)
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != bp.size + 1:
            raise ValueError("a weight needs one value per piece")
        if self.unit and (np.any(vals < 0.0) or np.any(vals > 1.0)):
            raise ValueError("selection weights take values in [0, 1]")
        if np.any(np.abs(vals) > self.bound):
            raise ValueError(f"weight exceeds its declared bound {self.bound}")
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, c: float) -> "ScalarWeight":
        return cls([], [c], bound=max(1.0, abs(c)), unit=0.0 <= c <= 1.0)

    @classmethod
    def bounded(cls, breakpoints, values, bound: float) -> "ScalarWeight":
        """A bounded real-valued step function (values in [-bound, bound])."""
        return cls(breakpoints, values, bound=bound, unit=False)

    def eval_many(self, ts) -> np.ndarray:
        ts = _check_t(ts)
        return self.values[piece_index(self.breakpoints, ts)]

    def __call__(self, t: float) -> float:
        return float(self.eval_many(np.array([t]))[0])


@dataclass(frozen=True, eq=False)
class ScaledFunction:
    """Pointwise product alpha(t) * g(t) for a step weight alpha."""

    alpha: ScalarWeight
    g: "Integrand"

    @property
    def dim(self) -> int:
        return self.g.dim

    def eval_many(self, ts) -> np.ndarray:
        return self.alpha.eval_many(ts)[:, None] * self.g.eval_many(ts)

    def __call__(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    def describe(self) -> str:
        return f"Scaled({self.g.describe()})"


@dataclass(frozen=True, eq=False)
class SumFunction:
    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a sum needs at least one term")
        dims = {t.dim for t in self.terms}
        if len(dims) != 1:
            raise ValueError("summands must share one dimension")

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def eval_many(self, ts) -> np.ndarray:
        out = self.terms[0].eval_many(ts).copy()
        for term in self.terms[1:]:
            out += term.eval_many(ts)
        return out

    def __call__(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    def describe(self) -> str:
        return "Sum(" + ",".join(t.describe() for t in self.terms) + ")"


Integrand = Union[StepVectorFunction, DerivativePathological, ScaledFunction, SumFunction]


def eval_g(f, t: float) -> np.ndarray:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t} lies outside [0, 1]")
    return f.eval_many(np.array([float(t)]))[0]


@dataclass(frozen=True, eq=False)
class DeterminedMF:
    """The multifunction G(t) = conv{0, g(t)}."""

    g: Integrand

    @property
    def dim(self) -> int:
        return self.g.dim

    def __call__(self, t: float) -> Segment:
        return Segment(eval_g(self.g, t))

    def support_many(self, u, ts) -> np.ndarray:
        """s(u, G(t)) = <u, g(t)>^+ for each t."""
        return positive_part(self.g.eval_many(ts) @ np.asarray(u, dtype=float))

    def describe(self) -> str:
        return f"conv{{0,{self.g.describe()}}}"


def determined(g: Integrand) -> DeterminedMF:
    return DeterminedMF(g)


def selection(w: ScalarWeight, g: Integrand):
    """The selection t -> w(t) g(t) of determined(g); exact for step g."""
    if not w.unit:
        raise ValueError("selections need [0, 1]-valued weights")
    return scale_by_bounded(w, g)


def scale_by_bounded(alpha: ScalarWeight, g: Integrand):
    """alpha * g.  For step g the product is again a step function."""
    if isinstance(g, StepVectorFunction):
        bp = np.union1d(alpha.breakpoints, g.breakpoints)
        edges = np.concatenate([[0.0], bp, [1.0]])
        # every refined piece lies inside one piece of each factor; evaluate at its right end
        right = edges[1:]
        vals = alpha.eval_many(right)[:, None] * g.eval_many(right)
        return StepVectorFunction(bp, vals)
    return ScaledFunction(alpha, g)


def step_integral(g: StepVectorFunction, E: MeasurableSet | None = None) -> np.ndarray:
    """Exact integral of a step function over E (default [0, 1])."""
    edges = g.edges
    if E is None:
        weights = np.diff(edges)
    else:
        weights = np.array([E.overlap(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])
    out = np.zeros(g.dim)
    for w, x in zip(weights, g.values):
        out = out + w * x
    return out


def segment_gap(g: Integrand, t: float, t2: float) -> tuple[float, float]:
    """(d_H(G(t), G(t2)), ||g(t) - g(t2)||); the first never exceeds the second."""
    x, y = eval_g(g, t), eval_g(g, t2)
    return hausdorff_segments(x, y), float(np.linalg.norm(x - y))
