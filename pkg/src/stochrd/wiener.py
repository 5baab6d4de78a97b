"""Two-sided Wiener paths and the conjugation weight they drive.

A path is a sample of a two-sided scalar Wiener process pinned at the
origin, stored on a uniform grid over a finite window.  Three facts make
these samples usable as the random symbol of a pathwise dynamical system:

* w(0) = 0 exactly, by construction;
* the time shift (shift_path(w, t))(s) = w(s + t) - w(t) is again such a
  sample, and shifting composes as a group on grid points;
* the conjugation weight z(w, a, t) = exp(-a * w(t)) satisfies the cocycle
  identity z(w, a, t) * z(shift_path(w, t), a, s) = z(w, a, t + s).

Shift composition is bit-exact here because a shifted path shares the
immutable base sample array of its parent and only moves the anchor
index; values are always formed as a single subtraction against the
anchor sample.  Between grid points the path is interpolated linearly,
which keeps every evaluation a measurable function of finitely many
Gaussian increments.

Evaluating or shifting outside the sampled window raises
WindowExceededError rather than extrapolating.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import WindowExceededError

#: default quadrature step for the exponential memory integrals
DEFAULT_QUAD_STEP = 0.01

_GRID_RTOL = 1e-9


class WienerPath:
    """Piecewise-linear two-sided path on a uniform grid.

    Instances are immutable.  Construct with :func:`sample_two_sided_path`
    for a random path or :meth:`from_samples` for a synthetic one.
    """

    __slots__ = ("_base", "_i0", "grid_step", "seed")

    def __init__(self, base: np.ndarray, i0: int, grid_step: float, seed=None):
        base = np.asarray(base, dtype=float)
        if base.ndim != 1 or base.size < 2:
            raise ValueError("path needs a 1-d sample array with at least 2 points")
        if not np.all(np.isfinite(base)):
            raise ValueError("path samples must be finite")
        if not 0 <= i0 < base.size:
            raise ValueError("anchor index outside the sample array")
        if not grid_step > 0:
            raise ValueError("grid_step must be positive")
        base = base.copy()
        base.setflags(write=False)
        self._base = base
        self._i0 = int(i0)
        self.grid_step = float(grid_step)
        self.seed = seed

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_samples(cls, samples, grid_step: float, t_min: float) -> "WienerPath":
        """Wrap explicit samples; samples must contain t = 0 with value 0."""
        samples = np.asarray(samples, dtype=float)
        i0 = -t_min / grid_step
        if abs(i0 - round(i0)) > _GRID_RTOL:
            raise ValueError("t_min must be an integer multiple of grid_step")
        i0 = int(round(i0))
        if not 0 <= i0 < samples.size:
            raise ValueError("window does not contain t = 0")
        if samples[i0] != 0.0:
            raise ValueError("path value at t = 0 must be exactly 0")
        return cls(samples, i0, grid_step)

    # -- basic geometry ---------------------------------------------------

    @property
    def t_min(self) -> float:
        return -self._i0 * self.grid_step

    @property
    def t_max(self) -> float:
        return (self._base.size - 1 - self._i0) * self.grid_step

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self._base.size) - self._i0) * self.grid_step

    @property
    def samples(self) -> np.ndarray:
        """Path values on the grid, anchored so the value at t = 0 is 0."""
        return self._base - self._base[self._i0]

    def _index_of(self, t: float) -> int:
        k = t / self.grid_step
        kr = round(k)
        if abs(k - kr) > _GRID_RTOL * max(1.0, abs(k)):
            raise ValueError(f"t={t!r} is not on the sample grid")
        idx = self._i0 + int(kr)
        if not 0 <= idx < self._base.size:
            raise WindowExceededError(
                f"t={t!r} outside sampled window [{self.t_min:.6g}, {self.t_max:.6g}]"
            )
        return idx

    # -- evaluation -------------------------------------------------------

    def value_at(self, t):
        """Path value at time(s) t, linearly interpolated between grid points."""
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.t_min, self.t_max
        slack = _GRID_RTOL * self.grid_step
        if np.any(t_arr < lo - slack) or np.any(t_arr > hi + slack):
            raise WindowExceededError(
                f"evaluation outside sampled window [{lo:.6g}, {hi:.6g}]"
            )
        anchor = self._base[self._i0]
        pos = (t_arr - lo) / self.grid_step
        # snap near-integer positions so grid-time evaluations return the
        # stored sample bit-exactly instead of a reinterpolated value
        posr = np.round(pos)
        snap = np.abs(pos - posr) <= _GRID_RTOL * np.maximum(1.0, np.abs(posr))
        pos = np.where(snap, posr, pos)
        pos = np.clip(pos, 0.0, self._base.size - 1.0)
        out = np.interp(pos, np.arange(self._base.size), self._base) - anchor
        if t_arr.ndim == 0:
            return float(out)
        return out

    def shift(self, t: float) -> "WienerPath":
        """The shifted path s -> w(s + t) - w(t); t must lie on the grid."""
        idx = self._index_of(t)
        return WienerPath(self._base, idx, self.grid_step, seed=self.seed)

    # -- export -----------------------------------------------------------

    def to_csv(self, path) -> None:
        """Write grid samples as CSV with columns t, omega."""
        times = self.times
        vals = self.samples
        with open(path, "w") as fh:
            fh.write("t,omega\n")
            for ti, wi in zip(times, vals):
                fh.write(f"{float(ti)!r},{float(wi)!r}\n")

    def __repr__(self) -> str:
        return (
            f"WienerPath(window=[{self.t_min:.6g}, {self.t_max:.6g}], "
            f"grid_step={self.grid_step:.6g}, seed={self.seed!r})"
        )


def sample_two_sided_path(seed: int, s_max: float, grid_step: float) -> WienerPath:
    """Draw a two-sided Wiener sample on [-s_max, s_max].

    Forward and backward halves use independent Gaussian increment
    streams spawned from the one seed, each increment with variance
    grid_step.  The draw is bit-reproducible for a fixed seed.
    """
    if not s_max > 0:
        raise ValueError("s_max must be positive")
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    n = s_max / grid_step
    if abs(n - round(n)) > _GRID_RTOL * max(1.0, n):
        raise ValueError("s_max must be an integer multiple of grid_step")
    n = int(round(n))
    fwd_ss, bwd_ss = np.random.SeedSequence(seed).spawn(2)
    std = np.sqrt(grid_step)
    fwd = np.random.default_rng(fwd_ss).normal(0.0, std, size=n)
    bwd = np.random.default_rng(bwd_ss).normal(0.0, std, size=n)
    base = np.empty(2 * n + 1)
    base[n] = 0.0
    base[n + 1:] = np.cumsum(fwd)
    base[:n] = np.cumsum(bwd)[::-1]
    return WienerPath(base, n, grid_step, seed=seed)


def shift_path(path: WienerPath, t: float) -> WienerPath:
    """Group shift (shift_path(w, t))(s) = w(s + t) - w(t), grid t only."""
    return path.shift(t)


def z_value(path: WienerPath, alpha: float, t):
    """Conjugation weight exp(-alpha * w(t)); t may be an array."""
    w = path.value_at(t)
    return np.exp(-alpha * np.asarray(w)) if np.ndim(w) else float(np.exp(-alpha * w))


def quad_exp(
    h: Callable[[np.ndarray], np.ndarray],
    rate: float,
    s_trunc: float,
    step: float = DEFAULT_QUAD_STEP,
) -> float:
    """Trapezoidal value of the memory integral of exp(rate*s) * h(s) over [-s_trunc, 0].

    The infinite-memory integral over (-inf, 0] is truncated at -s_trunc;
    for bounded h the truncation error is at most
    sup|h| * exp(-rate * s_trunc) / rate.

    Parameters
    ----------
    h : callable
        Sample function evaluated on the grid of [-s_trunc, 0]; must accept
        an ndarray of times.
    rate : float
        Exponential decay rate, must be positive.
    s_trunc : float
        Truncation depth, positive multiple of step.
    step : float
        Quadrature grid step.
    """
    if not rate > 0:
        raise ValueError("rate must be positive")
    if not s_trunc > 0:
        raise ValueError("s_trunc must be positive")
    if not step > 0:
        raise ValueError("step must be positive")
    m = s_trunc / step
    if abs(m - round(m)) > _GRID_RTOL * max(1.0, m):
        raise ValueError("s_trunc must be an integer multiple of step")
    m = int(round(m))
    s = -s_trunc + step * np.arange(m + 1)
    vals = np.asarray(h(s), dtype=float)
    if vals.shape != s.shape:
        raise ValueError("h must return one value per grid point")
    return float(np.trapezoid(np.exp(rate * s) * vals, dx=step))


@dataclass
class SublinearityReport:
    """Diagnostic for the sublinear-growth behaviour w(t)/t -> 0."""

    t_min: float
    max_ratio: float
    at_t: float


def sublinearity_report(path: WienerPath, t_min: float) -> SublinearityReport:
    """Max of |w(t)/t| over grid times with |t| >= t_min.

    Purely diagnostic: membership of a single sample in the full-measure
    set of sublinear paths is not decidable from a finite window.
    """
    if not t_min > 0:
        raise ValueError("t_min must be positive")
    times = path.times
    mask = np.abs(times) >= t_min - _GRID_RTOL * path.grid_step
    if not np.any(mask):
        raise ValueError("no grid times with |t| >= t_min in the window")
    t_sel = times[mask]
    ratios = np.abs(path.samples[mask] / t_sel)
    k = int(np.argmax(ratios))
    return SublinearityReport(t_min=float(t_min), max_ratio=float(ratios[k]), at_t=float(t_sel[k]))
