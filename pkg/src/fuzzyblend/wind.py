"""Deterministic hub-height wind speed signals.

Turbulence is a first-order low-pass (AR(1)) filtered Gaussian sequence drawn
from numpy's Philox counter-based generator, so a given ``(seed, dt)`` gives
a bit-identical series on every platform numpy supports.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

V_FLOOR = 0.5
PRNG_ALGORITHM = "numpy.random.Philox (4x64, 10 rounds), standard_normal via Generator"


@dataclass(frozen=True)
class Constant:
    v: float


@dataclass(frozen=True)
class Step:
    v0: float
    v1: float
    t_step: float


@dataclass(frozen=True)
class Ramp:
    v0: float
    v1: float
    t_start: float
    t_end: float


@dataclass(frozen=True)
class Gust:
    """``1 - cos`` gust of peak ``amplitude`` over ``period`` seconds on top of ``base``."""

    base: float
    amplitude: float
    period: float
    t_start: float = 0.0


@dataclass(frozen=True)
class Turbulent:
    mean: float
    intensity: float
    seed: int
    cutoff_freq: float = 0.1


@dataclass(frozen=True)
class FileTrace:
    path: str


WindProfile = Union[Constant, Step, Ramp, Gust, Turbulent, FileTrace]


def validate_profile(profile: WindProfile) -> None:
    speeds = {
        Constant: lambda p: [p.v],
        Step: lambda p: [p.v0, p.v1],
        Ramp: lambda p: [p.v0, p.v1],
        Gust: lambda p: [p.base, p.base + p.amplitude],
        Turbulent: lambda p: [p.mean],
        FileTrace: lambda p: [],
    }[type(profile)](profile)
    if any(not (math.isfinite(v) and v > 0) for v in speeds):
        raise ValueError(f"wind speeds must be positive in {profile}")
    if isinstance(profile, Turbulent):
        if not 0.0 <= profile.intensity <= 0.5:
            raise ValueError(f"turbulence intensity must lie in [0, 0.5], got {profile.intensity}")
        if not profile.cutoff_freq > 0:
            raise ValueError("cutoff_freq must be positive")
    if isinstance(profile, Ramp) and not profile.t_start < profile.t_end:
        raise ValueError("ramp needs t_start < t_end")
    if isinstance(profile, Gust) and not profile.period > 0:
        raise ValueError("gust period must be positive")


def read_wind_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``t, v`` trace; times must be strictly increasing."""
    path = Path(path)
    t, v = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["t", "v"]:
            raise ValueError(f"{path}: expected header 't, v', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                ti, vi = (float(x) for x in row)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed row {row}") from None
            if t and ti <= t[-1]:
                raise ValueError(f"{path}:{lineno}: time not strictly increasing")
            t.append(ti)
            v.append(vi)
    if not t:
        raise ValueError(f"{path}: empty wind trace")
    return np.array(t), np.array(v)


def write_wind_csv(path, t, v) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("t,v\n")
        for ti, vi in zip(t, v):
            fh.write(f"{ti:.10g},{vi:.10g}\n")


def _analytic(profile: WindProfile, t: float) -> float:
    if isinstance(profile, Constant):
        return profile.v
    if isinstance(profile, Step):
        return profile.v1 if t >= profile.t_step else profile.v0
    if isinstance(profile, Ramp):
        s = min(max((t - profile.t_start) / (profile.t_end - profile.t_start), 0.0), 1.0)
        return profile.v0 + s * (profile.v1 - profile.v0)
    if isinstance(profile, Gust):
        tau = t - profile.t_start
        if 0.0 <= tau <= profile.period:
            return profile.base + 0.5 * profile.amplitude * (1 - math.cos(2 * math.pi * tau / profile.period))
        return profile.base
    raise TypeError(f"not an analytic profile: {profile}")


def turbulent_series(profile: Turbulent, dt: float, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(profile.seed))
    eps = rng.standard_normal(n)
    sigma = profile.intensity * profile.mean
    phi = math.exp(-2.0 * math.pi * profile.cutoff_freq * dt)
    gain = sigma * math.sqrt(1.0 - phi * phi)
    x = np.empty(n)
    # start from the stationary distribution
    acc = sigma * eps[0]
    x[0] = acc
    for k in range(1, n):
        acc = phi * acc + gain * eps[k]
        x[k] = acc
    return np.maximum(profile.mean + x, V_FLOOR)


@functools.lru_cache(maxsize=32)
def _cached_series(profile: WindProfile, dt: float, n: int) -> np.ndarray:
    if isinstance(profile, Turbulent):
        series = turbulent_series(profile, dt, n)
    elif isinstance(profile, FileTrace):
        t, v = read_wind_csv(profile.path)
        series = np.interp(np.arange(n) * dt, t, v)
    else:
        series = np.array([_analytic(profile, k * dt) for k in range(n)])
    series.setflags(write=False)
    return series


def wind_series(profile: WindProfile, dt: float, n: int) -> np.ndarray:
    """Wind speed at ``t = k * dt`` for ``k = 0..n-1`` (read-only array)."""
    validate_profile(profile)
    return _cached_series(profile, float(dt), int(n))


def sample_wind(profile: WindProfile, t: float, dt: float = 0.01) -> float:
    """Wind speed at time ``t``; sampled series are indexed at ``round(t / dt)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if isinstance(profile, (Turbulent, FileTrace)):
        k = int(round(t / dt))
        # grow in blocks so repeated calls hit the cache
        n = (k // 4096 + 1) * 4096
        return float(wind_series(profile, dt, n)[k])
    validate_profile(profile)
    return float(_analytic(profile, t))
