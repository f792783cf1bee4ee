"""
Wiener increments and Geometric Brownian Motion ensembles.

Random numbers
--------------
Every stream is a Philox4x64-10 counter-based generator (numpy's
``np.random.Philox``) keyed by the 128-bit pair ``(seed, stream)`` with the
counter starting at zero.  Normals come from numpy's ziggurat sampler
(``Generator.standard_normal``).  Path ``i`` of an ensemble always reads
stream ``i``, so an ensemble is bit-identical however it is split across
workers.

Prices follow the exact lognormal step

    S_{k+1} = S_k * exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z_k)

which keeps every price strictly positive.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class GbmParams:
    mu: float
    sigma: float
    s0: float

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ValidationError(f"mu must be finite, got {self.mu}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")
        if not (np.isfinite(self.s0) and self.s0 > 0):
            raise ValidationError(f"s0 must be > 0, got {self.s0}")


@dataclass(frozen=True)
class PathSet:
    """``paths[i, k]`` is the price of path ``i`` at ``times[k]``."""

    times: np.ndarray
    paths: np.ndarray
    seed: int

    @property
    def n_paths(self):
        return self.paths.shape[0]

    @property
    def n_steps(self):
        return self.paths.shape[1] - 1


def _check_seed(seed, stream=0):
    if not (0 <= int(seed) <= _UINT64_MAX):
        raise ValidationError(f"seed must lie in [0, 2**64), got {seed}")
    if not (0 <= int(stream) <= _UINT64_MAX):
        raise ValidationError(f"stream must lie in [0, 2**64), got {stream}")


def stream_generator(seed, stream=0):
    """Return the generator for ``(seed, stream)``."""
    _check_seed(seed, stream)
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _StreamReader:
    # Re-keys one Philox instance in place; building a fresh Generator per
    # path costs roughly twice as much and yields the same draws.
    def __init__(self, seed):
        self.seed = seed
        self._bitgen = np.random.Philox(0)
        self._gen = np.random.Generator(self._bitgen)

    def normals(self, stream, size):
        self._bitgen.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.zeros(4, dtype=np.uint64),
                "key": np.array([self.seed, stream], dtype=np.uint64),
            },
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen.standard_normal(size)


def standard_normals(seed, streams, size):
    """Draw ``size`` standard normals from each stream in ``streams``.

    Row ``j`` of the result depends only on ``(seed, streams[j])``.
    """
    _check_seed(seed)
    streams = np.asarray(streams, dtype=np.int64)
    if streams.size and (streams.min() < 0):
        raise ValidationError("stream indices must be non-negative")
    reader = _StreamReader(seed)
    out = np.empty((streams.size, size))
    for j, s in enumerate(streams):
        out[j] = reader.normals(int(s), size)
    return out


def sample_wiener_increments(n_steps, dt, seed, stream=0):
    """``n_steps`` independent N(0, dt) increments of a Wiener process."""
    if int(n_steps) < 1:
        raise ValidationError(f"n_steps must be positive, got {n_steps}")
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    _check_seed(seed, stream)
    return np.sqrt(dt) * stream_generator(seed, stream).standard_normal(int(n_steps))


def wiener_path(increments):
    """Partial sums of ``increments`` with W_0 = 0 prepended."""
    return np.concatenate(([0.0], np.cumsum(increments)))


def _gbm_block(params, n_steps, dt, seed, start, stop):
    z = standard_normals(seed, np.arange(start, stop), n_steps)
    log_steps = (params.mu - 0.5 * params.sigma**2) * dt + params.sigma * np.sqrt(dt) * z
    out = np.empty((stop - start, n_steps + 1))
    out[:, 0] = 0.0
    np.cumsum(log_steps, axis=1, out=out[:, 1:])
    return params.s0 * np.exp(out)


def simulate_gbm(params, n_steps, dt, n_paths, seed, workers=1):
    """Simulate ``n_paths`` GBM trajectories of ``n_steps`` exact steps.

    ``workers`` only changes how paths are split into blocks; the output
    does not depend on it.
    """
    if not isinstance(params, GbmParams):
        raise ValidationError("params must be a GbmParams instance")
    n_steps, n_paths, workers = int(n_steps), int(n_paths), int(workers)
    if n_steps < 1 or n_paths < 1 or workers < 1:
        raise ValidationError("n_steps, n_paths and workers must be positive")
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    _check_seed(seed)

    edges = np.linspace(0, n_paths, min(workers, n_paths) + 1).astype(int)
    blocks = list(zip(edges[:-1], edges[1:]))
    if len(blocks) == 1:
        paths = _gbm_block(params, n_steps, dt, seed, 0, n_paths)
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            parts = pool.map(
                lambda b: _gbm_block(params, n_steps, dt, seed, b[0], b[1]), blocks
            )
            paths = np.vstack(list(parts))
    times = dt * np.arange(n_steps + 1)
    return PathSet(times=times, paths=paths, seed=int(seed))


def ensemble_stats(paths):
    """Per-time sample mean and unbiased sample variance of a PathSet.

    A single-path ensemble reports zero variance.
    """
    values = paths.paths if isinstance(paths, PathSet) else np.asarray(paths, float)
    if values.ndim != 2 or values.size == 0:
        raise ValidationError("empty path ensemble")
    mean = values.mean(axis=0)
    if values.shape[0] == 1:
        return mean, np.zeros_like(mean)
    return mean, values.var(axis=0, ddof=1)


def write_paths_csv(pathset, fh):
    """Write ``t,path_0,...`` with one row per timestamp to an open text file."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t"] + [f"path_{i}" for i in range(pathset.n_paths)])
    for k, t in enumerate(pathset.times):
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in pathset.paths[:, k]])
