"""Deterministic chunked Monte Carlo driver.

Samples are split into fixed-size chunks; chunk c draws from the stream
spawned as SeedSequence(seed).spawn()[c], and chunk partials are combined
with exact summation.  The estimate is therefore byte-identical for a given
seed no matter how many worker threads execute the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

CHUNK = 1 << 14


def run_chunked_mc(
    sample_chunk: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    threads: int = 1,
) -> tuple[float, float]:
    """Mean and standard error of sample_chunk(rng, count) values.

    sample_chunk must return one float per round and depend only on the rng
    it is handed.
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    counts = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        counts.append(samples % CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(counts))

    def one(idx: int) -> tuple[float, float]:
        rng = np.random.default_rng(seeds[idx])
        vals = np.asarray(sample_chunk(rng, counts[idx]), dtype=np.float64)
        return float(np.sum(vals)), float(np.sum(vals * vals))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(one, range(len(counts))))
    else:
        partials = [one(i) for i in range(len(counts))]

    total = math.fsum(p[0] for p in partials)
    total_sq = math.fsum(p[1] for p in partials)
    mean = total / samples
    if samples == 1:
        return mean, 0.0
    var = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    return mean, math.sqrt(var / samples)
