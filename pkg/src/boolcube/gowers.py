"""Gowers uniformity, Gowers inner products, and the influential-variable finder.

The dimension-d uniformity of f is the expectation, over a random point x
and d random shifts, of the product of f over the whole combinatorial cube
{x + sum of any subset of the shifts}.  The exact route peels shifts one at
a time (U^d(f) = E_y U^(d-1)(f_y) where f_y(x) = f(x) f(x+y)) down to the
closed forms U^1(f) = (E f)^2 and U^2(f) = sum of fourth powers of the
Fourier coefficients.  A naive full enumeration is kept as an independent
cross-check, and sampling estimators report their standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import check_guard
from .functions import BoolFn, fn_from_json, fn_to_json, walsh_hadamard
from .influence import degree_cross_influence, influence
from .mc import run_chunked_mc

NAIVE_GUARD_BITS = 20


@dataclass(frozen=True)
class GowersResult:
    value: float
    method: str = "exact"  # "exact" or "monte_carlo"
    samples: int = 0
    stderr: float = 0.0


@dataclass(frozen=True)
class FnCollection:
    """2^d functions indexed by subset masks of [d] (element j <-> bit j-1)."""

    d: int
    entries: tuple[BoolFn, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if len(self.entries) != 1 << self.d:
            raise ValueError(f"need exactly 2^{self.d} entries, got {len(self.entries)}")
        if any(f.n != self.entries[0].n for f in self.entries):
            raise ValueError("all entries must share the same arity")

    @property
    def n(self) -> int:
        return self.entries[0].n


def constant_collection(f: BoolFn, d: int) -> FnCollection:
    return FnCollection(d, (f,) * (1 << d))


def derivative(f: BoolFn, y: int) -> BoolFn:
    """One derivative step: x -> f(x) * f(x + y)."""
    shifted = f.values[np.arange(f.size, dtype=np.uint32) ^ np.uint32(y)]
    return BoolFn(f.n, f.values * shifted)


def _u2_batch(tables: np.ndarray) -> np.ndarray:
    coeffs = walsh_hadamard(tables) / tables.shape[-1]
    return np.sum(coeffs**4, axis=-1)


def _u_exact(table: np.ndarray, dim: int) -> float:
    size = table.shape[-1]
    if dim == 2:
        return float(_u2_batch(table))
    if dim == 3:
        points = np.arange(size)
        derivs = table[points[:, None] ^ points[None, :]] * table[None, :]
        return math.fsum(_u2_batch(derivs)) / size
    points = np.arange(size, dtype=np.uint32)
    return math.fsum(
        _u_exact(table * table[points ^ np.uint32(y)], dim - 1) for y in range(size)
    ) / size


def gowers_u(f: BoolFn, d: int, override_guard: bool = False) -> GowersResult:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d == 1:
        return GowersResult(f.mean() ** 2)
    check_guard(f.n * (d - 1) + f.n, f"exact U^{d} at arity {f.n}", override_guard)
    return GowersResult(_u_exact(f.values, d))


def _cube_points(tuples: np.ndarray, n: int, d: int) -> np.ndarray:
    """Split flat (d+1)-fold indices into the base point and d shift masks.

    Row layout: bits [0, n) hold x, bits [n*i, n*(i+1)) hold the i-th shift.
    Returns an array of shape (d+1, len(tuples)).
    """
    mask = (1 << n) - 1
    return np.stack([(tuples >> (n * i)) & mask for i in range(d + 1)])


def _cube_product(tables: list[np.ndarray], coords: np.ndarray, d: int) -> np.ndarray:
    """Product over all 2^d cube vertices; tables[S] is evaluated at
    x + sum of the shifts selected by mask S.  coords[0] is x."""
    out = np.ones(coords.shape[1])
    for s in range(1 << d):
        point = coords[0].copy()
        for i in range(d):
            if (s >> i) & 1:
                point ^= coords[i + 1]
        out *= tables[s][point]
    return out


def _enumerate_mean(tables: list[np.ndarray], n: int, d: int) -> float:
    total_bits = n * (d + 1)
    total = 1 << total_bits
    chunk = 1 << min(total_bits, 18)
    acc = [
        float(np.sum(_cube_product(tables, _cube_points(np.arange(lo, lo + chunk, dtype=np.int64), n, d), d)))
        for lo in range(0, total, chunk)
    ]
    return math.fsum(acc) / total


def gowers_u_naive(f: BoolFn, d: int, override_guard: bool = False) -> GowersResult:
    """Direct enumeration over all (x, shifts) tuples; cross-check oracle."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    bits = f.n * (d + 1)
    check_guard(bits, f"naive U^{d} enumeration at arity {f.n}", override_guard, NAIVE_GUARD_BITS)
    return GowersResult(_enumerate_mean([f.values] * (1 << d), f.n, d))


def gowers_u_mc(f: BoolFn, d: int, samples: int, seed: int = 0, threads: int = 1) -> GowersResult:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    tables = [f.values] * (1 << d)

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        coords = rng.integers(0, f.size, size=(d + 1, count))
        return _cube_product(tables, coords, d)

    mean, err = run_chunked_mc(chunk, samples, seed, threads)
    return GowersResult(mean, "monte_carlo", samples, err)


def gowers_ip(c: FnCollection, override_guard: bool = False) -> GowersResult:
    """Exact Gowers inner product.

    The last two shifts are folded into the spectrum: with products A, B, C, D
    over the remaining cube the expectation over (x, y, z) of
    A(x) B(x+y) C(x+z) D(x+y+z) equals the sum over masks of the product of
    their four coefficients.
    """
    n, d = c.n, c.d
    if d == 1:
        return GowersResult(c.entries[0].mean() * c.entries[1].mean())
    check_guard(n * (d - 1) + n, f"exact inner product at dimension {d}, arity {n}", override_guard)
    points = np.arange(1 << n, dtype=np.uint32)
    top, bot = 1 << (d - 2), 1 << (d - 1)
    outer = 1 << (n * (d - 2))
    acc = []
    for t in range(outer):
        shifts = [(t >> (n * i)) & ((1 << n) - 1) for i in range(d - 2)]
        quad = np.ones((4, 1 << n))
        for s in range(top):
            sigma = 0
            for i in range(d - 2):
                if (s >> i) & 1:
                    sigma ^= shifts[i]
            at = points ^ np.uint32(sigma)
            quad[0] *= c.entries[s].values[at]
            quad[1] *= c.entries[s | top].values[at]
            quad[2] *= c.entries[s | bot].values[at]
            quad[3] *= c.entries[s | top | bot].values[at]
        coeffs = walsh_hadamard(quad) / (1 << n)
        acc.append(float(np.sum(np.prod(coeffs, axis=0))))
    return GowersResult(math.fsum(acc) / outer)


def gowers_ip_naive(c: FnCollection, override_guard: bool = False) -> GowersResult:
    bits = c.n * (c.d + 1)
    check_guard(bits, f"naive inner product enumeration at dimension {c.d}", override_guard, NAIVE_GUARD_BITS)
    return GowersResult(_enumerate_mean([f.values for f in c.entries], c.n, c.d))


def gowers_ip_mc(c: FnCollection, samples: int, seed: int = 0, threads: int = 1) -> GowersResult:
    tables = [f.values for f in c.entries]

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        coords = rng.integers(0, 1 << c.n, size=(c.d + 1, count))
        return _cube_product(tables, coords, c.d)

    mean, err = run_chunked_mc(chunk, samples, seed, threads)
    return GowersResult(mean, "monte_carlo", samples, err)


def linear_gowers_ip(c: FnCollection, override_guard: bool = False) -> GowersResult:
    """Inner product over the cube anchored at zero: no free translate, and
    the empty-subset slot is always evaluated at 0."""
    n, d = c.n, c.d
    check_guard(n * d, f"linear inner product at dimension {d}, arity {n}", override_guard)
    base = float(c.entries[0].values[0])
    if d == 1:
        return GowersResult(base * c.entries[1].mean())
    # vectorize over the last shift
    points = np.arange(1 << n, dtype=np.uint32)
    last = 1 << (d - 1)
    outer = 1 << (n * (d - 1))
    acc = []
    for t in range(outer):
        shifts = [(t >> (n * i)) & ((1 << n) - 1) for i in range(d - 1)]
        fixed = base
        vec = np.ones(1 << n)
        for s in range(1, 1 << d):
            sigma = 0
            for i in range(d - 1):
                if (s >> i) & 1:
                    sigma ^= shifts[i]
            if s & last:
                vec *= c.entries[s].values[points ^ np.uint32(sigma)]
            else:
                fixed *= float(c.entries[s].values[sigma])
        acc.append(fixed * float(np.mean(vec)))
    return GowersResult(math.fsum(acc) / outer)


def lift_linear_to_gowers(c: FnCollection) -> FnCollection:
    """Collection whose plain inner product dominates the squared linear one:
    slot T maps to the input slot T union {d}."""
    last = 1 << (c.d - 1)
    return FnCollection(c.d, tuple(c.entries[t | last] for t in range(1 << c.d)))


def find_influential_variable(c: FnCollection, t: int = 2) -> tuple[int, float]:
    """Coordinate with the largest t-cross-influence over the collection, and
    that value; the decoder's witness for a large inner product."""
    if t < 2:
        raise ValueError(f"threshold must be >= 2, got {t}")
    fns = list(c.entries)
    best_i, best_v = 1, -1.0
    for i in range(1, c.n + 1):
        per = sorted((influence(g, i) for g in fns), reverse=True)
        v = per[t - 1]
        if v > best_v:
            best_i, best_v = i, v
    return best_i, best_v


def find_influential_variable_degree(c: FnCollection, d: int, t: int = 2) -> tuple[int, float]:
    if t < 2:
        raise ValueError(f"threshold must be >= 2, got {t}")
    fns = list(c.entries)
    best_i, best_v = 1, -1.0
    for i in range(1, c.n + 1):
        v = degree_cross_influence(fns, i, d, t)
        if v > best_v:
            best_i, best_v = i, v
    return best_i, best_v


# --- collection files -------------------------------------------------------

def mask_to_key(mask: int, d: int) -> str:
    return "".join(str(i + 1) for i in range(d) if (mask >> i) & 1)


def key_to_mask(key: str, d: int) -> int:
    mask = 0
    for ch in key:
        i = int(ch)
        if not 1 <= i <= d:
            raise ValueError(f"element {i} outside dimension {d}")
        mask |= 1 << (i - 1)
    return mask


def collection_to_json(c: FnCollection) -> dict:
    return {
        "d": c.d,
        "functions": {mask_to_key(m, c.d): fn_to_json(c.entries[m]) for m in range(1 << c.d)},
    }


def collection_from_json(obj: dict) -> FnCollection:
    d = int(obj["d"])
    entries: list[BoolFn | None] = [None] * (1 << d)
    for key, fn_obj in obj["functions"].items():
        entries[key_to_mask(key, d)] = fn_from_json(fn_obj)
    if any(e is None for e in entries):
        missing = [mask_to_key(m, d) for m, e in enumerate(entries) if e is None]
        raise ValueError(f"collection file is missing subsets: {missing}")
    return FnCollection(d, tuple(entries))  # type: ignore[arg-type]
