"""Real-valued functions on the boolean cube and their Fourier analysis.

A function f on {0,1}^n is stored as a full table of 2^n doubles.  Point
x = (x_1,...,x_n) lives at index m with bit (i-1) of m holding x_i, so XOR
of indices is addition in Z_2^n.  Sign functions (all values +-1) and the
dyadic Fourier coefficients of sign functions are exactly representable
for n <= 24, so transforms of sign functions carry no rounding error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

MAX_ARITY = 24

DEFAULT_TOL = 1e-9


def popcount(masks: np.ndarray | int) -> np.ndarray | int:
    if isinstance(masks, (int, np.integer)):
        return int(masks).bit_count()
    return np.bitwise_count(masks)


def _as_table(n: int, values) -> np.ndarray:
    table = np.asarray(values, dtype=np.float64)
    if table.shape != (1 << n,):
        raise ValueError(f"table must have exactly 2^{n} entries, got shape {table.shape}")
    return table


@dataclass(frozen=True)
class BoolFn:
    """Function {0,1}^n -> [-1,1] as a table of 2^n values."""

    n: int
    values: np.ndarray
    is_sign: bool = field(init=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ARITY:
            raise ValueError(f"arity must be in [1, {MAX_ARITY}], got {self.n}")
        table = _as_table(self.n, self.values)
        if np.any(np.abs(table) > 1.0):
            raise ValueError("values must lie in [-1, 1]")
        table.setflags(write=False)
        object.__setattr__(self, "values", table)
        object.__setattr__(self, "is_sign", bool(np.all(np.abs(table) == 1.0)))

    @property
    def size(self) -> int:
        return 1 << self.n

    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficient table; entry at mask m is the coefficient of the
    character picking out the coordinates in m."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        table = _as_table(self.n, self.coeffs)
        table.setflags(write=False)
        object.__setattr__(self, "coeffs", table)


def _check_coord(n: int, i: int) -> None:
    if not 1 <= i <= n:
        raise ValueError(f"coordinate must be in [1, {n}], got {i}")


def make_chi(n: int, subset_mask: int) -> BoolFn:
    """The sign character x -> (-1)^(sum of x_i over i in the subset)."""
    if subset_mask < 0 or subset_mask >> n:
        raise ValueError(f"subset mask {subset_mask:#x} has bits above arity {n}")
    points = np.arange(1 << n, dtype=np.uint32)
    parity = popcount(points & np.uint32(subset_mask)) & 1
    return BoolFn(n, 1.0 - 2.0 * parity)


def make_long_code(n: int, i: int) -> BoolFn:
    """Dictator in coordinate i: the codeword encoding letter i."""
    _check_coord(n, i)
    return make_chi(n, 1 << (i - 1))


def make_quadratic_phase(n: int) -> BoolFn:
    """(-1)^(x1*x2 + x3*x4 + ...) over disjoint coordinate pairs."""
    if n % 2 != 0:
        raise ValueError(f"arity must be even, got {n}")
    points = np.arange(1 << n, dtype=np.uint32)
    evens = np.uint32(sum(1 << k for k in range(0, n, 2)))
    pair_hits = points & (points >> np.uint32(1)) & evens
    return BoolFn(n, 1.0 - 2.0 * (popcount(pair_hits) & 1))


def make_block_and(n: int, b: int) -> BoolFn:
    """(-1)^(sum over size-b blocks of the AND of the block's coordinates)."""
    if b < 1 or n % b != 0:
        raise ValueError(f"block size {b} must divide arity {n}")
    points = np.arange(1 << n, dtype=np.uint32)
    ands = np.zeros(1 << n, dtype=np.uint32)
    block = np.uint32((1 << b) - 1)
    for j in range(n // b):
        mask = block << np.uint32(j * b)
        ands += ((points & mask) == mask).astype(np.uint32)
    return BoolFn(n, 1.0 - 2.0 * (ands & 1))


def random_fn(n: int, mode: str = "sign", seed: int = 0) -> BoolFn:
    """I.i.d. uniform table: +-1 entries ("sign") or uniform [-1,1] ("bounded")."""
    rng = np.random.default_rng(seed)
    if mode == "sign":
        values = 1.0 - 2.0 * rng.integers(0, 2, size=1 << n).astype(np.float64)
    elif mode == "bounded":
        values = rng.uniform(-1.0, 1.0, size=1 << n)
    else:
        raise ValueError(f"mode must be 'sign' or 'bounded', got {mode!r}")
    return BoolFn(n, values)


def walsh_hadamard(table: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly along the last axis.

    Output at mask k is sum over m of (-1)^popcount(k & m) * table[m].
    Self-inverse up to the factor 2^n.  Accepts batched input.
    """
    a = np.array(table, dtype=np.float64)
    m = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < m:
        a = a.reshape(lead + (m // (2 * h), 2, h))
        top = a[..., 0, :] + a[..., 1, :]
        bot = a[..., 0, :] - a[..., 1, :]
        a = np.stack((top, bot), axis=-2).reshape(lead + (m,))
        h *= 2
    return a


def fourier(f: BoolFn) -> Spectrum:
    return Spectrum(f.n, walsh_hadamard(f.values) / f.size)


def inverse_fourier(s: Spectrum) -> BoolFn:
    return BoolFn(s.n, walsh_hadamard(s.coeffs))


def apply_noise(f: BoolFn, gamma: float) -> BoolFn:
    """Average f over independent per-bit flips with rate gamma.

    Works through the spectrum: the coefficient at mask m is scaled by
    (1-2*gamma)^popcount(m), which is exact (no sampling).
    """
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {gamma}")
    if gamma == 0.0:
        return f
    damp = (1.0 - 2.0 * gamma) ** popcount(np.arange(f.size, dtype=np.uint32))
    smoothed = walsh_hadamard(walsh_hadamard(f.values) / f.size * damp)
    # rounding can push |value| a hair past 1; the operator itself contracts
    return BoolFn(f.n, np.clip(smoothed, -1.0, 1.0))


def sample_mu_gamma(n: int, gamma: float, rng: np.random.Generator) -> int:
    """One draw of a mask whose bits are independently 1 with probability gamma."""
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {gamma}")
    bits = rng.random(n) < gamma
    return int(np.dot(bits, 1 << np.arange(n, dtype=np.uint64)))


def sample_mu_gamma_batch(n: int, gamma: float, rng: np.random.Generator, count: int) -> np.ndarray:
    bits = rng.random((count, n)) < gamma
    return (bits @ (1 << np.arange(n, dtype=np.uint64))).astype(np.uint32)


def fold(f: BoolFn) -> BoolFn:
    """Symmetrize a sign function so its mean is exactly zero.

    Points with x_1 = 0 keep their value; a point with x_1 = 1 takes minus
    the value at the complement point with x_1 reset to 0.  Dictators are
    fixed points of this map.
    """
    if not f.is_sign:
        raise ValueError("folding is defined for sign-valued functions")
    points = np.arange(f.size, dtype=np.uint32)
    full = np.uint32(f.size - 1)
    out = np.where(points & 1, -f.values[points ^ full], f.values)
    return BoolFn(f.n, out)


def permute(f: BoolFn, pi: tuple[int, ...] | list[int]) -> BoolFn:
    """Composition with a coordinate permutation: result(x) = f(x_pi(1), ..., x_pi(n)).

    With this convention the dictator in coordinate a maps to the dictator in
    pi(a), and coordinate i of the result has the influence that pi^-1(i) has
    for f.
    """
    pi = tuple(pi)
    if sorted(pi) != list(range(1, f.n + 1)):
        raise ValueError(f"pi must be a permutation of 1..{f.n}, got {pi}")
    points = np.arange(f.size, dtype=np.uint32)
    gathered = np.zeros(f.size, dtype=np.uint32)
    for i in range(1, f.n + 1):
        bit = (points >> np.uint32(pi[i - 1] - 1)) & 1
        gathered |= bit << np.uint32(i - 1)
    return BoolFn(f.n, f.values[gathered])


# --- GF(2) linear maps on the cube ----------------------------------------

def gf2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


def gf2_is_invertible(rows: list[int], n: int) -> bool:
    return len(rows) == n and gf2_rank(rows) == n


def random_invertible_matrix(n: int, rng: np.random.Generator) -> list[int]:
    while True:
        rows = [int(x) for x in rng.integers(0, 1 << n, size=n, dtype=np.uint64)]
        if gf2_is_invertible(rows, n):
            return rows


def matrix_image_masks(rows: list[int], n: int) -> list[int]:
    """All points of the column span of an n x n bit matrix given as row masks."""
    cols = [sum(((rows[i] >> j) & 1) << i for i in range(n)) for j in range(n)]
    span = {0}
    for c in cols:
        span |= {v ^ c for v in span}
    return sorted(span)


def apply_linear_transform(f: BoolFn, rows: list[int], require_invertible: bool = False) -> BoolFn:
    """Substitute x -> Ax over GF(2); A is given as n row masks."""
    if len(rows) != f.n:
        raise ValueError(f"matrix must have {f.n} rows, got {len(rows)}")
    full = (1 << f.n) - 1
    for row in rows:
        if row < 0 or row > full:
            raise ValueError(f"row mask {row:#x} has bits above arity {f.n}")
    if require_invertible and not gf2_is_invertible(rows, f.n):
        raise ValueError("matrix is singular")
    points = np.arange(f.size, dtype=np.uint32)
    image = np.zeros(f.size, dtype=np.uint32)
    for i, row in enumerate(rows):
        image |= (popcount(points & np.uint32(row)) & 1).astype(np.uint32) << np.uint32(i)
    return BoolFn(f.n, f.values[image])


# --- JSON function files ----------------------------------------------------

def fn_to_json(f: BoolFn, compact: bool = False) -> dict:
    """Plain form lists the values; compact form packs a sign function into
    hex (bit m set <=> value at index m is -1)."""
    if compact:
        if not f.is_sign:
            raise ValueError("compact form is only defined for sign functions")
        packed = np.packbits(f.values < 0, bitorder="little").tobytes()
        width = max(1, (f.size + 3) // 4)
        return {"n": f.n, "bits": format(int.from_bytes(packed, "little"), f"0{width}x")}
    return {"n": f.n, "values": [float(v) for v in f.values]}


def fn_from_json(obj: dict) -> BoolFn:
    n = int(obj["n"])
    if "bits" in obj:
        size = 1 << n
        raw = int(obj["bits"], 16).to_bytes((size + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]
        return BoolFn(n, np.where(bits, -1.0, 1.0))
    return BoolFn(n, obj["values"])


def load_fn(path: str) -> BoolFn:
    with open(path) as fh:
        return fn_from_json(json.load(fh))


def save_fn(f: BoolFn, path: str, compact: bool = False) -> None:
    with open(path, "w") as fh:
        json.dump(fn_to_json(f, compact=compact), fh)
        fh.write("\n")
