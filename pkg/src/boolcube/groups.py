"""Complex-valued functions on products of finite abelian groups.

Each of the n coordinates is itself a product of cyclic groups, given by a
list of moduli.  Points are encoded in mixed radix over the flattened
cyclic factors, first factor least significant.  Characters are products
of per-factor roots of unity and are self-indexed by group elements;
influence of a coordinate block is the expected variance over that block,
equivalently the squared-coefficient mass on labels whose block part is
nonzero.  Uniformity of dimension d conjugates the cube factors at odd
levels, which keeps U^d real and nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import check_guard

MAX_ORDER_BITS = 20


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


@dataclass(frozen=True)
class GroupSpec:
    """Coordinate blocks, each a tuple of cyclic moduli."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(m) for m in b) for b in self.blocks)
        if not blocks or any(not b for b in blocks):
            raise ValueError("need at least one block and no empty blocks")
        if any(m < 2 for b in blocks for m in b):
            raise ValueError("every modulus must be >= 2")
        object.__setattr__(self, "blocks", blocks)
        if self.order > 1 << MAX_ORDER_BITS:
            raise ValueError(f"group order {self.order} exceeds 2^{MAX_ORDER_BITS}")

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(m for b in self.blocks for m in b)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def n(self) -> int:
        return len(self.blocks)

    def factor_block(self) -> tuple[int, ...]:
        """Block index of each flattened cyclic factor."""
        return tuple(bi for bi, b in enumerate(self.blocks) for _ in b)

    def digits(self, idx: np.ndarray | int) -> np.ndarray:
        """Mixed-radix digits, one column per flattened factor."""
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64)).copy()
        out = np.empty((idx.size, len(self.moduli)), dtype=np.int64)
        for j, m in enumerate(self.moduli):
            out[:, j] = idx % m
            idx //= m
        return out

    def encode(self, digits: np.ndarray) -> np.ndarray:
        idx = np.zeros(digits.shape[0], dtype=np.int64)
        scale = 1
        for j, m in enumerate(self.moduli):
            idx += digits[:, j] * scale
            scale *= m
        return idx

    def add(self, a: np.ndarray | int, b: np.ndarray | int) -> np.ndarray:
        """Pointwise group addition of (broadcastable) element indices."""
        da, db = self.digits(a), self.digits(b)
        if da.shape[0] == 1 and db.shape[0] > 1:
            da = np.broadcast_to(da, db.shape)
        if db.shape[0] == 1 and da.shape[0] > 1:
            db = np.broadcast_to(db, da.shape)
        summed = (da + db) % np.array(self.moduli, dtype=np.int64)
        return self.encode(summed)

    def add_table(self) -> np.ndarray:
        """Full addition table; row y is the permutation x -> x + y."""
        return np.stack([self.add(np.arange(self.order), y) for y in range(self.order)])


@dataclass(frozen=True)
class GroupFn:
    spec: GroupSpec
    values: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.values, dtype=np.complex128)
        if table.shape != (self.spec.order,):
            raise ValueError(f"table must have {self.spec.order} entries, got {table.shape}")
        if np.any(np.abs(table) > 1.0 + 1e-12):
            raise ValueError("values must have modulus at most 1")
        table.setflags(write=False)
        object.__setattr__(self, "values", table)

    def mean(self) -> complex:
        return complex(np.mean(self.values))


@dataclass(frozen=True)
class GroupSpectrum:
    spec: GroupSpec
    coeffs: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.coeffs, dtype=np.complex128)
        if table.shape != (self.spec.order,):
            raise ValueError(f"table must have {self.spec.order} entries, got {table.shape}")
        table.setflags(write=False)
        object.__setattr__(self, "coeffs", table)


def group_character(spec: GroupSpec, label: int) -> GroupFn:
    """chi_label(x) = product over cyclic factors of exp(2*pi*i*g_j*x_j/m_j)."""
    if not 0 <= label < spec.order:
        raise ValueError(f"label must be in [0, {spec.order}), got {label}")
    g = spec.digits(label)[0]
    x = spec.digits(np.arange(spec.order))
    phase = np.zeros(spec.order)
    for j, m in enumerate(spec.moduli):
        phase += g[j] * x[:, j] / m
    values = np.exp(2j * np.pi * phase)
    mags = np.abs(values)
    return GroupFn(spec, values / np.maximum(mags, 1.0))


def _as_tensor(spec: GroupSpec, flat: np.ndarray) -> np.ndarray:
    # first factor varies fastest, so C-order axes run last factor first
    return flat.reshape(tuple(reversed(spec.moduli)))


def group_fourier(f: GroupFn) -> GroupSpectrum:
    tensor = _as_tensor(f.spec, np.asarray(f.values))
    return GroupSpectrum(f.spec, np.fft.fftn(tensor).reshape(-1) / f.spec.order)


def inverse_group_fourier(s: GroupSpectrum) -> GroupFn:
    tensor = _as_tensor(s.spec, np.asarray(s.coeffs))
    values = np.fft.ifftn(tensor).reshape(-1) * s.spec.order
    # rounding in the double FFT can push a modulus a hair past 1
    mags = np.abs(values)
    return GroupFn(s.spec, np.where(mags > 1.0, values / mags, values))


def _block_labels(spec: GroupSpec, i: int) -> np.ndarray:
    """For every group element index, the sub-index of its block-i part."""
    if not 1 <= i <= spec.n:
        raise ValueError(f"block index must be in [1, {spec.n}], got {i}")
    digits = spec.digits(np.arange(spec.order))
    which = np.array(spec.factor_block())
    sub = np.zeros(spec.order, dtype=np.int64)
    scale = 1
    for c in np.flatnonzero(which == i - 1):
        sub += digits[:, c] * scale
        scale *= spec.moduli[c]
    return sub


def group_influence(f: GroupFn, i: int) -> float:
    """Expected variance of f over coordinate block i, the others uniform."""
    sub = _block_labels(f.spec, i)
    block_order = math.prod(f.spec.blocks[i - 1])
    rest = f.spec.order // block_order
    # stable sort by block label leaves, inside each label run, the non-block
    # part in the same order, so rows of the reshape align pointwise
    by_label = np.argsort(sub, kind="stable")
    cols = f.values[by_label].reshape(block_order, rest)
    variances = np.mean(np.abs(cols) ** 2, axis=0) - np.abs(np.mean(cols, axis=0)) ** 2
    return float(np.mean(np.maximum(variances, 0.0)))


def group_influence_fourier(f: GroupFn, i: int) -> float:
    sub = _block_labels(f.spec, i)
    coeffs = group_fourier(f).coeffs
    return float(np.sum(np.abs(coeffs[sub != 0]) ** 2))


def group_derivative(f: GroupFn, y: int) -> GroupFn:
    """x -> f(x) * conj(f(x + y))."""
    shifted = f.values[f.spec.add(np.arange(f.spec.order), y)]
    prod = f.values * np.conj(shifted)
    mags = np.abs(prod)
    return GroupFn(f.spec, np.where(mags > 1.0, prod / mags, prod))


def _group_u2(spec: GroupSpec, tables: np.ndarray) -> np.ndarray:
    shape = tables.shape[:-1] + tuple(reversed(spec.moduli))
    axes = tuple(range(len(tables.shape) - 1, len(shape)))
    coeffs = np.fft.fftn(tables.reshape(shape), axes=axes).reshape(tables.shape) / spec.order
    return np.sum(np.abs(coeffs) ** 4, axis=-1)


def _group_u_exact(spec: GroupSpec, table: np.ndarray, dim: int, add_rows: np.ndarray) -> float:
    if dim == 1:
        return float(abs(np.mean(table)) ** 2)
    if dim == 2:
        return float(np.real(_group_u2(spec, table)))
    derivs = table[None, :] * np.conj(table[add_rows])
    if dim == 3:
        return math.fsum(np.real(_group_u2(spec, derivs))) / spec.order
    return math.fsum(
        _group_u_exact(spec, derivs[y], dim - 1, add_rows) for y in range(spec.order)
    ) / spec.order


def group_gowers_u(f: GroupFn, d: int, override_guard: bool = False) -> float:
    """Always a nonnegative real (up to rounding); odd cube levels conjugated."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    spec = f.spec
    if d == 1:
        return abs(f.mean()) ** 2
    check_guard(_ceil_log2(spec.order) * d, f"exact group U^{d} over order {spec.order}", override_guard)
    add_rows = spec.add_table() if d >= 3 else np.empty((0, 0), dtype=np.int64)
    return _group_u_exact(spec, np.asarray(f.values), d, add_rows)


def group_gowers_ip(c: list[GroupFn], override_guard: bool = False) -> complex:
    """Gowers inner product of 2^d functions indexed by subset masks of [d];
    slots with odd subset size enter conjugated."""
    size = len(c)
    d = size.bit_length() - 1
    if size != 1 << d or d < 1:
        raise ValueError(f"need 2^d functions for some d >= 1, got {size}")
    spec = c[0].spec
    if any(g.spec != spec for g in c):
        raise ValueError("all functions must share the same group")
    if d == 1:
        return complex(c[0].mean() * np.conj(c[1].mean()))
    order = spec.order
    check_guard(_ceil_log2(order) * (d + 1), f"exact group inner product at dimension {d}", override_guard)
    add_rows = spec.add_table()
    tables = [
        np.conj(g.values) if bin(s).count("1") % 2 else np.asarray(g.values)
        for s, g in enumerate(c)
    ]
    acc: list[complex] = []
    for t in range(order**d):
        shifts = []
        rem = t
        for _ in range(d):
            shifts.append(rem % order)
            rem //= order
        vec = np.ones(order, dtype=np.complex128)
        for s in range(size):
            sigma = 0
            for i in range(d):
                if (s >> i) & 1:
                    sigma = int(add_rows[shifts[i], sigma])
            vec *= tables[s][add_rows[sigma]]
        acc.append(complex(np.mean(vec)))
    total = math.fsum(v.real for v in acc) + 1j * math.fsum(v.imag for v in acc)
    return total / order**d


def random_group_fn(spec: GroupSpec, seed: int = 0, mode: str = "bounded") -> GroupFn:
    """Uniform unit-disc values ("bounded") or unit-modulus phases ("phase")."""
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=spec.order)
    if mode == "bounded":
        radii = np.sqrt(rng.uniform(0.0, 1.0, size=spec.order))
    elif mode == "phase":
        radii = np.ones(spec.order)
    else:
        raise ValueError(f"mode must be 'bounded' or 'phase', got {mode!r}")
    values = radii * np.exp(1j * angles)
    mags = np.abs(values)
    return GroupFn(spec, np.where(mags > 1.0, values / mags, values))


def find_influential_block(fns: list[GroupFn], t: int = 2) -> tuple[int, float]:
    """Block with the largest t-cross-influence across the collection."""
    if t < 2 or t > len(fns):
        raise ValueError(f"threshold must be in [2, {len(fns)}], got {t}")
    spec = fns[0].spec
    best_i, best_v = 1, -1.0
    for i in range(1, spec.n + 1):
        per = sorted((group_influence(g, i) for g in fns), reverse=True)
        v = per[t - 1]
        if v > best_v:
            best_i, best_v = i, v
    return best_i, best_v


# --- group function files ----------------------------------------------------

def group_fn_to_json(f: GroupFn) -> dict:
    return {
        "blocks": [list(b) for b in f.spec.blocks],
        "values": [[float(v.real), float(v.imag)] for v in f.values],
    }


def group_fn_from_json(obj: dict) -> GroupFn:
    spec = GroupSpec(tuple(tuple(b) for b in obj["blocks"]))
    values = np.array([complex(re, im) for re, im in obj["values"]])
    return GroupFn(spec, values)
