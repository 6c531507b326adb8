"""Linearity and long-code test simulators with exact acceptance probabilities.

Every test here checks a conjunction of +-1 equations, so its acceptance
probability expands, by the XOR lemma for indicator products, into an
average of 2^|E| correlation terms, one per subset of the checked
equations.  The exact routes compute each term by full enumeration after
cancelling even powers of the sign-valued oracle functions (a vertex
queried an even number of times inside a term drops out; under noise the
surviving functions are replaced by their noise-smoothed versions).  The
Monte Carlo routes simulate the published query procedure directly and
report a standard error, so exact and sampled answers can be compared at
any confidence multiple.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import check_guard
from .functions import (
    BoolFn,
    apply_noise,
    fn_from_json,
    fn_to_json,
    fourier,
    popcount,
    sample_mu_gamma_batch,
)
from .mc import run_chunked_mc


@dataclass(frozen=True)
class Hypergraph:
    """Test topology: t vertices, edges are distinct sorted subsets of size >= 2."""

    t: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"need at least one vertex, got t={self.t}")
        edges = tuple(tuple(sorted(e)) for e in self.edges)
        for e in edges:
            if len(e) < 2:
                raise ValueError(f"edges must have size >= 2, got {e}")
            if len(set(e)) != len(e) or any(not 1 <= v <= self.t for v in e):
                raise ValueError(f"edge {e} is not a set of vertices in [1, {self.t}]")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", edges)

    @property
    def query_count(self) -> int:
        return self.t + len(self.edges)


def complete_hypergraph(k: int, max_edge: int | None = None) -> Hypergraph:
    """All subsets of [k] of size 2..max_edge as edges."""
    if max_edge is None:
        max_edge = k
    edges = [tuple(c) for size in range(2, max_edge + 1) for c in combinations(range(1, k + 1), size)]
    return Hypergraph(k, tuple(edges))


@dataclass(frozen=True)
class LongCodeInputs:
    """Oracle functions for a hypergraph test: one per vertex, one per edge
    (edge order follows the hypergraph's edge list)."""

    vertex_fns: tuple[BoolFn, ...]
    edge_fns: tuple[BoolFn, ...]

    def __post_init__(self):
        fns = self.vertex_fns + self.edge_fns
        if not fns:
            raise ValueError("need at least one function")
        if any(f.n != fns[0].n for f in fns):
            raise ValueError("all functions must share the same arity")
        if any(not f.is_sign for f in fns):
            raise ValueError("long-code inputs must be sign-valued")

    @property
    def n(self) -> int:
        return self.vertex_fns[0].n


@dataclass(frozen=True)
class AcceptanceReport:
    probability: float
    method: str = "exact"
    samples: int = 0
    stderr: float = 0.0
    terms: dict[str, float] | None = None


# --- exact enumeration core ---------------------------------------------------

def _xor_grid_mean(n: int, t: int, factors: list[tuple[tuple[int, ...], np.ndarray]]) -> float:
    """Expectation over t independent uniform points of the product of
    factor tables, each evaluated at the XOR of its subset of the points."""
    total_bits = n * t
    mask = (1 << n) - 1
    chunk = 1 << min(total_bits, 18)
    partials = []
    for lo in range(0, 1 << total_bits, chunk):
        flat = np.arange(lo, lo + chunk, dtype=np.int64)
        coords = [(flat >> (n * i)) & mask for i in range(t)]
        prod = np.ones(chunk)
        for subset, table in factors:
            at = coords[subset[0] - 1].copy()
            for v in subset[1:]:
                at ^= coords[v - 1]
            prod *= table[at]
        partials.append(float(np.sum(prod)))
    return math.fsum(partials) / (1 << total_bits)


def _term_factors(
    edge_subset: tuple[int, ...],
    H: Hypergraph,
    vertex_tables: list[np.ndarray],
    edge_tables: list[np.ndarray],
) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Factors of one expansion term: odd-degree vertices keep one copy of
    their (possibly noised) function, even powers cancel; each selected edge
    contributes its function at the XOR of its vertices."""
    degree = [0] * (H.t + 1)
    for j in edge_subset:
        for v in H.edges[j]:
            degree[v] += 1
    factors: list[tuple[tuple[int, ...], np.ndarray]] = [
        ((v,), vertex_tables[v - 1]) for v in range(1, H.t + 1) if degree[v] % 2
    ]
    factors.extend((H.edges[j], edge_tables[j]) for j in edge_subset)
    return factors


def _subset_key(edge_subset: tuple[int, ...]) -> str:
    return ",".join(str(j) for j in edge_subset)


def _exact_xor_test(
    H: Hypergraph,
    vertex_tables: list[np.ndarray],
    edge_tables: list[np.ndarray],
    n: int,
    override_guard: bool,
    what: str,
) -> AcceptanceReport:
    check_guard(n * H.t, what, override_guard)
    terms: dict[str, float] = {}
    for picked in range(1 << len(H.edges)):
        edge_subset = tuple(j for j in range(len(H.edges)) if (picked >> j) & 1)
        factors = _term_factors(edge_subset, H, vertex_tables, edge_tables)
        terms[_subset_key(edge_subset)] = _xor_grid_mean(n, H.t, factors)
    probability = math.fsum(terms.values()) / (1 << len(H.edges))
    return AcceptanceReport(probability, terms=terms)


# --- BLR tests ----------------------------------------------------------------

def exact_blr(f: BoolFn) -> AcceptanceReport:
    """Acceptance of the two-query-plus-check linearity test: one half plus
    half the sum of cubed Fourier coefficients."""
    if not f.is_sign:
        raise ValueError("the linearity test is defined for sign functions")
    coeffs = fourier(f).coeffs
    return AcceptanceReport(0.5 + 0.5 * float(np.sum(coeffs**3)))


def exact_blr_enumerated(f: BoolFn) -> AcceptanceReport:
    """Same probability by brute force over all (x, y) pairs; oracle route."""
    if not f.is_sign:
        raise ValueError("the linearity test is defined for sign functions")
    corr = _xor_grid_mean(f.n, 2, [((1,), f.values), ((2,), f.values), ((1, 2), f.values)])
    return AcceptanceReport(0.5 + 0.5 * corr)


def exact_3fn_blr(f: BoolFn, g: BoolFn, h: BoolFn, delta: float = 0.0) -> AcceptanceReport:
    """Three-function linearity test, optionally with per-query noise delta.

    Noise multiplies the correlation term coefficientwise by
    (1-2*delta)^(3|S|), one damping factor per noisy query.
    """
    if not (f.n == g.n == h.n):
        raise ValueError("functions must share the same arity")
    if not (f.is_sign and g.is_sign and h.is_sign):
        raise ValueError("the linearity test is defined for sign functions")
    if not 0.0 <= delta <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {delta}")
    damp = (1.0 - 2.0 * delta) ** (3 * popcount(np.arange(f.size, dtype=np.uint32)))
    corr = float(np.sum(fourier(f).coeffs * fourier(g).coeffs * fourier(h).coeffs * damp))
    return AcceptanceReport(0.5 + 0.5 * corr)


def run_3fn_blr_mc(
    f: BoolFn,
    g: BoolFn,
    h: BoolFn,
    delta: float = 0.0,
    samples: int = 10000,
    seed: int = 0,
    threads: int = 1,
) -> AcceptanceReport:
    if not (f.n == g.n == h.n):
        raise ValueError("functions must share the same arity")
    if not 0.0 <= delta <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {delta}")
    n, size = f.n, f.size

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        x = rng.integers(0, size, count)
        y = rng.integers(0, size, count)
        e1 = sample_mu_gamma_batch(n, delta, rng, count)
        e2 = sample_mu_gamma_batch(n, delta, rng, count)
        e3 = sample_mu_gamma_batch(n, delta, rng, count)
        lhs = f.values[x ^ e1] * g.values[y ^ e2]
        rhs = h.values[x ^ y ^ e3]
        return (lhs == rhs).astype(np.float64)

    mean, err = run_chunked_mc(chunk, samples, seed, threads)
    return AcceptanceReport(mean, "monte_carlo", samples, err)


def run_blr_mc(f: BoolFn, samples: int = 10000, seed: int = 0, threads: int = 1) -> AcceptanceReport:
    return run_3fn_blr_mc(f, f, f, 0.0, samples, seed, threads)


# --- hypergraph tests -----------------------------------------------------------

def exact_h_test(H: Hypergraph, f: BoolFn, override_guard: bool = False) -> AcceptanceReport:
    """Single-function hypergraph linearity test: one equation per edge."""
    if not f.is_sign:
        raise ValueError("the hypergraph test is defined for sign functions")
    return _exact_xor_test(
        H,
        [f.values] * H.t,
        [f.values] * len(H.edges),
        f.n,
        override_guard,
        f"exact hypergraph test on {H.t} vertices at arity {f.n}",
    )


def run_h_test_mc(
    H: Hypergraph, f: BoolFn, samples: int = 10000, seed: int = 0, threads: int = 1
) -> AcceptanceReport:
    if not f.is_sign:
        raise ValueError("the hypergraph test is defined for sign functions")
    size = f.size

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        points = rng.integers(0, size, size=(H.t, count))
        ok = np.ones(count, dtype=bool)
        for e in H.edges:
            prod = np.ones(count)
            at = np.zeros(count, dtype=np.int64)
            for v in e:
                prod *= f.values[points[v - 1]]
                at ^= points[v - 1]
            ok &= prod == f.values[at]
        return ok.astype(np.float64)

    mean, err = run_chunked_mc(chunk, samples, seed, threads)
    return AcceptanceReport(mean, "monte_carlo", samples, err)


def exact_noisy_h_test(
    H: Hypergraph, gamma: float, inputs: LongCodeInputs, override_guard: bool = False
) -> AcceptanceReport:
    """Long-code test: one oracle function per vertex and per edge, every
    query smeared by rate-gamma bit noise."""
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {gamma}")
    if len(inputs.vertex_fns) != H.t or len(inputs.edge_fns) != len(H.edges):
        raise ValueError("inputs do not match the hypergraph shape")
    vertex_tables = [apply_noise(g, gamma).values for g in inputs.vertex_fns]
    edge_tables = [apply_noise(g, gamma).values for g in inputs.edge_fns]
    return _exact_xor_test(
        H,
        vertex_tables,
        edge_tables,
        inputs.n,
        override_guard,
        f"exact noisy hypergraph test on {H.t} vertices at arity {inputs.n}",
    )


def run_noisy_h_test_mc(
    H: Hypergraph,
    gamma: float,
    inputs: LongCodeInputs,
    samples: int = 10000,
    seed: int = 0,
    threads: int = 1,
) -> AcceptanceReport:
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {gamma}")
    if len(inputs.vertex_fns) != H.t or len(inputs.edge_fns) != len(H.edges):
        raise ValueError("inputs do not match the hypergraph shape")
    n = inputs.n
    size = 1 << n

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        points = rng.integers(0, size, size=(H.t, count))
        noisy_points = [points[i] ^ sample_mu_gamma_batch(n, gamma, rng, count) for i in range(H.t)]
        ok = np.ones(count, dtype=bool)
        for j, e in enumerate(H.edges):
            eta_e = sample_mu_gamma_batch(n, gamma, rng, count)
            prod = np.ones(count)
            at = np.zeros(count, dtype=np.int64)
            for v in e:
                prod *= inputs.vertex_fns[v - 1].values[noisy_points[v - 1]]
                at ^= points[v - 1]
            ok &= prod == inputs.edge_fns[j].values[at ^ eta_e]
        return ok.astype(np.float64)

    mean, err = run_chunked_mc(chunk, samples, seed, threads)
    return AcceptanceReport(mean, "monte_carlo", samples, err)


# --- even covers ----------------------------------------------------------------

def _label_family(H: Hypergraph) -> list[tuple[int, ...]]:
    """Singletons first, then edges in declared order."""
    return [(v,) for v in range(1, H.t + 1)] + list(H.edges)


def _edge_vectors(H: Hypergraph) -> list[int]:
    """For each edge, the indicator over the label family marking the edge
    itself and the vertices it passes through."""
    family = _label_family(H)
    position = {lbl: j for j, lbl in enumerate(family)}
    vectors = []
    for e in H.edges:
        v = 1 << position[e]
        for vert in e:
            v |= 1 << position[(vert,)]
        vectors.append(v)
    return vectors


def _span(vectors: list[int]) -> tuple[list[int], int]:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    members = [0]
    for b in basis:
        members += [m ^ b for m in members]
    return sorted(members), len(basis)


def is_even_cover(family: list[tuple[int, ...]], t: int, d: int) -> bool:
    """Every nonempty vertex subset of size at most d is contained in an even
    number of the family's sets."""
    sets = [frozenset(s) for s in family]
    for size in range(1, d + 1):
        for sub in combinations(range(1, t + 1), size):
            subset = frozenset(sub)
            if sum(subset <= s for s in sets) % 2:
                return False
    return True


def even_cover_members(H: Hypergraph, d: int) -> tuple[list[list[tuple[int, ...]]], int]:
    """Even-cover families within the span of the edge vectors, plus the
    span's dimension."""
    family = _label_family(H)
    members, rank = _span(_edge_vectors(H))
    covers = []
    for u in members:
        picked = [family[j] for j in range(len(family)) if (u >> j) & 1]
        if is_even_cover(picked, H.t, d):
            covers.append(picked)
    return covers, rank


def even_cover_count(H: Hypergraph, d: int) -> int:
    covers, _ = even_cover_members(H, d)
    return len(covers)


def family_expectation(f: BoolFn, family: list[tuple[int, ...]], t: int, override_guard: bool = False) -> float:
    """E over t uniform points of the product of f at the XOR of each set."""
    check_guard(f.n * t, f"family expectation on {t} points at arity {f.n}", override_guard)
    return _xor_grid_mean(f.n, t, [(s, f.values) for s in family])


# --- files -----------------------------------------------------------------------

def hypergraph_to_json(H: Hypergraph) -> dict:
    return {"t": H.t, "edges": [list(e) for e in H.edges]}


def hypergraph_from_json(obj: dict) -> Hypergraph:
    return Hypergraph(int(obj["t"]), tuple(tuple(e) for e in obj["edges"]))


def load_hypergraph(path: str) -> Hypergraph:
    with open(path) as fh:
        return hypergraph_from_json(json.load(fh))


def inputs_to_json(inputs: LongCodeInputs) -> dict:
    return {
        "vertices": [fn_to_json(f) for f in inputs.vertex_fns],
        "edges": [fn_to_json(f) for f in inputs.edge_fns],
    }


def inputs_from_json(obj: dict) -> LongCodeInputs:
    return LongCodeInputs(
        tuple(fn_from_json(o) for o in obj["vertices"]),
        tuple(fn_from_json(o) for o in obj["edges"]),
    )
