"""Unique games, proof tables, the composed long-code verifier, and decoding.

A q-ary unique game constraint names q variables and q alphabet
permutations; an assignment satisfies it strongly when all permuted images
agree, weakly when at least two collide.  A proof writes one sign function
of arity sigma per variable.  The composed verifier picks a constraint,
folds and permutes the named proof tables, assigns them to the hypergraph
slots (vertices first, then edges in declared order), and runs one round
of the noisy hypergraph long-code test.  The decoder reads each table back
to a letter through its large low-degree influences after folding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ResourceLimitError
from .functions import (
    BoolFn,
    fn_from_json,
    fn_to_json,
    fold,
    make_long_code,
    permute,
    random_fn,
    sample_mu_gamma_batch,
)
from .influence import degree_influence
from .mc import run_chunked_mc
from .testing import Hypergraph, LongCodeInputs, exact_noisy_h_test

SOLVE_GUARD = 10**7


@dataclass(frozen=True)
class Constraint:
    vars: tuple[int, ...]
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.vars) != len(self.perms) or not self.vars:
            raise ValueError("constraint needs matching nonempty vars and perms")


@dataclass(frozen=True)
class UniqueGame:
    sigma: int
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if self.sigma < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.sigma}")
        if not self.constraints:
            raise ValueError("need at least one constraint")
        letters = list(range(self.sigma))
        arity = len(self.constraints[0].vars)
        for c in self.constraints:
            if len(c.vars) != arity:
                raise ValueError("all constraints must share the same arity")
            for v in c.vars:
                if not 0 <= v < len(self.variables):
                    raise ValueError(f"variable index {v} out of range")
            for p in c.perms:
                if sorted(p) != letters:
                    raise ValueError(f"{p} is not a permutation of the alphabet")

    @property
    def arity(self) -> int:
        return len(self.constraints[0].vars)


@dataclass(frozen=True)
class GameValueReport:
    strong_value: float
    weak_value: float
    best_assignment: tuple[int, ...]  # attains the strong optimum


@dataclass(frozen=True)
class PcpProof:
    sigma: int
    functions: tuple[BoolFn, ...]  # one sign table of arity sigma per variable

    def __post_init__(self):
        for f in self.functions:
            if f.n != self.sigma:
                raise ValueError("proof tables must have arity sigma")
            if not f.is_sign:
                raise ValueError("proof tables must be sign-valued")


def binary_constraint(x: int, y: int, perm: tuple[int, ...]) -> Constraint:
    """The classic two-variable form y = perm(x), padded with an identity."""
    return Constraint((x, y), (tuple(perm), tuple(range(len(perm)))))


def _satisfaction(c: Constraint, assignment: tuple[int, ...]) -> tuple[bool, bool]:
    images = [c.perms[j][assignment[v]] for j, v in enumerate(c.vars)]
    strong = all(img == images[0] for img in images)
    weak = len(set(images)) < len(images)
    return strong, strong or weak


def assignment_values(g: UniqueGame, assignment: tuple[int, ...]) -> tuple[float, float]:
    """Fractions of constraints the assignment satisfies strongly and weakly."""
    strong = weak = 0
    for c in g.constraints:
        s, w = _satisfaction(c, assignment)
        strong += s
        weak += w
    return strong / len(g.constraints), weak / len(g.constraints)


def solve_unique_game(g: UniqueGame, override_guard: bool = False) -> GameValueReport:
    """Exhaustive optimum of the strong and weak values."""
    space = g.sigma ** len(g.variables)
    if space > SOLVE_GUARD and not override_guard:
        raise ResourceLimitError(
            f"exhaustive search over {space} assignments exceeds {SOLVE_GUARD}; "
            "pass override_guard=True to run anyway"
        )
    best_strong, best_weak, best_assignment = -1, -1, None
    m = len(g.constraints)
    for assignment in product(range(g.sigma), repeat=len(g.variables)):
        strong = weak = 0
        for c in g.constraints:
            s, w = _satisfaction(c, assignment)
            strong += s
            weak += w
        if strong > best_strong:
            best_strong, best_assignment = strong, assignment
        if weak > best_weak:
            best_weak = weak
    return GameValueReport(best_strong / m, best_weak / m, best_assignment)


def random_unique_game(
    sigma: int, n_vars: int, n_constraints: int, arity: int, seed: int = 0
) -> UniqueGame:
    rng = np.random.default_rng(seed)
    constraints = []
    for _ in range(n_constraints):
        vars_ = tuple(int(v) for v in rng.choice(n_vars, size=arity, replace=False))
        perms = tuple(tuple(int(x) for x in rng.permutation(sigma)) for _ in range(arity))
        constraints.append(Constraint(vars_, perms))
    names = tuple(f"v{i + 1}" for i in range(n_vars))
    return UniqueGame(sigma, names, tuple(constraints))


def honest_proof(g: UniqueGame, assignment: tuple[int, ...]) -> PcpProof:
    """Long code of each variable's assigned letter."""
    if len(assignment) != len(g.variables):
        raise ValueError("assignment must cover every variable")
    if any(not 0 <= a < g.sigma for a in assignment):
        raise ValueError("assignment letters out of range")
    return PcpProof(g.sigma, tuple(make_long_code(g.sigma, a + 1) for a in assignment))


def random_proof(g: UniqueGame, seed: int = 0) -> PcpProof:
    return PcpProof(
        g.sigma,
        tuple(random_fn(g.sigma, "sign", seed=seed + 31 * i) for i in range(len(g.variables))),
    )


def _one_based(perm: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p + 1 for p in perm)


def constraint_inputs(g: UniqueGame, proof: PcpProof, H: Hypergraph, cid: int) -> LongCodeInputs:
    """Folded, permuted proof tables for one constraint, in slot order:
    vertices 1..t first, then edges in declared order."""
    c = g.constraints[cid]
    q = H.t + len(H.edges)
    if g.arity != q:
        raise ValueError(f"constraint arity {g.arity} must equal t + |E| = {q}")
    slots = [permute(fold(proof.functions[v]), _one_based(c.perms[j])) for j, v in enumerate(c.vars)]
    return LongCodeInputs(tuple(slots[: H.t]), tuple(slots[H.t :]))


def composed_round(
    g: UniqueGame, proof: PcpProof, H: Hypergraph, gamma: float, rng: np.random.Generator
) -> bool:
    """One verifier round: uniform constraint, then one noisy hypergraph round."""
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {gamma}")
    cid = int(rng.integers(len(g.constraints)))
    inputs = constraint_inputs(g, proof, H, cid)
    n = g.sigma
    points = [int(p) for p in rng.integers(0, 1 << n, size=H.t)]
    noisy = [p ^ int(sample_mu_gamma_batch(n, gamma, rng, 1)[0]) for p in points]
    for j, e in enumerate(H.edges):
        eta = int(sample_mu_gamma_batch(n, gamma, rng, 1)[0])
        prod = 1.0
        at = 0
        for v in e:
            prod *= inputs.vertex_fns[v - 1].values[noisy[v - 1]]
            at ^= points[v - 1]
        if prod != inputs.edge_fns[j].values[at ^ eta]:
            return False
    return True


@dataclass(frozen=True)
class CompositionReport:
    acceptance: float
    stderr: float
    rounds: int
    baseline: float  # the expansion's constant term 2^-|E|
    exact_acceptance: float | None = None


def run_composed_mc(
    g: UniqueGame,
    proof: PcpProof,
    H: Hypergraph,
    gamma: float,
    rounds: int,
    seed: int = 0,
    threads: int = 1,
) -> CompositionReport:
    """Acceptance frequency of the composed verifier over many rounds.

    Rounds are batched per sampled constraint; the slot tables per
    constraint are prepared once up front.
    """
    if not 0.0 <= gamma <= 0.5:
        raise ValueError(f"noise rate must be in [0, 1/2], got {gamma}")
    per_constraint = [constraint_inputs(g, proof, H, cid) for cid in range(len(g.constraints))]
    n = g.sigma
    size = 1 << n

    def chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        cids = rng.integers(0, len(g.constraints), size=count)
        accept = np.zeros(count, dtype=np.float64)
        for cid in range(len(g.constraints)):
            rows = np.flatnonzero(cids == cid)
            if rows.size == 0:
                continue
            inputs = per_constraint[cid]
            b = rows.size
            points = rng.integers(0, size, size=(H.t, b))
            noisy = [points[i] ^ sample_mu_gamma_batch(n, gamma, rng, b) for i in range(H.t)]
            ok = np.ones(b, dtype=bool)
            for j, e in enumerate(H.edges):
                eta = sample_mu_gamma_batch(n, gamma, rng, b)
                prod = np.ones(b)
                at = np.zeros(b, dtype=np.int64)
                for v in e:
                    prod *= inputs.vertex_fns[v - 1].values[noisy[v - 1]]
                    at ^= points[v - 1]
                ok &= prod == inputs.edge_fns[j].values[at ^ eta]
            accept[rows] = ok
        return accept

    mean, err = run_chunked_mc(chunk, rounds, seed, threads)
    return CompositionReport(mean, err, rounds, 0.5 ** len(H.edges))


def exact_composed_acceptance(
    g: UniqueGame, proof: PcpProof, H: Hypergraph, gamma: float, override_guard: bool = False
) -> float:
    """Average over constraints of the exact noisy-test acceptance."""
    per = [
        exact_noisy_h_test(H, gamma, constraint_inputs(g, proof, H, cid), override_guard).probability
        for cid in range(len(g.constraints))
    ]
    return math.fsum(per) / len(per)


def decode(proof: PcpProof, d: int, tau: float, seed: int = 0) -> tuple[int, ...]:
    """Read an assignment back from a proof.

    Per variable: fold the table, collect coordinates with degree-d influence
    at least tau (never more than d/tau of them by the influence counting
    bound), and pick one uniformly; an empty candidate set falls back to a
    uniform letter.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {tau}")
    if d < 1:
        raise ValueError(f"degree bound must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    letters = []
    for f in proof.functions:
        folded = fold(f)
        candidates = [
            i for i in range(1, proof.sigma + 1) if degree_influence(folded, i, d) >= tau
        ]
        if len(candidates) > d / tau + 1e-9:
            raise AssertionError("candidate set exceeds the influence counting bound")
        if candidates:
            letters.append(candidates[int(rng.integers(len(candidates)))] - 1)
        else:
            letters.append(int(rng.integers(proof.sigma)))
    return tuple(letters)


# --- files -----------------------------------------------------------------------

def proof_to_json(proof: PcpProof) -> dict:
    from .functions import fn_to_json

    return {"sigma": proof.sigma, "functions": [fn_to_json(f) for f in proof.functions]}


def proof_from_json(obj: dict) -> PcpProof:
    from .functions import fn_from_json

    return PcpProof(int(obj["sigma"]), tuple(fn_from_json(o) for o in obj["functions"]))


def game_to_json(g: UniqueGame) -> dict:
    return {
        "sigma": g.sigma,
        "variables": list(g.variables),
        "constraints": [
            {"vars": list(c.vars), "perms": [list(p) for p in c.perms]} for c in g.constraints
        ],
    }


def game_from_json(obj: dict) -> UniqueGame:
    constraints = tuple(
        Constraint(tuple(c["vars"]), tuple(tuple(p) for p in c["perms"]))
        for c in obj["constraints"]
    )
    return UniqueGame(int(obj["sigma"]), tuple(obj["variables"]), constraints)


def load_game(path: str) -> UniqueGame:
    with open(path) as fh:
        return game_from_json(json.load(fh))
