"""Lazily sampled ideal block ciphers.

An ideal cipher with key bits `kappa` and block bits `n` is a family of
2^kappa independent, uniformly random permutations of [0, 2^n). Rows are
materialized one queried point at a time, so memory stays proportional to
the number of distinct queries even for 56-bit keys and 64-bit blocks. An
eager sampler produces complete tables at tiny parameters so the lazy
scheme can be validated against the ground-truth distribution.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2_contingency

from .errors import ConfigurationError, DomainError
from .seeding import SplitStream, derive_seed

# Blocks and keys are plain unsigned ints; cap widths at one machine word.
MAX_BITS = 64

# Guard for anything that materializes full tables (2^kappa rows of 2^n).
EAGER_MAX_BITS = 8


@dataclass(frozen=True)
class CipherParams:
    """Key length `kappa` and block length `n`, both in bits."""

    kappa: int
    n: int

    def __post_init__(self):
        if not 1 <= self.kappa <= MAX_BITS:
            raise ConfigurationError(
                f"key bits must be in [1, {MAX_BITS}], got {self.kappa}")
        if not 1 <= self.n <= MAX_BITS:
            raise ConfigurationError(
                f"block bits must be in [1, {MAX_BITS}], got {self.n}")

    @property
    def key_count(self) -> int:
        return 1 << self.kappa

    @property
    def block_count(self) -> int:
        return 1 << self.n


def sample_outside(rng, used_sorted: list[int], domain_size: int) -> int:
    """Uniform draw from [0, domain_size) minus the sorted values `used_sorted`.

    Draws a rank among the free values, then shifts it past every used value
    at or below it. Exactly one RNG call per draw and O(len(used)) work, so
    huge domains never need a materialized free list.
    """
    r = rng.randrange(domain_size - len(used_sorted))
    for u in used_sorted:
        if u <= r:
            r += 1
        else:
            break
    return r


class LazyPermutation:
    """A permutation of [0, domain_size) fixed one point at a time.

    `forward` and `inverse` are mutually consistent partial bijections.
    Unfixed points are sampled uniformly from the values still free on the
    queried side, which realizes a uniformly random permutation exactly.
    The draw is inlined in the two sample methods (same rank-among-free
    scheme as `sample_outside`, same bit-rejection as Random.randrange);
    they sit on the hot path of every Monte Carlo trial.
    """

    __slots__ = ("domain_size", "forward", "inverse", "_used_inputs", "_used_outputs")

    def __init__(self, domain_size: int):
        self.domain_size = domain_size
        self.forward: dict[int, int] = {}
        self.inverse: dict[int, int] = {}
        self._used_inputs: list[int] = []
        self._used_outputs: list[int] = []

    def __len__(self) -> int:
        return len(self.forward)

    def sample_forward(self, x: int, rng: SplitStream) -> int:
        y = self.forward.get(x)
        if y is None:
            used = self._used_outputs
            free = self.domain_size - len(used)
            if free & (free - 1):
                bits = free.bit_length()
                getrandbits = rng.getrandbits
                y = getrandbits(bits)
                while y >= free:
                    y = getrandbits(bits)
            else:
                y = rng.getrandbits(free.bit_length() - 1) if free > 1 else 0
            for u in used:
                if u <= y:
                    y += 1
                else:
                    break
            self.forward[x] = y
            self.inverse[y] = x
            insort(self._used_inputs, x)
            insort(used, y)
        return y

    def sample_inverse(self, y: int, rng: SplitStream) -> int:
        x = self.inverse.get(y)
        if x is None:
            used = self._used_inputs
            free = self.domain_size - len(used)
            if free & (free - 1):
                bits = free.bit_length()
                getrandbits = rng.getrandbits
                x = getrandbits(bits)
                while x >= free:
                    x = getrandbits(bits)
            else:
                x = rng.getrandbits(free.bit_length() - 1) if free > 1 else 0
            for u in used:
                if u <= x:
                    x += 1
                else:
                    break
            self.forward[x] = y
            self.inverse[y] = x
            insort(used, x)
            insort(self._used_outputs, y)
        return x

    def check_consistent(self) -> None:
        """Assert the partial-bijection invariants; used by property tests."""
        assert len(self.forward) == len(self.inverse) <= self.domain_size
        for x, y in self.forward.items():
            assert 0 <= x < self.domain_size and 0 <= y < self.domain_size
            assert self.inverse[y] == x
        assert self._used_inputs == sorted(self.forward)
        assert self._used_outputs == sorted(self.inverse)


class IdealCipherState:
    """One sampled ideal cipher: an independent lazy permutation per key.

    Rows are created on first touch; re-querying any fixed point returns the
    same answer forever. A given (seed, query sequence) fully determines all
    answers.
    """

    __slots__ = ("params", "rows", "rng", "_block_count")

    def __init__(self, params: CipherParams, seed: int):
        self.params = params
        self.rows: dict[int, LazyPermutation] = {}
        self.rng = SplitStream(seed)
        self._block_count = params.block_count

    def row(self, k: int) -> LazyPermutation:
        r = self.rows.get(k)
        if r is None:
            r = self.rows[k] = LazyPermutation(self._block_count)
        return r

    def f_forward(self, k: int, x: int) -> int:
        if not 0 <= k < self.params.key_count:
            raise DomainError(f"key {k} outside [0, 2^{self.params.kappa})")
        if not 0 <= x < self._block_count:
            raise DomainError(f"block {x} outside [0, 2^{self.params.n})")
        return self.row(k).sample_forward(x, self.rng)

    def f_inverse(self, k: int, y: int) -> int:
        if not 0 <= k < self.params.key_count:
            raise DomainError(f"key {k} outside [0, 2^{self.params.kappa})")
        if not 0 <= y < self._block_count:
            raise DomainError(f"block {y} outside [0, 2^{self.params.n})")
        return self.row(k).sample_inverse(y, self.rng)

    def sampled_points(self) -> int:
        return sum(len(r) for r in self.rows.values())


def new_ideal_cipher(params: CipherParams, seed: int) -> IdealCipherState:
    """Fresh lazy cipher state with no permutation values fixed yet."""
    return IdealCipherState(params, seed)


def eager_sample(params: CipherParams, seed: int) -> list[list[int]]:
    """Complete cipher table: 2^kappa rows, each a fresh uniform permutation.

    Rows are shuffled independently (Fisher-Yates) in key order. Refuses
    parameters beyond the eager guard to avoid runaway allocation.
    """
    if params.kappa > EAGER_MAX_BITS or params.n > EAGER_MAX_BITS:
        raise ConfigurationError(
            f"eager tables need kappa <= {EAGER_MAX_BITS} and n <= {EAGER_MAX_BITS}, "
            f"got kappa={params.kappa}, n={params.n}")
    rng = SplitStream(seed)
    table = []
    for _ in range(params.key_count):
        row = list(range(params.block_count))
        rng.shuffle(row)
        table.append(row)
    return table


@dataclass(frozen=True)
class CellCheck:
    """Homogeneity test for one (key, block) cell: lazy answers vs eager answers."""

    key: int
    x: int
    statistic: float
    p_value: float
    rejected: bool


@dataclass(frozen=True)
class JointCheck:
    """Homogeneity test over complete answer tuples (the joint distribution)."""

    outcomes: int
    statistic: float
    p_value: float
    rejected: bool


@dataclass(frozen=True)
class EquivalenceReport:
    params: CipherParams
    trials: int
    significance: float
    cells: list[CellCheck] = field(default_factory=list)
    joint: JointCheck | None = None

    @property
    def any_rejected(self) -> bool:
        if any(c.rejected for c in self.cells):
            return True
        return self.joint is not None and self.joint.rejected


# Expected-count floor for the joint chi-square to be trustworthy.
_JOINT_MIN_EXPECTED = 5


def lazy_eager_equivalence_check(
    params: CipherParams,
    trials: int,
    seed: int = 0,
    significance: float = 0.001,
) -> EquivalenceReport:
    """Check that lazy sampling realizes the same distribution as eager tables.

    Per trial, queries every cell of a fresh lazy state in a fixed order and
    draws a fresh eager table; compares answer counts per cell with a
    two-sample chi-square. When trials suffice, the complete answer tuples
    are also compared as one categorical outcome (the joint distribution).
    """
    if params.kappa > EAGER_MAX_BITS or params.n > EAGER_MAX_BITS:
        raise ConfigurationError("equivalence check requires eager-guard parameters")
    if trials == 0:
        return EquivalenceReport(params, 0, significance)

    key_count, block_count = params.key_count, params.block_count
    lazy_counts = np.zeros((key_count, block_count, block_count), dtype=np.int64)
    eager_counts = np.zeros_like(lazy_counts)
    lazy_joint: dict[tuple, int] = {}
    eager_joint: dict[tuple, int] = {}

    for i in range(trials):
        state = IdealCipherState(params, derive_seed(seed, 0, i))
        answers = []
        for k in range(key_count):
            for x in range(block_count):
                y = state.f_forward(k, x)
                lazy_counts[k, x, y] += 1
                answers.append(y)
        tup = tuple(answers)
        lazy_joint[tup] = lazy_joint.get(tup, 0) + 1

        table = eager_sample(params, derive_seed(seed, 1, i))
        answers = []
        for k in range(key_count):
            row = table[k]
            for x in range(block_count):
                eager_counts[k, x, row[x]] += 1
                answers.append(row[x])
        tup = tuple(answers)
        eager_joint[tup] = eager_joint.get(tup, 0) + 1

    cells = []
    for k in range(key_count):
        for x in range(block_count):
            pair = np.vstack([lazy_counts[k, x], eager_counts[k, x]])
            pair = pair[:, pair.sum(axis=0) > 0]
            stat, p, _, _ = chi2_contingency(pair)
            cells.append(CellCheck(k, x, float(stat), float(p), p < significance))

    joint = None
    outcomes = sorted(set(lazy_joint) | set(eager_joint))
    if trials >= _JOINT_MIN_EXPECTED * len(outcomes):
        pair = np.array([
            [lazy_joint.get(o, 0) for o in outcomes],
            [eager_joint.get(o, 0) for o in outcomes],
        ])
        stat, p, _, _ = chi2_contingency(pair)
        joint = JointCheck(len(outcomes), float(stat), float(p), p < significance)

    return EquivalenceReport(params, trials, significance, cells, joint)
