"""Distinguishing games for composed ideal ciphers.

A game instance puts an adversary in one of two worlds and hands it three
oracles. In world 1 the challenge oracle E evaluates the chosen composition
operator at hidden keys, through the *same* lazy cipher state that backs
the F and inverse oracles, so everything the adversary can see stays
jointly consistent. In world 2, E is an independent random permutation.
The hidden keys are sampled in both worlds; world 2 simply never consults
them (they matter only for the bad-event analysis).

Oracle queries are budgeted: at most q_max E-queries and t_max combined
F/inverse queries. Verbatim repeats are answered from a cache at zero cost,
so every adversary conforms to the no-repeated-query convention without
losing power.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cipher import CipherParams, IdealCipherState, LazyPermutation
from .errors import BudgetError, BudgetViolation, ConfigurationError, DomainError
from .seeding import (
    MIXED_ATTACK,
    MIXED_CIPHER,
    MIXED_CRUCIAL_KEYS,
    MIXED_WORLD2_PERM,
    SplitStream,
    splitmix64,
)
from .transcript import Transcript

_OPERATOR_KINDS = ("single", "dbl", "trp2", "cascade")


@dataclass(frozen=True)
class OperatorSpec:
    """A composition operator: single, dbl, trp2, or an m-fold cascade."""

    kind: str
    m: int = 0

    def __post_init__(self):
        if self.kind not in _OPERATOR_KINDS:
            raise ConfigurationError(f"unknown operator kind {self.kind!r}")
        if self.kind == "cascade":
            if self.m < 1:
                raise ConfigurationError("cascade fold count must be >= 1")
        elif self.m != 0:
            raise ConfigurationError(f"operator {self.kind!r} takes no fold count")

    @property
    def num_keys(self) -> int:
        if self.kind == "single":
            return 1
        if self.kind == "cascade":
            return self.m
        return 2

    def key_bits(self, kappa: int) -> int:
        """Key length of the composed cipher (kappa* = num_keys * kappa)."""
        return self.num_keys * kappa

    @property
    def name(self) -> str:
        return f"cascade:{self.m}" if self.kind == "cascade" else self.kind


SINGLE = OperatorSpec("single")
DBL = OperatorSpec("dbl")
TRP2 = OperatorSpec("trp2")


def cascade(m: int) -> OperatorSpec:
    return OperatorSpec("cascade", m)


def parse_operator(text: str) -> OperatorSpec:
    if text.startswith("cascade:"):
        try:
            return cascade(int(text.split(":", 1)[1]))
        except ValueError:
            raise ConfigurationError(f"bad cascade fold count in {text!r}")
    if text in ("single", "dbl", "trp2"):
        return OperatorSpec(text)
    raise ConfigurationError(f"unknown operator {text!r}")


@dataclass(frozen=True)
class CrucialKeys:
    """The hidden keys selecting the world-1 composed permutation."""

    keys: tuple[int, ...]

    def __iter__(self):
        return iter(self.keys)

    def __len__(self) -> int:
        return len(self.keys)


@dataclass(slots=True)
class OracleBudget:
    """Query allowances and running counters. Counters only increase."""

    q_max: int
    t_max: int
    q_used: int = 0
    t_used: int = 0

    def __post_init__(self):
        if self.q_max < 0 or self.t_max < 0:
            raise ConfigurationError("budgets must be non-negative")


class Adversary:
    """Base for oracle-driven distinguishers.

    Subclasses implement run(game, rng) -> bit, querying the game's oracles
    adaptively; rng is the adversary's own seed stream. `check` validates
    the attack against concrete parameters and budgets before any trials.
    """

    name = "adversary"
    deterministic = False

    def check(self, params: CipherParams, budget: OracleBudget) -> None:
        pass

    def run(self, game: "GameInstance", rng) -> int:
        raise NotImplementedError


class GameInstance:
    """One sampled world with budgeted E/F/inverse oracles.

    Confined to a single thread for its lifetime; parallelism happens at the
    trial level with one instance per trial. Transcript recording can be
    switched off for bulk Monte Carlo, which changes nothing observable.
    """

    __slots__ = (
        "world", "op", "params", "cipher", "transcript",
        "f_keys_seen", "_world2_perm", "_world2_rng", "_seed_mix", "_crucial",
        "_attack_rng", "_e_cache", "_f_cache", "_finv_cache",
        "_q_max", "_t_max", "_q_used", "_t_used", "_key_count", "_block_count",
    )

    def __init__(self, world, op, params, q_max, t_max, seed, record_transcript):
        self.world = world
        self.op = op
        self.params = params
        self._q_max = q_max
        self._t_max = t_max
        self._q_used = 0
        self._t_used = 0
        self._key_count = params.key_count
        self._block_count = params.block_count
        seed_mix = self._seed_mix = splitmix64(seed & 0xFFFFFFFFFFFFFFFF)
        self.cipher = IdealCipherState(params, splitmix64(seed_mix ^ MIXED_CIPHER))
        self.transcript = Transcript() if record_transcript else None
        self.f_keys_seen: set[int] = set()
        self._crucial = None
        self._attack_rng = None
        self._e_cache: dict[int, int] = {}
        self._f_cache: dict[tuple[int, int], int] = {}
        self._finv_cache: dict[tuple[int, int], int] = {}
        if world == 2:
            self._world2_perm = LazyPermutation(params.block_count)
            self._world2_rng = SplitStream(splitmix64(seed_mix ^ MIXED_WORLD2_PERM))
        else:
            self._world2_perm = None
            self._world2_rng = None

    @property
    def budget(self) -> OracleBudget:
        """Snapshot of the allowances and counters (a fresh view per access)."""
        budget = OracleBudget(self._q_max, self._t_max)
        budget.q_used = self._q_used
        budget.t_used = self._t_used
        return budget

    @property
    def crucial(self) -> CrucialKeys:
        """Hidden keys; drawn from their own stream on first access.

        Each component is uniform on [0, 2^kappa), independently; components
        may collide. Present in both worlds.
        """
        if self._crucial is None:
            rng = SplitStream(splitmix64(self._seed_mix ^ MIXED_CRUCIAL_KEYS))
            kappa = self.params.kappa
            self._crucial = CrucialKeys(
                tuple(rng.getrandbits(kappa) for _ in range(self.op.num_keys)))
        return self._crucial

    @property
    def world2_perm(self) -> LazyPermutation | None:
        return self._world2_perm

    @property
    def attack_rng(self) -> SplitStream:
        if self._attack_rng is None:
            self._attack_rng = SplitStream(splitmix64(self._seed_mix ^ MIXED_ATTACK))
        return self._attack_rng

    def _check_block(self, v: int, what: str) -> None:
        if not 0 <= v < self._block_count:
            raise DomainError(f"{what} {v} outside [0, 2^{self.params.n})")

    def _check_key(self, k: int) -> None:
        if not 0 <= k < self._key_count:
            raise DomainError(f"key {k} outside [0, 2^{self.params.kappa})")

    def _op_eval(self, x: int) -> int:
        """World-1 challenge evaluation through the shared cipher state.

        The intermediate values this forces are invisible to the adversary
        but binding for its later F/inverse queries; they consume no budget
        and leave no transcript moves.
        """
        keys = (self._crucial or self.crucial).keys
        cipher = self.cipher
        rng = cipher.rng
        row = cipher.row
        kind = self.op.kind
        if kind == "dbl":
            return row(keys[0]).sample_forward(row(keys[1]).sample_forward(x, rng), rng)
        if kind == "single":
            return row(keys[0]).sample_forward(x, rng)
        if kind == "trp2":
            r0 = row(keys[0])
            mid = row(keys[1]).sample_inverse(r0.sample_forward(x, rng), rng)
            return r0.sample_forward(mid, rng)
        y = x
        for k in reversed(keys):
            y = row(k).sample_forward(y, rng)
        return y

    def e_query(self, x: int) -> int:
        y = self._e_cache.get(x)
        if y is not None:
            return y
        if not 0 <= x < self._block_count:
            self._check_block(x, "block")
        if self._q_used >= self._q_max:
            raise BudgetError(f"E-query budget exhausted (q_max={self._q_max})")
        tr = self.transcript
        if tr is not None:
            tr.append(("E", None, x, None))
        if self.world == 1:
            y = self._op_eval(x)
        else:
            y = self._world2_perm.sample_forward(x, self._world2_rng)
        self._q_used += 1
        self._e_cache[x] = y
        if tr is not None:
            tr.append(("E", None, x, y))
        return y

    def f_query(self, k: int, x: int) -> int:
        y = self._f_cache.get((k, x))
        if y is not None:
            return y
        if not (0 <= k < self._key_count and 0 <= x < self._block_count):
            self._check_key(k)
            self._check_block(x, "block")
        if self._t_used >= self._t_max:
            raise BudgetError(f"F-query budget exhausted (t_max={self._t_max})")
        tr = self.transcript
        if tr is not None:
            tr.append(("F", k, x, None))
        cipher = self.cipher
        y = cipher.row(k).sample_forward(x, cipher.rng)
        self._t_used += 1
        self.f_keys_seen.add(k)
        self._f_cache[(k, x)] = y
        if tr is not None:
            tr.append(("F", k, x, y))
        return y

    def finv_query(self, k: int, y: int) -> int:
        x = self._finv_cache.get((k, y))
        if x is not None:
            return x
        if not (0 <= k < self._key_count and 0 <= y < self._block_count):
            self._check_key(k)
            self._check_block(y, "block")
        if self._t_used >= self._t_max:
            raise BudgetError(f"F-query budget exhausted (t_max={self._t_max})")
        tr = self.transcript
        if tr is not None:
            tr.append(("I", k, None, y))
        cipher = self.cipher
        x = cipher.row(k).sample_inverse(y, cipher.rng)
        self._t_used += 1
        self.f_keys_seen.add(k)
        self._finv_cache[(k, y)] = x
        if tr is not None:
            tr.append(("I", k, x, y))
        return x

    def bad_happened(self) -> bool:
        """True iff both hidden keys have appeared in F/inverse queries."""
        keys = self.crucial.keys
        if len(keys) != 2:
            raise ConfigurationError(
                f"bad event needs a two-key operator, {self.op.name} has {len(keys)}")
        seen = self.f_keys_seen
        return keys[0] in seen and keys[1] in seen

    def check_world1_consistency(self) -> None:
        """Re-derive every E reply by direct composition; assert equality."""
        assert self.world == 1
        for x, y in self._e_cache.items():
            assert self._op_eval(x) == y


def build_world(
    world: int,
    op: OperatorSpec,
    params: CipherParams,
    budget: OracleBudget,
    seed: int,
    record_transcript: bool = True,
) -> GameInstance:
    """Fresh game instance for the given world, with no queries made yet."""
    if world not in (1, 2):
        raise ConfigurationError(f"world must be 1 or 2, got {world}")
    if budget.q_max < 1:
        raise ConfigurationError("at least one E-query must be allowed (q_max >= 1)")
    if budget.q_used or budget.t_used:
        raise ConfigurationError("budget counters must start at zero")
    return GameInstance(world, op, params, budget.q_max, budget.t_max, seed,
                        record_transcript)


def run_adversary(game: GameInstance, adversary: Adversary) -> tuple[int, Transcript]:
    """Drive the adversary's adaptive query loop; return its bit and the view.

    A budget overrun aborts the run and surfaces as BudgetViolation carrying
    the counters and the partial transcript.
    """
    if game.transcript is None:
        raise ConfigurationError("run_adversary needs a transcript-recording game")
    if game._q_used or game._t_used or len(game.transcript):
        raise ConfigurationError("run_adversary needs a fresh game")
    try:
        decision = adversary.run(game, game.attack_rng)
    except BudgetError as exc:
        raise BudgetViolation(
            f"adversary exceeded its budget: {exc}",
            game._q_used, game._t_used, game.transcript) from exc
    return int(decision), game.transcript
