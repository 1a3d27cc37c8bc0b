"""Advantage estimation: Monte Carlo trials and an exact enumeration oracle.

The Monte Carlo estimator runs the adversary through independent games in
each world and reports the difference of output-1 frequencies with a
confidence interval. Per-trial seeds derive from (master seed, world,
trial index) only, so estimates are reproducible bit-for-bit and identical
for any worker count.

The exact oracle enumerates, at tiny parameters, every complete cipher
table, every hidden-key tuple, and every world-2 challenge permutation,
runs a deterministic adversary on each, and returns the advantage as exact
rationals. It deliberately shares nothing with the lazy game machinery it
is used to validate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool

from .attacks import MitmConfig  # noqa: F401  (re-exported for convenience)
from .cipher import CipherParams
from .errors import BudgetError, ConfigurationError, DomainError
from .game import Adversary, GameInstance, OperatorSpec, OracleBudget, build_world
from .seeding import splitmix64
from .stats import clopper_pearson, diff_std_err, z_quantile

CONFIDENCE_LEVELS = (0.95, 0.99, 0.999)

# Below this count in any cell of the 2x2 success table, the normal
# approximation is replaced by the conservative exact fallback.
_NORMAL_MIN_COUNT = 10


def confidence_interval(
    successes1: int,
    successes2: int,
    trials: int,
    level: float,
) -> tuple[float, float]:
    """Two-proportion interval for the difference p1 - p2.

    Normal approximation: (p1 - p2) +/- z * sqrt(p1(1-p1)/n + p2(1-p2)/n).
    When any of the four counts (successes or failures per world) is below
    10, falls back to per-world Clopper-Pearson intervals at confidence
    1 - (1-level)/2 each, combined by interval arithmetic
    [lo1 - hi2, hi1 - lo2]; by a union bound the pair covers jointly with
    probability >= level, so the fallback is conservative.
    """
    if trials <= 0:
        raise DomainError("trials must be positive")
    if level not in CONFIDENCE_LEVELS:
        raise ConfigurationError(f"level must be one of {CONFIDENCE_LEVELS}")
    for s in (successes1, successes2):
        if not 0 <= s <= trials:
            raise DomainError("successes must lie in [0, trials]")

    counts = (successes1, trials - successes1, successes2, trials - successes2)
    if min(counts) < _NORMAL_MIN_COUNT:
        alpha = (1.0 - level) / 2.0
        lo1, hi1 = clopper_pearson(successes1, trials, alpha)
        lo2, hi2 = clopper_pearson(successes2, trials, alpha)
        return lo1 - hi2, hi1 - lo2

    diff = successes1 / trials - successes2 / trials
    half = z_quantile(level) * diff_std_err(successes1, successes2, trials)
    return diff - half, diff + half


@dataclass(frozen=True)
class AdvantageEstimate:
    """Empirical world frequencies, their difference, and its interval."""

    p1_hat: float
    p2_hat: float
    adv_hat: float
    trials_per_world: int
    ci_low: float
    ci_high: float
    level: float
    successes1: int
    successes2: int
    bad_freq_w1: float | None = None
    bad_freq_w2: float | None = None

    @property
    def std_err(self) -> float:
        """Standard error of adv_hat."""
        return diff_std_err(self.successes1, self.successes2, self.trials_per_world)


def _world_block(args) -> tuple[int, int]:
    attack, op, params, q_max, t_max, master, world, lo, hi, record_bad = args
    successes = 0
    bad = 0
    run = attack.run
    deterministic = attack.deterministic
    # Trial seed = derive_seed(master, world, trial), with the fixed prefix
    # mixed once outside the loop.
    world_mix = splitmix64(splitmix64(master & 0xFFFFFFFFFFFFFFFF) ^ splitmix64(world))
    for trial in range(lo, hi):
        game = GameInstance(
            world, op, params, q_max, t_max,
            splitmix64(world_mix ^ splitmix64(trial)), record_transcript=False)
        successes += run(game, None if deterministic else game.attack_rng)
        if record_bad and game.bad_happened():
            bad += 1
    return successes, bad


def _tally_world(attack, op, params, budget, master, world, trials, record_bad, workers):
    if workers <= 1 or trials < 2 * workers:
        return _world_block(
            (attack, op, params, budget.q_max, budget.t_max, master, world,
             0, trials, record_bad))
    bounds = [trials * i // workers for i in range(workers + 1)]
    blocks = [
        (attack, op, params, budget.q_max, budget.t_max, master, world,
         bounds[i], bounds[i + 1], record_bad)
        for i in range(workers)
    ]
    with Pool(workers) as pool:
        parts = pool.map(_world_block, blocks)
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def estimate_advantage(
    attack: Adversary,
    op: OperatorSpec,
    params: CipherParams,
    budget: OracleBudget,
    trials: int,
    seed: int,
    record_bad: bool = False,
    level: float = 0.95,
    workers: int = 1,
) -> AdvantageEstimate:
    """Monte Carlo advantage over `trials` independent games per world."""
    if trials < 1:
        raise ConfigurationError("at least one trial per world is required")
    if record_bad and op.num_keys != 2:
        raise ConfigurationError(
            f"bad-event recording needs a two-key operator, {op.name} has {op.num_keys}")
    if budget.q_max < 1:
        raise ConfigurationError("at least one E-query must be allowed (q_max >= 1)")
    if budget.q_used or budget.t_used:
        raise ConfigurationError("budget counters must start at zero")
    attack.check(params, budget)

    s1, bad1 = _tally_world(attack, op, params, budget, seed, 1, trials, record_bad, workers)
    s2, bad2 = _tally_world(attack, op, params, budget, seed, 2, trials, record_bad, workers)
    ci_low, ci_high = confidence_interval(s1, s2, trials, level)
    return AdvantageEstimate(
        p1_hat=s1 / trials,
        p2_hat=s2 / trials,
        adv_hat=s1 / trials - s2 / trials,
        trials_per_world=trials,
        ci_low=ci_low,
        ci_high=ci_high,
        level=level,
        successes1=s1,
        successes2=s2,
        bad_freq_w1=bad1 / trials if record_bad else None,
        bad_freq_w2=bad2 / trials if record_bad else None,
    )


# ---------------------------------------------------------------------------
# Exact enumeration oracle
# ---------------------------------------------------------------------------

_EXACT_MAX_BITS = 2


class _TableGame:
    """Oracle shim over one fully enumerated cipher table.

    Quacks like GameInstance for everything adversaries touch (params,
    e_query, f_query, finv_query) but evaluates by direct table indexing.
    Reused across runs via reset_* to keep enumeration allocation-free.
    """

    __slots__ = ("params", "world", "_rows", "_inv_rows", "_keys", "_e_perm",
                 "_op_kind", "q_max", "t_max", "_q_used", "_t_used",
                 "_e_cache", "_f_cache", "_finv_cache")

    def __init__(self, params: CipherParams, op: OperatorSpec, budget: OracleBudget):
        self.params = params
        self._op_kind = op.kind
        self.q_max = budget.q_max
        self.t_max = budget.t_max
        self.world = 0
        self._rows = self._inv_rows = self._keys = self._e_perm = None

    def reset_world1(self, rows, inv_rows, keys) -> None:
        self.world = 1
        self._rows, self._inv_rows, self._keys = rows, inv_rows, keys
        self._clear()

    def reset_world2(self, rows, inv_rows, e_perm) -> None:
        self.world = 2
        self._rows, self._inv_rows, self._e_perm = rows, inv_rows, e_perm
        self._clear()

    def _clear(self) -> None:
        self._q_used = self._t_used = 0
        self._e_cache = {}
        self._f_cache = {}
        self._finv_cache = {}

    def e_query(self, x: int) -> int:
        y = self._e_cache.get(x)
        if y is not None:
            return y
        if self._q_used >= self.q_max:
            raise BudgetError("E-query budget exhausted")
        self._q_used += 1
        if self.world == 2:
            y = self._e_perm[x]
        else:
            keys = self._keys
            rows = self._rows
            kind = self._op_kind
            if kind == "dbl":
                y = rows[keys[0]][rows[keys[1]][x]]
            elif kind == "single":
                y = rows[keys[0]][x]
            elif kind == "trp2":
                y = rows[keys[0]][self._inv_rows[keys[1]][rows[keys[0]][x]]]
            else:
                y = x
                for k in reversed(keys):
                    y = rows[k][y]
        self._e_cache[x] = y
        return y

    def f_query(self, k: int, x: int) -> int:
        y = self._f_cache.get((k, x))
        if y is None:
            if self._t_used >= self.t_max:
                raise BudgetError("F-query budget exhausted")
            self._t_used += 1
            y = self._f_cache[(k, x)] = self._rows[k][x]
        return y

    def finv_query(self, k: int, y: int) -> int:
        x = self._finv_cache.get((k, y))
        if x is None:
            if self._t_used >= self.t_max:
                raise BudgetError("F-query budget exhausted")
            self._t_used += 1
            x = self._finv_cache[(k, y)] = self._inv_rows[k][y]
        return x


@dataclass(frozen=True)
class ExactAdvantage:
    """Ground-truth success probabilities and advantage, as exact rationals."""

    p1: Fraction
    p2: Fraction
    adv: Fraction
    world1_runs: int
    world2_runs: int


def exact_advantage(
    attack: Adversary,
    op: OperatorSpec,
    params: CipherParams,
    budget: OracleBudget,
) -> ExactAdvantage:
    """Exact advantage by complete enumeration at tiny parameters.

    Iterates over all (2^n)!^(2^kappa) cipher tables; world 1 additionally
    over all hidden-key tuples, world 2 over all challenge permutations.
    Requires kappa <= 2, n <= 2 and a deterministic adversary.
    """
    if params.kappa > _EXACT_MAX_BITS or params.n > _EXACT_MAX_BITS:
        raise ConfigurationError(
            f"exact enumeration needs kappa <= {_EXACT_MAX_BITS} and n <= {_EXACT_MAX_BITS}")
    if not attack.deterministic:
        raise ConfigurationError(
            "exact enumeration needs a deterministic adversary "
            "(fix the key-set choice to lexicographic mode)")
    attack.check(params, budget)

    block_count = params.block_count
    key_count = params.key_count
    perms = list(itertools.permutations(range(block_count)))
    inverses = []
    for perm in perms:
        inv = [0] * block_count
        for i, v in enumerate(perm):
            inv[v] = i
        inverses.append(tuple(inv))

    shim = _TableGame(params, op, budget)
    run = attack.run
    key_tuples = list(itertools.product(range(key_count), repeat=op.num_keys))

    successes1 = 0
    successes2 = 0
    perm_range = range(len(perms))
    for table in itertools.product(perm_range, repeat=key_count):
        rows = [perms[i] for i in table]
        inv_rows = [inverses[i] for i in table]
        for keys in key_tuples:
            shim.reset_world1(rows, inv_rows, keys)
            successes1 += run(shim, None)
        for e_index in perm_range:
            shim.reset_world2(rows, inv_rows, perms[e_index])
            successes2 += run(shim, None)

    tables = len(perms) ** key_count
    world1_runs = tables * len(key_tuples)
    world2_runs = tables * len(perms)
    p1 = Fraction(successes1, world1_runs)
    p2 = Fraction(successes2, world2_runs)
    return ExactAdvantage(p1, p2, p1 - p2, world1_runs, world2_runs)
