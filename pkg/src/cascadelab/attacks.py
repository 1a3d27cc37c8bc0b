"""Reference adversaries for the distinguishing games.

The headline attack is the meet-in-the-middle distinguisher against the
double cipher: encrypt the first s plaintexts, pick two disjoint key sets
of size floor(t/2s), evaluate every first-set key forward on the
plaintexts and every second-set key backward on the ciphertexts, and
output 1 iff some forward vector meets some backward vector. It spends
exactly s E-queries and 2*floor(t/2s)*s <= t cipher queries.

Also here: exhaustive key search against the single cipher, a
meet-in-the-middle variant against the two-key triple composition, a
query-free coin-flip baseline for estimator calibration, and an adaptive
key-chasing probe used by the bad-event suites.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError
from .game import Adversary, GameInstance, OracleBudget
from .cipher import CipherParams


@dataclass(frozen=True)
class MitmConfig:
    """Probe count s, cipher-query budget t, challenge-query budget q."""

    s: int
    t: int
    q: int

    def __post_init__(self):
        if self.s < 1:
            raise ConfigurationError("probe count s must be >= 1")
        if self.s > self.q:
            raise ConfigurationError(f"s={self.s} exceeds the E-query budget q={self.q}")
        if self.t < 2 * self.s:
            raise ConfigurationError(f"t={self.t} is below 2s={2 * self.s}")


def _distinct_keys(count: int, kappa: int, rng,
                   first: tuple[int, ...] = ()) -> list[int]:
    """`count` distinct keys, seeded with `first`, lexicographic when rng is None."""
    chosen = list(first)
    used = set(first)
    if rng is None:
        candidate = 0
        while len(chosen) < count:
            if candidate not in used:
                used.add(candidate)
                chosen.append(candidate)
            candidate += 1
    else:
        while len(chosen) < count:
            candidate = rng.getrandbits(kappa)
            if candidate not in used:
                used.add(candidate)
                chosen.append(candidate)
    return chosen


@dataclass(frozen=True)
class MitmDouble(Adversary):
    """Meet-in-the-middle distinguisher for the double composition.

    key_mode "random" samples the two disjoint key sets without replacement
    from the adversary's seed stream; "lex" takes the first 2*floor(t/2s)
    keys in order, for golden tests and exact enumeration. `planted`, a test
    hook, takes the hidden (outer, inner) pair and forces it into the slots
    that guarantee a world-1 meet: the inner key joins the forward probe set,
    the outer key the backward set. `clamp_keys` shrinks the sets to fit
    half the key space instead of refusing, for dominance sweeps at tiny
    kappa.
    """

    cfg: MitmConfig
    key_mode: str = "random"
    planted: tuple[int, int] | None = None
    clamp_keys: bool = False

    def __post_init__(self):
        if self.key_mode not in ("random", "lex"):
            raise ConfigurationError(f"unknown key mode {self.key_mode!r}")
        if self.planted is not None and self.planted[0] == self.planted[1]:
            raise ConfigurationError("planted keys must be distinct for disjoint sets")

    @property
    def name(self) -> str:
        return f"mitm-double:s={self.cfg.s}" + (",keys=lex" if self.key_mode == "lex" else "")

    @property
    def deterministic(self) -> bool:
        return self.key_mode == "lex"

    def _key_set_size(self, kappa: int) -> int:
        g = self.cfg.t // (2 * self.cfg.s)
        if self.clamp_keys:
            g = min(g, (1 << kappa) // 2)
        return g

    def check(self, params: CipherParams, budget: OracleBudget) -> None:
        if self.cfg.s > 1 << (params.n - 1):
            raise ConfigurationError(
                f"s={self.cfg.s} exceeds half the block space 2^{params.n - 1}")
        g = self._key_set_size(params.kappa)
        if 2 * g > params.key_count:
            raise ConfigurationError(
                f"disjoint key sets of size {g} do not fit in 2^{params.kappa} keys")
        if self.cfg.s > budget.q_max or 2 * g * self.cfg.s > budget.t_max:
            raise ConfigurationError("attack plan exceeds the game budget")

    def _choose_key_sets(self, kappa: int, rng) -> tuple[list[int], list[int]]:
        g = self._key_set_size(kappa)
        # forward probes meet the first composition layer, so the inner key
        # leads the forward set and the outer key the backward set
        first = (self.planted[1], self.planted[0]) if self.planted is not None else ()
        keys = _distinct_keys(2 * g, kappa, None if self.key_mode == "lex" else rng,
                              first=first)
        if self.planted is not None:
            keys.remove(self.planted[0])
            keys.insert(g, self.planted[0])
        return keys[:g], keys[g:]

    def run(self, game: GameInstance, rng) -> int:
        s = self.cfg.s
        xs = range(s)
        e_query, f_query, finv_query = game.e_query, game.f_query, game.finv_query
        ys = [e_query(x) for x in xs]
        set_one, set_two = self._choose_key_sets(game.params.kappa, rng)
        forward_vectors = []
        backward_seen = set()
        for k1, k2 in zip(set_one, set_two):
            forward_vectors.append(tuple([f_query(k1, x) for x in xs]))
            backward_seen.add(tuple([finv_query(k2, y) for y in ys]))
        return int(any(u in backward_seen for u in forward_vectors))


@dataclass(frozen=True)
class ExhaustiveSingle(Adversary):
    """Key-search distinguisher: try floor(t/probes) candidate keys in order,
    output 1 iff one matches the challenge oracle on every probe plaintext.
    """

    t: int
    probes: int
    deterministic = True

    def __post_init__(self):
        if self.probes < 1:
            raise ConfigurationError("probe count must be >= 1")
        if self.t < 0:
            raise ConfigurationError("cipher-query budget must be >= 0")

    @property
    def name(self) -> str:
        return f"exhaustive:probes={self.probes}"

    def _candidates(self, kappa: int) -> int:
        return min(self.t // self.probes, 1 << kappa)

    def check(self, params: CipherParams, budget: OracleBudget) -> None:
        if self._candidates(params.kappa) == 0:
            return
        if self.probes > budget.q_max:
            raise ConfigurationError("probe count exceeds the E-query budget")
        if self._candidates(params.kappa) * self.probes > budget.t_max:
            raise ConfigurationError("attack plan exceeds the game budget")

    def run(self, game: GameInstance, rng) -> int:
        candidates = self._candidates(game.params.kappa)
        if candidates == 0:
            return 0
        e_query, f_query = game.e_query, game.f_query
        probe_replies = [(x, e_query(x)) for x in range(self.probes)]
        for k in range(candidates):
            for x, y in probe_replies:
                if f_query(k, x) != y:
                    break
            else:
                return 1
        return 0


@dataclass(frozen=True)
class MitmTriple(Adversary):
    """Meet-in-the-middle variant for the two-key triple composition.

    With c = E(0): for each outer-key candidate k1, record the pair
    a = F(k1, 0), b = Finv(k1, c). A pair (k1, k2) survives the middle meet
    iff F(k2, b) = a, i.e. the inner layer maps a back to b. Surviving pairs
    are confirmed on s further plaintexts through the full composition; the
    output is 1 iff a confirmed pair remains. Per-role candidate sets may
    overlap (the hidden keys may coincide). Candidate count g is the largest
    with g^2 + (2 + 3s) * g <= t, and at most g pairs are confirmed, so the
    query count stays within (1 + s, t).
    """

    cfg: MitmConfig
    key_mode: str = "random"

    def __post_init__(self):
        if self.key_mode not in ("random", "lex"):
            raise ConfigurationError(f"unknown key mode {self.key_mode!r}")

    @property
    def name(self) -> str:
        return f"mitm-triple:s={self.cfg.s}" + (",keys=lex" if self.key_mode == "lex" else "")

    @property
    def deterministic(self) -> bool:
        return self.key_mode == "lex"

    def _key_set_size(self, kappa: int) -> int:
        g = 1
        while (g + 1) ** 2 + (2 + 3 * self.cfg.s) * (g + 1) <= self.cfg.t:
            g += 1
        return min(g, 1 << kappa)

    def check(self, params: CipherParams, budget: OracleBudget) -> None:
        g = self._key_set_size(params.kappa)
        if g * g + (2 + 3 * self.cfg.s) * g > self.cfg.t:
            raise ConfigurationError(f"t={self.cfg.t} cannot fund even one candidate key")
        if 1 + self.cfg.s > budget.q_max:
            raise ConfigurationError("setup plus confirmation E-queries exceed the budget")
        if g * g + (2 + 3 * self.cfg.s) * g > budget.t_max:
            raise ConfigurationError("attack plan exceeds the game budget")

    def run(self, game: GameInstance, rng) -> int:
        s = self.cfg.s
        g = self._key_set_size(game.params.kappa)
        if g * g + (2 + 3 * s) * g > self.cfg.t:
            return 0
        kappa = game.params.kappa
        if self.key_mode == "lex":
            outer = inner = list(range(g))
        else:
            outer = _distinct_keys(g, kappa, rng)
            inner = _distinct_keys(g, kappa, rng)

        c0 = game.e_query(0)
        after_first = {}
        before_last_groups: dict[int, list[int]] = {}
        for k1 in outer:
            after_first[k1] = game.f_query(k1, 0)
            b = game.finv_query(k1, c0)
            before_last_groups.setdefault(b, []).append(k1)

        candidates = []
        for k2 in inner:
            for b, k1s in before_last_groups.items():
                middle = game.f_query(k2, b)
                for k1 in k1s:
                    if middle == after_first[k1]:
                        candidates.append((k1, k2))

        for k1, k2 in candidates[:g]:
            for x in range(1, s + 1):
                if game.f_query(k1, game.finv_query(k2, game.f_query(k1, x))) != game.e_query(x):
                    break
            else:
                return 1
        return 0


@dataclass(frozen=True)
class BaselineRandom(Adversary):
    """Query-free coin flip: outputs 1 with probability p in either world."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigurationError("probability must lie in [0, 1]")

    @property
    def name(self) -> str:
        return f"baseline:p={self.p:g}"

    @property
    def deterministic(self) -> bool:
        return self.p in (0.0, 1.0)

    def run(self, game: GameInstance, rng) -> int:
        if self.p <= 0.0:
            return 0
        if self.p >= 1.0:
            return 1
        return int(rng.random() < self.p)


@dataclass(frozen=True)
class KeyChase(Adversary):
    """Adaptive probe that derives each next key from the previous reply.

    Makes num_e challenge queries and up to num_f cipher queries whose keys
    chase the low bits of earlier answers, so the visited key set depends on
    the oracle distribution. Used by the bad-event suites, where the claim
    under test is that the chance of hitting the hidden key pair is the same
    in both worlds.
    """

    num_e: int = 2
    num_f: int = 6
    deterministic = True

    def __post_init__(self):
        if self.num_e < 1 or self.num_f < 0:
            raise ConfigurationError("key chase needs num_e >= 1 and num_f >= 0")

    @property
    def name(self) -> str:
        return f"keychase:e={self.num_e},f={self.num_f}"

    def check(self, params: CipherParams, budget: OracleBudget) -> None:
        if self.num_e > budget.q_max or self.num_f > budget.t_max:
            raise ConfigurationError("attack plan exceeds the game budget")
        if self.num_e > params.block_count:
            raise ConfigurationError("more E-probes than blocks")

    def run(self, game: GameInstance, rng) -> int:
        key_count = game.params.key_count
        block_count = game.params.block_count
        acc = game.e_query(0)
        extra_at = self.num_f // 2
        for j in range(self.num_f):
            if j == extra_at:
                for x in range(1, self.num_e):
                    acc ^= game.e_query(x)
            k = acc % key_count
            x = (acc + j) % block_count
            acc = game.f_query(k, x) if j % 2 == 0 else game.finv_query(k, x)
        return acc & 1


_ATTACK_NAMES = ("mitm-double", "mitm-triple", "exhaustive", "baseline", "keychase")


def parse_attack_spec(spec: str, q: int, t: int) -> Adversary:
    """Build an adversary from a CLI spec string like ``mitm-double:s=2``.

    Recognized forms: ``mitm-double:s=S[,keys=lex|random]``,
    ``mitm-triple:s=S[,keys=...]``, ``exhaustive:probes=P``,
    ``baseline:p=P``, ``keychase[:e=E,f=F]``. q and t are the game budgets
    the attack should plan against.
    """
    name, _, rest = spec.partition(":")
    if name not in _ATTACK_NAMES:
        raise ConfigurationError(f"unknown attack {name!r}")
    args = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigurationError(f"bad attack parameter {item!r} in {spec!r}")
            args[key.strip()] = value.strip()

    def _int(key, default=None):
        if key not in args:
            if default is None:
                raise ConfigurationError(f"attack {name!r} requires parameter {key}=")
            return default
        try:
            return int(args.pop(key))
        except ValueError:
            raise ConfigurationError(f"parameter {key} must be an integer")

    if name == "mitm-double":
        cfg = MitmConfig(s=_int("s"), t=t, q=q)
        adversary = MitmDouble(cfg, key_mode=args.pop("keys", "random"))
    elif name == "mitm-triple":
        cfg = MitmConfig(s=_int("s"), t=t, q=q)
        adversary = MitmTriple(cfg, key_mode=args.pop("keys", "random"))
    elif name == "exhaustive":
        adversary = ExhaustiveSingle(t=t, probes=_int("probes"))
    elif name == "keychase":
        adversary = KeyChase(num_e=_int("e", 2), num_f=_int("f", 6))
    else:
        try:
            p = float(args.pop("p"))
        except KeyError:
            raise ConfigurationError("baseline requires parameter p=")
        except ValueError:
            raise ConfigurationError("parameter p must be a number")
        adversary = BaselineRandom(p)
    if args:
        raise ConfigurationError(f"unknown parameters for {name!r}: {sorted(args)}")
    return adversary
