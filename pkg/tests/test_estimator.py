from fractions import Fraction

import numpy as np
import pytest

from cascadelab.attacks import BaselineRandom, ExhaustiveSingle, MitmConfig, MitmDouble
from cascadelab.cipher import CipherParams
from cascadelab.errors import ConfigurationError, DomainError
from cascadelab.estimator import (
    AdvantageEstimate,
    confidence_interval,
    estimate_advantage,
    exact_advantage,
)
from cascadelab.game import DBL, SINGLE, Adversary, OracleBudget, cascade


# -- confidence intervals -------------------------------------------------------

def test_ci_degenerate_counts_tight_around_zero():
    lo, hi = confidence_interval(0, 0, 10_000, 0.95)
    assert lo <= 0.0 <= hi
    assert hi - lo < 0.001


def test_ci_extreme_counts():
    lo, hi = confidence_interval(10_000, 0, 10_000, 0.95)
    assert 0.99 <= lo and hi <= 1.0


def test_ci_validation():
    with pytest.raises(DomainError):
        confidence_interval(0, 0, 0, 0.95)
    with pytest.raises(ConfigurationError):
        confidence_interval(1, 1, 10, 0.5)
    with pytest.raises(DomainError):
        confidence_interval(11, 0, 10, 0.95)


def test_ci_contains_point_estimate():
    for s1, s2 in ((500, 300), (3, 1), (9999, 2), (0, 0)):
        lo, hi = confidence_interval(s1, s2, 10_000, 0.99)
        diff = s1 / 10_000 - s2 / 10_000
        assert lo <= diff <= hi


def test_ci_width_shrinks_with_level():
    widths = []
    for level in (0.95, 0.99, 0.999):
        lo, hi = confidence_interval(3_000, 2_000, 10_000, level)
        widths.append(hi - lo)
    assert widths[0] < widths[1] < widths[2]


def test_ci_coverage_simulation():
    # true difference 0.1 (p1=0.3, p2=0.2): 95% intervals cover the truth in
    # 93..97% of replications
    rng = np.random.default_rng(8)
    n = 1_000
    covered = 0
    reps = 10_000
    s1s = rng.binomial(n, 0.3, size=reps)
    s2s = rng.binomial(n, 0.2, size=reps)
    for s1, s2 in zip(s1s, s2s):
        lo, hi = confidence_interval(int(s1), int(s2), n, 0.95)
        covered += lo <= 0.1 <= hi
    assert 0.93 <= covered / reps <= 0.97


# -- Monte Carlo estimation -------------------------------------------------------

def test_estimate_validation():
    attack = BaselineRandom(0.5)
    params = CipherParams(2, 2)
    with pytest.raises(ConfigurationError):
        estimate_advantage(attack, DBL, params, OracleBudget(1, 1), trials=0, seed=1)
    with pytest.raises(ConfigurationError):
        estimate_advantage(attack, cascade(3), params, OracleBudget(1, 1),
                           trials=10, seed=1, record_bad=True)
    with pytest.raises(ConfigurationError):
        estimate_advantage(attack, DBL, params, OracleBudget(0, 1), trials=10, seed=1)


def test_estimate_is_seed_reproducible():
    attack = MitmDouble(MitmConfig(s=1, t=4, q=1))
    params = CipherParams(3, 4)
    a = estimate_advantage(attack, DBL, params, OracleBudget(1, 4), trials=4_000, seed=7)
    b = estimate_advantage(attack, DBL, params, OracleBudget(1, 4), trials=4_000, seed=7)
    c = estimate_advantage(attack, DBL, params, OracleBudget(1, 4), trials=4_000, seed=8)
    assert a == b
    assert a != c


def test_estimate_independent_of_worker_count():
    attack = MitmDouble(MitmConfig(s=2, t=8, q=2))
    params = CipherParams(3, 4)
    single = estimate_advantage(attack, DBL, params, OracleBudget(2, 8),
                                trials=6_000, seed=3, record_bad=True, workers=1)
    multi = estimate_advantage(attack, DBL, params, OracleBudget(2, 8),
                               trials=6_000, seed=3, record_bad=True, workers=2)
    assert single == multi


def test_estimate_fields_and_invariants():
    est = estimate_advantage(BaselineRandom(0.3), DBL, CipherParams(2, 2),
                             OracleBudget(1, 1), trials=5_000, seed=4, record_bad=True)
    assert isinstance(est, AdvantageEstimate)
    assert -1.0 <= est.adv_hat <= 1.0
    assert 0.0 <= est.p1_hat <= 1.0 and 0.0 <= est.p2_hat <= 1.0
    assert est.ci_low <= est.adv_hat <= est.ci_high
    assert est.trials_per_world == 5_000
    assert est.bad_freq_w1 == 0.0 and est.bad_freq_w2 == 0.0  # no queries made
    assert est.std_err >= 0.0


class _QueryKeys(Adversary):
    """Queries F on a fixed key set, outputs 0."""

    name = "query-keys"
    deterministic = True

    def __init__(self, keys):
        self.keys = keys

    def run(self, game, rng):
        for k in self.keys:
            game.f_query(k, 0)
        return 0


def test_record_bad_tallies_key_hits():
    # querying every key makes the hidden pair always seen; querying half the
    # keys makes it seen with probability (1/2)^2
    est = estimate_advantage(_QueryKeys(range(4)), DBL, CipherParams(2, 4),
                             OracleBudget(1, 8), trials=400, seed=5, record_bad=True)
    assert est.bad_freq_w1 == 1.0 and est.bad_freq_w2 == 1.0
    est = estimate_advantage(_QueryKeys(range(2)), DBL, CipherParams(2, 4),
                             OracleBudget(1, 8), trials=8_000, seed=5, record_bad=True)
    for freq in (est.bad_freq_w1, est.bad_freq_w2):
        assert abs(freq - 0.25) < 0.03


# -- exact enumeration oracle ------------------------------------------------------

def test_exact_guards():
    attack = BaselineRandom(1.0)
    with pytest.raises(ConfigurationError):
        exact_advantage(attack, DBL, CipherParams(3, 2), OracleBudget(1, 1))
    with pytest.raises(ConfigurationError):
        exact_advantage(BaselineRandom(0.5), DBL, CipherParams(1, 1), OracleBudget(1, 1))
    with pytest.raises(ConfigurationError):
        exact_advantage(MitmDouble(MitmConfig(s=1, t=2, q=1)), DBL,
                        CipherParams(1, 2), OracleBudget(1, 2))  # random keys


def test_exact_constant_adversary_zero_advantage():
    result = exact_advantage(BaselineRandom(1.0), DBL, CipherParams(1, 1),
                             OracleBudget(1, 1))
    assert result.p1 == result.p2 == 1
    assert result.adv == 0


def test_exact_golden_mitm_tiny():
    # frozen output of the enumeration oracle: kappa=1, n=2, double cipher,
    # lexicographic meet-in-the-middle with s=1, t=2
    result = exact_advantage(
        MitmDouble(MitmConfig(s=1, t=2, q=1), key_mode="lex"), DBL,
        CipherParams(1, 2), OracleBudget(1, 2))
    assert result.p1 == Fraction(11, 24)
    assert result.p2 == Fraction(1, 4)
    assert result.adv == Fraction(5, 24)
    assert result.world1_runs == 576 * 4
    assert result.world2_runs == 576 * 24


def test_exact_golden_exhaustive_tiny():
    # kappa=1, n=2, single cipher, one probe, both keys tried: the true key
    # always matches, so p1 = 1; p2 = 1 - (3/4)^2 over two independent rows
    result = exact_advantage(ExhaustiveSingle(t=2, probes=1), SINGLE,
                             CipherParams(1, 2), OracleBudget(1, 2))
    assert result.p1 == 1
    assert result.p2 == Fraction(7, 16)
    assert result.adv == Fraction(9, 16)


def test_exact_agrees_with_monte_carlo_tiny():
    attack = MitmDouble(MitmConfig(s=1, t=2, q=1), key_mode="lex")
    params = CipherParams(1, 2)
    exact = exact_advantage(attack, DBL, params, OracleBudget(1, 2))
    est = estimate_advantage(attack, DBL, params, OracleBudget(1, 2),
                             trials=100_000, seed=6, level=0.999)
    assert est.ci_low <= float(exact.adv) <= est.ci_high
