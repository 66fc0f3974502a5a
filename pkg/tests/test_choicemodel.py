import itertools
import math

import numpy as np
import pytest

from attrank.choicemodel import (
    Observation,
    UrnConfig,
    WeightVector,
    enumerate_domain,
    estimate_weights,
    mean,
    observations_from_dataset,
    pmf,
    pmf_table,
    sample,
)
from attrank.core import Dataset, DisplayType, ItemRecord, SessionRecord
from attrank.errors import DomainError, DomainTooLargeError, EstimationError

# Table-derived preference odds (person, mannequin, flat) used as ground
# truth throughout the simulation-recovery tests.
SURVEY_OMEGA = (1.0, 0.5217, 0.2341)


def brute_force_pmf(gamma, n_hat, omega):
    """Independent enumeration oracle: plain products, no log-space."""
    dom = [
        t
        for t in itertools.product(*[range(g + 1) for g in gamma])
        if sum(t) == n_hat
    ]
    weights = {}
    for t in dom:
        w = 1.0
        for g, e, o in zip(gamma, t, omega):
            w *= math.comb(g, e) * o**e
        weights[t] = w
    z = sum(weights.values())
    return {t: w / z for t, w in weights.items()}


class TestEnumerateDomain:
    def test_two_kind_single_take(self):
        assert enumerate_domain(UrnConfig((1, 1), 1)) == [(0, 1), (1, 0)]

    def test_forced_full_take(self):
        assert enumerate_domain(UrnConfig((2, 2), 4)) == [(2, 2)]

    def test_three_by_three_size(self):
        dom = enumerate_domain(UrnConfig((3, 3, 3), 2))
        assert len(dom) == 6
        assert dom == sorted(dom)  # lexicographic

    def test_matches_brute_force(self):
        cfg = UrnConfig((2, 3, 1), 3)
        brute = sorted(
            t
            for t in itertools.product(range(3), range(4), range(2))
            if sum(t) == 3
        )
        assert enumerate_domain(cfg) == brute

    def test_guard(self):
        with pytest.raises(DomainTooLargeError):
            enumerate_domain(UrnConfig((9,) * 8, 10), guard=100)


class TestPmf:
    def test_single_kind_is_deterministic(self):
        cfg = UrnConfig((4,), 3)
        assert pmf((3,), cfg, WeightVector((2.5,))) == pytest.approx(1.0, abs=1e-12)

    def test_central_case_hand_value(self):
        cfg = UrnConfig((2, 2), 2)
        got = pmf((1, 1), cfg, WeightVector((1.0, 1.0)))
        assert got == pytest.approx(4 / 6, abs=1e-12)

    def test_two_outcome_hand_value(self):
        cfg = UrnConfig((1, 1), 1)
        got = pmf((1, 0), cfg, WeightVector((2.0, 1.0)))
        assert got == pytest.approx(2 / 3, abs=1e-12)

    def test_outside_domain_returns_zero(self):
        cfg = UrnConfig((2, 2), 2)
        w = WeightVector((1.0, 2.0))
        assert pmf((2, 1), cfg, w) == 0.0  # wrong sum
        assert pmf((3, -1), cfg, w) == 0.0  # out of bounds

    def test_invalid_config_raises(self):
        with pytest.raises(DomainError):
            UrnConfig((2, 2), 5)
        with pytest.raises(DomainError):
            UrnConfig((), 0)
        with pytest.raises(DomainError):
            UrnConfig((-1, 2), 1)
        with pytest.raises(DomainError):
            WeightVector((1.0, 0.0))

    def test_normalization_against_brute_force(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            c = int(rng.integers(1, 5))
            gamma = tuple(int(g) for g in rng.integers(0, 7, size=c))
            if sum(gamma) == 0:
                continue
            n_hat = int(rng.integers(0, sum(gamma) + 1))
            omega = WeightVector(rng.uniform(0.1, 10.0, size=c))
            cfg = UrnConfig(gamma, n_hat)
            brute = brute_force_pmf(gamma, n_hat, omega.omega)
            total = 0.0
            for eta, p in brute.items():
                ours = pmf(eta, cfg, omega)
                assert ours == pytest.approx(p, abs=1e-10)
                total += ours
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_scale_invariance(self):
        cfg = UrnConfig((3, 2, 4), 4)
        base = WeightVector((1.0, 0.4, 2.5))
        scaled = WeightVector(tuple(7.3 * w for w in base.omega))
        for eta in enumerate_domain(cfg):
            assert pmf(eta, cfg, base) == pytest.approx(pmf(eta, cfg, scaled), abs=1e-12)

    def test_equal_weights_reduce_to_central_hypergeometric(self):
        cfg = UrnConfig((3, 4, 2), 4)
        w = WeightVector((1.0, 1.0, 1.0))
        denom = math.comb(cfg.n, cfg.n_hat)
        for eta in enumerate_domain(cfg):
            closed = math.prod(math.comb(g, e) for g, e in zip(cfg.gamma, eta)) / denom
            assert pmf(eta, cfg, w) == pytest.approx(closed, abs=1e-12)

    def test_pmf_table_matches_pointwise(self):
        cfg = UrnConfig((3, 3, 3), 5)
        w = WeightVector((1.0, 0.5, 0.25))
        etas, probs = pmf_table(cfg, w)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        for eta, p in zip(etas, probs):
            assert pmf(eta, cfg, w) == pytest.approx(p, abs=1e-12)


class TestSample:
    def test_forced_full_take(self):
        cfg = UrnConfig((2, 3), 5)
        assert sample(cfg, WeightVector((1.0, 9.0)), 0) == (2, 3)

    def test_deterministic_under_seed(self):
        cfg = UrnConfig((3, 3, 3), 2)
        w = WeightVector(SURVEY_OMEGA)
        a = [sample(cfg, w, 123) for _ in range(5)]
        # Re-seeding reproduces the same draw; a shared generator advances.
        assert all(x == a[0] for x in a)
        rng1, rng2 = np.random.default_rng(9), np.random.default_rng(9)
        seq1 = [sample(cfg, w, rng1) for _ in range(20)]
        seq2 = [sample(cfg, w, rng2) for _ in range(20)]
        assert seq1 == seq2

    def test_two_outcome_frequency(self):
        cfg = UrnConfig((1, 1), 1)
        w = WeightVector((2.0, 1.0))
        rng = np.random.default_rng(2024)
        draws = [sample(cfg, w, rng) for _ in range(30000)]
        freq = sum(1 for d in draws if d == (1, 0)) / len(draws)
        assert freq == pytest.approx(2 / 3, abs=0.01)

    def test_frequencies_match_pmf_within_3se(self):
        cfg = UrnConfig((2, 2, 2), 3)
        w = WeightVector((1.0, 0.6, 0.3))
        etas, probs = pmf_table(cfg, w)
        rng = np.random.default_rng(7)
        n = 30000
        counts = {e: 0 for e in etas}
        for _ in range(n):
            counts[sample(cfg, w, rng)] += 1
        for e, p in zip(etas, probs):
            se = math.sqrt(p * (1 - p) / n)
            assert abs(counts[e] / n - p) <= 3 * se

    def test_beyond_guard_path_matches_pmf(self):
        # Forcing guard=1 exercises the kind-by-kind conditional sampler on
        # a config small enough to verify against the exact pmf.
        cfg = UrnConfig((2, 2), 2)
        w = WeightVector((1.0, 0.5))
        etas, probs = pmf_table(cfg, w)
        rng = np.random.default_rng(11)
        n = 30000
        counts = {e: 0 for e in etas}
        for _ in range(n):
            counts[sample(cfg, w, rng, guard=1)] += 1
        for e, p in zip(etas, probs):
            se = math.sqrt(p * (1 - p) / n)
            assert abs(counts[e] / n - p) <= 3 * se


class TestMean:
    def test_equal_weights_closed_form_both_paths(self):
        cfg = UrnConfig((3, 3, 3), 2)
        w = WeightVector((1.0, 1.0, 1.0))
        expected = np.array([2 / 3, 2 / 3, 2 / 3])
        np.testing.assert_allclose(mean(cfg, w), expected, atol=1e-12)
        np.testing.assert_allclose(mean(cfg, w, guard=1), expected, atol=1e-9)

    def test_zero_take(self):
        np.testing.assert_array_equal(
            mean(UrnConfig((3, 3), 0), WeightVector((1.0, 5.0))), [0.0, 0.0]
        )

    def test_full_take(self):
        np.testing.assert_array_equal(
            mean(UrnConfig((3, 2), 5), WeightVector((1.0, 5.0))), [3.0, 2.0]
        )

    def test_exact_matches_enumeration_oracle(self):
        gamma, n_hat, omega = (3, 3, 3), 2, (1.0, 0.5, 0.25)
        brute = brute_force_pmf(gamma, n_hat, omega)
        expected = np.zeros(3)
        for eta, p in brute.items():
            expected += p * np.array(eta)
        got = mean(UrnConfig(gamma, n_hat), WeightVector(omega))
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_fixed_point_close_to_exact(self):
        cfg = UrnConfig((3, 3, 3), 2)
        w = WeightVector((1.0, 0.5, 0.25))
        exact = mean(cfg, w)
        approx = mean(cfg, w, guard=1)  # forces the fixed-point path
        assert np.max(np.abs(exact - approx)) < 0.05

    def test_mean_sums_to_n_hat(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            gamma = tuple(int(g) for g in rng.integers(1, 6, size=3))
            n_hat = int(rng.integers(0, sum(gamma) + 1))
            w = WeightVector(rng.uniform(0.2, 5.0, size=3))
            cfg = UrnConfig(gamma, n_hat)
            assert mean(cfg, w).sum() == pytest.approx(n_hat, abs=1e-9)
            assert mean(cfg, w, guard=1).sum() == pytest.approx(n_hat, abs=1e-8)


def simulate_observations(gamma, n_hat, omega, n_obs, seed):
    cfg = UrnConfig(gamma, n_hat)
    w = WeightVector(omega)
    rng = np.random.default_rng(seed)
    return [Observation(cfg, sample(cfg, w, rng)) for _ in range(n_obs)]


class TestEstimateWeights:
    def test_symmetric_observations_give_unit_weights(self):
        cfg = UrnConfig((2, 2, 2), 3)
        obs = [Observation(cfg, (1, 1, 1))] * 50
        for method in ("mle", "moment"):
            got = estimate_weights(obs, method)
            np.testing.assert_allclose(got.as_array(), [1.0, 1.0, 1.0], atol=1e-6)

    def test_recovery_from_simulated_sessions(self):
        obs = simulate_observations((3, 3, 3), 2, SURVEY_OMEGA, 2000, seed=2024)
        mle = estimate_weights(obs, "mle")
        mom = estimate_weights(obs, "moment")
        assert mle.is_canonical and mom.is_canonical
        np.testing.assert_allclose(mle.as_array(), SURVEY_OMEGA, atol=0.05)
        np.testing.assert_allclose(mom.as_array(), SURVEY_OMEGA, atol=0.05)
        np.testing.assert_allclose(mle.as_array(), mom.as_array(), atol=0.02)

    def test_equivariance_under_kind_permutation(self):
        obs = simulate_observations((3, 2, 4), 3, (1.0, 0.45, 1.7), 400, seed=5)
        base = estimate_weights(obs, "mle").as_array()
        perm = (2, 0, 1)
        permuted_obs = [
            Observation(
                UrnConfig([ob.config.gamma[i] for i in perm], ob.config.n_hat),
                [ob.eta[i] for i in perm],
            )
            for ob in obs
        ]
        got = estimate_weights(permuted_obs, "mle").as_array()
        expected = np.array([base[i] for i in perm])
        expected /= expected[0]
        np.testing.assert_allclose(got, expected, atol=1e-6)

    def test_never_taken_kind_raises(self):
        cfg = UrnConfig((2, 2), 1)
        obs = [Observation(cfg, (1, 0))] * 10
        with pytest.raises(EstimationError, match="never taken"):
            estimate_weights(obs, "mle")

    def test_always_taken_kind_raises(self):
        cfg = UrnConfig((1, 2), 2)
        obs = [Observation(cfg, (1, 1))] * 10
        with pytest.raises(EstimationError, match="always taken"):
            estimate_weights(obs, "mle")

    def test_empty_observations(self):
        with pytest.raises(EstimationError):
            estimate_weights([], "mle")

    def test_unknown_method(self):
        cfg = UrnConfig((2, 2), 1)
        with pytest.raises(DomainError):
            estimate_weights([Observation(cfg, (1, 0))], "bayes")

    def test_mixed_configs(self):
        rng = np.random.default_rng(77)
        obs = []
        truth = WeightVector((1.0, 0.5, 0.3))
        for gamma, n_hat, count in (((3, 3, 3), 2, 700), ((2, 4, 1), 3, 700)):
            cfg = UrnConfig(gamma, n_hat)
            obs.extend(Observation(cfg, sample(cfg, truth, rng)) for _ in range(count))
        got = estimate_weights(obs, "mle").as_array()
        np.testing.assert_allclose(got, truth.as_array(), atol=0.07)


class TestObservationPlumbing:
    def test_observation_validation(self):
        cfg = UrnConfig((2, 2), 2)
        with pytest.raises(DomainError):
            Observation(cfg, (1, 0))  # sum != n_hat
        with pytest.raises(DomainError):
            Observation(cfg, (3, -1))
        with pytest.raises(DomainError):
            Observation(cfg, (1, 1, 0))

    def test_observations_from_dataset(self):
        items = [
            ItemRecord("p1", DisplayType.PERSON),
            ItemRecord("p2", DisplayType.PERSON),
            ItemRecord("m1", DisplayType.MANNEQUIN),
            ItemRecord("f1", DisplayType.FLAT),
        ]
        sess = SessionRecord("s1", ["p1", "m1", "f1", "p2"], clicked=["p1", "f1"])
        obs = observations_from_dataset(Dataset(items, [sess]))
        assert len(obs) == 1
        assert obs[0].config.gamma == (2, 1, 1)
        assert obs[0].eta == (1, 0, 1)

    def test_unresolved_type_rejected(self):
        items = [ItemRecord("u1", None)]
        sess = SessionRecord("s1", ["u1"])
        with pytest.raises(DomainError, match="u1"):
            observations_from_dataset(Dataset(items, [sess]))

    def test_weight_vector_canonicalization(self):
        w = WeightVector((2.0, 1.0, 0.5))
        assert not w.is_canonical
        c = w.canonical()
        assert c.is_canonical
        np.testing.assert_allclose(c.as_array(), [1.0, 0.5, 0.25])
