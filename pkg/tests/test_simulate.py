import numpy as np
import pytest

from ifda import (
    FisherConfig,
    ScenarioSpec,
    benchmark_model,
    generate,
    one_minus_acv,
    run_study,
    scatter,
    theoretical_scatter,
)
from ifda.errors import ShapeMismatchError


class TestScenarioSpec:
    def test_case_shift_mapping(self):
        assert (ScenarioSpec("A").centre_shift, ScenarioSpec("A").range_shift) == (0.6, 0.6)
        assert (ScenarioSpec("B").centre_shift, ScenarioSpec("B").range_shift) == (0.2, 0.2)
        assert (ScenarioSpec("C").centre_shift, ScenarioSpec("C").range_shift) == (0.2, 0.05)
        assert (ScenarioSpec("D").centre_shift, ScenarioSpec("D").range_shift) == (0.05, 0.2)

    def test_invalid_case(self):
        with pytest.raises(ShapeMismatchError):
            ScenarioSpec("E")


class TestGenerate:
    def test_class_one_first_variable_support(self):
        train, test = generate(ScenarioSpec("B", n1=400, n2=400, seed=1))
        for frame in (train, test):
            first = frame.centres[frame.labels == 1, 0]
            assert first.min() >= 0.6 * 20.0
            assert first.max() <= 1.4 * 20.0

    def test_case_a_class_two_first_variable_support(self):
        train, _ = generate(ScenarioSpec("A", n1=300, n2=300, seed=2))
        second = train.centres[train.labels == 2, 0]
        assert second.min() >= 19.2
        assert second.max() <= 44.8

    def test_all_supports_over_many_draws(self):
        spec = ScenarioSpec("D", n1=20000, n2=30000, seed=3)
        train, _ = generate(spec)
        bases = {"centres": (20.0, 10.0, 5.0), "ranges": (16.0, 12.0, 8.0)}
        shifts = {"centres": spec.centre_shift, "ranges": spec.range_shift}
        for attr in bases:
            data = getattr(train, attr)
            for label, shift in ((1, 0.0), (2, shifts[attr])):
                block = data[train.labels == label]
                for i, base in enumerate(bases[attr]):
                    scale = base * (1.0 + shift)
                    assert block[:, i].min() >= 0.6 * scale - 1e-12
                    assert block[:, i].max() <= 1.4 * scale + 1e-12

    def test_ranges_nonnegative(self):
        train, test = generate(ScenarioSpec("C", n1=200, n2=200, seed=4))
        assert np.all(train.ranges >= 0.0) and np.all(test.ranges >= 0.0)

    def test_sizes_and_proportions(self):
        train, test = generate(ScenarioSpec("A", n1=50, n2=200, test_multiplier=5, seed=5))
        assert train.n == 250 and test.n == 1250
        assert (train.labels == 1).sum() == 50
        assert (test.labels == 1).sum() == 250

    def test_deterministic_per_seed(self):
        a_train, a_test = generate(ScenarioSpec("A", seed=9))
        b_train, b_test = generate(ScenarioSpec("A", seed=9))
        assert np.array_equal(a_train.centres, b_train.centres)
        assert np.array_equal(a_test.ranges, b_test.ranges)


class TestTheoreticalScatter:
    def test_class_variance_contributions(self):
        # class 1 variable 1: Var(Unif[12, 28]) = 256/12; class 2 scales by 1.6
        s = theoretical_scatter(ScenarioSpec("A", n1=1, n2=1))
        var1 = 256.0 / 12.0
        var2 = (0.8 * 20.0 * 1.6) ** 2 / 12.0
        assert s.within_centres[0, 0] == pytest.approx(var1 + var2)
        s_unbalanced = theoretical_scatter(ScenarioSpec("A", n1=3, n2=5))
        assert s_unbalanced.within_centres[0, 0] == pytest.approx(3 * var1 + 5 * var2)

    def test_equal_class_means_give_zero_between(self):
        # the between formula vanishes when the class mean vectors coincide
        sizes = np.asarray([10.0, 30.0])
        means = np.vstack([[20.0, 10.0, 5.0], [20.0, 10.0, 5.0]])
        overall = sizes @ means / sizes.sum()
        between = sum(
            sizes[j] * np.outer(means[j] - overall, means[j] - overall)
            for j in range(2)
        )
        assert np.allclose(between, 0.0)
        # and the case specs all shift class 2, so their between parts are nonzero
        assert not np.allclose(theoretical_scatter(ScenarioSpec("D")).between_ranges, 0.0)

    def test_monte_carlo_oracle(self):
        spec = ScenarioSpec("B", n1=500_000, n2=500_000, seed=17)
        train, _ = generate(ScenarioSpec("B", n1=500_000, n2=500_000, seed=17,
                                         test_multiplier=1))
        empirical = scatter(train)
        theoretical = theoretical_scatter(spec)
        for name in ("between_centres", "between_ranges", "within_centres", "within_ranges"):
            emp = getattr(empirical, name)
            theo = getattr(theoretical, name)
            scale = np.abs(theo).max()
            assert np.allclose(emp, theo, atol=0.01 * scale)

    def test_diagonal_within(self):
        s = theoretical_scatter(ScenarioSpec("C"))
        off = s.within_centres - np.diag(np.diag(s.within_centres))
        assert np.allclose(off, 0.0)


class TestOneMinusAcv:
    def test_parallel_vectors_give_zero(self):
        reference = np.asarray([1.0, 2.0, -1.0])
        estimates = np.vstack([reference, -2.0 * reference, 0.5 * reference])
        assert one_minus_acv(estimates, reference) == pytest.approx(0.0)

    def test_orthogonal_vector_gives_one(self):
        assert one_minus_acv(np.asarray([[0.0, 1.0]]), [1.0, 0.0]) == pytest.approx(1.0)

    def test_range(self, rng):
        estimates = rng.normal(size=(20, 3))
        value = one_minus_acv(estimates, rng.normal(size=3))
        assert 0.0 <= value <= 1.0


class TestRunStudy:
    def test_single_replicate_deterministic(self):
        spec = ScenarioSpec("A", n1=40, n2=40, seed=21)
        first = run_study(spec, 1)
        second = run_study(spec, 1)
        assert np.array_equal(first.method_scores, second.method_scores)
        assert np.array_equal(first.benchmark_scores, second.benchmark_scores)
        assert first.one_minus_acv == second.one_minus_acv

    def test_result_shapes_and_ranges(self):
        spec = ScenarioSpec("B", n1=30, n2=30, seed=8)
        result = run_study(spec, 3)
        assert result.method_scores.shape == (3, 3)
        assert result.benchmark_scores.shape == (3, 3)
        assert np.all(result.abs_cosines >= 0.0) and np.all(result.abs_cosines <= 1.0)
        assert all(value >= 0.0 for value in result.mse.values())
        assert 0.0 <= result.one_minus_acv <= 1.0

    def test_benchmark_parallel_estimates_zero_acv(self):
        spec = ScenarioSpec("A", n1=40, n2=40, seed=13)
        cfg = FisherConfig(delta=spec.delta, n_directions=1)
        bench = benchmark_model(spec, cfg)
        reference = bench.basis.vectors[:, 0]
        assert one_minus_acv(np.vstack([reference, -reference]), reference) == (
            pytest.approx(0.0)
        )

    def test_invalid_replicates(self):
        with pytest.raises(ShapeMismatchError):
            run_study(ScenarioSpec("A"), 0)
