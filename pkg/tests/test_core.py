import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import truncnorm

from ifda import (
    IntervalFrame,
    LatentSpec,
    NamedDistribution,
    barycentre,
    delta_of,
    from_bounds,
    inertia,
    mallows_sq,
    moore_project,
)
from ifda.errors import (
    DimensionMismatchError,
    EmptySubsetError,
    MissingLabelsError,
    NegativeWidthError,
    ShapeMismatchError,
    UnknownDistributionError,
)

from conftest import random_labelled_frame


def mallows_sq_uniform_quadrature(c1, r1, c2, r2):
    """Quantile-integral oracle for 1-D intervals with uniform microdata."""
    a1 = c1 - r1 / 2.0
    a2 = c2 - r2 / 2.0
    value, _ = quad(
        lambda t: ((a1 + t * r1) - (a2 + t * r2)) ** 2, 0.0, 1.0,
        epsabs=1e-13, epsrel=1e-13,
    )
    return value


class TestFromBounds:
    def test_basic(self):
        frame = from_bounds([[1.0]], [[3.0]])
        assert frame.centres[0, 0] == 2.0
        assert frame.ranges[0, 0] == 2.0

    def test_degenerate_point(self):
        frame = from_bounds([[5.0]], [[5.0]])
        assert frame.centres[0, 0] == 5.0
        assert frame.ranges[0, 0] == 0.0

    def test_two_columns(self):
        frame = from_bounds([[0.0, 2.0]], [[4.0, 2.0]])
        assert np.allclose(frame.centres, [[2.0, 2.0]])
        assert np.allclose(frame.ranges, [[4.0, 0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            from_bounds([[1.0]], [[1.0, 2.0]])

    def test_negative_width(self):
        with pytest.raises(NegativeWidthError):
            from_bounds([[3.0]], [[1.0]])


class TestFrameInvariants:
    def test_negative_range_rejected(self):
        with pytest.raises(NegativeWidthError):
            IntervalFrame([[1.0]], [[-0.5]])

    def test_label_length_checked(self):
        with pytest.raises(ShapeMismatchError):
            IntervalFrame([[1.0], [2.0]], [[0.0], [0.0]], labels=[1])

    def test_arrays_read_only(self):
        frame = IntervalFrame([[1.0]], [[2.0]])
        with pytest.raises(ValueError):
            frame.centres[0, 0] = 9.0

    def test_bounds_view(self):
        frame = IntervalFrame([[2.0, 2.0]], [[4.0, 0.0]])
        assert np.allclose(frame.lower(), [[0.0, 2.0]])
        assert np.allclose(frame.upper(), [[4.0, 2.0]])


class TestDeltaOf:
    def test_table_values(self):
        assert delta_of("two_point_uniform") == 0.25
        assert delta_of("inverse_triangular") == 0.125
        assert delta_of("continuous_uniform") == pytest.approx(1.0 / 12.0)
        assert delta_of("triangular") == pytest.approx(1.0 / 24.0)
        assert delta_of("degenerate") == 0.0

    def test_enum_values_accepted(self):
        assert delta_of(NamedDistribution.CONTINUOUS_UNIFORM) == pytest.approx(1 / 12)

    def test_unknown(self):
        with pytest.raises(UnknownDistributionError):
            delta_of("cauchy")

    def test_truncated_normal_closed_form_vs_monte_carlo(self):
        value = delta_of("truncated_normal_1_9")
        # U ~ N(0, 1/9) truncated to [-1, 1]; delta = Var[U] / 4
        sample = truncnorm.rvs(
            -3.0, 3.0, scale=1.0 / 3.0, size=2_000_000,
            random_state=np.random.default_rng(11),
        )
        assert value == pytest.approx(sample.var() / 4.0, abs=3e-4)
        # sits between the triangular and degenerate rows
        assert 0.0 < value < 1.0 / 24.0

    def test_descending_table_order(self):
        names = [
            "two_point_uniform",
            "inverse_triangular",
            "continuous_uniform",
            "triangular",
            "truncated_normal_1_9",
            "degenerate",
        ]
        values = [delta_of(name) for name in names]
        assert values == sorted(values, reverse=True)


class TestLatentSpec:
    def test_symmetric_bounds(self):
        LatentSpec.symmetric(0.0)
        LatentSpec.symmetric(0.25)
        with pytest.raises(ShapeMismatchError):
            LatentSpec.symmetric(0.26)
        with pytest.raises(ShapeMismatchError):
            LatentSpec.symmetric(-0.01)

    def test_general_bounds(self):
        LatentSpec.general([0.25, 0.1], [1.0, 0.0])
        with pytest.raises(ShapeMismatchError):
            LatentSpec.general([0.3], [0.0])
        with pytest.raises(ShapeMismatchError):
            LatentSpec.general([0.25], [1.5])
        # E[U]^2 > E[U^2] is impossible
        with pytest.raises(ShapeMismatchError):
            LatentSpec.general([0.1], [0.9])


class TestMallowsSq:
    def test_identity(self, rng):
        for _ in range(5):
            c = rng.normal(size=3)
            r = np.abs(rng.normal(size=3))
            assert mallows_sq(c, r, c, r, 0.17) == 0.0

    def test_uniform_example_quadrature(self):
        expected = mallows_sq_uniform_quadrature(0.0, 2.0, 2.0, 4.0)
        assert expected == pytest.approx(13.0 / 3.0, abs=1e-10)
        assert mallows_sq([0.0], [2.0], [2.0], [4.0], 1.0 / 12.0) == pytest.approx(
            expected, abs=1e-10
        )

    def test_quadrature_oracle_randomized(self, rng):
        for _ in range(100):
            c1, c2 = rng.normal(scale=5, size=2)
            r1, r2 = np.abs(rng.normal(scale=4, size=2))
            expected = mallows_sq_uniform_quadrature(c1, r1, c2, r2)
            got = mallows_sq([c1], [r1], [c2], [r2], 1.0 / 12.0)
            assert got == pytest.approx(expected, abs=1e-8)

    def test_general_point_collapse(self):
        # P(U = 1) = 1 makes both intervals degenerate at the same point
        spec = LatentSpec.general([0.25], [1.0])
        assert mallows_sq([0.0], [2.0], [1.0], [0.0], spec) == 0.0

    def test_symmetry_both_kinds(self, rng):
        spec_g = LatentSpec.general([0.2, 0.15], [0.5, -0.3])
        for _ in range(20):
            c1, c2 = rng.normal(size=(2, 2))
            r1, r2 = np.abs(rng.normal(size=(2, 2)))
            assert mallows_sq(c1, r1, c2, r2, 0.1) == pytest.approx(
                mallows_sq(c2, r2, c1, r1, 0.1)
            )
            assert mallows_sq(c1, r1, c2, r2, spec_g) == pytest.approx(
                mallows_sq(c2, r2, c1, r1, spec_g)
            )

    def test_nonnegative_symmetric_kind(self, rng):
        for _ in range(200):
            c1, c2 = rng.normal(scale=10, size=(2, 4))
            r1, r2 = np.abs(rng.normal(scale=10, size=(2, 4)))
            delta = rng.uniform(0, 0.25)
            assert mallows_sq(c1, r1, c2, r2, delta) >= 0.0

    def test_delta_zero_is_euclidean_on_centres(self, rng):
        c1, c2 = rng.normal(size=(2, 5))
        r1, r2 = np.abs(rng.normal(size=(2, 5)))
        assert mallows_sq(c1, r1, c2, r2, 0.0) == pytest.approx(
            float((c1 - c2) @ (c1 - c2))
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            mallows_sq([0.0, 1.0], [1.0, 1.0], [0.0], [1.0], 0.1)


class TestBarycentre:
    def test_componentwise_means(self):
        frame = IntervalFrame([[1.0], [2.0], [3.0]], [[0.0], [2.0], [4.0]])
        c, r = barycentre(frame)
        assert c[0] == 2.0 and r[0] == 2.0

    def test_single_observation(self):
        frame = IntervalFrame([[7.0, 1.0]], [[3.0, 0.5]])
        c, r = barycentre(frame, [0])
        assert np.allclose(c, [7.0, 1.0]) and np.allclose(r, [3.0, 0.5])

    def test_empty_subset(self):
        frame = IntervalFrame([[1.0]], [[1.0]])
        with pytest.raises(EmptySubsetError):
            barycentre(frame, [])

    def test_grid_oracle_optimality(self):
        frame = IntervalFrame([[0.0], [4.0]], [[0.0], [8.0]])
        c, r = barycentre(frame)
        assert c[0] == 2.0 and r[0] == 4.0
        delta = 1.0 / 12.0

        def objective(cc, rr):
            return sum(
                mallows_sq(frame.centres[h], frame.ranges[h], [cc], [rr], delta)
                for h in range(frame.n)
            )

        best = objective(c[0], r[0])
        for cc in np.linspace(-1.0, 5.0, 25):
            for rr in np.linspace(0.0, 10.0, 41):
                assert objective(cc, rr) >= best - 1e-12


class TestMooreProject:
    def test_signed_centre_absolute_range(self):
        frame = IntervalFrame([[3.0, 1.0]], [[2.0, 2.0]])
        c, r = moore_project([1.0, -2.0], frame)
        assert c[0] == pytest.approx(1.0)
        assert r[0] == pytest.approx(6.0)

    def test_basis_vector_copies_column(self, rng):
        frame = random_labelled_frame(rng, n=10, p=4)
        e2 = np.zeros(4)
        e2[2] = 1.0
        c, r = moore_project(e2, frame)
        assert np.allclose(c, frame.centres[:, 2])
        assert np.allclose(r, frame.ranges[:, 2])

    def test_zero_vector(self, rng):
        frame = random_labelled_frame(rng, n=6, p=3)
        c, r = moore_project(np.zeros(3), frame)
        assert np.all(c == 0.0) and np.all(r == 0.0)

    def test_ranges_stay_nonnegative(self, rng):
        frame = random_labelled_frame(rng, n=20, p=5)
        for _ in range(10):
            _, r = moore_project(rng.normal(size=5), frame)
            assert np.all(r >= 0.0)

    def test_dimension_mismatch(self, rng):
        frame = random_labelled_frame(rng, n=5, p=3)
        with pytest.raises(DimensionMismatchError):
            moore_project([1.0, 2.0], frame)


class TestInertia:
    def test_identical_observations(self):
        frame = IntervalFrame(
            np.ones((4, 2)), np.full((4, 2), 3.0), labels=[0, 0, 1, 1]
        )
        assert inertia(frame, 0.1) == (0.0, 0.0, 0.0)

    def test_singleton_classes(self, rng):
        frame = random_labelled_frame(rng, n=4, p=2, g=4)
        assert np.unique(frame.labels).size == 4
        ti, bi, wi = inertia(frame, 1.0 / 12.0)
        assert wi == pytest.approx(0.0, abs=1e-12)
        assert ti == pytest.approx(bi, rel=1e-12)

    def test_decomposition_identity(self, rng):
        frame = random_labelled_frame(rng, n=6, p=2, g=2)
        ti, bi, wi = inertia(frame, 1.0 / 12.0)
        assert abs(ti - (bi + wi)) <= 1e-10 * ti

    def test_missing_labels(self):
        frame = IntervalFrame([[1.0]], [[1.0]])
        with pytest.raises(MissingLabelsError):
            inertia(frame, 0.1)
