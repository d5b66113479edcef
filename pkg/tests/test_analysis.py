"""Visibility and correlation estimators, error-model algebra, classicality."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xymeas.analysis import (
    ErrorModel,
    classicality_statistic,
    collapse_pair_counts,
    correct_for_source_noise,
    csquared_from_patterns,
    eigenstate_probs_from_error_model,
    error_model_from_visibilities,
    estimate_vx,
    estimate_vy,
    pattern_of,
    predicted_pattern_probs,
    visibilities_from_error_model,
    vsquared_from_patterns,
)
from xymeas.povm import (
    OUTCOMES4,
    OUTCOMES16,
    PATTERNS,
    PatternStats,
    VisibilityTriple,
    build_povm,
    exact_pattern_probs,
    outcome_probs,
)
from xymeas.qubit import density, eigenstate
from xymeas.simulate import ExperimentConfig, OutcomeCounts4, PairCounts16, run_eigenstate_experiment

SQ3 = 1.0 / np.sqrt(3.0)


def eigenstate_counts(probs, total, axis, value):
    counts = {o: probs[o] * total for o in OUTCOMES4}
    return OutcomeCounts4(counts=counts, total=total, input_axis=axis, input_value=value)


def pair_counts_from_probs(probs, total=1.0):
    return PairCounts16(counts={o: probs[o] * total for o in OUTCOMES16}, total=total)


class TestVisibilityEstimates:
    def test_configured_value_recovered_exactly(self):
        counts = OutcomeCounts4(
            counts={(+1, +1): 400_000, (+1, -1): 400_000, (-1, +1): 100_000, (-1, -1): 100_000},
            total=1_000_000,
            input_axis="X",
            input_value=+1,
        )
        est = estimate_vx(counts)
        assert est.value == pytest.approx(0.6, abs=1e-15)
        assert est.stderr == pytest.approx(2 * np.sqrt(0.8 * 0.2 / 1e6), rel=1e-12)
        assert est.source == "eigenstate-run"

    def test_perfect_and_uniform(self):
        perfect = OutcomeCounts4(
            counts={(+1, +1): 60, (+1, -1): 40, (-1, +1): 0, (-1, -1): 0},
            total=100,
            input_axis="X",
            input_value=+1,
        )
        assert estimate_vx(perfect).value == pytest.approx(1.0)
        uniform = OutcomeCounts4(
            counts={o: 25 for o in OUTCOMES4}, total=100, input_axis="X", input_value=+1
        )
        assert estimate_vx(uniform).value == pytest.approx(0.0)

    def test_vy_mirror(self):
        probs = outcome_probs(
            build_povm(VisibilityTriple(0.6, 0.8, 0.0)), density(eigenstate("Y", +1))
        )
        counts = eigenstate_counts(probs, 1.0, "Y", +1)
        est = estimate_vy(counts, source="exact")
        assert est.value == pytest.approx(0.8, abs=1e-12)
        assert est.source == "exact"

    def test_negative_input_value_counts_correctly(self):
        probs = outcome_probs(
            build_povm(VisibilityTriple(0.7, 0.2, 0.0)), density(eigenstate("X", -1))
        )
        counts = eigenstate_counts(probs, 1.0, "X", -1)
        assert estimate_vx(counts).value == pytest.approx(0.7, abs=1e-12)

    def test_axis_mismatch_rejected(self):
        counts = OutcomeCounts4(
            counts={o: 25 for o in OUTCOMES4}, total=100, input_axis="Y", input_value=+1
        )
        with pytest.raises(ValueError):
            estimate_vx(counts)
        with pytest.raises(ValueError):
            estimate_vy(
                OutcomeCounts4(
                    counts={o: 25 for o in OUTCOMES4}, total=100, input_axis="X", input_value=+1
                )
            )

    @pytest.mark.parametrize("vx,vy", [(0.3, 0.9), (0.6, 0.8), (1.0, 0.0)])
    def test_exact_consistency_over_inputs(self, vx, vy):
        povm = build_povm(VisibilityTriple(vx, vy, 0.0))
        for value in (+1, -1):
            px = outcome_probs(povm, density(eigenstate("X", value)))
            assert estimate_vx(eigenstate_counts(px, 1.0, "X", value)).value == pytest.approx(
                vx, abs=1e-12
            )
            py = outcome_probs(povm, density(eigenstate("Y", value)))
            assert estimate_vy(eigenstate_counts(py, 1.0, "Y", value)).value == pytest.approx(
                vy, abs=1e-12
            )

    def test_stderr_scales_with_shots(self):
        v = VisibilityTriple(0.6, 0.8, 0.0)
        small = run_eigenstate_experiment(
            ExperimentConfig(visibilities=v, shots=10_000, seed=41), "X", +1
        )
        large = run_eigenstate_experiment(
            ExperimentConfig(visibilities=v, shots=1_000_000, seed=42), "X", +1
        )
        ratio = estimate_vx(small).stderr / estimate_vx(large).stderr
        assert 9.0 < ratio < 11.0


class TestCollapsePairCounts:
    def test_single_anticorrelated_shot(self):
        counts = {o: 0 for o in OUTCOMES16}
        counts[(+1, +1, -1, -1)] = 1
        stats = collapse_pair_counts(PairCounts16(counts=counts, total=1))
        assert stats.e[(0, 0)] == pytest.approx(0.25)
        assert stats.e[(0, 1)] == stats.e[(1, 0)] == stats.e[(1, 1)] == 0.0

    def test_exact_probs_match_closed_form(self):
        v = VisibilityTriple(SQ3, SQ3, SQ3)
        povm = build_povm(v)
        from xymeas.povm import pair_outcome_probs
        from xymeas.qubit import singlet

        probs = pair_outcome_probs(povm, povm, density(singlet()))
        stats = collapse_pair_counts(pair_counts_from_probs(probs))
        exact = exact_pattern_probs(v)
        for r in PATTERNS:
            assert stats.e[r] == pytest.approx(exact.e[r], abs=1e-12)
        # fractional counts mark an exact table: no shots, no spread
        assert stats.total_shots == 0
        assert all(s == 0.0 for s in stats.stderr.values())

    def test_uniform_counts(self):
        stats = collapse_pair_counts(
            PairCounts16(counts={o: 100 for o in OUTCOMES16}, total=1600)
        )
        for r in PATTERNS:
            assert stats.e[r] == pytest.approx(1 / 16, abs=1e-12)

    def test_zero_count_pattern_gets_rule_of_three(self):
        counts = {o: 0 for o in OUTCOMES16}
        counts[(+1, +1, -1, -1)] = 1000
        stats = collapse_pair_counts(PairCounts16(counts=counts, total=1000))
        assert stats.stderr[(1, 1)] == pytest.approx((3 / 1000) / 4)

    def test_pattern_of(self):
        assert pattern_of(+1, +1, -1, -1) == (0, 0)
        assert pattern_of(+1, +1, -1, +1) == (0, 1)
        assert pattern_of(+1, +1, +1, -1) == (1, 0)
        assert pattern_of(+1, +1, +1, +1) == (1, 1)


class TestPatternSums:
    def test_symmetric_point(self):
        stats = exact_pattern_probs(VisibilityTriple(SQ3, SQ3, SQ3))
        vx2, vy2 = vsquared_from_patterns(stats)
        assert vx2.value == pytest.approx(1 / 3, abs=1e-12)
        assert vy2.value == pytest.approx(1 / 3, abs=1e-12)
        corr = csquared_from_patterns(stats)
        assert corr.c_squared == pytest.approx(-1 / 3, abs=1e-12)
        assert corr.vz_magnitude == pytest.approx(SQ3, abs=1e-12)
        assert corr.classical is False

    def test_z_blind_device(self):
        stats = exact_pattern_probs(VisibilityTriple(0.6, 0.8, 0.0))
        vx2, vy2 = vsquared_from_patterns(stats)
        assert vx2.value == pytest.approx(0.36, abs=1e-12)
        assert vy2.value == pytest.approx(0.64, abs=1e-12)
        corr = csquared_from_patterns(stats)
        assert corr.c_squared == pytest.approx(0.0, abs=1e-12)
        assert corr.classical is True

    def test_uniform_patterns(self):
        stats = PatternStats(
            e={r: 1 / 16 for r in PATTERNS}, stderr={r: 0.0 for r in PATTERNS}, total_shots=0
        )
        vx2, vy2 = vsquared_from_patterns(stats)
        assert vx2.value == pytest.approx(0.0, abs=1e-12)
        assert vy2.value == pytest.approx(0.0, abs=1e-12)

    def test_ideal_classical_device(self):
        stats = PatternStats(
            e={(0, 0): 0.25, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 0.0},
            stderr={r: 0.0 for r in PATTERNS},
            total_shots=0,
        )
        corr = csquared_from_patterns(stats)
        assert corr.c_squared == pytest.approx(1.0, abs=1e-12)
        assert corr.classical is True
        assert classicality_statistic(stats) == pytest.approx(-0.25, abs=1e-12)

    @pytest.mark.parametrize(
        "v",
        [
            VisibilityTriple(SQ3, SQ3, SQ3),
            VisibilityTriple(0.5, 0.5, 0.5),
            VisibilityTriple(0.0, 0.0, 1.0),
            VisibilityTriple(0.9, 0.1, 0.2),
        ],
    )
    def test_quantum_statistic_is_vz_squared_over_four(self, v):
        stats = exact_pattern_probs(v)
        assert classicality_statistic(stats) == pytest.approx(v.vz ** 2 / 4, abs=1e-12)
        corr = csquared_from_patterns(stats)
        assert corr.c_squared == pytest.approx(-v.vz ** 2, abs=1e-12)

    def test_boundary_vz_zero(self):
        stats = exact_pattern_probs(VisibilityTriple(0.7, 0.7, 0.0))
        assert classicality_statistic(stats) == pytest.approx(0.0, abs=1e-12)

    def test_pair_patterns_reproduce_eigenstate_resolutions(self):
        # exact pattern sums must land on the same vx, vy that eigenstate
        # runs see, across the whole family
        from xymeas.checks import visibility_grid

        for v in visibility_grid(5):
            vx2, vy2 = vsquared_from_patterns(exact_pattern_probs(v))
            assert vx2.value == pytest.approx(v.vx ** 2, abs=1e-12)
            assert vy2.value == pytest.approx(v.vy ** 2, abs=1e-12)


class TestSourceNoiseCorrection:
    def test_recovers_noiseless_patterns(self):
        v = VisibilityTriple(0.5, 0.4, 0.6)
        pure = exact_pattern_probs(v)
        p = 0.8
        noisy = PatternStats(
            e={r: p * pure.e[r] + (1 - p) / 16 for r in PATTERNS},
            stderr={r: 0.0 for r in PATTERNS},
            total_shots=0,
        )
        corrected = correct_for_source_noise(noisy, p)
        for r in PATTERNS:
            assert corrected.e[r] == pytest.approx(pure.e[r], abs=1e-12)

    def test_contrasts_divide_by_p(self):
        v = VisibilityTriple(0.5, 0.4, 0.6)
        pure = exact_pattern_probs(v)
        p = 0.7
        noisy = PatternStats(
            e={r: p * pure.e[r] + (1 - p) / 16 for r in PATTERNS},
            stderr={r: 0.001 for r in PATTERNS},
            total_shots=1000,
        )
        raw = csquared_from_patterns(noisy)
        assert raw.c_squared == pytest.approx(-p * v.vz ** 2, abs=1e-12)
        corrected = csquared_from_patterns(correct_for_source_noise(noisy, p))
        assert corrected.c_squared == pytest.approx(-v.vz ** 2, abs=1e-12)
        assert corrected.stderr == pytest.approx(raw.stderr / p, rel=1e-12)

    def test_invalid_parameter_rejected(self):
        stats = exact_pattern_probs(VisibilityTriple(0.5, 0.4, 0.6))
        with pytest.raises(ValueError):
            correct_for_source_noise(stats, 0.0)


class TestErrorModelAlgebra:
    def test_ideal_classical_model(self):
        m = error_model_from_visibilities(1.0, 1.0, 1.0)
        assert m.weights[(0, 0)] == pytest.approx(1.0)
        for r in ((0, 1), (1, 0), (1, 1)):
            assert m.weights[r] == pytest.approx(0.0)

    def test_pure_imaginary_correlation(self):
        m = error_model_from_visibilities(0.0, 0.0, 1j)
        assert m.weights[(0, 0)] == pytest.approx((1 + 1j) / 4)
        assert m.weights[(0, 1)] == pytest.approx((1 - 1j) / 4)
        assert m.weights[(1, 0)] == pytest.approx((1 - 1j) / 4)
        assert m.weights[(1, 1)] == pytest.approx((1 + 1j) / 4)

    def test_fully_random_model(self):
        m = error_model_from_visibilities(0.0, 0.0, 0.0)
        for r in PATTERNS:
            assert m.weights[r] == pytest.approx(0.25)

    @pytest.mark.parametrize(
        "vx,vy,c", [(1.0, 1.0, 1.0), (0.0, 0.0, 1j), (0.0, 0.0, 0.0), (0.6, 0.8, 0.5j)]
    )
    def test_round_trip(self, vx, vy, c):
        m = error_model_from_visibilities(vx, vy, c)
        rvx, rvy, rc = visibilities_from_error_model(m)
        assert rvx == pytest.approx(vx, abs=1e-12)
        assert rvy == pytest.approx(vy, abs=1e-12)
        assert rc == pytest.approx(c, abs=1e-12)

    def test_unnormalized_weights_rejected(self):
        with pytest.raises(ValueError):
            ErrorModel(weights={r: 0.3 for r in PATTERNS})


class TestEigenstateProbsFromModel:
    def test_marginals_ignore_correlation(self):
        for c in (0.0, 0.4j, -0.2 + 0.0j):
            m = error_model_from_visibilities(0.6, 0.8, c)
            table = eigenstate_probs_from_error_model(m, "X")
            assert table[(+1, +1)] == pytest.approx(0.4, abs=1e-12)
            assert table[(+1, -1)] == pytest.approx(0.4, abs=1e-12)
            assert table[(-1, +1)] == pytest.approx(0.1, abs=1e-12)
            assert table[(-1, -1)] == pytest.approx(0.1, abs=1e-12)

    def test_matches_measurement_on_eigenstate(self):
        v = VisibilityTriple(0.5, 0.7, 0.3)
        m = error_model_from_visibilities(v.vx, v.vy, 1j * v.vz)
        predicted = eigenstate_probs_from_error_model(m, "Y")
        actual = outcome_probs(build_povm(v), density(eigenstate("Y", +1)))
        for o in OUTCOMES4:
            assert predicted[o] == pytest.approx(actual[o], abs=1e-12)

    def test_ideal_classical(self):
        m = error_model_from_visibilities(1.0, 1.0, 1.0)
        table = eigenstate_probs_from_error_model(m, "X")
        assert table[(+1, +1)] == pytest.approx(0.5)
        assert table[(+1, -1)] == pytest.approx(0.5)
        assert table[(-1, +1)] == table[(-1, -1)] == 0.0

    def test_uniform_model(self):
        m = error_model_from_visibilities(0.0, 0.0, 0.0)
        table = eigenstate_probs_from_error_model(m, "Y")
        for o in OUTCOMES4:
            assert table[o] == pytest.approx(0.25)

    def test_complex_marginal_rejected(self):
        m = error_model_from_visibilities(0.5 + 0.2j, 0.0, 0.0)
        with pytest.raises(ValueError, match="complex"):
            eigenstate_probs_from_error_model(m, "X")

    def test_out_of_range_marginal_rejected(self):
        m = error_model_from_visibilities(1.4, 0.0, 0.0)
        with pytest.raises(ValueError, match="out of"):
            eigenstate_probs_from_error_model(m, "X")

    def test_axis_z_rejected(self):
        m = error_model_from_visibilities(0.5, 0.5, 0.0)
        with pytest.raises(ValueError):
            eigenstate_probs_from_error_model(m, "Z")


class TestPredictedPatternProbs:
    def test_symmetric_quantum_model(self):
        m = error_model_from_visibilities(SQ3, SQ3, 1j * SQ3)
        stats = predicted_pattern_probs(m)
        exact = exact_pattern_probs(VisibilityTriple(SQ3, SQ3, SQ3))
        for r in PATTERNS:
            assert stats.e[r] == pytest.approx(exact.e[r], abs=1e-12)

    def test_ideal_classical(self):
        stats = predicted_pattern_probs(error_model_from_visibilities(1.0, 1.0, 1.0))
        assert stats.e[(0, 0)] == pytest.approx(0.25)
        for r in ((0, 1), (1, 0), (1, 1)):
            assert stats.e[r] == pytest.approx(0.0)

    def test_uniform(self):
        stats = predicted_pattern_probs(error_model_from_visibilities(0.0, 0.0, 0.0))
        for r in PATTERNS:
            assert stats.e[r] == pytest.approx(1 / 16)

    def test_inconsistent_model_rejected(self):
        weights = {
            (0, 0): 0.5 + 0.2j,
            (0, 1): 0.3 + 0.0j,
            (1, 0): 0.2 - 0.2j,
            (1, 1): 0.0 + 0.0j,
        }
        with pytest.raises(ValueError, match="complex"):
            predicted_pattern_probs(ErrorModel(weights=weights))

    @pytest.mark.parametrize(
        "v",
        [
            VisibilityTriple(0.5, 0.5, 0.5),
            VisibilityTriple(0.2, 0.9, -0.3),
            VisibilityTriple(0.0, 0.0, 1.0),
        ],
    )
    def test_quantum_models_match_exact_patterns(self, v):
        m = error_model_from_visibilities(v.vx, v.vy, 1j * v.vz)
        stats = predicted_pattern_probs(m)
        exact = exact_pattern_probs(v)
        for r in PATTERNS:
            assert stats.e[r] == pytest.approx(exact.e[r], abs=1e-12)


complex_weights = st.tuples(
    *(
        st.tuples(
            st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
            st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
        )
        for _ in range(4)
    )
)


@settings(max_examples=200, deadline=None)
@given(raw=complex_weights)
def test_fourier_identity(raw):
    # 4 * sum_r chi(r) e(r) = (sum_s chi(s) w(s))^2 for all four sign characters
    values = np.array([complex(re, im) for re, im in raw])
    total = values.sum()
    if abs(total) < 1e-3:
        values = values + (1.0 - total) / 4.0
    else:
        values = values / total
    m = ErrorModel(weights={r: values[i] for i, r in enumerate(PATTERNS)})
    chars = {
        (0, 0): lambda r: 1.0,
        (1, 0): lambda r: (-1.0) ** r[0],
        (0, 1): lambda r: (-1.0) ** r[1],
        (1, 1): lambda r: (-1.0) ** (r[0] + r[1]),
    }
    e = {}
    for rx, ry in PATTERNS:
        e[(rx, ry)] = (
            sum(
                complex(m.weights[(sx, sy)]) * complex(m.weights[(sx ^ rx, sy ^ ry)])
                for sx, sy in PATTERNS
            )
            / 4.0
        )
    for chi in chars.values():
        lhs = 4.0 * sum(chi(r) * e[r] for r in PATTERNS)
        rhs = sum(chi(r) * complex(m.weights[r]) for r in PATTERNS) ** 2
        assert abs(lhs - rhs) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(
    raw=st.tuples(*(st.floats(min_value=0.0, max_value=1.0) for _ in range(4))).filter(
        lambda t: sum(t) > 1e-6
    )
)
def test_classical_models_never_look_quantum(raw):
    values = np.array(raw) / sum(raw)
    m = ErrorModel(weights={r: complex(values[i]) for i, r in enumerate(PATTERNS)})
    stats = predicted_pattern_probs(m)
    assert classicality_statistic(stats) <= 1e-10
