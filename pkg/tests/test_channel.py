"""The subspace DMC: transition law (against exhaustive oracles), matrix
construction, component decomposition, operational simulation, and the
spec-file / export interfaces."""

import io
import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import CHI2_CRIT_P001, chi2_statistic, matrices_by_rank
from subchan.channel import (
    ChannelSpec,
    RankDefDist,
    alphabet_sizes,
    build_dmc,
    channel_spec_from_dict,
    channel_spec_to_dict,
    components,
    conditional_prob_given_rank,
    dmc_to_csv,
    dmc_to_dict,
    estimate_rank_def_dist,
    simulate_one_use,
    transition_prob,
)
from subchan.errors import (
    DimensionMismatchError,
    DistributionInvalidError,
    EnumerationTooLargeError,
    InsufficientDataError,
    ObservationOutOfRangeError,
)
from subchan.gf import GF
from subchan.grassmann import (
    Subspace,
    contains,
    enumerate_subspaces_of,
    span,
    subspace_label,
)
from subchan.matrix import Mat, matmul, rank

F2 = GF(2)
U = span(Mat.from_rows(F2, [[0, 1, 0], [1, 0, 0]]))
V100 = span(Mat.from_rows(F2, [[1, 0, 0]]))


def _spec(probs, q=2, T=3, h=2):
    return ChannelSpec(GF(q), T, h, RankDefDist(h, probs))


DELTA0 = _spec([1.0, 0.0, 0.0])
DELTA1 = _spec([0.0, 1.0, 0.0])
DELTA2 = _spec([0.0, 0.0, 1.0])
MIXED = _spec([0.5, 0.3, 0.2])


class TestRankDefDist:
    def test_validation(self):
        with pytest.raises(DistributionInvalidError):
            RankDefDist(2, [0.5, 0.5])
        with pytest.raises(DistributionInvalidError):
            RankDefDist(2, [0.7, 0.4, -0.1])
        with pytest.raises(DistributionInvalidError):
            RankDefDist(2, [0.5, 0.3, 0.1])

    def test_normalization_is_exact_enough(self):
        d = RankDefDist(2, [0.2, 0.3, 0.5 + 4e-10])
        assert abs(float(d.probs.sum()) - 1.0) <= 1e-12

    def test_point_mass_and_uniform(self):
        assert RankDefDist.point_mass(2, 1).probs.tolist() == [0.0, 1.0, 0.0]
        assert np.allclose(RankDefDist.uniform(2).probs, 1 / 3)
        with pytest.raises(DistributionInvalidError):
            RankDefDist.point_mass(2, 3)


class TestChannelSpec:
    def test_dimension_constraints(self):
        with pytest.raises(DimensionMismatchError):
            ChannelSpec(F2, 2, 3, RankDefDist(3, [1, 0, 0, 0]))
        with pytest.raises(DistributionInvalidError):
            ChannelSpec(F2, 3, 2, RankDefDist(1, [1, 0]))

    def test_json_round_trip(self):
        spec, warnings = channel_spec_from_dict(channel_spec_to_dict(MIXED))
        assert warnings == []
        assert spec == MIXED

    def test_loader_rejects_badly_normalized(self):
        with pytest.raises(DistributionInvalidError):
            channel_spec_from_dict({"q": 2, "T": 3, "h": 2, "rank_def": [0.5, 0.3, 0.1]})

    def test_loader_renormalizes_with_warning(self):
        spec, warnings = channel_spec_from_dict(
            {"q": 2, "T": 3, "h": 2, "rank_def": [0.5, 0.3, 0.2 + 2e-10]}
        )
        assert len(warnings) == 1 and "renormalized" in warnings[0]
        assert abs(float(spec.rank_def.probs.sum()) - 1.0) <= 1e-12

    def test_loader_missing_key(self):
        with pytest.raises(DistributionInvalidError):
            channel_spec_from_dict({"q": 2, "T": 3, "h": 2})


class TestTransitionProb:
    def test_uniform_third_for_one_dimensional_output(self):
        assert transition_prob(DELTA1, U, V100) == pytest.approx(1 / 3, abs=1e-15)

    def test_brute_force_oracle_over_bases_and_rank_one_transfers(self):
        """Exhaustive law: uniform over the 6 bases of U x uniform over the 9
        rank-1 transfer matrices must reproduce p(V|U) = 1/3 exactly."""
        groups = matrices_by_rank(2, 2, 2)
        bases = [m for m in matrices_by_rank(2, 2, 3)[2] if span(Mat(F2, m)) == U]
        assert len(bases) == 6 and len(groups[1]) == 9
        counts: dict[Subspace, int] = {}
        for x in bases:
            for g in groups[1]:
                v = span(matmul(Mat(F2, g), Mat(F2, x)))
                counts[v] = counts.get(v, 0) + 1
        total = 6 * 9
        for v, cnt in counts.items():
            assert Fraction(cnt, total) == Fraction(1, 3)
            assert transition_prob(DELTA1, U, v) == float(Fraction(1, 3))
        assert len(counts) == 3

    def test_zero_off_support(self):
        outside = span(Mat.from_rows(F2, [[0, 0, 1]]))
        assert transition_prob(MIXED, U, outside) == 0.0

    def test_identity_transition_is_probability_of_full_rank(self):
        assert transition_prob(MIXED, U, U) == MIXED.rank_def.probs[0]

    def test_requires_input_dimension_h(self):
        with pytest.raises(DimensionMismatchError):
            transition_prob(MIXED, V100, V100)


class TestConditionalProbGivenRank:
    def test_matches_subspace_count(self):
        count = len(enumerate_subspaces_of(U, 1))
        assert count == 3
        assert conditional_prob_given_rank(MIXED, U, V100, 1) == 1.0 / count

    def test_zero_when_deficiency_inconsistent(self):
        assert conditional_prob_given_rank(MIXED, U, V100, 0) == 0.0
        assert conditional_prob_given_rank(MIXED, U, V100, 2) == 0.0

    def test_identity_case(self):
        assert conditional_prob_given_rank(MIXED, U, U, 0) == 1.0

    def test_deficiency_out_of_range(self):
        with pytest.raises(ValueError):
            conditional_prob_given_rank(MIXED, U, V100, 3)


class TestBuildDmc:
    def test_alphabet_sizes(self):
        dmc = build_dmc(MIXED)
        assert dmc.trans.shape == (7, 15)
        assert alphabet_sizes(MIXED) == (7, 15)

    def test_rows_sum_to_one(self):
        for spec in (DELTA0, DELTA1, DELTA2, MIXED):
            dmc = build_dmc(spec)
            assert np.max(np.abs(dmc.trans.sum(axis=1) - 1.0)) < 1e-10

    def test_support_count_per_row(self):
        dmc = build_dmc(MIXED)
        assert all(np.count_nonzero(dmc.trans[i]) == 5 for i in range(7))

    def test_entries_match_transition_prob(self):
        dmc = build_dmc(MIXED)
        for i, u in enumerate(dmc.input_index):
            for j in range(dmc.num_outputs):
                v = dmc.output_index.subspace_at(j)
                assert dmc.trans[i, j] == transition_prob(MIXED, u, v)

    def test_support_iff_contained_and_mass_positive(self):
        dmc = build_dmc(MIXED)
        h = MIXED.h
        for i, u in enumerate(dmc.input_index):
            for j in range(dmc.num_outputs):
                v = dmc.output_index.subspace_at(j)
                expected = contains(u, v) and MIXED.rank_def.probs[h - v.dim] > 0
                assert (dmc.trans[i, j] > 0) == expected

    def test_output_ordering_dimension_ascending(self):
        dmc = build_dmc(MIXED)
        dims = [dmc.output_index.dim_of(j) for j in range(dmc.num_outputs)]
        assert dims == sorted(dims)
        assert dims[0] == 0 and dims[-1] == MIXED.h
        assert all(
            dmc.component_of_output[j] == MIXED.h - dims[j] for j in range(dmc.num_outputs)
        )

    def test_rows_are_permutations_of_each_other(self):
        for spec in (DELTA0, DELTA1, MIXED):
            trans = build_dmc(spec).trans
            first = np.sort(trans[0])
            for row in trans[1:]:
                assert np.array_equal(np.sort(row), first)

    def test_enumeration_cap(self):
        spec = ChannelSpec(F2, 20, 10, RankDefDist.point_mass(10, 0))
        with pytest.raises(EnumerationTooLargeError):
            build_dmc(spec)
        with pytest.raises(EnumerationTooLargeError):
            alphabet_sizes(spec)


class TestComponents:
    def test_zero_deficiency_component_is_identity(self):
        dmc = build_dmc(MIXED)
        comp = components(dmc)[0]
        assert comp.rho == 0
        assert comp.selection_prob == MIXED.rank_def.probs[0]
        assert np.array_equal(comp.trans, np.eye(7))

    def test_full_deficiency_component_collapses_to_zero_space(self):
        comp = components(build_dmc(MIXED))[2]
        assert comp.rho == 2
        assert comp.trans.shape == (7, 1)
        assert np.all(comp.trans == 1.0)
        assert comp.output_index[0] == Subspace.zero(F2, 3)

    def test_middle_component_uniform_over_three(self):
        comp = components(build_dmc(MIXED))[1]
        assert comp.trans.shape == (7, 7)
        for row in comp.trans:
            assert np.count_nonzero(row) == 3
            assert np.allclose(row[row > 0], 1 / 3)

    def test_rows_sum_to_one_and_strong_symmetry(self):
        for spec in (DELTA0, MIXED, _spec([0.25, 0.25, 0.25, 0.25], q=2, T=4, h=3)):
            for comp in components(build_dmc(spec)):
                assert np.max(np.abs(comp.trans.sum(axis=1) - 1.0)) < 1e-12
                rows = np.sort(comp.trans, axis=1)
                assert all(np.array_equal(rows[0], rows[i]) for i in range(rows.shape[0]))
                cols = np.sort(comp.trans, axis=0)
                assert all(
                    np.array_equal(cols[:, 0], cols[:, j]) for j in range(cols.shape[1])
                )

    def test_component_equals_renormalized_restriction_when_selected(self):
        dmc = build_dmc(MIXED)
        offsets = dmc.output_index.offsets
        for comp in components(dmc):
            sel = comp.selection_prob
            if sel > 0:
                d = MIXED.h - comp.rho
                block = dmc.trans[:, offsets[d] : offsets[d + 1]]
                assert np.allclose(comp.trans, block / sel, rtol=0, atol=1e-15)


class TestSimulateOneUse:
    def test_full_rank_transfer_preserves_input(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert simulate_one_use(DELTA0, U, rng) == U

    def test_zero_rank_transfer_collapses_to_zero_space(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            assert simulate_one_use(DELTA2, U, rng).dim == 0

    def test_empirical_law_matches_transition_prob(self):
        rng = np.random.default_rng(20100608)
        draws = 3000
        counts: dict[Subspace, int] = {}
        for _ in range(draws):
            v = simulate_one_use(DELTA1, U, rng)
            counts[v] = counts.get(v, 0) + 1
        support = enumerate_subspaces_of(U, 1)
        assert set(counts) == set(support)
        stat = chi2_statistic(
            [counts[v] for v in support], [draws * transition_prob(DELTA1, U, v) for v in support]
        )
        assert stat < CHI2_CRIT_P001[2]

    def test_input_dimension_checked(self):
        with pytest.raises(DimensionMismatchError):
            simulate_one_use(DELTA0, V100, np.random.default_rng(0))


class TestBasisInvariance:
    """Marginalizing over the random basis makes the output law independent
    of which fixed rank-r transfer matrix acted."""

    @pytest.mark.parametrize("g_rows", [[[0, 1], [0, 1]], [[1, 0], [1, 0]], [[1, 1], [0, 0]]])
    def test_fixed_rank_one_transfer_uniform_over_bases(self, g_rows):
        g = Mat.from_rows(F2, g_rows)
        assert rank(g) == 1
        bases = [m for m in matrices_by_rank(2, 2, 3)[2] if span(Mat(F2, m)) == U]
        counts: dict[Subspace, int] = {}
        for x in bases:
            v = span(matmul(g, Mat(F2, x)))
            counts[v] = counts.get(v, 0) + 1
        assert set(counts) == set(enumerate_subspaces_of(U, 1))
        assert set(counts.values()) == {2}

    def test_without_the_selector_the_output_depends_on_the_transfer_matrix(self):
        """Regression for the worked examples: fixed basis X', transfer
        matrices G and G' of equal rank, different output subspaces."""
        x_prime = Mat.from_rows(F2, [[0, 1, 0], [1, 1, 0]])
        g = Mat.from_rows(F2, [[0, 1], [0, 1]])
        g_prime = Mat.from_rows(F2, [[1, 0], [1, 0]])
        left = span(matmul(g, x_prime))
        right = span(matmul(g_prime, x_prime))
        assert subspace_label(left) == "110"
        assert subspace_label(right) == "010"
        assert left != right


class TestEstimateRankDefDist:
    def test_all_zero_observations(self):
        d = estimate_rank_def_dist([0, 0, 0], 2)
        assert d.probs.tolist() == [1.0, 0.0, 0.0]

    def test_counting(self):
        d = estimate_rank_def_dist([0, 0, 1, 1], 2)
        assert d.probs.tolist() == [0.5, 0.5, 0.0]

    def test_rank_mode_converts(self):
        d = estimate_rank_def_dist([2, 2, 1, 0], 2, kind="rank")
        assert d.probs.tolist() == [0.5, 0.25, 0.25]

    def test_out_of_range(self):
        with pytest.raises(ObservationOutOfRangeError):
            estimate_rank_def_dist([0, 3], 2)
        with pytest.raises(ObservationOutOfRangeError):
            estimate_rank_def_dist([-1], 2)

    def test_empty_stream(self):
        with pytest.raises(InsufficientDataError):
            estimate_rank_def_dist([], 2)

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            estimate_rank_def_dist([0], 2, kind="guess")

    def test_recovers_simulated_distribution(self):
        rng = np.random.default_rng(33)
        n = 2000
        observed = [MIXED.h - simulate_one_use(MIXED, U, rng).dim for _ in range(n)]
        est = estimate_rank_def_dist(observed, MIXED.h)
        for r in range(3):
            p = MIXED.rank_def.probs[r]
            sigma = np.sqrt(p * (1 - p) / n)
            assert abs(est.probs[r] - p) < 3 * sigma + 1e-12


class TestExports:
    def test_dict_export_shape_and_metadata(self):
        dmc = build_dmc(MIXED)
        data = dmc_to_dict(dmc)
        assert data["format_version"] == 1
        assert (data["q"], data["T"], data["h"]) == (2, 3, 2)
        assert len(data["input_labels"]) == 7
        assert len(data["output_labels"]) == 15
        assert data["output_dims"] == sorted(data["output_dims"])
        assert len(data["transitions"]) == 7
        assert all(len(row) == 15 for row in data["transitions"])
        json.dumps(data)

    def test_csv_export_parses_back(self):
        dmc = build_dmc(MIXED)
        buf = io.StringIO()
        dmc_to_csv(dmc, buf)
        lines = buf.getvalue().strip().split("\n")
        assert len(lines) == 8
        header = lines[0].split(",")
        assert header[0] == "input" and len(header) == 16
        for line in lines[1:]:
            cells = line.split(",")
            row = [float(x) for x in cells[1:]]
            assert abs(sum(row) - 1.0) < 1e-10

    def test_zero_space_label_is_empty_string(self):
        dmc = build_dmc(MIXED)
        assert dmc.output_index.labels()[0] == ""
