import math
from itertools import combinations

import numpy as np
import pytest

from claimdist import (
    chi_square_sf,
    kruskal_wallis,
    median_iqr,
    wilcoxon_rank_sum_exact,
)

# 32 similarity scores from the case-study's h-index group; the known
# summary row gives median 0.5763 and lower quartile 0.5208.
H_INDEX_VALUES = [
    0.7636, 0.6729, 0.6701, 0.6680, 0.6658, 0.6583, 0.6536, 0.6276,
    0.6132, 0.6130, 0.6093, 0.6065, 0.5973, 0.5935, 0.5902, 0.5788,
    0.5738, 0.5678, 0.5630, 0.5575, 0.5375, 0.5372, 0.5344, 0.5210,
    0.5200, 0.5138, 0.5121, 0.5053, 0.4886, 0.4652, 0.4555, 0.4265,
]


def enumerate_wilcoxon_p(x, y):
    """Brute-force two-sided exact p over all rank splits (tie-free data)."""
    n, m = len(x), len(y)
    pooled = sorted(x + y)
    ranks_x = {pooled.index(v) + 1 for v in x}
    u_obs = sum(ranks_x) - n * (n + 1) / 2
    us = []
    for subset in combinations(range(1, n + m + 1), n):
        us.append(sum(subset) - n * (n + 1) / 2)
    total = len(us)
    lower = sum(1 for u in us if u <= u_obs)
    upper = sum(1 for u in us if u >= u_obs)
    return min(1.0, 2.0 * min(lower, upper) / total)


class TestMedianIqr:
    def test_hand_interpolation(self):
        s = median_iqr([1, 2, 3, 4])
        assert s.median == pytest.approx(2.5)
        assert s.q1 == pytest.approx(1.75)
        assert s.q3 == pytest.approx(3.25)

    def test_singleton(self):
        s = median_iqr([7.0])
        assert (s.median, s.q1, s.q3) == (7.0, 7.0, 7.0)
        assert s.n == 1

    def test_32_value_group_summary(self):
        # median and lower quartile match the known summary row; the upper
        # quartile is the type-7 formula's own value (the summary row's
        # 0.6131 is not reproducible from these values with any standard
        # quantile convention).
        s = median_iqr(H_INDEX_VALUES)
        assert s.n == 32
        assert s.median == pytest.approx(0.5763, abs=5e-5)
        assert s.q1 == pytest.approx(0.5208, abs=5e-5)
        assert s.q3 == pytest.approx(0.6168, abs=5e-5)

    def test_empty_error(self):
        with pytest.raises(ValueError):
            median_iqr([])

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.normal(size=rng.integers(1, 40))
            s1 = median_iqr(x)
            s2 = median_iqr(rng.permutation(x))
            assert (s1.median, s1.q1, s1.q3) == (s2.median, s2.q1, s2.q3)

    def test_affine_equivariance(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = rng.normal(size=rng.integers(2, 30))
            a = float(rng.random() * 5 + 0.1)
            b = float(rng.normal())
            s = median_iqr(x)
            t = median_iqr(a * x + b)
            assert t.median == pytest.approx(a * s.median + b, abs=1e-12)
            assert t.q1 == pytest.approx(a * s.q1 + b, abs=1e-12)
            assert t.q3 == pytest.approx(a * s.q3 + b, abs=1e-12)

    def test_ordering_invariant(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            x = rng.normal(size=rng.integers(1, 25))
            s = median_iqr(x)
            assert s.q1 <= s.median <= s.q3


class TestKruskalWallis:
    def test_hand_three_groups(self):
        res = kruskal_wallis({"a": [1, 2], "b": [3, 4], "c": [5, 6]})
        assert res.statistic == pytest.approx(4.5714, abs=1e-4)
        assert res.p_value == pytest.approx(0.1017, abs=1e-4)
        assert res.method == "chi-square-approx"

    def test_all_equal_defines_zero(self):
        res = kruskal_wallis({"a": [5, 5], "b": [5, 5, 5]})
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_requires_two_nonempty_groups(self):
        with pytest.raises(ValueError):
            kruskal_wallis({"a": [1, 2]})
        with pytest.raises(ValueError):
            kruskal_wallis({"a": [1], "b": []})

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            groups = {
                g: list(rng.normal(size=rng.integers(2, 10))) for g in ("x", "y", "z")
            }
            ref = kruskal_wallis(groups)
            transformed = {g: [math.exp(v) for v in vs] for g, vs in groups.items()}
            res = kruskal_wallis(transformed)
            assert res.statistic == pytest.approx(ref.statistic, abs=1e-10)

    def test_tie_correction_against_reference(self):
        # frozen from scipy.stats.kruskal on the same data
        res = kruskal_wallis({"a": [1, 1, 2], "b": [2, 3, 3]})
        assert res.statistic == pytest.approx(3.3333333333333, abs=1e-10)
        assert res.p_value == pytest.approx(0.0678891548618, abs=1e-10)
        res3 = kruskal_wallis({"a": [1, 2, 2, 4], "b": [2, 3, 5], "c": [1, 5, 6, 6]})
        assert res3.statistic == pytest.approx(2.4784820031299, abs=1e-10)
        assert res3.p_value == pytest.approx(0.2896039434827, abs=1e-10)


class TestWilcoxonExact:
    def test_hand_example(self):
        res = wilcoxon_rank_sum_exact([1, 2], [3, 4])
        assert res.method == "exact"
        assert res.p_value == pytest.approx(1 / 3, abs=1e-9)

    def test_forced_tie_uses_normal_path(self):
        res = wilcoxon_rank_sum_exact([5.0], [5.0])
        assert res.method == "normal-approx-tie-corrected"
        assert res.p_value == 1.0

    def test_empty_error(self):
        with pytest.raises(ValueError):
            wilcoxon_rank_sum_exact([], [1.0])

    def test_symmetric_interleaved_sets_give_p_one(self):
        x, y = [1, 4, 5, 8], [2, 3, 6, 7]
        res = wilcoxon_rank_sum_exact(x, y)
        assert res.method == "exact"
        assert res.p_value == 1.0
        assert enumerate_wilcoxon_p(x, y) == 1.0

    def test_extreme_separation(self):
        res = wilcoxon_rank_sum_exact([1, 2, 3], [10, 11, 12])
        assert res.method == "exact"
        assert res.p_value == pytest.approx(0.1, abs=1e-12)

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(4)
        checked = 0
        while checked < 200:
            n = int(rng.integers(1, 7))
            m = int(rng.integers(1, 7))
            values = rng.normal(size=n + m)
            if np.unique(values).size < values.size:
                continue
            x, y = list(values[:n]), list(values[n:])
            res = wilcoxon_rank_sum_exact(x, y)
            assert res.method == "exact"
            assert abs(res.p_value - enumerate_wilcoxon_p(x, y)) <= 1e-12
            checked += 1

    def test_ties_tie_corrected_normal(self):
        # frozen from scipy.stats.mannwhitneyu (two-sided, asymptotic) on the same data
        res = wilcoxon_rank_sum_exact([1, 2, 2, 3], [2, 4, 5, 6])
        assert res.method == "normal-approx-tie-corrected"
        assert res.statistic == pytest.approx(2.0)
        assert res.p_value == pytest.approx(0.1037536775210, abs=1e-10)

    def test_stars_annotation(self):
        assert wilcoxon_rank_sum_exact([1, 2, 3], [10, 11, 12]).stars == ""
        strong = wilcoxon_rank_sum_exact(list(range(10)), list(range(20, 30)))
        assert strong.p_value <= 0.01
        assert strong.stars == "**"


class TestChiSquareSf:
    def test_zero_is_one(self):
        assert chi_square_sf(0.0, 5) == 1.0

    def test_df2_closed_form_hand_value(self):
        assert chi_square_sf(4.5714, 2) == pytest.approx(math.exp(-2.2857), abs=1e-4)

    def test_df2_closed_form_grid(self):
        for x in np.arange(0.0, 50.5, 0.5):
            assert abs(chi_square_sf(float(x), 2) - math.exp(-x / 2)) <= 1e-10

    def test_df1_closed_form(self):
        for x in (0.1, 0.5, 1.0, 3.2, 9.0, 25.0):
            expected = math.erfc(math.sqrt(x / 2))
            assert abs(chi_square_sf(x, 1) - expected) <= 1e-10

    def test_df4_closed_form(self):
        for x in (0.2, 1.0, 4.0, 10.0, 30.0):
            expected = math.exp(-x / 2) * (1 + x / 2)
            assert abs(chi_square_sf(x, 4) - expected) <= 1e-10

    def test_monotone_decreasing_in_x(self):
        for df in (1, 2, 3, 7, 15):
            values = [chi_square_sf(x, df) for x in np.linspace(0, 40, 81)]
            assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            chi_square_sf(-1.0, 2)
        with pytest.raises(ValueError):
            chi_square_sf(1.0, 0)

    def test_range_fuzzed(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            x = float(rng.random() * 100)
            df = int(rng.integers(1, 30))
            p = chi_square_sf(x, df)
            assert 0.0 <= p <= 1.0
