import numpy as np
import pytest

import rwrs.walk as walk_mod
from rwrs.randomness import IncrementLaw, SeedScheme, StreamKind, derive_site_value
from rwrs.walk import (
    GridSpec,
    empirical_sheet,
    occupation_map,
    occupation_quadratic,
    occupation_statistic,
    rescale,
    rescale_factor,
    sheet_from_site_values,
    simulate_walk,
    walk_from_steps,
)

LAW = IncrementLaw.lazy_simple()


def _walk_seed(r=0, master=42):
    return SeedScheme(master, StreamKind.WALK, r)


def _scenery_seed(r=0, master=42):
    return SeedScheme(master, StreamKind.SCENERY, r)


def test_simulate_walk_forced_steps(monkeypatch):
    forced = iter([np.array([1, 1, 1]), np.array([1, -1, 1, -1])])
    monkeypatch.setattr(walk_mod, "sample_increments",
                        lambda law, rng, size: next(forced))
    p1 = simulate_walk(3, LAW, _walk_seed())
    assert p1.positions.tolist() == [1, 2, 3]
    p2 = simulate_walk(4, LAW, _walk_seed())
    assert p2.positions.tolist() == [1, 0, 1, 0]


def test_simulate_walk_rejects_zero_length():
    with pytest.raises(ValueError):
        simulate_walk(0, LAW, _walk_seed())


def test_walk_variance_rate():
    # Var(S_n)/n = Var(X) = 1/2 for the lazy walk; estimated from the pooled
    # step increments of 100 walks (a 100-point variance of S_n alone has a
    # standard error of ~0.07 and cannot resolve +-0.01)
    n = 1_000_000
    total_sq, total, count = 0.0, 0.0, 0
    ends = []
    for r in range(100):
        pos = simulate_walk(n, LAW, _walk_seed(r)).positions
        steps = np.diff(np.concatenate(([0], pos))).astype(np.float64)
        total_sq += float(np.sum(steps**2))
        total += float(steps.sum())
        count += steps.size
        ends.append(pos[-1])
    pooled_var = total_sq / count - (total / count) ** 2
    assert abs(pooled_var - 0.5) < 0.01
    # endpoint-level sanity at the resolution 100 replicates can support
    assert abs(np.var(ends) / n - 0.5) < 0.3


def test_occupation_map_examples():
    assert occupation_map(walk_from_steps([1, 1, 1]), 3).as_dict() == {1: 1, 2: 1, 3: 1}
    p = walk_from_steps([1, -1, 1])  # positions 1, 0, 1
    assert occupation_map(p, 3).as_dict() == {0: 1, 1: 2}


def test_occupation_total_is_prefix_length():
    for r in range(10):
        p = simulate_walk(500, LAW, _walk_seed(r))
        for m in (1, 17, 250, 500):
            assert occupation_map(p, m).total == m


def test_occupation_map_rejects_bad_prefix():
    p = walk_from_steps([1, 1])
    with pytest.raises(ValueError):
        occupation_map(p, 3)
    with pytest.raises(ValueError):
        occupation_map(p, 0)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(np.array([0.0, 0.5]), np.array([0.0, 1.0]))  # s misses 1
    with pytest.raises(ValueError):
        GridSpec(np.array([0.0, 0.5, 0.5, 1.0]), np.array([0.0, 1.0]))  # not strict
    g = GridSpec.uniform(5, 9)
    assert g.s.size == 5 and g.t.size == 9


def test_sheet_boundary_zeros():
    p = simulate_walk(200, LAW, _walk_seed())
    sheet = empirical_sheet(p, _scenery_seed(), GridSpec.uniform(9, 9))
    assert np.all(sheet.values[0] == 0.0)       # s = 0 row
    assert np.all(sheet.values[:, 0] == 0.0)    # t = 0 column
    assert np.all(sheet.values[:, -1] == 0.0)   # t = 1 column


def test_sheet_two_step_example():
    grid = GridSpec(np.array([0.0, 1.0]), np.array([0.0, 0.5, 1.0]))
    values = sheet_from_site_values(np.array([0.3, 0.7]), 2, grid)
    assert values[1, 1] == pytest.approx((1 - 0.5) + (0 - 0.5))


def test_sheet_matches_bruteforce():
    n = 50
    grid = GridSpec(np.array([0.0, 0.2, 0.5, 0.83, 1.0]),
                    np.array([0.0, 0.1, 0.42, 0.75, 0.9, 1.0]))
    p = simulate_walk(n, LAW, _walk_seed(3))
    sheet = empirical_sheet(p, _scenery_seed(3), grid)
    y = derive_site_value(_scenery_seed(3), p.positions)
    for i, s in enumerate(grid.s):
        for j, t in enumerate(grid.t):
            expected = sum((1.0 if y[k] <= t else 0.0) - t
                           for k in range(int(np.floor(n * s))))
            assert sheet.values[i, j] == pytest.approx(expected, abs=1e-9)


def test_sheet_indicator_count_monotone_in_t():
    p = simulate_walk(300, LAW, _walk_seed(5))
    grid = GridSpec.uniform(5, 17)
    sheet = empirical_sheet(p, _scenery_seed(5), grid)
    for i, s in enumerate(grid.s):
        m = int(np.floor(300 * s))
        raw_counts = sheet.values[i] + m * grid.t
        assert np.all(np.diff(raw_counts) >= 0)
        assert np.allclose(raw_counts, np.round(raw_counts))


def test_sheet_refinement_consistency():
    p = simulate_walk(128, LAW, _walk_seed(9))
    coarse = GridSpec(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.25, 1.0]))
    fine = GridSpec(np.linspace(0, 1, 9), np.array([0.0, 0.25, 1.0]))
    a = empirical_sheet(p, _scenery_seed(9), coarse)
    b = empirical_sheet(p, _scenery_seed(9), fine)
    for i, s in enumerate(coarse.s):
        j = int(np.where(np.isclose(fine.s, s))[0][0])
        assert np.array_equal(a.values[i], b.values[j])


def test_rescale_factors():
    assert rescale_factor(2.0, 16) == pytest.approx(0.125)
    assert rescale_factor(2.0, 1) == 1.0
    assert rescale_factor(1.5, 4096) == pytest.approx(1.0 / 256.0)


def test_rescale_flips_flag_and_rejects_double():
    p = simulate_walk(64, LAW, _walk_seed())
    sheet = empirical_sheet(p, _scenery_seed(), GridSpec.uniform(3, 3))
    scaled = rescale(sheet)
    assert scaled.scaled and not sheet.scaled
    assert np.allclose(scaled.values, sheet.values * 64.0**-0.75)
    with pytest.raises(ValueError):
        rescale(scaled)


def test_occupation_quadratic_zero_cut():
    p = walk_from_steps([1, 1, 1])
    q = occupation_quadratic(p, [0.0, 1.0], 2.0)
    assert q[0, 0] == 0.0 and q[0, 1] == 0.0 and q[1, 0] == 0.0
    assert q[1, 1] > 0


def test_occupation_quadratic_three_distinct_sites():
    q = occupation_quadratic(walk_from_steps([1, 1, 1]), [1.0], 2.0)
    assert q[0, 0] == pytest.approx(3.0**-0.5)


def test_occupation_quadratic_cauchy_schwarz():
    for r in range(5):
        p = simulate_walk(400, LAW, _walk_seed(r, master=7))
        q = occupation_quadratic(p, [0.25, 0.6, 1.0], 2.0)
        for i in range(3):
            for j in range(3):
                assert q[i, j] ** 2 <= q[i, i] * q[j, j] * (1 + 1e-12)


def test_occupation_quadratic_monotone_before_scaling():
    p = simulate_walk(512, LAW, _walk_seed(11))
    lo = occupation_quadratic(p, [0.3], 2.0) * 512**1.5
    hi = occupation_quadratic(p, [0.8], 2.0) * 512**1.5
    assert hi[0, 0] >= lo[0, 0]


def test_occupation_quadratic_validates_svec():
    p = walk_from_steps([1, 1])
    with pytest.raises(ValueError):
        occupation_quadratic(p, [0.5, 0.2], 2.0)
    with pytest.raises(ValueError):
        occupation_quadratic(p, [0.5, 1.5], 2.0)


def test_occupation_statistics_match_counts():
    p = simulate_walk(300, LAW, _walk_seed(2))
    counts = occupation_map(p, 300).counts.astype(float)
    assert occupation_statistic(p, "sumN2") == pytest.approx(np.sum(counts**2))
    assert occupation_statistic(p, "sumN3") == pytest.approx(np.sum(counts**3))
    assert occupation_statistic(p, "sumN4") == pytest.approx(np.sum(counts**4))
    assert occupation_statistic(p, "sumN2_sq") == pytest.approx(np.sum(counts**2) ** 2)
    expected_max = counts.max() * 300.0**-0.75
    assert occupation_statistic(p, "maxN_scaled", 2.0) == pytest.approx(expected_max)
    with pytest.raises(ValueError):
        occupation_statistic(p, "nope")


def test_unit_drift_walk_sum_of_squares():
    # every site visited exactly once, so sum N^2 = n and the growth
    # exponent over n is exactly 1
    from rwrs.diagnostics import fit_loglog

    ns = (10, 100, 1000, 10000)
    stats = []
    for n in ns:
        p = walk_from_steps(np.ones(n, dtype=np.int64))
        stat = occupation_statistic(p, "sumN2")
        assert stat == n
        stats.append(stat)
    assert fit_loglog(np.array(ns, float), np.array(stats, float)).slope == \
        pytest.approx(1.0, abs=1e-12)
