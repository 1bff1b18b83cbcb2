"""Distributional comparisons, scaling-exponent fits, and regularity estimates.

Two-sample comparisons use the Kolmogorov-Smirnov or energy statistic with
permutation p-values; exponent claims are checked as log-log regression
slopes. Sample generation is deterministic per replicate index, so the
samplers accept a ``map_fn`` (e.g. a process pool's ``map``) and produce the
same output for any degree of parallelism.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .limit import (
    LimitSheet,
    default_cell_width,
    kiefer_increments,
    limit_sheet,
    local_time_field,
    local_time_quadratic,
    simulate_levy_path,
)
from .randomness import (
    Alpha,
    IncrementLaw,
    SeedScheme,
    StreamKind,
    _fold,
    calibrate_stable_scale,
    stream_generator,
)
from .walk import (
    EmpiricalSheet,
    GridSpec,
    empirical_sheet,
    occupation_quadratic,
    occupation_statistic,
    rescale,
    simulate_walk,
)

THETA_COMBINATIONS = ((1.0, 1.0), (1.0, -1.0))


@dataclass(eq=False)
class SampleSet:
    """Labelled vector of iid Monte Carlo draws of a scalar functional."""

    label: str
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.size == 0:
            raise ValueError("sample set must be nonempty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample set must contain only finite values")


@dataclass(frozen=True)
class ComparisonReport:
    """Two-sample statistic with a permutation p-value."""

    statistic_name: str
    statistic: float
    p_value: float
    sample_sizes: tuple[int, int]
    permutations: int
    labels: tuple[str, str] = ("a", "b")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (xs, ys); for exponent estimates both are logs."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    slope: float
    intercept: float
    stderr: float
    degenerate: bool = False


@dataclass(frozen=True)
class LimitConfig:
    """Resolution of the simulated limit process."""

    steps: int = 1 << 17
    cells: int = 512
    n_calib: int = 20_000
    calib_replicates: int = 4_000


def _as_sample(x, label: str) -> SampleSet:
    if isinstance(x, SampleSet):
        return x
    return SampleSet(label=label, values=np.asarray(x, dtype=np.float64))


def two_sample_distance(a, b, method: str = "ks", permutations: int = 1000,
                        seed: int = 0) -> ComparisonReport:
    """Two-sample KS or energy statistic with a permutation p-value.

    KS is the sup-difference of the two empirical CDFs. The energy statistic
    is computed through its one-dimensional identity
    ``2 * integral (F_a - F_b)^2 dx``, which equals the usual
    ``2 E|X-Y| - E|X-X'| - E|Y-Y'|`` form. The p-value permutes the pooled
    sample labels.
    """
    a = _as_sample(a, "a")
    b = _as_sample(b, "b")
    if method not in ("ks", "energy"):
        raise ValueError("method must be 'ks' or 'energy'")
    if permutations < 500:
        raise ValueError("permutations must be >= 500")

    na, nb = a.values.size, b.values.size
    pooled = np.concatenate((a.values, b.values))
    labels = np.concatenate((np.ones(na, dtype=np.int64),
                             np.zeros(nb, dtype=np.int64)))
    order = np.argsort(pooled, kind="stable")
    v = pooled[order]
    labels_sorted = labels[order]
    # |F_a - F_b| may only be evaluated where the pooled value changes
    boundary = np.append(np.diff(v) > 0, True)
    gaps = np.diff(v)
    ranks = np.arange(1, na + nb + 1, dtype=np.int64)

    def stats_for(rows: np.ndarray) -> np.ndarray:
        # rows holds 0/1 membership of sample a; integer arithmetic keeps the
        # KS statistic exact (0 for identical samples, 1 for disjoint ones)
        c = np.cumsum(rows, axis=1)
        if method == "ks":
            numer = np.abs(c * (na + nb) - ranks * na)
            return np.max(numer * boundary, axis=1) / float(na * nb)
        w = c * (1.0 / na + 1.0 / nb) - ranks * (1.0 / nb)
        return 2.0 * np.sum(w[:, :-1] ** 2 * gaps, axis=1)

    observed = float(stats_for(labels_sorted[None, :])[0])
    rng = stream_generator(SeedScheme(seed & 0xFFFFFFFFFFFFFFFF, StreamKind.KIEFER, 0),
                           salt=0x7E57)
    count = 0
    batch = 250
    done = 0
    while done < permutations:
        m = min(batch, permutations - done)
        rows = rng.permuted(np.tile(labels_sorted, (m, 1)), axis=1)
        count += int(np.sum(stats_for(rows) >= observed - 1e-15))
        done += m
    p_value = (1.0 + count) / (permutations + 1.0)
    return ComparisonReport(
        statistic_name=method, statistic=observed, p_value=p_value,
        sample_sizes=(na, nb), permutations=permutations,
        labels=(a.label, b.label))


def ks_statistic(a, b) -> float:
    """Two-sample KS statistic alone (no permutation p-value)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = a.size, b.size
    pooled = np.concatenate((a, b))
    labels = np.concatenate((np.ones(na, dtype=np.int64),
                             np.zeros(nb, dtype=np.int64)))
    order = np.argsort(pooled, kind="stable")
    v = pooled[order]
    boundary = np.append(np.diff(v) > 0, True)
    c = np.cumsum(labels[order])
    ranks = np.arange(1, na + nb + 1, dtype=np.int64)
    numer = np.abs(c * (na + nb) - ranks * na)
    return float(np.max(numer * boundary)) / float(na * nb)


def energy_statistic_pairwise(a, b) -> float:
    """Naive O(n*m) energy statistic; independent cross-check of the fast path."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    cross = np.mean(np.abs(a[:, None] - b[None, :]))
    within_a = np.mean(np.abs(a[:, None] - a[None, :]))
    within_b = np.mean(np.abs(b[:, None] - b[None, :]))
    return 2.0 * cross - within_a - within_b


def fit_loglog(x, y) -> SlopeFit:
    """OLS fit of log y on log x."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 3:
        raise ValueError("need at least three points for a slope fit")
    if np.any(y <= 0.0):
        return SlopeFit(xs=tuple(np.log(x)), ys=tuple(np.full(x.size, -np.inf)),
                        slope=0.0, intercept=0.0, stderr=0.0, degenerate=True)
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    dof = max(x.size - 2, 1)
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return SlopeFit(xs=tuple(lx), ys=tuple(ly), slope=float(slope),
                    intercept=float(intercept), stderr=stderr)


def law_for_alpha(alpha, law: IncrementLaw | None = None) -> IncrementLaw:
    return law if law is not None else IncrementLaw.for_alpha(alpha)


def limit_scale(alpha, law: IncrementLaw | None = None,
                config: LimitConfig | None = None) -> float:
    """Stable scale matching the walk law; cached inside calibrate."""
    config = config or LimitConfig()
    return calibrate_stable_scale(law_for_alpha(alpha, law),
                                  n_calib=config.n_calib,
                                  replicates=config.calib_replicates)


# ---------------------------------------------------------------------------
# Per-replicate samplers (module level so process pools can pickle them).

def lemma1_discrete_replicate(index: int, alpha, s_vec, n: int,
                              master_seed: int, law=None) -> np.ndarray:
    law = law_for_alpha(alpha, law)
    path = simulate_walk(n, law, SeedScheme(master_seed, StreamKind.WALK, index))
    return occupation_quadratic(path, np.asarray(s_vec), alpha)


def lemma1_limit_replicate(index: int, alpha, s_vec, scale: float,
                           config: LimitConfig, master_seed: int) -> np.ndarray:
    path = simulate_levy_path(alpha, scale, config.steps,
                              SeedScheme(master_seed, StreamKind.LEVY, index))
    lt = local_time_field(path, default_cell_width(path, config.cells),
                          np.asarray(s_vec))
    return local_time_quadratic(lt, np.asarray(s_vec))


def discrete_quadratic_samples(alpha, s_vec, n: int, replicates: int,
                               master_seed: int = 0, law=None,
                               map_fn=map) -> np.ndarray:
    fn = partial(lemma1_discrete_replicate, alpha=Alpha.of(alpha),
                 s_vec=tuple(s_vec), n=n, master_seed=master_seed, law=law)
    return np.stack(list(map_fn(fn, range(replicates))))


def limit_quadratic_samples(alpha, s_vec, replicates: int,
                            config: LimitConfig | None = None,
                            master_seed: int = 0, scale: float | None = None,
                            law=None, map_fn=map) -> np.ndarray:
    config = config or LimitConfig()
    if scale is None:
        scale = limit_scale(alpha, law, config)
    fn = partial(lemma1_limit_replicate, alpha=Alpha.of(alpha),
                 s_vec=tuple(s_vec), scale=scale, config=config,
                 master_seed=master_seed)
    return np.stack(list(map_fn(fn, range(replicates))))


def _point_grid(points) -> GridSpec:
    s_axis = np.unique(np.concatenate(([0.0, 1.0], [p[0] for p in points])))
    t_axis = np.unique(np.concatenate(([0.0, 1.0], [p[1] for p in points])))
    return GridSpec(s_axis, t_axis)


def fdd_discrete_replicate(index: int, alpha, points, n: int,
                           master_seed: int, law=None) -> np.ndarray:
    law = law_for_alpha(alpha, law)
    grid = _point_grid(points)
    path = simulate_walk(n, law, SeedScheme(master_seed, StreamKind.WALK, index))
    sheet = rescale(empirical_sheet(
        path, SeedScheme(master_seed, StreamKind.SCENERY, index), grid))
    out = np.empty(len(points))
    for k, (s, t) in enumerate(points):
        i = int(np.searchsorted(grid.s, s))
        j = int(np.searchsorted(grid.t, t))
        out[k] = sheet.values[i, j]
    return out


def fdd_limit_replicate(index: int, alpha, points, scale: float,
                        config: LimitConfig, master_seed: int) -> np.ndarray:
    s_cuts = np.unique(np.asarray([p[0] for p in points]))
    t_grid = np.unique(np.concatenate(([0.0, 1.0], [p[1] for p in points])))
    path = simulate_levy_path(alpha, scale, config.steps,
                              SeedScheme(master_seed, StreamKind.LEVY, index))
    lt = local_time_field(path, default_cell_width(path, config.cells), s_cuts)
    kf = kiefer_increments(lt.x_left, lt.dx, t_grid,
                           SeedScheme(master_seed, StreamKind.KIEFER, index))
    sheet = limit_sheet(lt, kf)
    out = np.empty(len(points))
    for k, (s, t) in enumerate(points):
        i = int(np.searchsorted(s_cuts, s))
        j = int(np.searchsorted(t_grid, t))
        out[k] = sheet.values[i, j]
    return out


def fdd_discrete_samples(alpha, points, n: int, replicates: int,
                         master_seed: int = 0, law=None, map_fn=map) -> np.ndarray:
    fn = partial(fdd_discrete_replicate, alpha=Alpha.of(alpha),
                 points=tuple(points), n=n, master_seed=master_seed, law=law)
    return np.stack(list(map_fn(fn, range(replicates))))


def fdd_limit_samples(alpha, points, replicates: int,
                      config: LimitConfig | None = None, master_seed: int = 0,
                      scale: float | None = None, law=None, map_fn=map) -> np.ndarray:
    config = config or LimitConfig()
    if scale is None:
        scale = limit_scale(alpha, law, config)
    fn = partial(fdd_limit_replicate, alpha=Alpha.of(alpha),
                 points=tuple(points), scale=scale, config=config,
                 master_seed=master_seed)
    return np.stack(list(map_fn(fn, range(replicates))))


def limit_sheet_replicate(index: int, alpha, s_cuts, t_grid, scale: float,
                          config: LimitConfig, master_seed: int) -> LimitSheet:
    path = simulate_levy_path(alpha, scale, config.steps,
                              SeedScheme(master_seed, StreamKind.LEVY, index))
    lt = local_time_field(path, default_cell_width(path, config.cells),
                          np.asarray(s_cuts))
    kf = kiefer_increments(lt.x_left, lt.dx, np.asarray(t_grid),
                           SeedScheme(master_seed, StreamKind.KIEFER, index))
    return limit_sheet(lt, kf)


def limit_sheet_samples(alpha, s_cuts, t_grid, replicates: int,
                        config: LimitConfig | None = None, master_seed: int = 0,
                        scale: float | None = None, law=None,
                        map_fn=map) -> list[LimitSheet]:
    config = config or LimitConfig()
    if scale is None:
        scale = limit_scale(alpha, law, config)
    fn = partial(limit_sheet_replicate, alpha=Alpha.of(alpha),
                 s_cuts=tuple(s_cuts), t_grid=tuple(t_grid), scale=scale,
                 config=config, master_seed=master_seed)
    return list(map_fn(fn, range(replicates)))


def empirical_sheet_replicate(index: int, alpha, n: int, s_grid, t_grid,
                              master_seed: int, law=None,
                              scaled: bool = True) -> np.ndarray:
    law = law_for_alpha(alpha, law)
    grid = GridSpec(np.asarray(s_grid), np.asarray(t_grid))
    path = simulate_walk(n, law, SeedScheme(master_seed, StreamKind.WALK, index))
    sheet = empirical_sheet(
        path, SeedScheme(master_seed, StreamKind.SCENERY, index), grid)
    if scaled:
        sheet = rescale(sheet)
    return sheet.values


def moment_replicate(index: int, alpha, n: int, functional: str,
                     master_seed: int, law=None) -> float:
    law = law_for_alpha(alpha, law)
    path = simulate_walk(n, law, SeedScheme(master_seed, StreamKind.WALK, index))
    return occupation_statistic(path, functional, alpha)


# ---------------------------------------------------------------------------
# Verification operations.

def verify_lemma1(alpha, s_vec, n: int, replicates: int,
                  limit_config: LimitConfig | None = None, *,
                  master_seed: int = 0, law=None, method: str = "ks",
                  permutations: int = 1000,
                  map_fn=map) -> dict[tuple[int, int], ComparisonReport]:
    """Compare occupation cross products against local-time cross products.

    Returns one report per upper-triangle entry of the k x k matrices.
    """
    if n < 4096:
        raise ValueError("n must be >= 4096")
    if replicates < 500:
        raise ValueError("replicates must be >= 500")
    s_vec = tuple(float(s) for s in s_vec)
    discrete = discrete_quadratic_samples(alpha, s_vec, n, replicates,
                                          master_seed, law, map_fn)
    limit = limit_quadratic_samples(alpha, s_vec, replicates, limit_config,
                                    master_seed, law=law, map_fn=map_fn)
    reports = {}
    for i in range(len(s_vec)):
        for j in range(i, len(s_vec)):
            reports[(i, j)] = two_sample_distance(
                SampleSet("occupation", discrete[:, i, j]),
                SampleSet("local-time", limit[:, i, j]),
                method=method, permutations=permutations,
                seed=(master_seed + 7919 * (i * len(s_vec) + j + 1)))
    return reports


def verify_fdd(alpha, points, n: int, replicates: int,
               limit_config: LimitConfig | None = None, *,
               master_seed: int = 0, law=None, method: str = "ks",
               permutations: int = 1000, map_fn=map) -> dict:
    """Compare rescaled discrete marginals against limit-sheet marginals.

    Reports are keyed by ("point", (s, t)) for single points and
    ("pair", p, q, theta) for fixed linear combinations of point pairs.
    """
    if n < 16384:
        raise ValueError("n must be >= 16384")
    points = tuple((float(s), float(t)) for s, t in points)
    if not points:
        raise ValueError("need at least one evaluation point")
    discrete = fdd_discrete_samples(alpha, points, n, replicates,
                                    master_seed, law, map_fn)
    limit = fdd_limit_samples(alpha, points, replicates, limit_config,
                              master_seed, law=law, map_fn=map_fn)
    reports = {}
    for k, point in enumerate(points):
        reports[("point", point)] = two_sample_distance(
            SampleSet("rescaled-empirical", discrete[:, k]),
            SampleSet("limit-sheet", limit[:, k]),
            method=method, permutations=permutations,
            seed=master_seed + 104729 * (k + 1))
    for k1 in range(len(points)):
        for k2 in range(k1 + 1, len(points)):
            for theta in THETA_COMBINATIONS:
                da = theta[0] * discrete[:, k1] + theta[1] * discrete[:, k2]
                la = theta[0] * limit[:, k1] + theta[1] * limit[:, k2]
                reports[("pair", points[k1], points[k2], theta)] = \
                    two_sample_distance(
                        SampleSet("rescaled-empirical", da),
                        SampleSet("limit-sheet", la),
                        method=method, permutations=permutations,
                        seed=master_seed + 1299709 * (k1 + 2) + 15485863 * (k2 + 3)
                        + int(theta[1] > 0))
    return reports


def moment_scaling(alpha, n_list, functional: str, replicates: int, *,
                   master_seed: int = 0, law=None, map_fn=map) -> SlopeFit:
    """Log-log growth of an occupation functional against the walk length.

    Means over replicates are fitted for the sum functionals; for
    ``maxN_scaled`` the fit is over log-medians and the interesting output
    is the (expected monotone decreasing) sequence ``ys`` itself.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 4:
        raise ValueError("n_list must contain at least 4 points")
    ratios = np.diff(np.log(np.asarray(n_list, dtype=np.float64)))
    if np.any(ratios <= 0) or np.ptp(ratios) > 0.05 * ratios.mean():
        raise ValueError("n_list must be geometric")
    if replicates < 200:
        raise ValueError("replicates must be >= 200")
    levels = []
    for n in n_list:
        fn = partial(moment_replicate, alpha=Alpha.of(alpha), n=n,
                     functional=functional,
                     master_seed=_per_n_seed(master_seed, n), law=law)
        stats = np.fromiter(map_fn(fn, range(replicates)), dtype=np.float64,
                            count=replicates)
        levels.append(np.median(stats) if functional == "maxN_scaled"
                      else stats.mean())
    return fit_loglog(np.asarray(n_list, dtype=np.float64), np.asarray(levels))


def _per_n_seed(master_seed: int, n: int) -> int:
    # independent walks for each n in a scaling sweep
    return _fold(master_seed, n, 0x4D4F4D)


def sheet_axes(sheet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(values, s-axis, t-axis) for an empirical or limit sheet."""
    if isinstance(sheet, EmpiricalSheet):
        return sheet.values, sheet.grid.s, sheet.grid.t
    if isinstance(sheet, LimitSheet):
        return sheet.values, np.asarray(sheet.s_cuts), np.asarray(sheet.t_grid)
    raise TypeError("expected an EmpiricalSheet or LimitSheet")


def _uniform_spacing(axis: np.ndarray, name: str) -> float:
    gaps = np.diff(axis)
    if gaps.size == 0 or np.ptp(gaps) > 1e-9 * gaps.mean():
        raise ValueError(f"{name}-axis must be uniformly spaced for lag alignment")
    return float(gaps.mean())


def structure_function(sheets, direction: str, m: int, lags) -> SlopeFit:
    """Log-log fit of mean |increment|^m against the lag, along one axis.

    The smallest lag is dropped when it lies within two grid spacings, where
    discretization bias dominates.
    """
    if direction not in ("s", "t"):
        raise ValueError("direction must be 's' or 't'")
    if m not in (2, 4):
        raise ValueError("m must be 2 or 4")
    sheets = list(sheets)
    if not sheets:
        raise ValueError("need at least one sheet")
    _, s_axis, t_axis = sheet_axes(sheets[0])
    for sheet in sheets:
        if isinstance(sheet, EmpiricalSheet) and not sheet.scaled:
            raise ValueError("empirical sheets must be rescaled first")
    axis = s_axis if direction == "s" else t_axis
    spacing = _uniform_spacing(axis, direction)

    offsets = []
    for lag in sorted(float(x) for x in lags):
        k = int(round(lag / spacing))
        if k < 1 or abs(k * spacing - lag) > 1e-9:
            raise ValueError(f"lag {lag} is below or not aligned with the grid spacing")
        offsets.append(k)
    if offsets and offsets[0] * spacing < 2.0 * spacing:
        offsets = offsets[1:]
    if len(offsets) < 3:
        raise ValueError("need at least three usable lags")

    if direction == "s":
        cross_keep = (t_axis > 0.0) & (t_axis < 1.0)
    else:
        cross_keep = s_axis > 0.0

    means = []
    for k in offsets:
        total, count = 0.0, 0
        for sheet in sheets:
            vals, _, _ = sheet_axes(sheet)
            if direction == "s":
                diff = vals[k:, cross_keep] - vals[:-k, cross_keep]
            else:
                diff = vals[:, k:] - vals[:, :-k]
                diff = diff[cross_keep]
            total += float(np.sum(np.abs(diff) ** m))
            count += diff.size
        means.append(total / count)
    return fit_loglog(np.asarray(offsets, dtype=np.float64) * spacing,
                      np.asarray(means))


def self_similarity_factor(alpha, a: float) -> float:
    """Distributional scaling factor a^(1 - 1/(2 alpha)) for s -> a s."""
    return float(a) ** (1.0 - 1.0 / (2.0 * Alpha.of(alpha).value))


def self_similarity_test(alpha, a: float, s0: float, t0: float,
                         replicates: int,
                         limit_config: LimitConfig | None = None, *,
                         master_seed: int = 0, method: str = "ks",
                         permutations: int = 1000,
                         map_fn=map) -> ComparisonReport:
    """Compare W(a s0, t0) with a^(1-1/(2 alpha)) W(s0, t0), independent sides.

    At a = 1 the two sides are identically distributed, which makes a useful
    null case for the comparison machinery.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    if not 0.0 < s0 <= 1.0:
        raise ValueError("s0 must lie in (0, 1]")
    s_cuts = (a * s0, s0)
    t_grid = tuple(np.unique(np.asarray([0.0, t0, 1.0])))
    sheets = limit_sheet_samples(alpha, s_cuts, t_grid, 2 * replicates,
                                 limit_config, master_seed, map_fn=map_fn)
    j = int(np.searchsorted(np.asarray(t_grid), t0))
    shrunk = np.array([sheet.values[0, j] for sheet in sheets[:replicates]])
    scaled = self_similarity_factor(alpha, a) * np.array(
        [sheet.values[1, j] for sheet in sheets[replicates:]])
    return two_sample_distance(
        SampleSet("shrunk-time", shrunk), SampleSet("rescaled", scaled),
        method=method, permutations=permutations, seed=master_seed + 0x5E1F)


def bickel_wichura_modulus(sheet, delta: float) -> float:
    """Two-parameter sup-of-min increment modulus on the sheet's grid.

    For each axis, over triples a <= mid <= b with coordinate gap at most
    ``delta``, takes min of the two sup-norm increments and returns the
    larger of the two directional suprema.
    """
    values, s_axis, t_axis = sheet_axes(sheet)
    for axis, name in ((s_axis, "s"), (t_axis, "t")):
        if delta < np.max(np.diff(axis)) - 1e-12:
            raise ValueError(f"delta is below the {name}-grid resolution")

    def directional(profiles: np.ndarray, coords: np.ndarray) -> float:
        # profiles: one row per coordinate, sup-norm taken across columns
        dist = np.max(np.abs(profiles[:, None, :] - profiles[None, :, :]), axis=2)
        best = 0.0
        npts = coords.size
        for mid in range(npts):
            lo = int(np.searchsorted(coords, coords[mid] - delta, side="left"))
            hi = int(np.searchsorted(coords, coords[mid] + delta, side="right"))
            left = np.arange(lo, mid + 1)
            right = np.arange(mid, hi)
            if left.size == 0 or right.size == 0:
                continue
            pair_min = np.minimum(dist[left, mid][:, None], dist[mid, right][None, :])
            ok = (coords[right][None, :] - coords[left][:, None]) <= delta + 1e-12
            if np.any(ok):
                best = max(best, float(np.max(pair_min[ok])))
        return best

    along_t = directional(values.T, t_axis)
    along_s = directional(values, s_axis)
    return max(along_t, along_s)


def holder_norm_estimate(sheet, gamma: float, gamma_prime: float) -> float:
    """Empirical lower estimate of the anisotropic Hoelder constant.

    Maximizes |V(p) - V(q)| / (|ds|^gamma + |dt|^gamma') over all grid
    point pairs. On uniform grids pairs are grouped by index offset, which
    gives the same maximum at a fraction of the cost.
    """
    if not (0.0 < gamma < 1.0 and 0.0 < gamma_prime < 1.0):
        raise ValueError("gamma and gamma_prime must lie in (0, 1)")
    values, s_axis, t_axis = sheet_axes(sheet)
    for axis in (s_axis, t_axis):
        gaps = np.diff(axis)
        if gaps.size and np.ptp(gaps) > 1e-9 * gaps.mean():
            return _holder_pairs(values, s_axis, t_axis, gamma, gamma_prime)

    n_s, n_t = values.shape
    ds = (s_axis[-1] - s_axis[0]) / (n_s - 1) if n_s > 1 else 0.0
    dt = (t_axis[-1] - t_axis[0]) / (n_t - 1) if n_t > 1 else 0.0
    best = 0.0
    for a in range(n_s):
        lo = values[a:, :]
        hi = values[:n_s - a, :]
        for b in range(n_t):
            if a == 0 and b == 0:
                continue
            den = (a * ds) ** gamma + (b * dt) ** gamma_prime
            if b == 0:
                num = float(np.max(np.abs(lo - hi)))
            else:
                num = float(np.max(np.abs(lo[:, b:] - hi[:, :n_t - b])))
                if a > 0:
                    num = max(num, float(np.max(np.abs(lo[:, :n_t - b]
                                                       - hi[:, b:]))))
            best = max(best, num / den)
    return best


def _holder_pairs(values: np.ndarray, s_axis: np.ndarray, t_axis: np.ndarray,
                  gamma: float, gamma_prime: float) -> float:
    flat = values.ravel()
    ss = np.repeat(s_axis, t_axis.size)
    tt = np.tile(t_axis, s_axis.size)
    best = 0.0
    chunk = 256
    for start in range(0, flat.size, chunk):
        stop = min(start + chunk, flat.size)
        num = np.abs(flat[start:stop, None] - flat[None, :])
        den = (np.abs(ss[start:stop, None] - ss[None, :]) ** gamma
               + np.abs(tt[start:stop, None] - tt[None, :]) ** gamma_prime)
        mask = den > 0.0
        if np.any(mask):
            best = max(best, float(np.max(num[mask] / den[mask])))
    return best
