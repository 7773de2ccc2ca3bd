//! Empirical machinery for the temperedness dichotomy: growth-ratio profiles
//! `sup_t |X_t|/(1+t^α)`, Marcinkiewicz–Zygmund scaling of jump partial sums,
//! dyadic-block martingale suprema, and the localized bump probe that reads a
//! compound Poisson path/sheet at its n-th jump time through `⟨X, φ_n⟩`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::levy_measure::{LevyTriplet, PamVerdict};
use crate::path_sim::{first_jump_times, simulate_path, PathSkeleton1D, SimConfig};
use crate::rng;
use crate::schwartz;
use crate::stats;

// ---------------------------------------------------------------------------
// Growth profiles
// ---------------------------------------------------------------------------

/// Running suprema of `|X_t|/(1+t^α)` at increasing horizons.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    pub alpha: f64,
    /// `(T, sup_{t ≤ T} |X_t|/(1+t^α))`, nondecreasing in `T`.
    pub checkpoints: Vec<(f64, f64)>,
}

/// Profile of a simulated path. The supremum of a piecewise-constant-plus-grid
/// path is attained at jump times and grid points; a synthetic uniform grid is
/// added when a drift or Brownian part makes the path non-constant between
/// events.
pub fn growth_profile(
    path: &PathSkeleton1D,
    alpha: f64,
    checkpoint_ts: &[f64],
) -> Result<GrowthProfile> {
    if alpha <= 0.0 {
        return Err(CoreError::invalid("alpha", "must be positive"));
    }
    let mut cps: Vec<f64> = checkpoint_ts.to_vec();
    cps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if cps.is_empty() || *cps.last().unwrap() > path.horizon {
        return Err(CoreError::Precondition(
            "checkpoints must be nonempty and within the simulated horizon".into(),
        ));
    }
    // candidate times where the weighted sup can be attained
    let mut cands: Vec<f64> = path.jumps.iter().map(|j| j.time).collect();
    for b in &path.small.bands {
        cands.extend(b.events.iter().map(|&(t, _)| t));
    }
    let smooth = path.triplet.gamma != 0.0
        || !path.brownian.is_empty()
        || path.small.bands.iter().any(|b| b.mean_rate != 0.0);
    if smooth {
        let n = if path.brownian.is_empty() {
            16_384
        } else {
            path.brownian.len() - 1
        };
        let t_max = *cps.last().unwrap();
        cands.extend((0..=n).map(|i| t_max * i as f64 / n as f64));
    }
    cands.retain(|&t| t <= *cps.last().unwrap());
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut out = Vec::with_capacity(cps.len());
    let mut sup: f64 = 0.0;
    let mut i = 0usize;
    for &cp in &cps {
        while i < cands.len() && cands[i] <= cp {
            let t = cands[i];
            let x = path.evaluate(t)?;
            let w = x.abs() / (1.0 + t.powf(alpha));
            if w > sup {
                sup = w;
            }
            i += 1;
        }
        out.push((cp, sup));
    }
    Ok(GrowthProfile {
        alpha,
        checkpoints: out,
    })
}

// ---------------------------------------------------------------------------
// Marcinkiewicz–Zygmund scaling
// ---------------------------------------------------------------------------

/// The normalized sequence `n^{-1/p} |Z_n|` for `p ∈ (0,1]`.
pub fn mz_scaling(partial_sums: &[f64], p: f64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(CoreError::invalid("p", "must be in (0,1]"));
    }
    Ok(partial_sums
        .iter()
        .enumerate()
        .map(|(i, z)| z.abs() / ((i + 1) as f64).powf(1.0 / p))
        .collect())
}

/// Summary statistic: max over `n ∈ [n0, N]` (1-based).
pub fn mz_summary(seq: &[f64], n0: usize) -> f64 {
    seq.iter()
        .skip(n0.saturating_sub(1))
        .fold(0.0f64, |a, &b| a.max(b))
}

// ---------------------------------------------------------------------------
// Dichotomy experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyConfig {
    /// Pair of horizons `(T_lo, T_hi)` the factor rule compares.
    pub horizons: (f64, f64),
    pub seeds: usize,
    pub base_seed: u64,
    /// Axis along which the d ≥ 2 slice runs (`None`: the last axis). The
    /// coordinates are exchangeable, so the choice only fixes which slab of
    /// the Poisson measure is read.
    pub slice_axis: Option<usize>,
    /// PAM grid (descending).
    pub eta_grid: Vec<f64>,
    /// α grid used when no PAM witness exists.
    pub alpha_grid: Vec<f64>,
    /// Median growth ≤ this factor counts as bounded.
    pub bounded_factor: f64,
    /// Median growth ≥ this factor counts as divergent.
    pub divergent_factor: f64,
    /// Grid step for paths with a drift/Brownian part.
    pub grid_dt: f64,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig {
            horizons: (1e2, 1e4),
            seeds: 200,
            base_seed: 1,
            slice_axis: None,
            eta_grid: vec![1.0, 0.5, 0.4, 0.25, 0.1],
            alpha_grid: vec![1.0, 2.0, 4.0, 8.0],
            bounded_factor: 2.0,
            divergent_factor: 10.0,
            grid_dt: 0.05,
        }
    }
}

/// Finite-horizon trend verdict under the calibrated factor rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Bounded,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaTrend {
    pub alpha: f64,
    pub median_lo: f64,
    pub median_hi: f64,
    pub growth_factor: f64,
    pub trend: Trend,
}

/// Outcome of the dichotomy experiment: the analytic PAM verdict side by side
/// with the empirical growth trend, and whether they agree.
#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    #[serde(skip)]
    pub pam: PamVerdict,
    pub has_pam: Option<bool>,
    pub pam_evidence: String,
    pub per_alpha: Vec<AlphaTrend>,
    pub trend: Trend,
    pub consistent: bool,
    /// Set when the verdicts disagree or cannot be compared.
    pub flag: Option<String>,
}

fn classify_factor(cfg: &DichotomyConfig, lo: f64, hi: f64) -> (f64, Trend) {
    if !lo.is_finite() && !hi.is_finite() {
        // the profile overflowed f64 before the first horizon: growth beyond
        // the representable range cannot be bounded
        return (f64::INFINITY, Trend::Divergent);
    }
    if lo == 0.0 && hi == 0.0 {
        return (1.0, Trend::Bounded);
    }
    let factor = hi / lo;
    let trend = if factor >= cfg.divergent_factor {
        Trend::Divergent
    } else if factor <= cfg.bounded_factor {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    };
    (factor, trend)
}

/// Run the dichotomy experiment for a triplet in dimension `d`.
///
/// For `d ≥ 2` the compound Poisson part is read along the coordinate slice
/// `L_t = X^P_{(1,…,1,t)}`; only the slab `[0,1]^{d-1} × [0,T]` influences the
/// slice, so exactly that restriction of the sheet is simulated.
pub fn dichotomy_experiment(
    triplet: &LevyTriplet,
    d: usize,
    cfg: &DichotomyConfig,
) -> Result<DichotomyReport> {
    if d == 0 {
        return Err(CoreError::invalid("d", "must be ≥ 1"));
    }
    let (t_lo, t_hi) = cfg.horizons;
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(CoreError::invalid("horizons", "need 0 < T_lo < T_hi"));
    }
    if let Some(axis) = cfg.slice_axis {
        if axis >= d {
            return Err(CoreError::invalid("slice_axis", "must be < d"));
        }
    }
    let lambda = triplet.nu.large_jump_mass();
    let pam = if lambda > 0.0 {
        triplet.nu.classify_pam(&cfg.eta_grid)?
    } else {
        PamVerdict::Pam {
            witness_eta: cfg.eta_grid.first().copied().unwrap_or(1.0),
            evidence: "no large jumps: every moment of the jump part is finite".into(),
        }
    };

    // α selection: max(1/η, 1) under PAM with jumps; ⌊d/2⌋+1 for the pure
    // martingale/drift case (the dyadic-block exponent); a grid otherwise
    let alphas: Vec<f64> = if lambda <= 0.0 {
        vec![(d as f64 / 2.0).floor() + 1.0]
    } else {
        match &pam {
            PamVerdict::Pam { witness_eta, .. } => vec![(1.0 / witness_eta).max(1.0)],
            _ => cfg.alpha_grid.clone(),
        }
    };

    let sim_cfg = SimConfig::new(t_hi, cfg.grid_dt.min(t_hi), 2f64.powi(-10))?;
    let sups: Vec<Vec<(f64, f64)>> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|s| -> Result<Vec<(f64, f64)>> {
            // the slice of the compound Poisson sheet along the last axis is a
            // rate-λ compound Poisson process; drift and Brownian parts slice
            // to γ·t and a Brownian motion (variance 1·t), so the path
            // simulator reproduces the slice law directly
            let path = simulate_path(triplet, &sim_cfg, rng::substream(cfg.base_seed, s, 7).random())?;
            alphas
                .iter()
                .map(|&alpha| {
                    let prof = growth_profile(&path, alpha, &[t_lo, t_hi])?;
                    Ok((prof.checkpoints[0].1, prof.checkpoints[1].1))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_alpha = Vec::with_capacity(alphas.len());
    for (ai, &alpha) in alphas.iter().enumerate() {
        let lo: Vec<f64> = sups.iter().map(|r| r[ai].0).collect();
        let hi: Vec<f64> = sups.iter().map(|r| r[ai].1).collect();
        let median_lo = stats::median(&lo);
        let median_hi = stats::median(&hi);
        let (growth_factor, trend) = classify_factor(cfg, median_lo, median_hi);
        per_alpha.push(AlphaTrend {
            alpha,
            median_lo,
            median_hi,
            growth_factor,
            trend,
        });
    }

    // aggregate: PAM mode uses its single α; no-PAM requires divergence at all α
    let trend = match &pam {
        PamVerdict::Pam { .. } => per_alpha[0].trend,
        _ => {
            if per_alpha.iter().all(|a| a.trend == Trend::Divergent) {
                Trend::Divergent
            } else if per_alpha.iter().all(|a| a.trend == Trend::Bounded) {
                Trend::Bounded
            } else {
                Trend::Inconclusive
            }
        }
    };
    let (consistent, flag) = match (&pam, trend) {
        (PamVerdict::Pam { .. }, Trend::Bounded) => (true, None),
        (PamVerdict::NoPam { .. }, Trend::Divergent) => (true, None),
        (PamVerdict::Unknown { evidence }, _) => (
            false,
            Some(format!("PAM verdict unknown: {evidence}")),
        ),
        (v, t) => (
            false,
            Some(format!(
                "analytic verdict {:?} vs empirical trend {:?}",
                v.has_pam(),
                t
            )),
        ),
    };
    let (has_pam, pam_evidence) = match &pam {
        PamVerdict::Pam { evidence, .. } => (Some(true), evidence.clone()),
        PamVerdict::NoPam { evidence } => (Some(false), evidence.clone()),
        PamVerdict::Unknown { evidence } => (None, evidence.clone()),
    };
    Ok(DichotomyReport {
        pam,
        has_pam,
        pam_evidence,
        per_alpha,
        trend,
        consistent,
        flag,
    })
}

// ---------------------------------------------------------------------------
// Dyadic-block suprema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct BlockStat {
    pub k: Vec<u32>,
    pub sum_k: u32,
    pub mean_sup: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicReport {
    pub dim: usize,
    pub alpha: f64,
    pub blocks: Vec<BlockStat>,
    /// Least-squares decay exponent `e` in `E sup ≈ C·2^{-e·Σk}`.
    pub fitted_exponent: f64,
    /// The exponent `α/d - 1/2` predicted by the Cairoli/Doob estimate.
    pub predicted_exponent: f64,
}

#[derive(Clone, Debug)]
pub struct DyadicConfig {
    pub sigma: f64,
    pub alpha: f64,
    /// Diagonal blocks `k = (j,…,j)` for `j = 1..=max_level`.
    pub max_level: u32,
    pub seeds: usize,
    pub base_seed: u64,
    pub grid_dt: f64,
}

/// Monte-Carlo estimates of `E sup_{s∈[a_k,b_k]} |M_s|/|s|^α` over dyadic
/// blocks `[a_k, b_k]`, `a_k = (2^{k₁-1},…)`, `b_k = (2^{k₁},…)`, for a
/// mean-zero martingale field (pure Brownian here), with the geometric decay
/// fit in `Σ k_i`.
pub fn dyadic_block_sup(dim: usize, cfg: &DyadicConfig) -> Result<DyadicReport> {
    if !(cfg.sigma > 0.0) {
        return Err(CoreError::Precondition(
            "dyadic-block experiment needs a mean-zero martingale part (σ > 0, γ = 0, no large jumps)"
                .into(),
        ));
    }
    let horizon = 2f64.powi(cfg.max_level as i32);
    let blocks: Vec<Vec<u32>> = (1..=cfg.max_level).map(|j| vec![j; dim]).collect();
    let triplet = LevyTriplet::pure_brownian(cfg.sigma);
    let sim_cfg = SimConfig::new(horizon, cfg.grid_dt, 1.0)?;

    let per_seed: Vec<Vec<f64>> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            match dim {
                1 => {
                    let path = simulate_path(&triplet, &sim_cfg, rng::substream(cfg.base_seed, s, 11).random())?;
                    let dt = path.grid_dt;
                    Ok(blocks
                        .iter()
                        .map(|k| {
                            let a = 2f64.powi(k[0] as i32 - 1);
                            let b = 2f64.powi(k[0] as i32);
                            let i0 = (a / dt).ceil() as usize;
                            let i1 = ((b / dt).floor() as usize).min(path.brownian.len() - 1);
                            let mut sup: f64 = 0.0;
                            for i in i0..=i1 {
                                let t = i as f64 * dt;
                                sup = sup.max(path.brownian[i].abs() / t.powf(cfg.alpha));
                            }
                            sup
                        })
                        .collect())
                }
                2 => {
                    let sheet = crate::sheet_sim::simulate_sheet(
                        &triplet,
                        &sim_cfg,
                        2,
                        rng::substream(cfg.base_seed, s, 11).random(),
                    )?;
                    let dt = sheet.grid_dt;
                    let m = sheet.cells_per_axis + 1;
                    Ok(blocks
                        .iter()
                        .map(|k| {
                            let a = 2f64.powi(k[0] as i32 - 1);
                            let b = 2f64.powi(k[0] as i32);
                            let i0 = (a / dt).ceil() as usize;
                            let i1 = ((b / dt).floor() as usize).min(sheet.cells_per_axis);
                            let mut sup: f64 = 0.0;
                            for j in i0..=i1 {
                                for i in i0..=i1 {
                                    let x = i as f64 * dt;
                                    let y = j as f64 * dt;
                                    let r = (x * x + y * y).sqrt();
                                    let w = sheet.brownian[j * m + i].abs() / r.powf(cfg.alpha);
                                    sup = sup.max(w);
                                }
                            }
                            sup
                        })
                        .collect())
                }
                d => Err(CoreError::Unsupported(format!(
                    "dyadic blocks implemented for d ≤ 2, got {d}"
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut stats_out = Vec::with_capacity(blocks.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (bi, k) in blocks.iter().enumerate() {
        let vals: Vec<f64> = per_seed.iter().map(|r| r[bi]).collect();
        let mean = stats::mean(&vals);
        let se = stats::stderr(&vals);
        let sum_k: u32 = k.iter().sum();
        xs.push(sum_k as f64);
        ys.push(mean.log2());
        stats_out.push(BlockStat {
            k: k.clone(),
            sum_k,
            mean_sup: mean,
            stderr: se,
        });
    }
    let fitted = -stats::slope(&xs, &ys);
    Ok(DyadicReport {
        dim,
        alpha: cfg.alpha,
        blocks: stats_out,
        fitted_exponent: fitted,
        predicted_exponent: cfg.alpha / dim as f64 - 0.5,
    })
}

// ---------------------------------------------------------------------------
// Bump probe
// ---------------------------------------------------------------------------

/// One probe reading: the pairing `⟨X, φ_n⟩`, the path value at the n-th jump,
/// and whether the bump support was free of other jumps.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProbeSample {
    pub n: usize,
    pub pairing: f64,
    pub at_jump: f64,
    pub hit: bool,
}

/// Probe a simulated 1-d compound Poisson path with the `k = 2` bump family.
pub fn bump_probe_path(path: &PathSkeleton1D, n_range: (usize, usize)) -> Result<Vec<ProbeSample>> {
    let (n_min, n_max) = n_range;
    if n_min < 1 || n_max < n_min {
        return Err(CoreError::invalid("n_range", "need 1 ≤ n_min ≤ n_max"));
    }
    if path.jumps.len() < n_max + 1 {
        return Err(CoreError::Precondition(format!(
            "path has {} jumps, probe needs {}",
            path.jumps.len(),
            n_max + 1
        )));
    }
    let mut out = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let s_n = path.jumps[n - 1].time;
        let z_n = path.jumps[n - 1].cum;
        let width = s_n.powi(-2);
        let hit = path.jumps[n].time - s_n >= width;
        // ⟨X, φ_n⟩ = Σ_i Y_i Φ_n(S_i): 1 for i ≤ n, a partial tail inside the
        // bump support, 0 beyond it
        let bump = schwartz::mollifier_bump_1d(s_n, 2);
        let tail = bump.tail_integral();
        let mut pairing = z_n;
        for j in &path.jumps[n..] {
            if j.time >= s_n + width {
                break;
            }
            pairing += j.size * tail.eval(&[j.time]);
        }
        out.push(ProbeSample {
            n,
            pairing,
            at_jump: z_n,
            hit,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    pub seeds: usize,
    pub misses: usize,
    pub miss_freq: f64,
    pub stderr: f64,
    /// Summable upper bound from the Gamma inverse-moment estimates.
    pub bound: f64,
    pub hits: usize,
    pub max_hit_pairing_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub dim: usize,
    pub lambda: f64,
    pub rows: Vec<ProbeRow>,
}


/// `λⁿ/(n-1)!`.
fn early_jump_bound(lambda: f64, n: usize) -> f64 {
    let mut v = lambda;
    for i in 1..n {
        v *= lambda / i as f64;
    }
    v
}

/// Miss-probability bound for the 1-d probe: `E(λ/S_n²) = λ³/((n-1)(n-2))`.
pub fn miss_bound_1d(lambda: f64, n: usize) -> f64 {
    lambda.powi(3) / ((n - 1) as f64 * (n - 2) as f64)
}

/// Miss-probability bound for the d-dimensional probe:
/// `2λⁿ/(n-1)! + 3^{d-1}λ²/((n-1)(n-2)) + 2^{d-1}λ³/((n-1)(n-2)(n-3))`.
pub fn miss_bound_dd(lambda: f64, n: usize, d: usize) -> f64 {
    let n1 = (n - 1) as f64;
    let n2 = (n - 2) as f64;
    let n3 = (n - 3) as f64;
    2.0 * early_jump_bound(lambda, n)
        + 3f64.powi(d as i32 - 1) * lambda.powi(2) / (n1 * n2)
        + 2f64.powi(d as i32 - 1) * lambda.powi(3) / (n1 * n2 * n3)
}

/// 1-d bump-probe experiment: per-n empirical miss frequencies against the
/// summable bound, plus the pairing identity `⟨X, φ_n⟩ = X_{S_n}` on hits.
pub fn bump_probe_experiment_1d(
    lambda: f64,
    jump_size: f64,
    n_range: (usize, usize),
    seeds: usize,
    base_seed: u64,
) -> Result<ProbeReport> {
    let (n_min, n_max) = n_range;
    if n_min < 4 {
        return Err(CoreError::invalid("n_range", "1-d bound needs n ≥ 4"));
    }
    let per_seed: Vec<Vec<(bool, f64)>> = (0..seeds as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng::substream(base_seed, s, 13);
            let times = first_jump_times(lambda, n_max + 1, &mut rng);
            (n_min..=n_max)
                .map(|n| {
                    let s_n = times[n - 1];
                    let width = s_n.powi(-2);
                    let hit = times[n] - s_n >= width;
                    let err = if hit {
                        // remaining jumps are at or beyond the bump support:
                        // the pairing collapses to Z_n·∫φ_n with unit mass
                        let bump = schwartz::mollifier_bump_1d(s_n, 2);
                        let tail = bump.tail_integral();
                        let z_n = jump_size * n as f64;
                        let mut pairing = z_n;
                        for t in &times[n..] {
                            if *t >= s_n + width {
                                break;
                            }
                            pairing += jump_size * tail.eval(&[*t]);
                        }
                        (pairing - z_n).abs()
                    } else {
                        0.0
                    };
                    (hit, err)
                })
                .collect()
        })
        .collect();
    let rows = (n_min..=n_max)
        .enumerate()
        .map(|(idx, n)| {
            let misses = per_seed.iter().filter(|r| !r[idx].0).count();
            let hits = seeds - misses;
            let (p, se) = stats::freq_with_stderr(misses, seeds);
            let max_err = per_seed.iter().map(|r| r[idx].1).fold(0.0f64, f64::max);
            ProbeRow {
                n,
                seeds,
                misses,
                miss_freq: p,
                stderr: se,
                bound: miss_bound_1d(lambda, n),
                hits,
                max_hit_pairing_error: max_err,
            }
        })
        .collect();
    Ok(ProbeReport {
        dim: 1,
        lambda,
        rows,
    })
}

/// d-dimensional bump-probe experiment (`d ≥ 2`).
///
/// The slice `L_t = X^P_{(1,…,1,t)}` depends only on the slab
/// `[0,1]^{d-1}×[0,T]`; the miss events additionally involve jumps in the
/// region `([0,2]^{d-1} ∖ [0,1]^{d-1})×[0,T]`. The Poisson measure restricted
/// to these two disjoint regions is simulated exactly; jumps elsewhere cannot
/// influence any probe statistic (for `S_n ≥ 1` the probe box lies inside
/// `[0,2]^{d-1}×[0,T]`, and `S_n < 1` is counted as a miss, consistently with
/// the early-jump term of the bound).
pub fn bump_probe_experiment_dd(
    lambda: f64,
    jump_size: f64,
    d: usize,
    n_range: (usize, usize),
    seeds: usize,
    base_seed: u64,
) -> Result<ProbeReport> {
    let (n_min, n_max) = n_range;
    if d < 2 {
        return Err(CoreError::invalid("d", "use the 1-d probe for d = 1"));
    }
    if n_min < 5 {
        return Err(CoreError::invalid("n_range", "d-dim bound needs n ≥ 5"));
    }
    let per_seed: Vec<Vec<(bool, f64)>> = (0..seeds as u64)
        .into_par_iter()
        .map(|s| {
            let mut rg = rng::substream(base_seed, s, 17);
            // slab jumps: the slice's jump times along the last axis, with the
            // transverse coordinates uniform on [0,1]^{d-1}
            let times = first_jump_times(lambda, n_max + 1, &mut rg);
            let slab_coords: Vec<Vec<f64>> = times
                .iter()
                .map(|_| (0..d - 1).map(|_| rg.random_range(0.0..1.0)).collect())
                .collect();
            // the adjacent region ([0,2]^{d-1} ∖ [0,1]^{d-1}) × [0, T_d]
            let t_d = times[n_max] + 1.5;
            let region_vol = (2f64.powi(d as i32 - 1) - 1.0) * t_d;
            let count = Poisson::new(lambda * region_vol)
                .expect("positive rate")
                .sample(&mut rg) as usize;
            let mut outer: Vec<Vec<f64>> = Vec::with_capacity(count);
            for _ in 0..count {
                // rejection: transverse coordinates in [0,2]^{d-1} ∖ [0,1]^{d-1}
                let trans: Vec<f64> = loop {
                    let c: Vec<f64> = (0..d - 1).map(|_| rg.random_range(0.0..2.0)).collect();
                    if c.iter().any(|&x| x > 1.0) {
                        break c;
                    }
                };
                let mut pos = trans;
                pos.push(rg.random_range(0.0..t_d));
                outer.push(pos);
            }

            (n_min..=n_max)
                .map(|n| {
                    let s_n = times[n - 1];
                    let width = s_n.powi(-3);
                    let mut miss = s_n <= 1.0 || times[n] - s_n < width;
                    if !miss {
                        for pos in &outer {
                            let trans_in = pos[..d - 1].iter().all(|&x| x < 1.0 + width);
                            if trans_in && pos[d - 1] < s_n + width {
                                miss = true;
                                break;
                            }
                        }
                    }
                    let err = if !miss {
                        // pairing ⟨X^P, θΦ_n⟩ over the simulated regions: with
                        // θ ≡ 1 on ℝ₊^d this is Σ Y_i Φ_n(τ_i)
                        let bump = schwartz::mollifier_bump_dd(s_n, d);
                        let tail = bump.tail_integral();
                        let l_sn = jump_size * n as f64;
                        let mut pairing = 0.0;
                        let mut pos = vec![0.0; d];
                        for (i, t) in times.iter().enumerate() {
                            pos[..d - 1].copy_from_slice(&slab_coords[i]);
                            pos[d - 1] = *t;
                            pairing += jump_size * tail.eval(&pos);
                        }
                        for p in &outer {
                            pairing += jump_size * tail.eval(p);
                        }
                        (pairing - l_sn).abs()
                    } else {
                        0.0
                    };
                    (!miss, err)
                })
                .collect()
        })
        .collect();
    let rows = (n_min..=n_max)
        .enumerate()
        .map(|(idx, n)| {
            let misses = per_seed.iter().filter(|r| !r[idx].0).count();
            let hits = seeds - misses;
            let (p, se) = stats::freq_with_stderr(misses, seeds);
            let max_err = per_seed.iter().map(|r| r[idx].1).fold(0.0f64, f64::max);
            ProbeRow {
                n,
                seeds,
                misses,
                miss_freq: p,
                stderr: se,
                bound: miss_bound_dd(lambda, n, d),
                hits,
                max_hit_pairing_error: max_err,
            }
        })
        .collect();
    Ok(ProbeReport {
        dim: d,
        lambda,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_measure::{Atom, LevyMeasure};

    fn atom_measure(position: f64, mass: f64) -> LevyMeasure {
        LevyMeasure::FiniteAtomic(vec![Atom { position, mass }])
    }

    #[test]
    fn drift_profile_converges_to_half() {
        // sup t/(1+t²) = 1/2 at t = 1
        let triplet = LevyTriplet::pure_drift(1.0);
        let cfg = SimConfig::new(10.0, 0.01, 1.0).unwrap();
        let path = simulate_path(&triplet, &cfg, 0).unwrap();
        let prof = growth_profile(&path, 2.0, &[1.0, 5.0, 10.0]).unwrap();
        let last = prof.checkpoints.last().unwrap().1;
        assert!((last - 0.5).abs() < 1e-4, "sup {last}");
        // nondecreasing in T
        for w in prof.checkpoints.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn profile_checkpoint_monotonicity_on_jump_paths() {
        let triplet = LevyTriplet::pure_jump(atom_measure(2.0, 1.0)).unwrap();
        let cfg = SimConfig::new(100.0, 1.0, 1.0).unwrap();
        for seed in 0..20 {
            let path = simulate_path(&triplet, &cfg, seed).unwrap();
            let prof = growth_profile(&path, 1.5, &[10.0, 30.0, 100.0]).unwrap();
            for w in prof.checkpoints.windows(2) {
                assert!(w[1].1 >= w[0].1);
            }
        }
    }

    #[test]
    fn mz_constant_jumps_scale_exactly() {
        // Y ≡ 1, p = 1: n^{-1} Z_n = 1 for all n
        let z: Vec<f64> = (1..=100).map(|n| n as f64).collect();
        let seq = mz_scaling(&z, 1.0).unwrap();
        assert!(seq.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(mz_scaling(&z, 1.5).is_err());
    }

    #[test]
    fn mz_bounded_jumps_converge_to_mean() {
        // positive bounded jumps: max_{n ≥ n0} n^{-1}Z_n → E Y within 5%
        use crate::rng::stream;
        let nu = LevyMeasure::FiniteAtomic(vec![
            Atom {
                position: 2.0,
                mass: 0.7,
            },
            Atom {
                position: 3.0,
                mass: 0.3,
            },
        ]);
        let expect = 2.0 * 0.7 + 3.0 * 0.3;
        let medians: Vec<f64> = (0..50u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(300, s);
                let mut z = 0.0;
                let mut partial = Vec::with_capacity(100_000);
                for _ in 0..100_000 {
                    z += nu.sample_large_jump(&mut rng).unwrap();
                    partial.push(z);
                }
                let seq = mz_scaling(&partial, 1.0).unwrap();
                mz_summary(&seq, 10_000)
            })
            .collect();
        let med = stats::median(&medians);
        assert!(
            (med - expect).abs() < 0.05 * expect,
            "median {med} vs {expect}"
        );
    }

    #[test]
    fn mz_heavy_tail_divergence_for_log_squared() {
        // p = 0.5: the normalized max grows without bound (≥ 10× from N=10³ to N=10⁵)
        use crate::rng::stream;
        let nu = LevyMeasure::LogSquaredTail { lambda: 1.0 };
        let ratios: Vec<f64> = (0..60u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(301, s);
                let mut z = 0.0;
                let mut partial = Vec::with_capacity(100_000);
                for _ in 0..100_000 {
                    z += nu.sample_large_jump(&mut rng).unwrap();
                    partial.push(z);
                }
                let seq = mz_scaling(&partial, 0.5).unwrap();
                let at_1e3 = mz_summary(&seq[..1_000], 1);
                let at_1e5 = mz_summary(&seq, 1);
                if at_1e5.is_infinite() {
                    // partial sums overflowed f64: growth beyond representable
                    f64::INFINITY
                } else {
                    at_1e5 / at_1e3
                }
            })
            .collect();
        let med = stats::median(&ratios);
        assert!(med >= 10.0, "median growth ratio {med}");
    }

    #[test]
    fn mz_pareto_normalized_max_decreases_with_start() {
        // E|Y|^{0.4} < ∞ for Pareto(0.5): max_{n≥n0} n^{-2.5}|Z_n| shrinks as n0 grows
        use crate::rng::stream;
        let nu = LevyMeasure::ParetoTail {
            beta: 0.5,
            lambda: 1.0,
        };
        let pairs: Vec<(f64, f64)> = (0..200u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(302, s);
                let mut z = 0.0;
                let mut partial = Vec::with_capacity(100_000);
                for _ in 0..100_000 {
                    z += nu.sample_large_jump(&mut rng).unwrap();
                    partial.push(z);
                }
                let seq = mz_scaling(&partial, 0.4).unwrap();
                (mz_summary(&seq, 1_000), mz_summary(&seq, 30_000))
            })
            .collect();
        let early = stats::median(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        let late = stats::median(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        assert!(late < early, "normalized max not decreasing: {early} -> {late}");
    }

    #[test]
    fn dichotomy_pareto_is_pam_and_bounded() {
        let triplet = LevyTriplet::pure_jump(LevyMeasure::ParetoTail {
            beta: 0.5,
            lambda: 1.0,
        })
        .unwrap();
        let cfg = DichotomyConfig {
            seeds: 100,
            horizons: (1e2, 1e3),
            ..DichotomyConfig::default()
        };
        let rep = dichotomy_experiment(&triplet, 1, &cfg).unwrap();
        assert_eq!(rep.has_pam, Some(true));
        assert!((rep.per_alpha[0].alpha - 2.5).abs() < 1e-12);
        assert_eq!(rep.trend, Trend::Bounded);
        assert!(rep.consistent, "{:?}", rep.flag);
    }

    #[test]
    fn dichotomy_log_squared_is_divergent() {
        let triplet =
            LevyTriplet::pure_jump(LevyMeasure::LogSquaredTail { lambda: 1.0 }).unwrap();
        let cfg = DichotomyConfig {
            seeds: 100,
            horizons: (1e2, 1e3),
            ..DichotomyConfig::default()
        };
        let rep = dichotomy_experiment(&triplet, 1, &cfg).unwrap();
        assert_eq!(rep.has_pam, Some(false));
        assert_eq!(rep.trend, Trend::Divergent);
        assert!(rep.consistent, "{:?}", rep.flag);
    }

    #[test]
    fn dichotomy_is_independent_of_thread_count() {
        let triplet = LevyTriplet::pure_jump(LevyMeasure::ParetoTail {
            beta: 0.5,
            lambda: 1.0,
        })
        .unwrap();
        let cfg = DichotomyConfig {
            seeds: 30,
            horizons: (50.0, 500.0),
            ..DichotomyConfig::default()
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| dichotomy_experiment(&triplet, 1, &cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| dichotomy_experiment(&triplet, 1, &cfg).unwrap());
        assert_eq!(
            single.per_alpha[0].median_hi.to_bits(),
            many.per_alpha[0].median_hi.to_bits()
        );
        assert_eq!(
            single.per_alpha[0].median_lo.to_bits(),
            many.per_alpha[0].median_lo.to_bits()
        );
    }

    #[test]
    fn dichotomy_is_deterministic_in_config() {
        let triplet = LevyTriplet::pure_jump(LevyMeasure::ParetoTail {
            beta: 0.5,
            lambda: 1.0,
        })
        .unwrap();
        let cfg = DichotomyConfig {
            seeds: 50,
            horizons: (50.0, 500.0),
            ..DichotomyConfig::default()
        };
        let a = dichotomy_experiment(&triplet, 1, &cfg).unwrap();
        let b = dichotomy_experiment(&triplet, 1, &cfg).unwrap();
        assert_eq!(a.per_alpha[0].median_lo.to_bits(), b.per_alpha[0].median_lo.to_bits());
        assert_eq!(a.per_alpha[0].median_hi.to_bits(), b.per_alpha[0].median_hi.to_bits());
    }

    #[test]
    fn dyadic_brownian_block_decay_d1() {
        let cfg = DyadicConfig {
            sigma: 1.0,
            alpha: 1.0,
            max_level: 6,
            seeds: 2_000,
            base_seed: 7,
            grid_dt: 2f64.powi(-5),
        };
        let rep = dyadic_block_sup(1, &cfg).unwrap();
        // decay factor per unit k ≈ 2^{-1/2}
        assert!(
            (rep.fitted_exponent - 0.5).abs() <= 0.125,
            "fitted {} vs predicted 0.5",
            rep.fitted_exponent
        );
        for w in rep.blocks.windows(2) {
            assert!(w[1].mean_sup < w[0].mean_sup, "means not decaying");
        }
    }

    #[test]
    fn zero_variance_field_has_zero_blocks() {
        let cfg = DyadicConfig {
            sigma: 0.0,
            alpha: 1.0,
            max_level: 3,
            seeds: 10,
            base_seed: 0,
            grid_dt: 0.25,
        };
        assert!(dyadic_block_sup(1, &cfg).is_err());
    }

    #[test]
    fn probe_single_path_reads_partial_sums() {
        let triplet = LevyTriplet::pure_jump(atom_measure(2.0, 1.0)).unwrap();
        let cfg = SimConfig::new(100.0, 1.0, 1.0).unwrap();
        for seed in 0..20 {
            let path = simulate_path(&triplet, &cfg, seed).unwrap();
            if path.jumps.len() < 12 {
                continue;
            }
            let samples = bump_probe_path(&path, (4, 10)).unwrap();
            for s in &samples {
                assert_eq!(s.at_jump, 2.0 * s.n as f64);
                if s.hit {
                    assert!(
                        (s.pairing - s.at_jump).abs() <= 1e-6,
                        "n={}: pairing {} vs {}",
                        s.n,
                        s.pairing,
                        s.at_jump
                    );
                }
            }
        }
    }

    #[test]
    fn probe_1d_miss_frequency_within_bound() {
        let rep = bump_probe_experiment_1d(1.0, 2.0, (4, 20), 20_000, 99).unwrap();
        for row in &rep.rows {
            assert!(
                row.miss_freq <= row.bound + 3.0 * row.stderr,
                "n={}: freq {} bound {} se {}",
                row.n,
                row.miss_freq,
                row.bound,
                row.stderr
            );
            assert!(row.max_hit_pairing_error <= 1e-6);
        }
    }

    #[test]
    fn probe_dd_miss_frequency_within_bound() {
        let rep = bump_probe_experiment_dd(1.0, 2.0, 2, (5, 20), 5_000, 101).unwrap();
        for row in &rep.rows {
            assert!(
                row.miss_freq <= row.bound + 3.0 * row.stderr,
                "n={}: freq {} bound {} se {}",
                row.n,
                row.miss_freq,
                row.bound,
                row.stderr
            );
            assert!(
                row.max_hit_pairing_error <= 1e-6,
                "n={}: pairing error {}",
                row.n,
                row.max_hit_pairing_error
            );
        }
    }

    #[test]
    fn dichotomy_brownian_slice_is_bounded() {
        // pure Brownian: no jumps, PAM trivially, α = ⌊d/2⌋+1 profile bounded
        let triplet = LevyTriplet::pure_brownian(1.0);
        let cfg = DichotomyConfig {
            seeds: 60,
            horizons: (1e2, 1e3),
            grid_dt: 0.05,
            eta_grid: vec![2.0],
            ..DichotomyConfig::default()
        };
        let rep = dichotomy_experiment(&triplet, 2, &cfg).unwrap();
        assert_eq!(rep.has_pam, Some(true));
        // pure martingale case uses the dyadic exponent ⌊d/2⌋+1
        assert_eq!(rep.per_alpha[0].alpha, 2.0);
        assert_eq!(rep.trend, Trend::Bounded);
        assert!(rep.consistent);
    }
}
