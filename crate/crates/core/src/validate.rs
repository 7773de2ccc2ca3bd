//! The acceptance suite: ten numbered criteria with pinned seeds and pinned
//! tolerances, each runnable on its own. The CLI `validate` subcommand and the
//! `acceptance` integration test both drive [`run_all`].

use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{functional_log, mc_char_functional, McConfig};
use crate::error::Result;
use crate::growth::{
    bump_probe_experiment_1d, bump_probe_experiment_dd, dichotomy_experiment, dyadic_block_sup,
    DichotomyConfig, DyadicConfig, Trend,
};
use crate::levy_measure::{
    asymmetric_half_stable_custom, half_stable_custom, Atom, LevyMeasure, LevyTriplet,
};
use crate::pairing::{FieldGrid, FieldRef, Pairer};
use crate::path_sim::{
    first_jump_times, simulate_path, simulate_path_prepared, PreparedBands, SimConfig,
};
use crate::quad;
use crate::rng;
use crate::schwartz;
use crate::stats;

/// Default pinned seed of the acceptance suite.
pub const DEFAULT_SEED: u64 = 0x5EED_ACCE;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    /// Failures and notable sub-check values.
    pub details: Vec<String>,
}

impl CriterionResult {
    fn collect(id: usize, name: &'static str, checks: Vec<(bool, String)>) -> Self {
        let passed = checks.iter().all(|(ok, _)| *ok);
        let n_fail = checks.iter().filter(|(ok, _)| !ok).count();
        let details: Vec<String> = checks
            .iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, msg)| msg.clone())
            .collect();
        let summary = if passed {
            format!("{} sub-checks passed", checks.len())
        } else {
            format!("{n_fail}/{} sub-checks FAILED", checks.len())
        };
        CriterionResult {
            id,
            name,
            passed,
            summary,
            details,
        }
    }
}

/// Run all ten criteria; results are ordered by criterion id.
pub fn run_all(base_seed: u64) -> Result<Vec<CriterionResult>> {
    (1..=10).map(|id| run_criterion(id, base_seed)).collect()
}

pub fn run_criterion(id: usize, base_seed: u64) -> Result<CriterionResult> {
    match id {
        1 => gamma_inverse_moments(base_seed),
        2 => bump_probe_1d(base_seed),
        3 => bump_probe_2d(base_seed),
        4 => fubini_consistency_suite(base_seed),
        5 => characteristic_functional_suite(base_seed),
        6 => antiderivative_operator(base_seed),
        7 => seminorm_bounds(base_seed),
        8 => dichotomy_suite(base_seed),
        9 => dyadic_block_decay(base_seed),
        10 => small_jump_band_summation(base_seed),
        _ => Err(crate::error::CoreError::Config(format!(
            "criterion id {id} out of range 1..=10"
        ))),
    }
}

// -- criterion 1 -------------------------------------------------------------

fn gamma_inverse_moments(base_seed: u64) -> Result<CriterionResult> {
    const N: usize = 1_000_000;
    let times: Vec<[f64; 2]> = (0..N as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng::substream(base_seed, s, 101);
            let t = first_jump_times(1.0, 8, &mut rng);
            [t[4], t[7]]
        })
        .collect();
    let mut checks = Vec::new();
    for (idx, n) in [(0usize, 5usize), (1, 8)] {
        for (power, label) in [(2i32, "S_n^{-2}"), (3, "S_n^{-3}")] {
            let vals: Vec<f64> = times.iter().map(|t| t[idx].powi(-power)).collect();
            let mean = stats::mean(&vals);
            let se = stats::stderr(&vals);
            let target = if power == 2 {
                1.0 / ((n - 1) as f64 * (n - 2) as f64)
            } else {
                1.0 / ((n - 1) as f64 * (n - 2) as f64 * (n - 3) as f64)
            };
            let ok = (mean - target).abs() <= 3.0 * se;
            checks.push((
                ok,
                format!(
                    "n={n} E({label}): mc {mean:.6e} vs {target:.6e} (3se = {:.2e})",
                    3.0 * se
                ),
            ));
        }
    }
    Ok(CriterionResult::collect(
        1,
        "Gamma inverse-moment identities",
        checks,
    ))
}

// -- criteria 2 and 3 --------------------------------------------------------

fn bump_probe_1d(base_seed: u64) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    let rep = bump_probe_experiment_1d(1.0, 2.0, (4, 50), 100_000, base_seed ^ 0x02)?;
    for row in &rep.rows {
        let ok =
            row.miss_freq <= row.bound + 3.0 * row.stderr && row.max_hit_pairing_error <= 1e-6;
        if !ok || row.n % 10 == 0 || row.n == 4 {
            checks.push((
                ok,
                format!(
                    "n={}: miss {:.5} ≤ bound {:.5} + 3se {:.5}",
                    row.n,
                    row.miss_freq,
                    row.bound,
                    3.0 * row.stderr
                ),
            ));
        } else {
            checks.push((ok, String::new()));
        }
    }
    // pairing identity on hits through an independent adaptive-quadrature
    // route for the bump tails
    let nu = LevyMeasure::FiniteAtomic(vec![Atom {
        position: 2.0,
        mass: 1.0,
    }]);
    let triplet = LevyTriplet::pure_jump(nu)?;
    let cfg = SimConfig::new(90.0, 1.0, 1.0)?;
    let mut max_err: f64 = 0.0;
    let mut hits = 0usize;
    for s in 0..100u64 {
        let path = simulate_path(&triplet, &cfg, base_seed.wrapping_add(s))?;
        if path.jumps.len() < 51 {
            continue;
        }
        for n in [4usize, 10, 25, 50] {
            let s_n = path.jumps[n - 1].time;
            let width = s_n.powi(-2);
            if path.jumps[n].time - s_n < width {
                continue;
            }
            hits += 1;
            let bump = schwartz::mollifier_bump_1d(s_n, 2);
            let mut pairing = 0.0;
            for j in &path.jumps {
                if j.time >= s_n + width {
                    break;
                }
                // adaptive tail quadrature, independent of the cumulative table
                let lo = j.time.max(s_n);
                pairing += j.size * quad::adaptive(&|t: f64| bump.eval(&[t]), lo, s_n + width, 1e-11);
            }
            max_err = max_err.max((pairing - path.jumps[n - 1].cum).abs());
        }
    }
    checks.push((
        hits > 100 && max_err <= 1e-6,
        format!("adaptive-route pairing on {hits} hits: max |⟨X,φ_n⟩ - X_(S_n)| = {max_err:.2e} ≤ 1e-6"),
    ));
    Ok(CriterionResult::collect(2, "Bump-probe bound (d=1)", checks))
}

fn bump_probe_2d(base_seed: u64) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    let rep = bump_probe_experiment_dd(1.0, 2.0, 2, (5, 30), 20_000, base_seed ^ 0x03)?;
    let mut max_hit_err: f64 = 0.0;
    for row in &rep.rows {
        let ok = row.miss_freq <= row.bound + 3.0 * row.stderr;
        max_hit_err = max_hit_err.max(row.max_hit_pairing_error);
        if !ok || row.n % 5 == 0 {
            checks.push((
                ok,
                format!(
                    "n={}: miss {:.5} ≤ bound {:.5} + 3se {:.5}",
                    row.n,
                    row.miss_freq,
                    row.bound,
                    3.0 * row.stderr
                ),
            ));
        } else {
            checks.push((ok, String::new()));
        }
    }
    checks.push((
        max_hit_err <= 1e-6,
        format!("on hits ⟨X^P, θΦ_n⟩ = L_(S_n): max error {max_hit_err:.2e} ≤ 1e-6"),
    ));
    // the same identity through the full machinery: simulate cube sheets,
    // slice them, build the literal θ·Φ_n test function (smooth cutoff times
    // the bump tail integral) and drive pair_noise with it
    let triplet = LevyTriplet::pure_jump(LevyMeasure::FiniteAtomic(vec![Atom {
        position: 2.0,
        mass: 1.0,
    }]))?;
    let horizon = 12.0;
    let cfg = SimConfig::new(horizon, 0.5, 1.0)?;
    let theta = schwartz::cutoff_theta_dd(2);
    let mut integrated_hits = 0usize;
    let mut integrated_err: f64 = 0.0;
    for s in 0..200u64 {
        let sheet = crate::sheet_sim::simulate_sheet(&triplet, &cfg, 2, base_seed ^ (0x33 + s))?;
        let slice = sheet.slice(1, &[1.0])?;
        for n in [5usize, 6, 7] {
            if slice.jumps.len() < n {
                continue;
            }
            let s_n = slice.jumps[n - 1].time;
            if s_n <= 1.0 {
                continue;
            }
            let width = s_n.powi(-3);
            if s_n + width >= horizon - 0.5 {
                continue;
            }
            // hit iff the field is constant on the probe box
            let miss = sheet.jumps.iter().any(|j| {
                j.pos[0] < 1.0 + width
                    && j.pos[1] < s_n + width
                    && !(j.pos[0] <= 1.0 && j.pos[1] <= s_n)
            });
            if miss {
                continue;
            }
            integrated_hits += 1;
            let bump = schwartz::mollifier_bump_dd(s_n, 2);
            let u = theta.product(&bump.tail_integral())?;
            let grid = FieldGrid {
                dim: 2,
                horizon,
                cells_per_axis: 0,
            };
            let pairer = Pairer::new(&u, grid, true, false)?;
            let v = pairer.pair_noise(&FieldRef::Sheet(&sheet))?.value;
            integrated_err = integrated_err.max((v - slice.jumps[n - 1].cum).abs());
        }
    }
    checks.push((
        integrated_hits > 50 && integrated_err <= 1e-6,
        format!(
            "pair_noise with the literal θ·Φ_n on {integrated_hits} sheet hits: max error {integrated_err:.2e} ≤ 1e-6"
        ),
    ));
    Ok(CriterionResult::collect(3, "Bump-probe bound (d=2)", checks))
}

// -- criterion 4 -------------------------------------------------------------

fn fubini_consistency_suite(base_seed: u64) -> Result<CriterionResult> {
    let triplet = LevyTriplet::new(1.0, 1.0, half_stable_custom())?;
    let phis: Vec<schwartz::TestFunction> = vec![
        schwartz::mollifier(1),
        schwartz::mollifier_on(0.0, 1.0, 1)?,
        schwartz::mollifier_on(0.1, 0.9, 1)?,
        schwartz::mollifier_on(0.2, 1.0, 1)?,
        schwartz::mollifier_on(0.0, 0.5, 1)?,
        schwartz::mollifier_on(0.5, 1.0, 1)?,
        schwartz::mollifier_on(0.05, 0.75, 1)?,
        schwartz::mollifier_on(0.3, 0.95, 1)?,
        schwartz::mollifier_on(0.4, 0.99, 1)?,
        schwartz::mollifier_on(0.25, 0.85, 1)?,
    ];
    let dts = [1e-3, 5e-4, 2.5e-4];
    let mut checks = Vec::new();
    // budgets per dt level, across all 100 (seed, φ) pairs
    let mut level_budgets: Vec<Vec<f64>> = vec![Vec::new(); dts.len()];
    for (pi, phi) in phis.iter().enumerate() {
        // one pairer per (φ, dt), shared across seeds
        let mut pairers = Vec::new();
        let mut cfgs = Vec::new();
        let mut bands = Vec::new();
        for &dt in &dts {
            let cfg = SimConfig::new(1.0, dt, 2f64.powi(-10))?;
            let grid = FieldGrid {
                dim: 1,
                horizon: 1.0,
                cells_per_axis: cfg.cells(),
            };
            pairers.push(Pairer::new(phi, grid, true, true)?);
            bands.push(PreparedBands::prepare(&triplet.nu, &cfg)?);
            cfgs.push(cfg);
        }
        for s in 0..10u64 {
            let seed = rng::derive_seed(base_seed ^ 0x04, pi as u64 * 100 + s);
            let mut ok_all = true;
            for (li, cfg) in cfgs.iter().enumerate() {
                let path = simulate_path_prepared(&triplet, cfg, &bands[li], seed)?;
                let rep = pairers[li].fubini_consistency(&FieldRef::Path(&path))?;
                ok_all &= rep.within_budget;
                if !rep.within_budget {
                    checks.push((
                        false,
                        format!(
                            "φ#{pi} seed {s} dt={}: |Δ| = {:.3e} > budget {:.3e}",
                            cfg.grid_dt, rep.difference, rep.budget
                        ),
                    ));
                }
                level_budgets[li].push(rep.budget);
            }
            if ok_all {
                checks.push((true, String::new()));
            }
        }
    }
    // the reported budget is dominated by the Brownian grid term: its ensemble
    // level must shrink by ≥ 1.3 per dt halving (per-pair realizations
    // fluctuate a few percent around the √2 scaling)
    for w in 0..dts.len() - 1 {
        let coarse = stats::mean(&level_budgets[w]);
        let fine = stats::mean(&level_budgets[w + 1]);
        let ratio = coarse / fine;
        checks.push((
            ratio >= 1.3,
            format!(
                "ensemble budget shrink dt {} -> {}: factor {ratio:.3} ≥ 1.3",
                dts[w],
                dts[w + 1]
            ),
        ));
    }
    Ok(CriterionResult::collect(4, "Two-route pairing consistency", checks))
}


// -- criterion 5 -------------------------------------------------------------

fn characteristic_functional_suite(base_seed: u64) -> Result<CriterionResult> {
    let triplets: Vec<(&str, LevyTriplet)> = vec![
        ("(0,1,0)", LevyTriplet::pure_brownian(1.0)),
        (
            "(0,0,atom(2,1))",
            LevyTriplet::pure_jump(LevyMeasure::FiniteAtomic(vec![Atom {
                position: 2.0,
                mass: 1.0,
            }]))?,
        ),
        (
            "(1,1,Pareto(0.5))",
            LevyTriplet::new(
                1.0,
                1.0,
                LevyMeasure::ParetoTail {
                    beta: 0.5,
                    lambda: 1.0,
                },
            )?,
        ),
    ];
    let phis: Vec<(&str, schwartz::TestFunction)> = vec![
        ("mollifier", schwartz::mollifier(1)),
        ("mollifier:0.5:2.5", schwartz::mollifier_on(0.5, 2.5, 1)?),
        ("bump1d:1:2", schwartz::bump_family_1d(1.0, 2, &schwartz::mollifier(1))?),
    ];
    let mut checks = Vec::new();
    for (ti, (tname, triplet)) in triplets.iter().enumerate() {
        for (pi, (pname, phi)) in phis.iter().enumerate() {
            let analytic = functional_log(triplet, phi)?.exp();
            let mc = mc_char_functional(
                triplet,
                phi,
                &McConfig {
                    samples: 100_000,
                    base_seed: base_seed ^ (0x05 + (ti * 3 + pi) as u64),
                    ..McConfig::default()
                },
            )?;
            let ok_re = (mc.mean_re - analytic.re).abs() <= 5.0 * mc.stderr_re.max(1e-12);
            let ok_im = (mc.mean_im - analytic.im).abs() <= 5.0 * mc.stderr_im.max(1e-12);
            let ok_mod = mc.mean().norm() <= 1.0 + 1e-12;
            checks.push((
                ok_re && ok_im && ok_mod,
                format!(
                    "{tname} × {pname}: mc ({:.4}, {:.4}) vs exp(log) ({:.4}, {:.4}), 5se ({:.1e}, {:.1e})",
                    mc.mean_re,
                    mc.mean_im,
                    analytic.re,
                    analytic.im,
                    5.0 * mc.stderr_re,
                    5.0 * mc.stderr_im
                ),
            ));
        }
    }
    Ok(CriterionResult::collect(
        5,
        "Characteristic functional vs Monte-Carlo",
        checks,
    ))
}

// -- criterion 6 -------------------------------------------------------------

fn antiderivative_operator(_base_seed: u64) -> Result<CriterionResult> {
    let theta = schwartz::mollifier(1);
    let mut checks = Vec::new();
    // I(φ') = φ on a dense grid
    for (name, phi) in [("gaussian", schwartz::gaussian(1)), ("hermite-3", schwartz::hermite(3, 1))] {
        let rec = schwartz::antiderivative_i(&phi.mixed_derivative(), &theta)?;
        let mut sup: f64 = 0.0;
        for i in 0..=400 {
            let t = -12.0 + 24.0 * i as f64 / 400.0;
            sup = sup.max((rec.eval(&[t]) - phi.eval(&[t])).abs());
        }
        checks.push((
            sup <= 1e-9,
            format!("I({name}') = {name}: sup-grid error {sup:.2e} ≤ 1e-9"),
        ));
    }
    // weighted sup bound with the derivation constant C_p = 7
    for (name, phi) in [("gaussian", schwartz::gaussian(1)), ("hermite-3", schwartz::hermite(3, 1))] {
        let iphi = schwartz::antiderivative_i(&phi, &theta)?;
        for p in 0..=2usize {
            let np2 = phi.seminorm(p + 2, 1 << 14)?.lower;
            let bound = schwartz::antiderivative_bound_constant(p) * np2;
            let mut sup: f64 = 0.0;
            for i in 0..=4000 {
                let t = -40.0 + 80.0 * i as f64 / 4000.0;
                sup = sup.max(t.abs().powi(p as i32) * iphi.eval(&[t]).abs());
            }
            checks.push((
                sup <= bound,
                format!("{name} p={p}: sup|t|^p|Iφ| = {sup:.4} ≤ C_p N_(p+2) = {bound:.4}"),
            ));
        }
    }
    // tensor route: I_d(∂²(g⊗g)) = g⊗g
    let g2 = schwartz::gaussian(2);
    let rec2 = schwartz::tensor_i_d(&g2.mixed_derivative(), &theta)?;
    let mut sup2: f64 = 0.0;
    for i in 0..=40 {
        for j in 0..=40 {
            let x = -6.0 + 12.0 * i as f64 / 40.0;
            let y = -6.0 + 12.0 * j as f64 / 40.0;
            sup2 = sup2.max((rec2.eval(&[x, y]) - g2.eval(&[x, y])).abs());
        }
    }
    checks.push((
        sup2 <= 1e-9,
        format!("I_2(∂²(g⊗g)) = g⊗g: sup-grid error {sup2:.2e} ≤ 1e-9"),
    ));
    Ok(CriterionResult::collect(6, "Antiderivative operator", checks))
}

// -- criterion 7 -------------------------------------------------------------

fn seminorm_bounds(_base_seed: u64) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    let base1 = schwartz::mollifier(1);
    let base1_norms: Vec<f64> = (0..=2)
        .map(|p| base1.seminorm(p, 1 << 14).map(|e| e.lower))
        .collect::<Result<_>>()?;
    for &s in &[1.0f64, 2.0, 4.0, 8.0, 16.0] {
        for k in [2u32, 3] {
            let bump = schwartz::bump_family_1d(s, k, &base1)?;
            for p in 0..=2usize {
                let np = bump.seminorm(p, 1 << 14)?.lower;
                let bound = schwartz::bump_bound_constant_1d(p)
                    * base1_norms[p]
                    * s.powi(((p + 1) as u32 * k + p as u32) as i32);
                checks.push((
                    np <= bound * (1.0 + 1e-9),
                    format!("1d S={s} k={k} p={p}: N_p = {np:.4e} ≤ {bound:.4e}"),
                ));
            }
        }
    }
    let base2 = schwartz::mollifier(2);
    let base2_norms: Vec<f64> = (0..=2)
        .map(|p| base2.seminorm(p, 1 << 12).map(|e| e.lower))
        .collect::<Result<_>>()?;
    for &s in &[1.0f64, 2.0, 4.0, 8.0, 16.0] {
        let bump = schwartz::bump_family_dd(s, &base2)?;
        for p in 0..=2usize {
            let np = bump.seminorm(p, 1 << 12)?.lower;
            let bound = schwartz::bump_bound_constant_dd(p, 2)
                * base2_norms[p]
                * s.powi((3 * 2 + 4 * p) as i32);
            checks.push((
                np <= bound * (1.0 + 1e-9),
                format!("2d S={s} p={p}: N_p = {np:.4e} ≤ {bound:.4e}"),
            ));
        }
    }
    // N_p ≤ N_{p+1} across the named families
    for (name, tf) in [
        ("gaussian", schwartz::gaussian(1)),
        ("hermite-3", schwartz::hermite(3, 1)),
        ("mollifier", schwartz::mollifier(1)),
        ("mollifier⊗mollifier", schwartz::mollifier(2)),
        ("bump1d:4:2", schwartz::bump_family_1d(4.0, 2, &base1)?),
    ] {
        let mut prev = 0.0;
        let mut ok = true;
        for p in 0..=3usize {
            let est = tf.seminorm(p, 1 << 12)?;
            ok &= est.lower >= prev - 1e-12 && est.lower <= est.upper;
            prev = est.lower;
        }
        checks.push((ok, format!("{name}: N_p nondecreasing in p and lower ≤ upper")));
    }
    Ok(CriterionResult::collect(7, "Bump seminorm growth bounds", checks))
}

// -- criterion 8 -------------------------------------------------------------

fn dichotomy_suite(base_seed: u64) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    for d in [1usize, 2] {
        for (name, nu, want_pam, want_trend) in [
            (
                "Pareto(0.5)",
                LevyMeasure::ParetoTail {
                    beta: 0.5,
                    lambda: 1.0,
                },
                true,
                Trend::Bounded,
            ),
            (
                "LogSquaredTail",
                LevyMeasure::LogSquaredTail { lambda: 1.0 },
                false,
                Trend::Divergent,
            ),
        ] {
            let triplet = LevyTriplet::pure_jump(nu)?;
            let cfg = DichotomyConfig {
                seeds: 200,
                horizons: (1e2, 1e4),
                base_seed: base_seed ^ (0x08 + d as u64),
                ..DichotomyConfig::default()
            };
            let rep = dichotomy_experiment(&triplet, d, &cfg)?;
            let ok = rep.consistent
                && rep.has_pam == Some(want_pam)
                && rep.trend == want_trend;
            let factors: Vec<String> = rep
                .per_alpha
                .iter()
                .map(|a| format!("α={}: ×{:.2}", a.alpha, a.growth_factor))
                .collect();
            checks.push((
                ok,
                format!(
                    "d={d} {name}: pam={:?} trend={:?} consistent={} [{}]",
                    rep.has_pam,
                    rep.trend,
                    rep.consistent,
                    factors.join(", ")
                ),
            ));
        }
    }
    Ok(CriterionResult::collect(8, "Temperedness dichotomy", checks))
}

// -- criterion 9 -------------------------------------------------------------

fn dyadic_block_decay(base_seed: u64) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    // d=1, α=1: blocks k = 2..8; d=2, α=2: diagonal blocks Σk = 2..8
    let rep1 = dyadic_block_sup(
        1,
        &DyadicConfig {
            sigma: 1.0,
            alpha: 1.0,
            max_level: 8,
            seeds: 4_000,
            base_seed: base_seed ^ 0x09,
            grid_dt: 2f64.powi(-6),
        },
    )?;
    let rep2 = dyadic_block_sup(
        2,
        &DyadicConfig {
            sigma: 1.0,
            alpha: 2.0,
            max_level: 4,
            seeds: 3_000,
            base_seed: base_seed ^ 0x19,
            grid_dt: 2f64.powi(-3),
        },
    )?;
    for rep in [rep1, rep2] {
        let predicted = rep.predicted_exponent;
        let ok = (rep.fitted_exponent - predicted).abs() <= 0.25 * predicted;
        checks.push((
            ok,
            format!(
                "d={} α={}: fitted decay exponent {:.4} vs predicted {:.4} (±25%)",
                rep.dim, rep.alpha, rep.fitted_exponent, predicted
            ),
        ));
    }
    Ok(CriterionResult::collect(9, "Dyadic-block martingale decay", checks))
}

// -- criterion 10 ------------------------------------------------------------

fn small_jump_band_summation(base_seed: u64) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    // band sums against independent oracles
    let gauss = LevyMeasure::GaussianDensity { scale: 1.0 };
    let gauss_oracle = 2.0
        * quad::adaptive(
            &|x: f64| {
                let d = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
                x * x * d
            },
            1e-12,
            1.0,
            1e-15,
        );
    let atoms = LevyMeasure::FiniteAtomic(vec![
        Atom {
            position: 0.3,
            mass: 2.0,
        },
        Atom {
            position: -0.6,
            mass: 1.0,
        },
        Atom {
            position: 2.0,
            mass: 5.0,
        },
    ]);
    let atoms_oracle = 0.09 * 2.0 + 0.36;
    let cases: Vec<(&str, LevyMeasure, f64)> = vec![
        ("gaussian-density", gauss, gauss_oracle),
        ("half-stable", half_stable_custom(), 1.0 / 3.0),
        ("finite-atomic", atoms, atoms_oracle),
    ];
    for (name, nu, oracle) in cases {
        let sum = nu.variance_below(0);
        let rel = (sum - oracle).abs() / oracle.abs().max(1e-300);
        checks.push((
            rel <= 1e-6,
            format!("{name}: Σ bands = {sum:.9e} vs ∫x²ν = {oracle:.9e} (rel {rel:.2e})"),
        ));
    }
    // compensated part is centered
    let nu = asymmetric_half_stable_custom();
    let triplet = LevyTriplet::pure_jump(nu)?;
    let cfg = SimConfig::new(4.0, 0.05, 2f64.powi(-8))?;
    let prepared = PreparedBands::prepare(&triplet.nu, &cfg)?;
    let xs: Vec<f64> = (0..20_000u64)
        .into_par_iter()
        .map(|s| -> Result<f64> {
            let p = simulate_path_prepared(
                &triplet,
                &cfg,
                &prepared,
                rng::derive_seed(base_seed ^ 0x0A, s),
            )?;
            Ok(p.small.value_at(4.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = stats::mean(&xs);
    let se = stats::stderr(&xs);
    checks.push((
        mean.abs() <= 3.0 * se,
        format!("compensated small-jump MC mean {mean:.4e} within 3se = {:.4e} of 0", 3.0 * se),
    ));
    Ok(CriterionResult::collect(10, "Small-jump band summation", checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistical_tolerances_are_not_vacuous() {
        // tightening a 3·stderr tolerance by 10⁻³ must make the check brittle:
        // MC deviations sit at stderr scale, far above stderr/1000
        let vals: Vec<f64> = (0..10_000u64)
            .map(|s| {
                let mut rng = rng::substream(DEFAULT_SEED, s, 101);
                first_jump_times(1.0, 5, &mut rng)[4].powi(-2)
            })
            .collect();
        let mean = stats::mean(&vals);
        let se = stats::stderr(&vals);
        let deviation = (mean - 1.0 / 12.0).abs();
        assert!(deviation <= 3.0 * se, "the honest tolerance passes");
        assert!(
            deviation > 3.0 * se * 1e-3,
            "a 1000× tighter tolerance would fail, as expected of an MC check"
        );
    }

    #[test]
    fn single_criterion_lookup_and_range() {
        assert!(run_criterion(11, DEFAULT_SEED).is_err());
        assert!(run_criterion(0, DEFAULT_SEED).is_err());
        let r = run_criterion(6, DEFAULT_SEED).unwrap();
        assert_eq!(r.id, 6);
        assert!(r.passed, "{:?}", r.details);
    }
}
