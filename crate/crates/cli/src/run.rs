//! Experiment execution and structured output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use levy_noise::charfn::{functional_log, mc_char_functional, McConfig};
use levy_noise::growth::{
    bump_probe_experiment_1d, bump_probe_experiment_dd, dichotomy_experiment, dyadic_block_sup,
    growth_profile, DichotomyConfig, DyadicConfig,
};
use levy_noise::pairing::{FieldGrid, FieldRef, Pairer};
use levy_noise::path_sim::{simulate_path, simulate_path_prepared, PreparedBands};
use levy_noise::rng;
use levy_noise::schwartz;
use levy_noise::sheet_sim::simulate_sheet;
use levy_noise::validate;

use crate::config::Config;

fn jsonl(out: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = out.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn write_record<T: Serialize>(w: &mut impl Write, rec: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *w, rec)?;
    writeln!(w)?;
    Ok(())
}

fn base_seed(cfg: &Config) -> u64 {
    cfg.seed.unwrap_or(validate::DEFAULT_SEED)
}

fn path_seed(cfg: &Config, index: u64) -> u64 {
    rng::derive_seed(base_seed(cfg), index)
}

pub fn run(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    match cfg.kind.as_str() {
        "validate" => run_validate(cfg, out),
        "simulate" => run_simulate(cfg, out),
        "pair" => run_pair(cfg, out),
        "fubini" => run_fubini(cfg, out),
        "growth" => run_growth(cfg, out),
        "dichotomy" => run_dichotomy(cfg, out),
        "charfn" => run_charfn(cfg, out),
        "bump-probe" => run_bump_probe(cfg, out),
        "dyadic" => run_dyadic(cfg, out),
        other => anyhow::bail!("unhandled kind {other}"),
    }
}

fn run_validate(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let results = validate::run_all(base_seed(cfg))?;
    let mut w = jsonl(out, "validate.jsonl")?;
    let mut all = true;
    for r in &results {
        write_record(&mut w, r)?;
        println!(
            "criterion {:>2} [{}] {} — {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.summary
        );
        for d in &r.details {
            println!("             {d}");
        }
        all &= r.passed;
    }
    println!(
        "validate: {}/{} criteria passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(all)
}

fn run_simulate(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let sim = cfg.sim()?;
    let seed = path_seed(cfg, 0);
    let mut meta = jsonl(out, "meta.jsonl")?;
    if cfg.dimension == 1 {
        let path = simulate_path(&triplet, &sim, seed)?;
        let mut jumps = BufWriter::new(File::create(out.join("jumps.csv"))?);
        writeln!(jumps, "n,time,size,cum")?;
        for (i, j) in path.jumps.iter().enumerate() {
            writeln!(jumps, "{},{},{},{}", i + 1, j.time, j.size, j.cum)?;
        }
        let mut brownian = BufWriter::new(File::create(out.join("brownian.csv"))?);
        writeln!(brownian, "t,sigma_w")?;
        for (i, w) in path.brownian.iter().enumerate() {
            writeln!(brownian, "{},{}", i as f64 * path.grid_dt, w)?;
        }
        let mut small = BufWriter::new(File::create(out.join("small_jumps.csv"))?);
        writeln!(small, "band,time,size")?;
        for b in &path.small.bands {
            for &(t, x) in &b.events {
                writeln!(small, "{},{},{}", b.band, t, x)?;
            }
        }
        write_record(
            &mut meta,
            &serde_json::json!({
                "kind": "path",
                "seed": seed,
                "horizon": path.horizon,
                "grid_dt": path.grid_dt,
                "eps": path.small.eps,
                "bands": path.small.bands.len(),
                "neglected_variance": path.small.neglected_variance,
                "jumps": path.jumps.len(),
            }),
        )?;
        println!(
            "simulate: path with {} jumps, {} bands over [0, {}]",
            path.jumps.len(),
            path.small.bands.len(),
            path.horizon
        );
    } else {
        let sheet = simulate_sheet(&triplet, &sim, cfg.dimension, seed)?;
        let mut jumps = BufWriter::new(File::create(out.join("jumps.csv"))?);
        let header: Vec<String> = (0..cfg.dimension).map(|i| format!("pos{i}")).collect();
        writeln!(jumps, "{},size", header.join(","))?;
        for j in &sheet.jumps {
            let pos: Vec<String> = j.pos.iter().map(|p| p.to_string()).collect();
            writeln!(jumps, "{},{}", pos.join(","), j.size)?;
        }
        let mut small = BufWriter::new(File::create(out.join("small_jumps.csv"))?);
        let sheader: Vec<String> = (0..cfg.dimension).map(|i| format!("pos{i}")).collect();
        writeln!(small, "band,{},size", sheader.join(","))?;
        for b in &sheet.small_bands {
            for (p, x) in &b.events {
                let pos: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                writeln!(small, "{},{},{}", b.band, pos.join(","), x)?;
            }
        }
        // flat little-endian f64 lattice with a JSON-lines descriptor
        let mut grid = BufWriter::new(File::create(out.join("brownian.f64"))?);
        for v in &sheet.brownian {
            grid.write_all(&v.to_le_bytes())?;
        }
        write_record(
            &mut meta,
            &serde_json::json!({
                "kind": "sheet",
                "seed": seed,
                "dims": cfg.dimension,
                "cells_per_axis": sheet.cells_per_axis,
                "dt": sheet.grid_dt,
                "horizon": sheet.horizon,
                "eps": sheet.eps,
                "neglected_variance": sheet.neglected_variance,
                "jumps": sheet.jumps.len(),
                "lattice_len": sheet.brownian.len(),
                "layout": "row-major, axis 0 fastest, little-endian f64",
            }),
        )?;
        println!(
            "simulate: sheet d={} with {} jumps over [0, {}]^{}",
            sheet.dim,
            sheet.jumps.len(),
            sheet.horizon,
            sheet.dim
        );
    }
    Ok(true)
}

#[derive(Serialize)]
struct PairRow<'a> {
    seed: u64,
    phi_id: &'a str,
    op: &'a str,
    method: levy_noise::pairing::Method,
    value: f64,
    budget_quadrature: f64,
    budget_brownian_grid: f64,
    budget_neglected_small_jump: f64,
}

fn phis_of(cfg: &Config) -> anyhow::Result<Vec<(String, schwartz::TestFunction)>> {
    if cfg.experiment.phis.is_empty() {
        anyhow::bail!("experiment.phis: at least one test-function identifier required");
    }
    cfg.experiment
        .phis
        .iter()
        .map(|name| {
            schwartz::by_name(name, cfg.dimension)
                .map(|tf| (name.clone(), tf))
                .map_err(|e| anyhow::anyhow!("experiment.phis: {e}"))
        })
        .collect()
}

fn run_pair(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let sim = cfg.sim()?;
    let phis = phis_of(cfg)?;
    let mut w = jsonl(out, "pairings.jsonl")?;
    let grid = FieldGrid {
        dim: cfg.dimension,
        horizon: sim.horizon,
        cells_per_axis: sim.cells(),
    };
    let prepared = PreparedBands::prepare(&triplet.nu, &sim)?;
    let mut rows = 0usize;
    for (name, phi) in &phis {
        let pairer = Pairer::new(phi, grid, true, triplet.sigma > 0.0)?;
        for s in 0..cfg.seeds as u64 {
            let seed = path_seed(cfg, s);
            let results: Vec<(&str, levy_noise::pairing::PairingResult)> = if cfg.dimension == 1 {
                let path = simulate_path_prepared(&triplet, &sim, &prepared, seed)?;
                let f = FieldRef::Path(&path);
                vec![
                    ("pair_field", pairer.pair_field(&f)?),
                    ("pair_noise", pairer.pair_noise(&f)?),
                    ("stochastic_integral", pairer.stochastic_integral(&f)?),
                ]
            } else {
                let sheet = simulate_sheet(&triplet, &sim, cfg.dimension, seed)?;
                let f = FieldRef::Sheet(&sheet);
                vec![
                    ("pair_field", pairer.pair_field(&f)?),
                    ("pair_noise", pairer.pair_noise(&f)?),
                    ("stochastic_integral", pairer.stochastic_integral(&f)?),
                ]
            };
            for (op, r) in results {
                write_record(
                    &mut w,
                    &PairRow {
                        seed,
                        phi_id: name,
                        op,
                        method: r.method,
                        value: r.value,
                        budget_quadrature: r.budget.quadrature,
                        budget_brownian_grid: r.budget.brownian_grid,
                        budget_neglected_small_jump: r.budget.neglected_small_jump,
                    },
                )?;
                rows += 1;
            }
        }
    }
    println!("pair: {rows} pairing records over {} seeds", cfg.seeds);
    Ok(true)
}

#[derive(Serialize)]
struct FubiniRow<'a> {
    seed: u64,
    phi_id: &'a str,
    noise_value: f64,
    integral_value: f64,
    difference: f64,
    budget: f64,
    within_budget: bool,
}

fn run_fubini(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let sim = cfg.sim()?;
    let phis = phis_of(cfg)?;
    let mut w = jsonl(out, "fubini.jsonl")?;
    let grid = FieldGrid {
        dim: cfg.dimension,
        horizon: sim.horizon,
        cells_per_axis: sim.cells(),
    };
    let prepared = PreparedBands::prepare(&triplet.nu, &sim)?;
    let mut all = true;
    let mut worst = 0.0f64;
    for (name, phi) in &phis {
        let pairer = Pairer::new(phi, grid, true, triplet.sigma > 0.0)?;
        for s in 0..cfg.seeds as u64 {
            let seed = path_seed(cfg, s);
            let rep = if cfg.dimension == 1 {
                let path = simulate_path_prepared(&triplet, &sim, &prepared, seed)?;
                pairer.fubini_consistency(&FieldRef::Path(&path))?
            } else {
                let sheet = simulate_sheet(&triplet, &sim, cfg.dimension, seed)?;
                pairer.fubini_consistency(&FieldRef::Sheet(&sheet))?
            };
            all &= rep.within_budget;
            worst = worst.max(rep.difference);
            write_record(
                &mut w,
                &FubiniRow {
                    seed,
                    phi_id: name,
                    noise_value: rep.noise_value,
                    integral_value: rep.integral_value,
                    difference: rep.difference,
                    budget: rep.budget,
                    within_budget: rep.within_budget,
                },
            )?;
        }
    }
    println!(
        "fubini: {} over {} (seed, φ) pairs, worst |Δ| = {worst:.3e}",
        if all { "consistent" } else { "INCONSISTENT" },
        cfg.seeds * phis.len()
    );
    Ok(all)
}

fn run_growth(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let sim = cfg.sim()?;
    let alpha = cfg
        .experiment
        .alpha
        .context("experiment.alpha: required for growth")?;
    let mut horizons = cfg.experiment.horizons.clone();
    if horizons.is_empty() {
        horizons = vec![sim.horizon];
    }
    let mut csv = BufWriter::new(File::create(out.join("profiles.csv"))?);
    writeln!(csv, "seed,alpha,horizon,sup")?;
    let mut w = jsonl(out, "growth.jsonl")?;
    for s in 0..cfg.seeds as u64 {
        let seed = path_seed(cfg, s);
        let path = simulate_path(&triplet, &sim, seed)?;
        let prof = growth_profile(&path, alpha, &horizons)?;
        for (t, sup) in &prof.checkpoints {
            writeln!(csv, "{seed},{alpha},{t},{sup}")?;
        }
        write_record(
            &mut w,
            &serde_json::json!({
                "seed": seed,
                "alpha": alpha,
                "final_sup": prof.checkpoints.last().map(|c| c.1),
            }),
        )?;
    }
    println!("growth: {} profiles at α = {alpha}", cfg.seeds);
    Ok(true)
}

fn run_dichotomy(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let horizons = &cfg.experiment.horizons;
    if horizons.len() != 2 {
        anyhow::bail!("experiment.horizons: dichotomy needs exactly [T_lo, T_hi]");
    }
    let dcfg = DichotomyConfig {
        horizons: (horizons[0], horizons[1]),
        seeds: cfg.seeds,
        base_seed: base_seed(cfg),
        ..DichotomyConfig::default()
    };
    let rep = dichotomy_experiment(&triplet, cfg.dimension, &dcfg)?;
    let mut w = jsonl(out, "dichotomy.jsonl")?;
    write_record(&mut w, &rep)?;
    println!(
        "dichotomy: pam={:?} trend={:?} consistent={}{}",
        rep.has_pam,
        rep.trend,
        rep.consistent,
        rep.flag
            .as_ref()
            .map(|f| format!(" ({f})"))
            .unwrap_or_default()
    );
    Ok(rep.consistent)
}

#[derive(Serialize)]
struct CharfnRow<'a> {
    phi_id: &'a str,
    triplet_id: String,
    analytic_re: f64,
    analytic_im: f64,
    mc_re: f64,
    mc_im: f64,
    stderr_re: f64,
    stderr_im: f64,
    pass: bool,
}

fn run_charfn(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let phis = phis_of(cfg)?;
    let samples = cfg.experiment.samples.unwrap_or(100_000);
    let mut w = jsonl(out, "charfn.jsonl")?;
    let mut all = true;
    for (name, phi) in &phis {
        let analytic = functional_log(&triplet, phi)?.exp();
        let mc = mc_char_functional(
            &triplet,
            phi,
            &McConfig {
                samples,
                base_seed: base_seed(cfg),
                ..McConfig::default()
            },
        )?;
        let pass = (mc.mean_re - analytic.re).abs() <= 5.0 * mc.stderr_re.max(1e-12)
            && (mc.mean_im - analytic.im).abs() <= 5.0 * mc.stderr_im.max(1e-12);
        all &= pass;
        write_record(
            &mut w,
            &CharfnRow {
                phi_id: name,
                triplet_id: format!(
                    "({}, {}, {:?})",
                    triplet.gamma, triplet.sigma, triplet.nu
                ),
                analytic_re: analytic.re,
                analytic_im: analytic.im,
                mc_re: mc.mean_re,
                mc_im: mc.mean_im,
                stderr_re: mc.stderr_re,
                stderr_im: mc.stderr_im,
                pass,
            },
        )?;
    }
    println!(
        "charfn: {} at 5·stderr over {} test functions (N = {samples})",
        if all { "pass" } else { "FAIL" },
        phis.len()
    );
    Ok(all)
}

fn run_bump_probe(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    let lambda = triplet.nu.large_jump_mass();
    if lambda <= 0.0 {
        anyhow::bail!("triplet.nu: bump probe needs a compound Poisson part (λ > 0)");
    }
    let [n_min, n_max] = cfg
        .experiment
        .n_range
        .context("experiment.n_range: required for bump-probe")?;
    let jump_size = cfg.experiment.jump_size.unwrap_or(2.0);
    let rep = if cfg.dimension == 1 {
        bump_probe_experiment_1d(lambda, jump_size, (n_min, n_max), cfg.seeds, base_seed(cfg))?
    } else {
        bump_probe_experiment_dd(
            lambda,
            jump_size,
            cfg.dimension,
            (n_min, n_max),
            cfg.seeds,
            base_seed(cfg),
        )?
    };
    let mut w = jsonl(out, "probe.jsonl")?;
    let mut all = true;
    for row in &rep.rows {
        all &= row.miss_freq <= row.bound + 3.0 * row.stderr
            && row.max_hit_pairing_error <= 1e-6;
        write_record(&mut w, row)?;
    }
    println!(
        "bump-probe d={}: {} for n ∈ [{n_min}, {n_max}] over {} seeds",
        rep.dim,
        if all { "within bounds" } else { "BOUND VIOLATION" },
        cfg.seeds
    );
    Ok(all)
}

fn run_dyadic(cfg: &Config, out: &Path) -> anyhow::Result<bool> {
    let triplet = cfg.triplet()?;
    if triplet.gamma != 0.0 || triplet.nu.large_jump_mass() > 0.0 {
        anyhow::bail!("triplet: dyadic experiment needs a mean-zero martingale (γ=0, no large jumps)");
    }
    let d = cfg.dimension;
    let alpha = cfg
        .experiment
        .alpha
        .unwrap_or((d as f64 / 2.0).floor() + 1.0);
    let dcfg = DyadicConfig {
        sigma: triplet.sigma,
        alpha,
        max_level: cfg.experiment.max_level.unwrap_or(if d == 1 { 8 } else { 4 }),
        seeds: cfg.seeds,
        base_seed: base_seed(cfg),
        grid_dt: cfg
            .sim
            .as_ref()
            .map(|s| s.grid_dt)
            .unwrap_or(if d == 1 { 2f64.powi(-6) } else { 2f64.powi(-3) }),
    };
    let rep = dyadic_block_sup(d, &dcfg)?;
    let mut w = jsonl(out, "dyadic.jsonl")?;
    write_record(&mut w, &rep)?;
    let mut csv = BufWriter::new(File::create(out.join("blocks.csv"))?);
    writeln!(csv, "sum_k,mean_sup,stderr")?;
    for b in &rep.blocks {
        writeln!(csv, "{},{},{}", b.sum_k, b.mean_sup, b.stderr)?;
    }
    let ok = (rep.fitted_exponent - rep.predicted_exponent).abs()
        <= 0.25 * rep.predicted_exponent;
    println!(
        "dyadic d={d} α={alpha}: fitted exponent {:.4} vs predicted {:.4} → {}",
        rep.fitted_exponent,
        rep.predicted_exponent,
        if ok { "pass" } else { "FAIL" }
    );
    Ok(ok)
}
