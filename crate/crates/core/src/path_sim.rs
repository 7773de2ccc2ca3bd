//! One-parameter Lévy process simulation via the Lévy–Itô decomposition
//! `X_t = γt + σW_t + X^P_t + X^M_t`: exact large-jump event lists, a Brownian
//! grid, and banded compensated small jumps down to a truncation level `ε`
//! with the neglected variance surfaced in metadata.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{CoreError, Result};
use crate::levy_measure::{LevyMeasure, LevyTriplet};
use crate::rng;

/// One large jump: time, size, and the running sum `Z_n = Σ_{i≤n} Y_i`.
#[derive(Clone, Copy, Debug)]
pub struct JumpEvent {
    pub time: f64,
    pub size: f64,
    pub cum: f64,
}

/// One dyadic band of compensated small jumps.
#[derive(Clone, Debug)]
pub struct BandRecord {
    /// Dyadic index: sizes in `(2^{-(n+1)}, 2^{-n}]`.
    pub band: u32,
    /// Poisson rate `ν(band)`.
    pub rate: f64,
    /// Compensator drift `∫_band x ν(dx)`.
    pub mean_rate: f64,
    /// Events `(time, size)` sorted by time.
    pub events: Vec<(f64, f64)>,
}

impl BandRecord {
    /// Compensated band value at `t`: `Σ_{τ≤t} x - t·∫_band x ν`.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.events.partition_point(|&(tau, _)| tau <= t);
        let jump_sum: f64 = self.events[..k].iter().map(|&(_, x)| x).sum();
        jump_sum - t * self.mean_rate
    }
}

/// Banded small-jump approximation metadata.
#[derive(Clone, Debug)]
pub struct SmallJumpPart {
    pub eps: f64,
    pub bands: Vec<BandRecord>,
    /// `∫_{|x| ≤ 2^{-n_bands}} x² ν(dx)` — variance per unit time neglected by
    /// the truncation.
    pub neglected_variance: f64,
}

impl SmallJumpPart {
    pub fn value_at(&self, t: f64) -> f64 {
        self.bands.iter().map(|b| b.value_at(t)).sum()
    }
}

/// Simulation controls shared by paths and sheets.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub horizon: f64,
    pub grid_dt: f64,
    /// Small-jump truncation level in `(0, 1]`; bands whose lower edge is
    /// `≥ eps` are simulated, the rest contribute to `neglected_variance`.
    pub eps: f64,
    pub max_bands: u32,
}

impl SimConfig {
    pub fn new(horizon: f64, grid_dt: f64, eps: f64) -> Result<Self> {
        let cfg = SimConfig {
            horizon,
            grid_dt,
            eps,
            max_bands: 40,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(CoreError::invalid("horizon", "must be positive"));
        }
        if !(self.grid_dt > 0.0 && self.grid_dt <= self.horizon) {
            return Err(CoreError::invalid("grid_dt", "must be in (0, horizon]"));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(CoreError::invalid("eps", "must be in (0, 1]"));
        }
        Ok(())
    }

    /// Number of grid cells (the step is adjusted to divide the horizon).
    pub fn cells(&self) -> usize {
        (self.horizon / self.grid_dt).ceil().max(1.0) as usize
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.cells() as f64
    }

    /// Dyadic bands retained above the truncation level; errors past the cap
    /// so that an over-deep truncation is rejected rather than silently slow.
    pub fn band_count(&self) -> Result<u32> {
        // band n covers (2^{-(n+1)}, 2^{-n}]; retain while the lower edge ≥ eps,
        // i.e. n ≤ -log2(eps) - 1
        let n = (-self.eps.log2()).floor().max(0.0) as u32;
        if n > self.max_bands {
            return Err(CoreError::Config(format!(
                "eps = {:e} needs {} dyadic bands, above the cap of {}",
                self.eps, n, self.max_bands
            )));
        }
        Ok(n)
    }
}

/// Simulated path skeleton: Brownian grid plus exact jump event lists.
#[derive(Clone, Debug)]
pub struct PathSkeleton1D {
    pub triplet: LevyTriplet,
    pub horizon: f64,
    /// Actual grid step (adjusted to divide the horizon exactly).
    pub grid_dt: f64,
    /// `σW` at grid times `i·grid_dt`; empty when `σ = 0`.
    pub brownian: Vec<f64>,
    pub jumps: Vec<JumpEvent>,
    pub small: SmallJumpPart,
    pub seed: u64,
}

/// Sequential compound Poisson event simulation on `[0, horizon]`.
pub fn compound_poisson_events(
    nu: &LevyMeasure,
    horizon: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<JumpEvent>> {
    let lambda = nu.large_jump_mass();
    let mut events = Vec::new();
    if lambda <= 0.0 {
        return Ok(events);
    }
    let mut t = 0.0;
    let mut cum = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / lambda;
        if t > horizon {
            break;
        }
        let size = nu.sample_large_jump(rng)?;
        cum += size;
        events.push(JumpEvent { time: t, size, cum });
    }
    Ok(events)
}

/// First `n` jump times of a rate-λ Poisson process (Gamma(k, λ) marginals).
pub fn first_jump_times(lambda: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    for _ in 0..n {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / lambda;
        times.push(t);
    }
    times
}

/// Measure-level tables precomputed once per `(ν, eps)` so that Monte-Carlo
/// ensembles do not rebuild band inverse-CDF tables per seed.
pub struct PreparedBands {
    pub eps: f64,
    pub neglected_variance: f64,
    bands: Vec<PreparedBand>,
}

struct PreparedBand {
    band: u32,
    rate: f64,
    mean_rate: f64,
    sampler: crate::levy_measure::BandSampler,
}

impl PreparedBands {
    pub fn prepare(nu: &LevyMeasure, cfg: &SimConfig) -> Result<Self> {
        let n_bands = cfg.band_count()?;
        let mut bands = Vec::new();
        for n in 0..n_bands {
            let rate = nu.band_mass(n);
            if rate <= 0.0 {
                continue;
            }
            let sampler = nu
                .band_sampler(n)
                .ok_or_else(|| CoreError::Config(format!("band {n} has mass but no sampler")))?;
            bands.push(PreparedBand {
                band: n,
                rate,
                mean_rate: nu.band_mean(n),
                sampler,
            });
        }
        Ok(PreparedBands {
            eps: cfg.eps,
            neglected_variance: nu.variance_below(n_bands),
            bands,
        })
    }

    /// Σ of retained band variance rates (per unit time).
    pub fn retained_variance(&self, nu: &LevyMeasure) -> f64 {
        self.bands.iter().map(|b| nu.band_variance(b.band)).sum()
    }

    fn simulate(&self, horizon: f64, seed: u64, stream_index: u64) -> Result<SmallJumpPart> {
        let mut bands = Vec::with_capacity(self.bands.len());
        for b in &self.bands {
            let mut rng = rng::substream(seed, stream_index, 100 + b.band as u64);
            let count = Poisson::new(b.rate * horizon)
                .map_err(|e| CoreError::Config(format!("band rate: {e}")))?
                .sample(&mut rng) as usize;
            let mut events: Vec<(f64, f64)> = (0..count)
                .map(|_| (rng.random_range(0.0..horizon), 0.0))
                .collect();
            events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for e in &mut events {
                e.1 = b.sampler.sample(&mut rng);
            }
            bands.push(BandRecord {
                band: b.band,
                rate: b.rate,
                mean_rate: b.mean_rate,
                events,
            });
        }
        Ok(SmallJumpPart {
            eps: self.eps,
            bands,
            neglected_variance: self.neglected_variance,
        })
    }
}

/// Simulate a path of the Lévy process with the given triplet.
///
/// Sub-streams are derived per component (jumps / Brownian / per band), so a
/// fixed `(seed, config)` replays bit-identically and enabling one component
/// never perturbs the others.
pub fn simulate_path(triplet: &LevyTriplet, cfg: &SimConfig, seed: u64) -> Result<PathSkeleton1D> {
    let prepared = PreparedBands::prepare(&triplet.nu, cfg)?;
    simulate_path_prepared(triplet, cfg, &prepared, seed)
}

/// [`simulate_path`] with band tables prepared once for a whole ensemble.
pub fn simulate_path_prepared(
    triplet: &LevyTriplet,
    cfg: &SimConfig,
    prepared: &PreparedBands,
    seed: u64,
) -> Result<PathSkeleton1D> {
    cfg.validate()?;
    let mut jump_rng = rng::substream(seed, 0, 0);
    let jumps = compound_poisson_events(&triplet.nu, cfg.horizon, &mut jump_rng)?;

    let brownian = if triplet.sigma > 0.0 {
        let cells = cfg.cells();
        let dt = cfg.dt();
        let mut rng = rng::substream(seed, 0, 1);
        let mut w = Vec::with_capacity(cells + 1);
        w.push(0.0);
        let mut acc = 0.0;
        let scale = triplet.sigma * dt.sqrt();
        for _ in 0..cells {
            let z: f64 = StandardNormal.sample(&mut rng);
            acc += scale * z;
            w.push(acc);
        }
        w
    } else {
        Vec::new()
    };

    let small = prepared.simulate(cfg.horizon, seed, 0)?;

    Ok(PathSkeleton1D {
        triplet: triplet.clone(),
        horizon: cfg.horizon,
        grid_dt: cfg.dt(),
        brownian,
        jumps,
        small,
        seed,
    })
}

impl PathSkeleton1D {
    /// Linear-interpolated Brownian component at `t`.
    pub fn brownian_at(&self, t: f64) -> f64 {
        if self.brownian.is_empty() {
            return 0.0;
        }
        let x = t / self.grid_dt;
        let i = (x.floor() as usize).min(self.brownian.len() - 2);
        let frac = x - i as f64;
        self.brownian[i] + frac * (self.brownian[i + 1] - self.brownian[i])
    }

    /// Large-jump component at `t` (càdlàg: a jump exactly at `t` counts).
    pub fn jump_part_at(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|j| j.time <= t);
        if k == 0 {
            0.0
        } else {
            self.jumps[k - 1].cum
        }
    }

    /// Càdlàg evaluation of the path at `t ∈ [0, horizon]`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(CoreError::Precondition(format!(
                "t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(self.triplet.gamma * t
            + self.brownian_at(t)
            + self.jump_part_at(t)
            + self.small.value_at(t))
    }

    /// `(n, S_n, Z_n)` for the compound Poisson part.
    pub fn jump_partial_sums(&self) -> Vec<(usize, f64, f64)> {
        self.jumps
            .iter()
            .enumerate()
            .map(|(i, j)| (i + 1, j.time, j.cum))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_measure::Atom;
    use crate::rng::stream;
    use crate::stats;
    use rayon::prelude::*;

    fn atom_measure(position: f64, mass: f64) -> LevyMeasure {
        LevyMeasure::FiniteAtomic(vec![Atom { position, mass }])
    }

    #[test]
    fn pure_drift_path_is_linear() {
        let triplet = LevyTriplet::pure_drift(1.0);
        let cfg = SimConfig::new(10.0, 0.01, 1.0).unwrap();
        let path = simulate_path(&triplet, &cfg, 1).unwrap();
        for &t in &[0.0, 0.5, 3.5, 10.0] {
            assert!((path.evaluate(t).unwrap() - t).abs() < 1e-12);
        }
        assert!(path.evaluate(10.0001).is_err());
        assert!(path.evaluate(-0.1).is_err());
    }

    #[test]
    fn cadlag_jump_convention() {
        let triplet = LevyTriplet::pure_jump(atom_measure(2.0, 1.0)).unwrap();
        let cfg = SimConfig::new(50.0, 0.1, 1.0).unwrap();
        let path = simulate_path(&triplet, &cfg, 7).unwrap();
        assert!(!path.jumps.is_empty());
        let s1 = path.jumps[0].time;
        let y1 = path.jumps[0].size;
        assert_eq!(path.evaluate(s1 * (1.0 - 1e-12)).unwrap(), 0.0);
        assert_eq!(path.evaluate(s1).unwrap(), y1);
    }

    #[test]
    fn jump_partial_sums_are_exact_running_sums() {
        let nu = LevyMeasure::FiniteAtomic(vec![
            Atom {
                position: 2.0,
                mass: 0.5,
            },
            Atom {
                position: -3.0,
                mass: 0.5,
            },
        ]);
        let triplet = LevyTriplet::pure_jump(nu).unwrap();
        let cfg = SimConfig::new(100.0, 0.1, 1.0).unwrap();
        let path = simulate_path(&triplet, &cfg, 3).unwrap();
        let sums = path.jump_partial_sums();
        let mut acc = 0.0;
        for (i, (n, s_n, z_n)) in sums.iter().enumerate() {
            assert_eq!(*n, i + 1);
            acc += path.jumps[i].size;
            assert_eq!(*z_n, acc);
            if i > 0 {
                assert!(*s_n > sums[i - 1].1, "jump times strictly increasing");
            }
        }
    }

    #[test]
    fn replay_is_bit_identical() {
        let triplet = LevyTriplet::new(0.5, 1.0, atom_measure(1.5, 2.0)).unwrap();
        let cfg = SimConfig::new(5.0, 0.01, 2f64.powi(-6)).unwrap();
        let a = simulate_path(&triplet, &cfg, 42).unwrap();
        let b = simulate_path(&triplet, &cfg, 42).unwrap();
        assert_eq!(a.jumps.len(), b.jumps.len());
        for (x, y) in a.jumps.iter().zip(&b.jumps) {
            assert_eq!(x.time.to_bits(), y.time.to_bits());
            assert_eq!(x.size.to_bits(), y.size.to_bits());
        }
        assert!(a
            .brownian
            .iter()
            .zip(&b.brownian)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn poisson_jump_count_mean() {
        // rate λ=2 over T=1000: mean count 2000, flagged at 3σ of the MC mean
        let nu = atom_measure(1.0 + 1e-9, 2.0);
        let counts: Vec<f64> = (0..200u64)
            .map(|s| {
                let mut rng = stream(1000 + s, 0);
                compound_poisson_events(&nu, 1000.0, &mut rng).unwrap().len() as f64
            })
            .collect();
        let m = stats::mean(&counts);
        let tol = 3.0 * (2000.0f64).sqrt() / (counts.len() as f64).sqrt();
        assert!((m - 2000.0).abs() < tol, "mean count {m}");
    }

    #[test]
    fn gamma_inverse_second_moment_identity() {
        // E(1/S_5²) = λ²/((5-1)(5-2)) = 1/12 at λ=1, within 3 MC stderr
        let n = 5usize;
        let vals: Vec<f64> = (0..400_000u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(77, s);
                first_jump_times(1.0, n, &mut rng)[n - 1].powi(-2)
            })
            .collect();
        let m = stats::mean(&vals);
        let se = stats::stderr(&vals);
        assert!(
            (m - 1.0 / 12.0).abs() <= 3.0 * se,
            "mean {m}, target {}, stderr {se}",
            1.0 / 12.0
        );
    }

    #[test]
    fn gamma_mean_of_s10() {
        // E S_10 = 10 at λ=1
        let vals: Vec<f64> = (0..100_000u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(78, s);
                first_jump_times(1.0, 10, &mut rng)[9]
            })
            .collect();
        let m = stats::mean(&vals);
        let se = stats::stderr(&vals);
        assert!((m - 10.0).abs() <= 3.0 * se, "mean {m} stderr {se}");
    }

    #[test]
    fn gamma_inverse_third_moment_identity() {
        // E(S_10^{-3}) = 1/(9·8·7) at λ=1
        let vals: Vec<f64> = (0..400_000u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(79, s);
                first_jump_times(1.0, 10, &mut rng)[9].powi(-3)
            })
            .collect();
        let m = stats::mean(&vals);
        let se = stats::stderr(&vals);
        let target = 1.0 / (9.0 * 8.0 * 7.0);
        assert!(
            (m - target).abs() <= 3.0 * se,
            "mean {m} target {target} stderr {se}"
        );
    }

    #[test]
    fn brownian_terminal_variance() {
        // Var X_T = σ²T within 5% over 10⁴ seeds
        let triplet = LevyTriplet::pure_brownian(0.7);
        let cfg = SimConfig::new(2.0, 0.01, 1.0).unwrap();
        let xs: Vec<f64> = (0..10_000u64)
            .into_par_iter()
            .map(|s| {
                simulate_path(&triplet, &cfg, s)
                    .unwrap()
                    .evaluate(2.0)
                    .unwrap()
            })
            .collect();
        let v = stats::variance(&xs);
        let target = 0.49 * 2.0;
        assert!((v - target).abs() < 0.05 * target, "var {v} target {target}");
    }

    #[test]
    fn early_jump_probability_bound() {
        // P{S_n ≤ 1} ≤ λⁿ/(n-1)! + 3·stderr for n ∈ {4..8}, λ=1
        let n_seeds = 200_000usize;
        let times: Vec<Vec<f64>> = (0..n_seeds as u64)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream(80, s);
                first_jump_times(1.0, 8, &mut rng)
            })
            .collect();
        for n in 4..=8usize {
            let hits = times.iter().filter(|t| t[n - 1] <= 1.0).count();
            let (p, se) = stats::freq_with_stderr(hits, n_seeds);
            let mut fact = 1.0;
            for i in 1..n {
                fact *= i as f64;
            }
            let bound = 1.0 / fact;
            assert!(p <= bound + 3.0 * se, "n={n}: p={p} bound={bound} se={se}");
        }
    }

    #[test]
    fn stationary_increments_two_sample_ks() {
        // X_{t+h} - X_t and X_h agree in distribution (p > 1e-3 at N = 10⁴)
        let triplet = LevyTriplet::new(0.3, 1.0, atom_measure(2.0, 1.0)).unwrap();
        let cfg = SimConfig::new(3.0, 0.002, 1.0).unwrap();
        let (t0, h) = (1.0, 1.5);
        let n = 10_000u64;
        let mut a: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|s| {
                let p = simulate_path(&triplet, &cfg, s).unwrap();
                p.evaluate(t0 + h).unwrap() - p.evaluate(t0).unwrap()
            })
            .collect();
        let mut b: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|s| {
                let p = simulate_path(&triplet, &cfg, n + s).unwrap();
                p.evaluate(h).unwrap()
            })
            .collect();
        let d = stats::ks_two_sample(&mut a, &mut b);
        let p = stats::ks_two_sample_pvalue(d, a.len(), b.len());
        assert!(p > 1e-3, "KS statistic {d}, p {p}");
    }

    #[test]
    fn band_cap_is_enforced() {
        let cfg = SimConfig {
            horizon: 1.0,
            grid_dt: 0.1,
            eps: 2f64.powi(-50),
            max_bands: 40,
        };
        match cfg.band_count() {
            Err(CoreError::Config(msg)) => assert!(msg.contains("cap")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn default_eps_gives_ten_bands() {
        let cfg = SimConfig::new(1.0, 0.01, 2f64.powi(-10)).unwrap();
        assert_eq!(cfg.band_count().unwrap(), 10);
        // bands 0..9 cover (2^{-10}, 1]; eps = 1 disables all bands
        let cfg1 = SimConfig::new(1.0, 0.01, 1.0).unwrap();
        assert_eq!(cfg1.band_count().unwrap(), 0);
    }

    #[test]
    fn compensated_small_jumps_centered_with_matching_variance() {
        let nu = crate::levy_measure::asymmetric_half_stable_custom();
        let triplet = LevyTriplet::pure_jump(nu).unwrap();
        let cfg = SimConfig::new(4.0, 0.01, 2f64.powi(-8)).unwrap();
        let prepared = PreparedBands::prepare(&triplet.nu, &cfg).unwrap();
        let xs: Vec<f64> = (0..20_000u64)
            .into_par_iter()
            .map(|s| {
                let p = simulate_path_prepared(&triplet, &cfg, &prepared, s).unwrap();
                p.small.value_at(4.0)
            })
            .collect();
        let m = stats::mean(&xs);
        let se = stats::stderr(&xs);
        assert!(m.abs() <= 3.0 * se, "mean {m} stderr {se}");
        let v = stats::variance(&xs);
        let retained: f64 = (0..cfg.band_count().unwrap())
            .map(|n| triplet.nu.band_variance(n))
            .sum();
        let expect = 4.0 * retained;
        assert!(
            (v - expect).abs() < 0.05 * expect,
            "variance {v} target {expect}"
        );
    }

    #[test]
    fn neglected_variance_is_reported() {
        let nu = crate::levy_measure::half_stable_custom();
        let triplet = LevyTriplet::pure_jump(nu).unwrap();
        let cfg = SimConfig::new(1.0, 0.01, 2f64.powi(-6)).unwrap();
        let path = simulate_path(&triplet, &cfg, 0).unwrap();
        // ∫_{|x|≤2^{-6}} x² · 0.25|x|^{-3/2} dx = (1/3)(2^{-6})^{3/2}
        let expect = (1.0 / 3.0) * 2f64.powf(-9.0);
        assert!(
            (path.small.neglected_variance - expect).abs() < 1e-6 * expect,
            "neglected {} vs {expect}",
            path.small.neglected_variance
        );
    }
}
