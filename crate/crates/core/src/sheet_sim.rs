//! d-parameter Lévy field simulation: Poisson jump records with exact
//! continuous coordinates, a Brownian sheet on a corner lattice, banded
//! compensated small jumps, box increments and coordinate slices.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{CoreError, Result};
use crate::levy_measure::LevyTriplet;
use crate::path_sim::{BandRecord, JumpEvent, PathSkeleton1D, SimConfig, SmallJumpPart};
use crate::rng;

/// One jump of the compound Poisson sheet.
#[derive(Clone, Debug)]
pub struct SheetJump {
    pub pos: Vec<f64>,
    pub size: f64,
}

/// One dyadic band of compensated small jumps on the sheet.
#[derive(Clone, Debug)]
pub struct SheetBandRecord {
    pub band: u32,
    pub rate: f64,
    pub mean_rate: f64,
    pub events: Vec<(Vec<f64>, f64)>,
}

/// Simulated d-parameter field skeleton on the cube `[0, horizon]^d`.
#[derive(Clone, Debug)]
pub struct SheetSkeleton {
    pub dim: usize,
    pub triplet: LevyTriplet,
    pub horizon: f64,
    pub grid_dt: f64,
    pub cells_per_axis: usize,
    /// `σW` on the corner lattice `(cells+1)^d`, axis 0 fastest; empty when
    /// `σ = 0`.
    pub brownian: Vec<f64>,
    pub jumps: Vec<SheetJump>,
    pub small_bands: Vec<SheetBandRecord>,
    pub neglected_variance: f64,
    pub eps: f64,
    pub seed: u64,
}

fn lattice_index(idx: &[usize], m: usize) -> usize {
    let mut flat = 0;
    for &i in idx.iter().rev() {
        flat = flat * m + i;
    }
    flat
}

/// Brownian sheet values `σW` on the corner lattice: independent
/// `N(0, cell area)` cell increments, prefix-summed along every axis so the
/// sheet vanishes on all coordinate hyperplanes.
fn build_brownian_lattice(
    sigma: f64,
    dim: usize,
    cells: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let m = cells + 1;
    let total = m.pow(dim as u32);
    let mut lat = vec![0.0; total];
    let scale = sigma * dt.powi(dim as i32).sqrt();
    let mut idx = vec![1usize; dim];
    'fill: loop {
        let z: f64 = StandardNormal.sample(rng);
        lat[lattice_index(&idx, m)] = scale * z;
        for a in 0..dim {
            idx[a] += 1;
            if idx[a] <= cells {
                continue 'fill;
            }
            idx[a] = 1;
        }
        break;
    }
    for axis in 0..dim {
        let stride = m.pow(axis as u32);
        for flat in 0..total {
            let coord = (flat / stride) % m;
            if coord >= 1 {
                lat[flat] += lat[flat - stride];
            }
        }
    }
    lat
}

/// Simulate a d-parameter Lévy field skeleton.
pub fn simulate_sheet(
    triplet: &LevyTriplet,
    cfg: &SimConfig,
    dim: usize,
    seed: u64,
) -> Result<SheetSkeleton> {
    cfg.validate()?;
    if dim == 0 {
        return Err(CoreError::invalid("dim", "must be ≥ 1"));
    }
    let t_pow_d = cfg.horizon.powi(dim as i32);

    let lambda = triplet.nu.large_jump_mass();
    let mut jumps = Vec::new();
    if lambda > 0.0 {
        let mut jr = rng::substream(seed, 0, 0);
        let count = Poisson::new(lambda * t_pow_d)
            .map_err(|e| CoreError::Config(format!("jump rate: {e}")))?
            .sample(&mut jr) as usize;
        for _ in 0..count {
            let pos: Vec<f64> = (0..dim).map(|_| jr.random_range(0.0..cfg.horizon)).collect();
            let size = triplet.nu.sample_large_jump(&mut jr)?;
            jumps.push(SheetJump { pos, size });
        }
    }

    let cells = cfg.cells();
    let brownian = if triplet.sigma > 0.0 {
        let mut br = rng::substream(seed, 0, 1);
        build_brownian_lattice(triplet.sigma, dim, cells, cfg.dt(), &mut br)
    } else {
        Vec::new()
    };

    let n_bands = cfg.band_count()?;
    let mut small_bands = Vec::new();
    for n in 0..n_bands {
        let rate = triplet.nu.band_mass(n);
        if rate <= 0.0 {
            continue;
        }
        let sampler = triplet
            .nu
            .band_sampler(n)
            .ok_or_else(|| CoreError::Config(format!("band {n} has mass but no sampler")))?;
        let mut br = rng::substream(seed, 0, 100 + n as u64);
        let count = Poisson::new(rate * t_pow_d)
            .map_err(|e| CoreError::Config(format!("band rate: {e}")))?
            .sample(&mut br) as usize;
        let mut events = Vec::with_capacity(count);
        for _ in 0..count {
            let pos: Vec<f64> = (0..dim).map(|_| br.random_range(0.0..cfg.horizon)).collect();
            events.push((pos, 0.0));
        }
        for e in &mut events {
            e.1 = sampler.sample(&mut br);
        }
        small_bands.push(SheetBandRecord {
            band: n,
            rate,
            mean_rate: triplet.nu.band_mean(n),
            events,
        });
    }

    Ok(SheetSkeleton {
        dim,
        triplet: triplet.clone(),
        horizon: cfg.horizon,
        grid_dt: cfg.dt(),
        cells_per_axis: cells,
        brownian,
        jumps,
        small_bands,
        neglected_variance: triplet.nu.variance_below(n_bands),
        eps: cfg.eps,
        seed,
    })
}

fn leq(pos: &[f64], t: &[f64]) -> bool {
    pos.iter().zip(t).all(|(p, x)| p <= x)
}

impl SheetSkeleton {
    fn in_box(&self, t: &[f64]) -> bool {
        t.len() == self.dim && t.iter().all(|&x| (0.0..=self.horizon).contains(&x))
    }

    /// Multilinear interpolation of the Brownian sheet at `t`.
    pub fn brownian_at(&self, t: &[f64]) -> f64 {
        if self.brownian.is_empty() {
            return 0.0;
        }
        let m = self.cells_per_axis + 1;
        let mut base = vec![0usize; self.dim];
        let mut frac = vec![0.0; self.dim];
        for (a, &x) in t.iter().enumerate() {
            let g = x / self.grid_dt;
            let i = (g.floor() as usize).min(self.cells_per_axis - 1);
            base[a] = i;
            frac[a] = g - i as f64;
        }
        let mut acc = 0.0;
        let mut idx = vec![0usize; self.dim];
        for corner in 0..(1usize << self.dim) {
            let mut w = 1.0;
            for a in 0..self.dim {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx[a] = base[a] + 1;
                } else {
                    w *= 1.0 - frac[a];
                    idx[a] = base[a];
                }
            }
            if w != 0.0 {
                acc += w * self.brownian[lattice_index(&idx, m)];
            }
        }
        acc
    }

    /// Large-jump component `Σ_{τ ≤ t} Y`.
    pub fn jump_part_at(&self, t: &[f64]) -> f64 {
        self.jumps
            .iter()
            .filter(|j| leq(&j.pos, t))
            .map(|j| j.size)
            .sum()
    }

    fn small_part_at(&self, t: &[f64]) -> f64 {
        let vol: f64 = t.iter().product();
        self.small_bands
            .iter()
            .map(|b| {
                let s: f64 = b
                    .events
                    .iter()
                    .filter(|(p, _)| leq(p, t))
                    .map(|&(_, x)| x)
                    .sum();
                s - vol * b.mean_rate
            })
            .sum()
    }

    /// Field evaluation at `t ∈ [0, horizon]^d`; vanishes whenever some
    /// coordinate is zero.
    pub fn evaluate(&self, t: &[f64]) -> Result<f64> {
        if !self.in_box(t) {
            return Err(CoreError::Precondition(format!(
                "point {t:?} outside [0, {}]^{}",
                self.horizon, self.dim
            )));
        }
        let vol: f64 = t.iter().product();
        Ok(self.triplet.gamma * vol
            + self.brownian_at(t)
            + self.jump_part_at(t)
            + self.small_part_at(t))
    }

    /// Alternating-corner box increment
    /// `Δ_a^b X = Σ_{ε∈{0,1}^d} (-1)^{|ε|} X_{c_ε(a,b)}` over `]a, b]`, where
    /// corner ε picks `a_i` where `ε_i = 1` and `b_i` where `ε_i = 0`.
    pub fn increment(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != self.dim || b.len() != self.dim {
            return Err(CoreError::Precondition("dimension mismatch".into()));
        }
        if a.iter().zip(b).any(|(x, y)| x > y) {
            return Err(CoreError::Precondition(
                "box increment requires a ≤ b componentwise".into(),
            ));
        }
        if !self.in_box(a) || !self.in_box(b) {
            return Err(CoreError::Precondition("box outside the simulated cube".into()));
        }
        let mut acc = 0.0;
        let mut corner = vec![0.0; self.dim];
        for eps in 0..(1usize << self.dim) {
            let mut parity = 0usize;
            for i in 0..self.dim {
                if eps >> i & 1 == 1 {
                    corner[i] = a[i];
                    parity += 1;
                } else {
                    corner[i] = b[i];
                }
            }
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * self.evaluate(&corner)?;
        }
        Ok(acc)
    }

    /// One-parameter slice along `axis` with the remaining coordinates fixed:
    /// `t ↦ X_{(…, t, …)}`, returned as a path-skeleton view. The view's
    /// synthetic triplet carries the slice drift `γ·Π fixed_j`; its Brownian
    /// grid holds interpolated sheet values along the line; band rates and
    /// compensators are scaled by `Π fixed_j`.
    pub fn slice(&self, axis: usize, fixed: &[f64]) -> Result<PathSkeleton1D> {
        if axis >= self.dim {
            return Err(CoreError::Precondition(format!(
                "axis {axis} out of range for dimension {}",
                self.dim
            )));
        }
        if fixed.len() != self.dim - 1 {
            return Err(CoreError::Precondition(
                "slice needs d-1 fixed coordinates".into(),
            ));
        }
        if fixed.iter().any(|&x| !(0.0..=self.horizon).contains(&x)) {
            return Err(CoreError::Precondition(
                "fixed coordinates outside the box".into(),
            ));
        }
        let embed = |t: f64| -> Vec<f64> {
            let mut p = Vec::with_capacity(self.dim);
            let mut it = fixed.iter();
            for a in 0..self.dim {
                if a == axis {
                    p.push(t);
                } else {
                    p.push(*it.next().unwrap());
                }
            }
            p
        };
        let fixed_vol: f64 = fixed.iter().product();
        let others_leq = |pos: &[f64]| {
            pos.iter()
                .enumerate()
                .filter(|(a, _)| *a != axis)
                .zip(fixed)
                .all(|((_, p), f)| p <= f)
        };

        let mut slice_jumps: Vec<(f64, f64)> = self
            .jumps
            .iter()
            .filter(|j| others_leq(&j.pos))
            .map(|j| (j.pos[axis], j.size))
            .collect();
        slice_jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cum = 0.0;
        let jumps: Vec<JumpEvent> = slice_jumps
            .into_iter()
            .map(|(time, size)| {
                cum += size;
                JumpEvent { time, size, cum }
            })
            .collect();

        let brownian: Vec<f64> = if self.brownian.is_empty() {
            Vec::new()
        } else {
            (0..=self.cells_per_axis)
                .map(|i| self.brownian_at(&embed(i as f64 * self.grid_dt)))
                .collect()
        };

        let small_bands: Vec<BandRecord> = self
            .small_bands
            .iter()
            .map(|b| {
                let mut events: Vec<(f64, f64)> = b
                    .events
                    .iter()
                    .filter(|(p, _)| others_leq(p))
                    .map(|(p, x)| (p[axis], *x))
                    .collect();
                events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                BandRecord {
                    band: b.band,
                    rate: b.rate * fixed_vol,
                    mean_rate: b.mean_rate * fixed_vol,
                    events,
                }
            })
            .collect();

        let slice_triplet = LevyTriplet {
            gamma: self.triplet.gamma * fixed_vol,
            sigma: self.triplet.sigma,
            nu: self.triplet.nu.clone(),
        };
        Ok(PathSkeleton1D {
            triplet: slice_triplet,
            horizon: self.horizon,
            grid_dt: self.grid_dt,
            brownian,
            jumps,
            small: SmallJumpPart {
                eps: self.eps,
                bands: small_bands,
                neglected_variance: self.neglected_variance,
            },
            seed: self.seed,
        })
    }
}

/// Empirical pairwise correlations of increments over disjoint boxes across a
/// seed ensemble.
pub fn independence_check(
    triplet: &LevyTriplet,
    cfg: &SimConfig,
    dim: usize,
    boxes: &[(Vec<f64>, Vec<f64>)],
    n_seeds: u64,
    base_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    let k = boxes.len();
    if k < 2 {
        return Err(CoreError::Precondition("need at least two boxes".into()));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let (a1, b1) = &boxes[i];
            let (a2, b2) = &boxes[j];
            let disjoint = (0..dim).any(|d| b1[d] <= a2[d] || b2[d] <= a1[d]);
            if !disjoint {
                return Err(CoreError::Precondition(format!("boxes {i} and {j} overlap")));
            }
        }
    }
    let samples: Vec<Vec<f64>> = (0..n_seeds)
        .into_par_iter()
        .map(|s| {
            let sheet = simulate_sheet(triplet, cfg, dim, base_seed.wrapping_add(s))?;
            boxes
                .iter()
                .map(|(a, b)| sheet.increment(a, b))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut corr = vec![vec![0.0; k]; k];
    for i in 0..k {
        corr[i][i] = 1.0;
        for j in (i + 1)..k {
            let xi: Vec<f64> = samples.iter().map(|r| r[i]).collect();
            let xj: Vec<f64> = samples.iter().map(|r| r[j]).collect();
            let c = crate::stats::correlation(&xi, &xj);
            corr[i][j] = c;
            corr[j][i] = c;
        }
    }
    Ok(corr)
}
