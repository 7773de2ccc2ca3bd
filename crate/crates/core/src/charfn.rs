//! Lévy symbol `ψ(z) = iγz - ½σ²z² + ∫(e^{ixz}-1-izx·1_{|x|≤1}) ν(dx)` and the
//! characteristic functional `E e^{i⟨Ẋ,φ⟩} = exp ∫ ψ(φ(t)) dt`, validated
//! against Monte-Carlo empirical characteristic functions of the stochastic
//! integral.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::levy_measure::{LevyMeasure, LevyTriplet};
use crate::pairing::{FieldGrid, FieldRef, Pairer};
use crate::path_sim::{simulate_path_prepared, PreparedBands, SimConfig};
use crate::quad;
use crate::rng;
use crate::schwartz::TestFunction;
use crate::sheet_sim::simulate_sheet;

/// `e^{iw} - 1` without cancellation: `(-2sin²(w/2), sin w)`.
fn expi_m1(w: f64) -> Complex64 {
    let s = (0.5 * w).sin();
    Complex64::new(-2.0 * s * s, w.sin())
}

/// `sin(w) - w`, Taylor-guarded for small `w`.
fn sin_m_id(w: f64) -> f64 {
    if w.abs() < 1e-3 {
        let w2 = w * w;
        -w * w2 / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0))
    } else {
        w.sin() - w
    }
}

/// `e^{iw} - 1 - iw` without cancellation.
fn expi_m1_m_id(w: f64) -> Complex64 {
    let s = (0.5 * w).sin();
    Complex64::new(-2.0 * s * s, sin_m_id(w))
}

/// Jump-part integrand `e^{ixz} - 1 - izx·1_{|x|≤1}` at jump size `x`.
fn jump_kernel(x: f64, z: f64) -> Complex64 {
    let w = x * z;
    if x.abs() <= 1.0 {
        expi_m1_m_id(w)
    } else {
        expi_m1(w)
    }
}

/// `∫_1^∞ (cos(xz)-1)·x^{-β-1} dx`: adaptive head plus a two-term integration
/// by parts tail (the remainder is `O((R|z|)^{-3} R^{-β})` with `R|z| = 64`).
fn pareto_cos_integral(beta: f64, z: f64) -> f64 {
    let az = z.abs();
    if az == 0.0 {
        return 0.0;
    }
    let r = (64.0 / az).max(64.0);
    let head = quad::adaptive_with_panels(
        &|x: f64| {
            let s = (0.5 * x * az).sin();
            -2.0 * s * s * x.powf(-beta - 1.0)
        },
        1.0,
        r,
        1e-11,
        256,
    );
    let tail = -r.powf(-beta) / beta - (r * az).sin() / az * r.powf(-beta - 1.0)
        + (beta + 1.0) * (r * az).cos() / (az * az) * r.powf(-beta - 2.0);
    head + tail
}

/// The Lévy symbol of the triplet.
pub fn levy_symbol(triplet: &LevyTriplet, z: f64) -> Complex64 {
    let mut psi = Complex64::new(
        -0.5 * triplet.sigma * triplet.sigma * z * z,
        triplet.gamma * z,
    );
    if z == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    match &triplet.nu {
        LevyMeasure::FiniteAtomic(atoms) => {
            for a in atoms {
                psi += a.mass * jump_kernel(a.position, z);
            }
        }
        LevyMeasure::ParetoTail { beta, lambda } => {
            // symmetric tails: the imaginary parts cancel
            psi += lambda * beta * pareto_cos_integral(*beta, z);
        }
        LevyMeasure::LogSquaredTail { lambda } => {
            // one-sided x > e: adaptive head to x₀, then a two-term IBP tail
            let az = z.abs();
            let x0: f64 = (1e5f64).max(64.0 / az);
            let g = |x: f64| 1.0 / (x * x.ln() * x.ln());
            let head_re = quad::adaptive_with_panels(
                &|x: f64| {
                    let s = (0.5 * x * z).sin();
                    -2.0 * s * s * g(x)
                },
                std::f64::consts::E,
                x0,
                1e-10,
                1024,
            );
            let head_im = quad::adaptive_with_panels(
                &|x: f64| (x * z).sin() * g(x),
                std::f64::consts::E,
                x0,
                1e-10,
                1024,
            );
            // ∫_{x0}^∞ (e^{ixz}-1) g dx ≈ -∫_{x0}^∞ g + IBP terms of ∫ e^{ixz} g
            let minus_one_tail = -(1.0 / x0.ln());
            let gp = |x: f64| -(x.ln() + 2.0) / (x * x * x.ln().powi(3));
            let iz = Complex64::new(0.0, z);
            let e0 = Complex64::new(0.0, x0 * z).exp();
            let osc_tail = -e0 * g(x0) / iz + e0 * gp(x0) / (iz * iz);
            psi += lambda
                * (Complex64::new(head_re + minus_one_tail, head_im) + osc_tail);
        }
        LevyMeasure::GaussianDensity { scale } => {
            let s = *scale;
            let dens = move |x: f64| {
                let u = x / s;
                (-0.5 * u * u).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
            };
            let hi = 50.0 * s.max(1.0) + 1.0;
            let re = quad::adaptive(
                &|x: f64| (jump_kernel(x, z).re) * (dens(x) + dens(-x)),
                1e-14,
                hi,
                1e-12,
            );
            let im = quad::adaptive(
                &|x: f64| jump_kernel(x, z).im * dens(x) + jump_kernel(-x, z).im * dens(-x),
                1e-14,
                hi,
                1e-12,
            );
            psi += Complex64::new(re, im);
        }
        LevyMeasure::Custom(c) => {
            let d = &c.density;
            let az = z.abs();
            let x0: f64 = (200f64).max(200.0 / az);
            // |x| ≤ 1: compensated kernel, absolutely convergent near 0
            let re_in = quad::adaptive(
                &|x: f64| jump_kernel(x, z).re * (d(x) + d(-x)),
                1e-12,
                1.0,
                1e-11,
            );
            let im_in = quad::adaptive(
                &|x: f64| jump_kernel(x, z).im * d(x) + jump_kernel(-x, z).im * d(-x),
                1e-12,
                1.0,
                1e-11,
            );
            // 1 < |x| ≤ x₀: plain kernel
            let re_out = quad::adaptive_with_panels(
                &|x: f64| jump_kernel(x, z).re * (d(x) + d(-x)),
                1.0,
                x0,
                1e-11,
                256,
            );
            let im_out = quad::adaptive_with_panels(
                &|x: f64| jump_kernel(x, z).im * d(x) + jump_kernel(-x, z).im * d(-x),
                1.0,
                x0,
                1e-11,
                256,
            );
            // beyond x₀ the oscillatory part is O(density(x₀)/|z|); keep the
            // systematic "-1" mass term via nested quadrature
            let tail_mass = match quad::nested_tail(&|x: f64| d(x) + d(-x), x0, 1e-10) {
                quad::TailOutcome::Converged(v) => v,
                quad::TailOutcome::Growing => f64::NAN,
            };
            psi += Complex64::new(re_in + re_out - tail_mass, im_in + im_out);
        }
    }
    psi
}

/// `log E e^{i⟨Ẋ,φ⟩} = ∫_{ℝ₊^d} ψ(φ(t)) dt`, with the domain truncated by the
/// decay certificate. For unbounded-support `φ`, requires a PAM triplet.
pub fn functional_log(triplet: &LevyTriplet, phi: &TestFunction) -> Result<Complex64> {
    let box_ = phi.scan_box().ok_or_else(|| {
        CoreError::Precondition("characteristic functional needs a decay certificate".into())
    })?;
    if !phi.is_compact() && triplet.nu.large_jump_mass() > 0.0 {
        let verdict = triplet.nu.classify_pam(&[1.0, 0.5, 0.25, 0.1, 0.05])?;
        if verdict.has_pam() != Some(true) {
            return Err(CoreError::Precondition(
                "characteristic functional on unbounded-support φ requires PAM".into(),
            ));
        }
    }
    let lo: Vec<f64> = box_.iter().map(|i| i.lo.max(0.0)).collect();
    let hi: Vec<f64> = box_.iter().map(|i| i.hi).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    match phi.dim() {
        1 => {
            let re = quad::adaptive(
                &|t: f64| levy_symbol(triplet, phi.eval(&[t])).re,
                lo[0],
                hi[0],
                1e-10,
            );
            let im = quad::adaptive(
                &|t: f64| levy_symbol(triplet, phi.eval(&[t])).im,
                lo[0],
                hi[0],
                1e-10,
            );
            Ok(Complex64::new(re, im))
        }
        2 => {
            let inner_tol = 1e-9 / (hi[0] - lo[0]).max(1.0);
            let re = quad::adaptive(
                &|x: f64| {
                    quad::adaptive(
                        &|y: f64| levy_symbol(triplet, phi.eval(&[x, y])).re,
                        lo[1],
                        hi[1],
                        inner_tol,
                    )
                },
                lo[0],
                hi[0],
                1e-9,
            );
            let im = quad::adaptive(
                &|x: f64| {
                    quad::adaptive(
                        &|y: f64| levy_symbol(triplet, phi.eval(&[x, y])).im,
                        lo[1],
                        hi[1],
                        inner_tol,
                    )
                },
                lo[0],
                hi[0],
                1e-9,
            );
            Ok(Complex64::new(re, im))
        }
        d => Err(CoreError::Unsupported(format!(
            "characteristic functional implemented for d ≤ 2, got {d}"
        ))),
    }
}

/// Monte-Carlo empirical characteristic function of `⟨Ẋ,φ⟩` via the
/// stochastic-integral route.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McCharResult {
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
}

impl McCharResult {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }
}

/// Simulation controls for the MC characteristic functional.
#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub samples: usize,
    pub base_seed: u64,
    /// Grid resolution relative to the horizon.
    pub dt_over_horizon: f64,
    pub eps: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            base_seed: 31,
            dt_over_horizon: 1e-3,
            eps: 2f64.powi(-10),
        }
    }
}

pub fn mc_char_functional(
    triplet: &LevyTriplet,
    phi: &TestFunction,
    cfg: &McConfig,
) -> Result<McCharResult> {
    if cfg.samples < 1_000 {
        return Err(CoreError::Precondition(
            "Monte-Carlo characteristic functional needs ≥ 1000 samples".into(),
        ));
    }
    let box_ = phi.scan_box().ok_or_else(|| {
        CoreError::Precondition("test function needs a decay certificate".into())
    })?;
    let horizon = box_
        .iter()
        .map(|i| i.hi)
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let sim = SimConfig::new(horizon, cfg.dt_over_horizon * horizon, cfg.eps)?;
    let dim = phi.dim();
    let grid = FieldGrid {
        dim,
        horizon,
        cells_per_axis: sim.cells(),
    };
    let pairer = Pairer::new(phi, grid, false, triplet.sigma > 0.0)?;
    let prepared = PreparedBands::prepare(&triplet.nu, &sim)?;

    let values: Vec<Complex64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|s| -> Result<Complex64> {
            use rand::Rng;
            let seed = rng::substream(cfg.base_seed, s, 23).random::<u64>();
            let a = match dim {
                1 => {
                    let path = simulate_path_prepared(triplet, &sim, &prepared, seed)?;
                    pairer.stochastic_integral(&FieldRef::Path(&path))?.value
                }
                _ => {
                    let sheet = simulate_sheet(triplet, &sim, dim, seed)?;
                    pairer.stochastic_integral(&FieldRef::Sheet(&sheet))?.value
                }
            };
            Ok(Complex64::new(a.cos(), a.sin()))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = values.len() as f64;
    let mean: Complex64 = values.iter().sum::<Complex64>() / n;
    let var_re = values.iter().map(|v| (v.re - mean.re).powi(2)).sum::<f64>() / (n - 1.0);
    let var_im = values.iter().map(|v| (v.im - mean.im).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McCharResult {
        mean_re: mean.re,
        mean_im: mean.im,
        stderr_re: (var_re / n).sqrt(),
        stderr_im: (var_im / n).sqrt(),
        samples: values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_measure::Atom;
    use crate::schwartz;

    fn atom_triplet(position: f64, mass: f64) -> LevyTriplet {
        LevyTriplet::pure_jump(LevyMeasure::FiniteAtomic(vec![Atom { position, mass }]))
            .unwrap()
    }

    #[test]
    fn gaussian_symbol_is_quadratic() {
        let t = LevyTriplet::pure_brownian(1.3);
        for &z in &[-2.0, -0.5, 0.0, 1.0, 3.7] {
            let psi = levy_symbol(&t, z);
            assert!((psi.re - (-0.5 * 1.69 * z * z)).abs() < 1e-14);
            assert!(psi.im.abs() < 1e-14);
        }
    }

    #[test]
    fn drift_symbol_is_linear_imaginary() {
        let t = LevyTriplet::pure_drift(0.8);
        for &z in &[-1.0, 0.3, 2.0] {
            let psi = levy_symbol(&t, z);
            assert!(psi.re.abs() < 1e-15);
            assert!((psi.im - 0.8 * z).abs() < 1e-14);
        }
    }

    #[test]
    fn atom_symbol_closed_form() {
        // atom at 2 (no compensation since |2| > 1): ψ(z) = λ(e^{2iz} - 1)
        let t = atom_triplet(2.0, 1.5);
        for &z in &[-1.2, 0.4, 2.0] {
            let psi = levy_symbol(&t, z);
            let expect = 1.5 * (Complex64::new(0.0, 2.0 * z).exp() - 1.0);
            assert!((psi - expect).norm() < 1e-13, "z={z}");
        }
    }

    #[test]
    fn symbol_vanishes_at_zero_and_conjugates() {
        let triplets = [
            LevyTriplet::new(0.5, 1.0, LevyMeasure::ParetoTail { beta: 0.5, lambda: 1.0 })
                .unwrap(),
            atom_triplet(2.0, 1.0),
            LevyTriplet::new(0.0, 0.0, LevyMeasure::GaussianDensity { scale: 1.0 }).unwrap(),
        ];
        for t in &triplets {
            assert_eq!(levy_symbol(t, 0.0), Complex64::new(0.0, 0.0));
            for &z in &[0.3, 1.7] {
                let a = levy_symbol(t, z);
                let b = levy_symbol(t, -z);
                assert!((a - b.conj()).norm() < 1e-9, "ψ(-z) ≠ conj ψ(z) at z={z}");
            }
        }
    }

    #[test]
    fn pareto_symbol_matches_brute_quadrature() {
        let t = LevyTriplet::pure_jump(LevyMeasure::ParetoTail {
            beta: 0.5,
            lambda: 1.0,
        })
        .unwrap();
        for &z in &[0.5, 1.0, 2.5] {
            let psi = levy_symbol(&t, z);
            // brute force: λβ ∫ (cos(xz)-1) x^{-β-1} over [1, R] plus the
            // analytic "-1" mass beyond R (oscillatory remainder O(R^{-1.5}/z))
            let r_max = 1e6;
            let brute = quad::adaptive_with_panels(
                &|x: f64| {
                    let s = (0.5 * x * z).sin();
                    0.5 * (-2.0 * s * s) * x.powf(-1.5)
                },
                1.0,
                r_max,
                1e-9,
                1 << 14,
            ) - r_max.powf(-0.5);
            assert!(
                (psi.re - brute).abs() < 2e-4 * brute.abs().max(1.0),
                "z={z}: {} vs {brute}",
                psi.re
            );
            assert!(psi.im.abs() < 1e-10);
        }
    }

    #[test]
    fn half_stable_symbol_matches_stable_law() {
        // ∫(e^{ixz}-1-izx1)·0.25|x|^{-3/2} dx = -0.5·√(2π)·|z|^{1/2}
        let t = LevyTriplet::pure_jump(crate::levy_measure::half_stable_custom()).unwrap();
        for &z in &[0.5f64, 1.0, 4.0] {
            let psi = levy_symbol(&t, z);
            let expect = -0.5 * (2.0 * std::f64::consts::PI).sqrt() * z.abs().sqrt();
            assert!(
                (psi.re - expect).abs() < 2e-3 * expect.abs(),
                "z={z}: {} vs {expect}",
                psi.re
            );
            assert!(psi.im.abs() < 1e-6, "z={z}: im {}", psi.im);
        }
    }

    #[test]
    fn log_squared_symbol_matches_brute_quadrature() {
        let t = LevyTriplet::pure_jump(LevyMeasure::LogSquaredTail { lambda: 1.0 }).unwrap();
        let z = 1.3;
        let psi = levy_symbol(&t, z);
        let g = |x: f64| 1.0 / (x * x.ln() * x.ln());
        let brute_re = quad::adaptive_with_panels(
            &|x: f64| {
                let s = (0.5 * x * z).sin();
                -2.0 * s * s * g(x)
            },
            std::f64::consts::E,
            1e7,
            1e-9,
            1 << 15,
        ) - 1.0 / (1e7f64).ln();
        assert!(
            (psi.re - brute_re).abs() < 1e-4,
            "{} vs {brute_re}",
            psi.re
        );
    }

    #[test]
    fn functional_log_of_zero_function_is_zero() {
        let t = atom_triplet(2.0, 1.0);
        let zero = TestFunction::tensor(vec![crate::schwartz::Fn1d::zero()]);
        let v = functional_log(&t, &zero).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn brownian_functional_log_is_half_l2_norm() {
        let t = LevyTriplet::pure_brownian(1.0);
        let phi = schwartz::mollifier(1);
        let v = functional_log(&t, &phi).unwrap();
        let expect = -0.5 * phi.squared_integral();
        assert!((v.re - expect).abs() < 1e-8, "{} vs {expect}", v.re);
        assert!(v.im.abs() < 1e-10);
    }

    #[test]
    fn atom_functional_log_matches_adaptive_oracle() {
        // log = ∫ λ(e^{2iφ(t)} - 1) dt for the atom at 2
        let t = atom_triplet(2.0, 1.0);
        let phi = schwartz::mollifier(1);
        let v = functional_log(&t, &phi).unwrap();
        let or_re = quad::adaptive(
            &|s: f64| (2.0 * phi.eval(&[s])).cos() - 1.0,
            0.0,
            1.0,
            1e-12,
        );
        let or_im = quad::adaptive(&|s: f64| (2.0 * phi.eval(&[s])).sin(), 0.0, 1.0, 1e-12);
        assert!((v.re - or_re).abs() < 1e-8);
        assert!((v.im - or_im).abs() < 1e-8);
    }

    #[test]
    fn characteristic_function_modulus_bounded_by_one() {
        let triplets = [
            LevyTriplet::new(1.0, 1.0, LevyMeasure::ParetoTail { beta: 0.5, lambda: 1.0 })
                .unwrap(),
            atom_triplet(2.0, 1.0),
            LevyTriplet::pure_brownian(2.0),
        ];
        for t in &triplets {
            for phi in [schwartz::mollifier(1), schwartz::mollifier_on(0.0, 3.0, 1).unwrap()] {
                let v = functional_log(t, &phi).unwrap();
                assert!(v.re <= 1e-12, "Re log = {} must be ≤ 0", v.re);
                assert!(v.exp().norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn functional_log_is_additive_in_independent_triplets() {
        let t1 = LevyTriplet::new(
            1.0,
            1.0,
            LevyMeasure::FiniteAtomic(vec![Atom {
                position: 2.0,
                mass: 0.7,
            }]),
        )
        .unwrap();
        let t2 = LevyTriplet::new(
            0.5,
            2.0,
            LevyMeasure::FiniteAtomic(vec![Atom {
                position: -3.0,
                mass: 0.2,
            }]),
        )
        .unwrap();
        let sum = LevyTriplet::new(
            1.5,
            (1.0f64 + 4.0).sqrt(),
            LevyMeasure::FiniteAtomic(vec![
                Atom {
                    position: 2.0,
                    mass: 0.7,
                },
                Atom {
                    position: -3.0,
                    mass: 0.2,
                },
            ]),
        )
        .unwrap();
        let phi = schwartz::mollifier(1);
        let a = functional_log(&t1, &phi).unwrap();
        let b = functional_log(&t2, &phi).unwrap();
        let c = functional_log(&sum, &phi).unwrap();
        assert!((c - (a + b)).norm() < 1e-9, "{c} vs {}", a + b);
    }

    #[test]
    fn mc_drift_is_deterministic_phase() {
        let t = LevyTriplet::pure_drift(1.0);
        let phi = schwartz::mollifier(1);
        let mc = mc_char_functional(
            &t,
            &phi,
            &McConfig {
                samples: 1_000,
                ..McConfig::default()
            },
        )
        .unwrap();
        let expect = Complex64::new(0.0, phi.integral()).exp();
        assert!((mc.mean() - expect).norm() < 1e-9);
        assert!(mc.stderr_re < 1e-12 && mc.stderr_im < 1e-12);
        assert!(mc.mean().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn mc_brownian_matches_analytic_char_function() {
        let t = LevyTriplet::pure_brownian(1.0);
        let phi = schwartz::mollifier(1);
        let mc = mc_char_functional(
            &t,
            &phi,
            &McConfig {
                samples: 20_000,
                ..McConfig::default()
            },
        )
        .unwrap();
        let expect = functional_log(&t, &phi).unwrap().exp();
        assert!(
            (mc.mean_re - expect.re).abs() <= 5.0 * mc.stderr_re,
            "re {} vs {} (se {})",
            mc.mean_re,
            expect.re,
            mc.stderr_re
        );
        assert!(
            (mc.mean_im - expect.im).abs() <= 5.0 * mc.stderr_im.max(1e-12),
            "im {} vs {} (se {})",
            mc.mean_im,
            expect.im,
            mc.stderr_im
        );
    }

    #[test]
    fn mc_two_parameter_sheet_matches_analytic() {
        // d = 2 pure-jump field: E e^{i⟨Ẋ,φ⟩} = exp ∫∫ λ(e^{2iφ(t)}-1) dt
        let t = atom_triplet(2.0, 1.0);
        let phi = schwartz::mollifier(2);
        let analytic = functional_log(&t, &phi).unwrap().exp();
        let mc = mc_char_functional(
            &t,
            &phi,
            &McConfig {
                samples: 20_000,
                dt_over_horizon: 0.02,
                ..McConfig::default()
            },
        )
        .unwrap();
        assert!(
            (mc.mean_re - analytic.re).abs() <= 5.0 * mc.stderr_re,
            "re {} vs {} (se {})",
            mc.mean_re,
            analytic.re,
            mc.stderr_re
        );
        assert!(
            (mc.mean_im - analytic.im).abs() <= 5.0 * mc.stderr_im,
            "im {} vs {} (se {})",
            mc.mean_im,
            analytic.im,
            mc.stderr_im
        );
    }

    #[test]
    fn mc_rejects_tiny_sample_counts() {
        let t = LevyTriplet::pure_drift(1.0);
        let phi = schwartz::mollifier(1);
        assert!(mc_char_functional(
            &t,
            &phi,
            &McConfig {
                samples: 10,
                ..McConfig::default()
            }
        )
        .is_err());
    }
}
