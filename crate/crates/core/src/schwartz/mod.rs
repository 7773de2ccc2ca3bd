//! Test-function library and Schwartz-space calculus: seminorms `N_p`,
//! localized bump families with polynomially growing norms, antiderivative
//! operators, tail integrals and smooth cutoffs.

mod fn1d;

pub use fn1d::{mollifier_cum, Fn1d, Interval};

use crate::error::{CoreError, Result};
use crate::jet::P_MAX;

/// A d-dimensional test function: a linear combination of tensor products of
/// 1-d smooth factors. Everything the toolkit pairs fields against has this
/// shape; general non-tensor Schwartz functions are out of scope.
#[derive(Clone, Debug)]
pub struct TestFunction {
    dim: usize,
    terms: Vec<(f64, Vec<Fn1d>)>,
}

/// Two-sided estimate of a Schwartz seminorm `N_p`.
#[derive(Clone, Debug)]
pub struct SeminormEstimate {
    pub p: usize,
    /// Grid-observed sup-sum (lower estimate, nondecreasing under refinement).
    pub lower: f64,
    /// Certificate-based upper bound.
    pub upper: f64,
    pub points_per_axis: usize,
}

/// All multi-indices `α ∈ ℕ^d` with `|α| ≤ p`.
pub fn multi_indices(dim: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=budget {
            prefix.push(v);
            rec(dim - 1, budget - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, p, &mut Vec::new(), &mut out);
    out
}

impl TestFunction {
    pub fn tensor(factors: Vec<Fn1d>) -> Self {
        assert!(!factors.is_empty());
        TestFunction {
            dim: factors.len(),
            terms: vec![(1.0, factors)],
        }
    }

    pub fn tensor_power(f: Fn1d, dim: usize) -> Self {
        TestFunction::tensor(vec![f; dim])
    }

    pub fn linear_combination(parts: &[(f64, &TestFunction)]) -> Result<Self> {
        let dim = parts
            .first()
            .ok_or_else(|| CoreError::Precondition("empty linear combination".into()))?
            .1
            .dim;
        let mut terms = Vec::new();
        for (c, tf) in parts {
            if tf.dim != dim {
                return Err(CoreError::Precondition(
                    "dimension mismatch in linear combination".into(),
                ));
            }
            for (w, fs) in &tf.terms {
                terms.push((c * w, fs.clone()));
            }
        }
        Ok(TestFunction { dim, terms })
    }

    pub fn scale(&self, c: f64) -> Self {
        TestFunction {
            dim: self.dim,
            terms: self.terms.iter().map(|(w, f)| (c * w, f.clone())).collect(),
        }
    }

    /// Pointwise product (used for cutoff · tail-integral constructions).
    pub fn product(&self, other: &TestFunction) -> Result<Self> {
        if self.dim != other.dim {
            return Err(CoreError::Precondition("dimension mismatch in product".into()));
        }
        let mut terms = Vec::new();
        for (wa, fa) in &self.terms {
            for (wb, fb) in &other.terms {
                let factors: Vec<Fn1d> = fa
                    .iter()
                    .zip(fb)
                    .map(|(a, b)| a.product(b))
                    .collect();
                terms.push((wa * wb, factors));
            }
        }
        Ok(TestFunction {
            dim: self.dim,
            terms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The tensor factors, when this is a single tensor product.
    pub fn factors(&self) -> Option<&[Fn1d]> {
        if self.terms.len() == 1 {
            Some(&self.terms[0].1)
        } else {
            None
        }
    }

    pub fn terms(&self) -> &[(f64, Vec<Fn1d>)] {
        &self.terms
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.dim);
        let mut acc = 0.0;
        for (c, fs) in &self.terms {
            let mut prod = *c;
            for (f, &ti) in fs.iter().zip(t) {
                if prod == 0.0 {
                    break;
                }
                prod *= f.eval(0, ti);
            }
            acc += prod;
        }
        acc
    }

    /// `φ^{(β)}(t)` for a multi-index β.
    pub fn eval_deriv(&self, beta: &[usize], t: &[f64]) -> f64 {
        debug_assert_eq!(beta.len(), self.dim);
        let mut acc = 0.0;
        for (c, fs) in &self.terms {
            let mut prod = *c;
            for ((f, &b), &ti) in fs.iter().zip(beta).zip(t) {
                if prod == 0.0 {
                    break;
                }
                prod *= f.eval(b, ti);
            }
            acc += prod;
        }
        acc
    }

    /// The mixed derivative `φ^{(1_d)} = ∂^d φ / ∂t₁···∂t_d` as a function.
    pub fn mixed_derivative(&self) -> Self {
        self.map_factors(|f| f.derivative(1))
    }

    /// `Φ(t) = ∫_{[t,∞)} φ(s) ds`, smooth and polynomially bounded.
    pub fn tail_integral(&self) -> Self {
        self.map_factors(|f| f.tail_integral())
    }

    fn map_factors<M: Fn(&Fn1d) -> Fn1d>(&self, m: M) -> Self {
        TestFunction {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(c, fs)| (*c, fs.iter().map(&m).collect()))
                .collect(),
        }
    }

    /// `∫_{ℝ^d} φ`.
    pub fn integral(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| c * fs.iter().map(|f| f.integral()).product::<f64>())
            .sum()
    }

    /// `∫_{ℝ^d} φ²` (expands cross terms).
    pub fn squared_integral(&self) -> f64 {
        let mut acc = 0.0;
        for (ci, fi) in &self.terms {
            for (cj, fj) in &self.terms {
                let mut prod = ci * cj;
                for (a, b) in fi.iter().zip(fj) {
                    prod *= a.product(b).integral();
                }
                acc += prod;
            }
        }
        acc
    }

    /// Upper bound on `∫ |φ|` (exact for single tensor terms).
    pub fn abs_integral_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| {
                c.abs()
                    * fs.iter()
                        .map(|f| match f.scan_window() {
                            Some(w) => {
                                crate::quad::adaptive(&|t| f.eval(0, t).abs(), w.lo, w.hi, 1e-10)
                            }
                            None => f64::INFINITY,
                        })
                        .product::<f64>()
            })
            .sum()
    }

    /// Support hull per axis.
    pub fn support_box(&self) -> Vec<Interval> {
        let mut box_: Vec<Interval> = vec![
            Interval {
                lo: f64::INFINITY,
                hi: f64::NEG_INFINITY,
            };
            self.dim
        ];
        for (_, fs) in &self.terms {
            for (i, f) in fs.iter().enumerate() {
                box_[i] = box_[i].hull(&f.support());
            }
        }
        box_
    }

    pub fn is_compact(&self) -> bool {
        self.support_box().iter().all(|i| i.is_compact())
    }

    /// Finite per-axis windows containing all numerically live points.
    pub fn scan_box(&self) -> Option<Vec<Interval>> {
        let mut box_: Vec<Interval> = vec![
            Interval {
                lo: f64::INFINITY,
                hi: f64::NEG_INFINITY,
            };
            self.dim
        ];
        for (_, fs) in &self.terms {
            for (i, f) in fs.iter().enumerate() {
                box_[i] = box_[i].hull(&f.scan_window()?);
            }
        }
        Some(box_)
    }

    /// Certificate upper bound on `sup_t |t^α φ^{(β)}(t)|`.
    pub fn cert(&self, alpha: &[usize], beta: &[usize]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| {
                c.abs()
                    * fs.iter()
                        .zip(alpha.iter().zip(beta))
                        .map(|(f, (&a, &b))| f.cert(a, b))
                        .product::<f64>()
            })
            .sum()
    }

    /// Two-sided Schwartz seminorm estimate
    /// `N_p(φ) = Σ_{|α|,|β| ≤ p} sup_t |t^α φ^{(β)}(t)|`.
    pub fn seminorm(&self, p: usize, points_per_axis: usize) -> Result<SeminormEstimate> {
        let max_order = self
            .terms
            .iter()
            .flat_map(|(_, fs)| fs.iter().map(|f| f.max_order()))
            .min()
            .unwrap_or(P_MAX);
        if p > max_order || p > P_MAX {
            return Err(CoreError::Precondition(format!(
                "seminorm order {p} exceeds available derivative order {max_order}"
            )));
        }
        if self.scan_box().is_none() {
            return Err(CoreError::Unsupported(
                "seminorm of a function with a live tail at infinity".into(),
            ));
        }
        let alphas = multi_indices(self.dim, p);
        let betas = multi_indices(self.dim, p);
        let mut lower = 0.0;
        let mut upper = 0.0;
        if self.terms.len() == 1 {
            // tensor form: sups factorize across axes
            let fs = &self.terms[0].1;
            let c = self.terms[0].0.abs();
            // per-axis caches of grid sups and certs
            let mut grid_sup = vec![vec![vec![0.0; p + 1]; p + 1]; self.dim];
            let mut cert_sup = vec![vec![vec![0.0; p + 1]; p + 1]; self.dim];
            for (i, f) in fs.iter().enumerate() {
                for a in 0..=p {
                    for b in 0..=p {
                        let s = f.weighted_sup(a, b, points_per_axis);
                        grid_sup[i][a][b] = s;
                        cert_sup[i][a][b] = 1.2 * s;
                    }
                }
            }
            for alpha in &alphas {
                for beta in &betas {
                    let mut lo = c;
                    let mut hi = c;
                    for i in 0..self.dim {
                        lo *= grid_sup[i][alpha[i]][beta[i]];
                        hi *= cert_sup[i][alpha[i]][beta[i]];
                    }
                    lower += lo;
                    upper += hi;
                }
            }
        } else {
            // general linear combination: direct grid scan per (α, β)
            let box_ = self.scan_box().unwrap();
            let n = if self.dim == 1 {
                points_per_axis
            } else {
                // keep the total point count manageable in higher dimension
                (points_per_axis as f64).powf(1.0 / self.dim as f64) as usize * 8
            };
            for alpha in &alphas {
                for beta in &betas {
                    let sup = self.grid_sup_weighted(alpha, beta, &box_, n.max(64));
                    lower += sup;
                    upper += 1.5 * sup;
                }
            }
        }
        Ok(SeminormEstimate {
            p,
            lower,
            upper,
            points_per_axis,
        })
    }

    fn grid_sup_weighted(
        &self,
        alpha: &[usize],
        beta: &[usize],
        box_: &[Interval],
        n: usize,
    ) -> f64 {
        let mut best: f64 = 0.0;
        let mut t = vec![0.0; self.dim];
        let total = (n + 1).pow(self.dim as u32);
        for flat in 0..total {
            let mut rem = flat;
            for i in 0..self.dim {
                let j = rem % (n + 1);
                rem /= n + 1;
                t[i] = box_[i].lo + (box_[i].hi - box_[i].lo) * j as f64 / n as f64;
            }
            let mut w = 1.0;
            for i in 0..self.dim {
                w *= t[i].powi(alpha[i] as i32);
            }
            let v = (w * self.eval_deriv(beta, &t)).abs();
            if v > best {
                best = v;
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Named constructions
// ---------------------------------------------------------------------------

/// Standard Gaussian `e^{-t²/2}` as a d-dimensional tensor power.
pub fn gaussian(dim: usize) -> TestFunction {
    TestFunction::tensor_power(Fn1d::gaussian(), dim)
}

/// `He_k(t)e^{-t²/2}` per axis.
pub fn hermite(k: usize, dim: usize) -> TestFunction {
    TestFunction::tensor_power(Fn1d::hermite(k), dim)
}

/// The normalized mollifier bump on `[0,1]^d`.
pub fn mollifier(dim: usize) -> TestFunction {
    TestFunction::tensor_power(Fn1d::mollifier(), dim)
}

/// Mollifier rescaled to the box `[a,b]^d`, keeping unit integral.
pub fn mollifier_on(a: f64, b: f64, dim: usize) -> Result<TestFunction> {
    if b <= a {
        return Err(CoreError::invalid("interval", "requires a < b"));
    }
    let s = 1.0 / (b - a);
    Ok(TestFunction::tensor_power(
        Fn1d::mollifier().affine(s, s, a),
        dim,
    ))
}

fn check_unit_bump(f: &Fn1d) -> Result<()> {
    let supp = f.support();
    if supp.lo < -1e-9 || supp.hi > 1.0 + 1e-9 {
        return Err(CoreError::Precondition(
            "base bump must be supported in [0,1]".into(),
        ));
    }
    let total = f.integral();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CoreError::Precondition(format!(
            "base bump must have unit integral, got {total}"
        )));
    }
    for i in 0..=4096 {
        let t = i as f64 / 4096.0;
        if f.eval(0, t) < -1e-12 {
            return Err(CoreError::Precondition("base bump must be nonnegative".into()));
        }
    }
    Ok(())
}

fn single_factor(phi: &TestFunction) -> Result<&Fn1d> {
    match phi.factors() {
        Some([f]) => Ok(f),
        _ => Err(CoreError::Precondition(
            "expected a one-dimensional single-tensor test function".into(),
        )),
    }
}

/// Localized bump `φ_n(t) = S^k φ((t-S)S^k)`, supported on `[S, S + S^{-k}]`
/// with unit integral.
pub fn bump_family_1d(s_n: f64, k: u32, base: &TestFunction) -> Result<TestFunction> {
    if s_n <= 0.0 {
        return Err(CoreError::invalid("s_n", "must be positive"));
    }
    if k == 0 {
        return Err(CoreError::invalid("k", "must be ≥ 1"));
    }
    let f = single_factor(base)?;
    check_unit_bump(f)?;
    let sk = s_n.powi(k as i32);
    Ok(TestFunction::tensor(vec![f.affine(sk, sk, s_n)]))
}

/// [`bump_family_1d`] on the standard mollifier base, skipping revalidation;
/// for hot per-seed loops where the base is fixed.
pub fn mollifier_bump_1d(s_n: f64, k: u32) -> TestFunction {
    let sk = s_n.powi(k as i32);
    TestFunction::tensor(vec![Fn1d::mollifier().affine(sk, sk, s_n)])
}

/// [`bump_family_dd`] on the standard mollifier base, skipping revalidation.
pub fn mollifier_bump_dd(s_n: f64, d: usize) -> TestFunction {
    let s3 = s_n.powi(3);
    let m = Fn1d::mollifier();
    let factors: Vec<Fn1d> = (0..d)
        .map(|i| {
            let shift = if i + 1 == d { s_n } else { 1.0 };
            m.affine(s3, s3, shift)
        })
        .collect();
    TestFunction::tensor(factors)
}

/// d-dimensional localized bump
/// `φ_n(t) = S^{3d} φ((t₁-1)S³, …, (t_{d-1}-1)S³, (t_d-S)S³)`,
/// supported on `[(1,…,1,S), (1+S^{-3},…,1+S^{-3}, S+S^{-3})]`, unit integral.
pub fn bump_family_dd(s_n: f64, base: &TestFunction) -> Result<TestFunction> {
    if s_n <= 0.0 {
        return Err(CoreError::invalid("s_n", "must be positive"));
    }
    let factors = base.factors().ok_or_else(|| {
        CoreError::Precondition("d-dimensional bump base must be a tensor product".into())
    })?;
    let d = factors.len();
    let s3 = s_n.powi(3);
    let mut out = Vec::with_capacity(d);
    let total = base.integral();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CoreError::Precondition(
            "d-dimensional bump base must have unit integral".into(),
        ));
    }
    for (i, f) in factors.iter().enumerate() {
        let supp = f.support();
        if supp.lo < -1e-9 || supp.hi > 1.0 + 1e-9 {
            return Err(CoreError::Precondition(
                "d-dimensional bump base must be supported in [0,1]^d".into(),
            ));
        }
        let shift = if i + 1 == d { s_n } else { 1.0 };
        out.push(f.affine(s3, s3, shift));
    }
    Ok(TestFunction::tensor(out))
}

/// Constant from the support-box estimate chain for the 1-d bump seminorm
/// bound `N_p(φ_n) ≤ C N_p(φ) S^{(p+1)k+p}` (valid for `S ≥ 1`).
pub fn bump_bound_constant_1d(p: usize) -> f64 {
    2f64.powi(p as i32) * (p as f64 + 1.0)
}

/// Constant from the support-box estimate chain for the d-dimensional bump
/// seminorm bound `N_p(φ_n) ≤ C N_p(φ) S^{3d+4p}` (valid for `S ≥ 1`).
pub fn bump_bound_constant_dd(p: usize, d: usize) -> f64 {
    // number of multi-indices α with |α| ≤ p in dimension d
    let count = multi_indices(d, p).len() as f64;
    2f64.powi(p as i32) * count
}

/// The antiderivative operator
/// `Iφ(t) = ∫_{-∞}^t (φ(s) - θ(s)·∫φ) ds`,
/// which maps Schwartz functions to Schwartz functions and satisfies
/// `I(φ') = φ` and `sup_t |t|^p |Iφ(t)| ≤ C_p N_{p+2}(φ)`.
pub fn antiderivative_i(phi: &TestFunction, theta: &TestFunction) -> Result<TestFunction> {
    if phi.dim() != 1 || theta.dim() != 1 {
        return Err(CoreError::Precondition(
            "antiderivative operator is one-dimensional".into(),
        ));
    }
    let th = single_factor(theta)?;
    check_unit_bump(th)?;
    Ok(TestFunction {
        dim: 1,
        terms: phi
            .terms
            .iter()
            .map(|(c, fs)| (*c, vec![Fn1d::antideriv(&fs[0], th)]))
            .collect(),
    })
}

/// Constant for the bound `sup_t |t|^p |Iφ(t)| ≤ C_p N_{p+2}(φ)`, from the
/// chain: split at |t| = 1, bound |φ(s)| by N_{p+2}(φ) min(1, |s|^{-p-2}) and
/// |∫φ| by 4 N_{p+2}(φ); each region contributes at most 7 N_{p+2}(φ).
pub fn antiderivative_bound_constant(_p: usize) -> f64 {
    7.0
}

/// Componentwise antiderivative `I_d φ = (I₁φ₁) ⊗ ⋯ ⊗ (I₁φ_d)` on tensor
/// functions, satisfying `I_d(∂^d φ/∂t₁⋯∂t_d) = φ`.
pub fn tensor_i_d(phi: &TestFunction, theta: &TestFunction) -> Result<TestFunction> {
    if theta.dim() != 1 {
        return Err(CoreError::Precondition("cutoff θ must be one-dimensional".into()));
    }
    let th = single_factor(theta)?;
    check_unit_bump(th)?;
    Ok(TestFunction {
        dim: phi.dim,
        terms: phi
            .terms
            .iter()
            .map(|(c, fs)| {
                (
                    *c,
                    fs.iter().map(|f| Fn1d::antideriv(f, th)).collect::<Vec<_>>(),
                )
            })
            .collect(),
    })
}

/// `Φ(t) = ∫_{[t,+∞)} φ(s) ds` with derivative rule
/// `Φ^{(β)}(t) = (-1)^{|β|} ∂-wise tails`; smooth, bounded, not Schwartz.
pub fn tail_integral_phi(phi: &TestFunction) -> TestFunction {
    phi.tail_integral()
}

/// Smooth cutoff `θ` on `ℝ^d` with `θ = 0` where `min_i t_i ≤ -1` and `θ = 1`
/// where `min_i t_i ≥ -1/2`, built as a tensor power of a 1-d smooth step.
pub fn cutoff_theta_dd(d: usize) -> TestFunction {
    TestFunction::tensor_power(Fn1d::smooth_step(), d)
}

/// Resolve a CLI test-function identifier.
///
/// Recognized names: `gaussian`, `hermite-K`, `mollifier`, `mollifier:A:B`,
/// `bump1d:S:K` (d = 1 only), `bump-dd:S`.
pub fn by_name(name: &str, dim: usize) -> Result<TestFunction> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["gaussian"] => Ok(gaussian(dim)),
        ["mollifier"] => Ok(mollifier(dim)),
        ["mollifier", a, b] => {
            let a: f64 = a.parse().map_err(|_| CoreError::Config(format!("bad bound in {name}")))?;
            let b: f64 = b.parse().map_err(|_| CoreError::Config(format!("bad bound in {name}")))?;
            mollifier_on(a, b, dim)
        }
        [h] if h.starts_with("hermite-") => {
            let k: usize = h["hermite-".len()..]
                .parse()
                .map_err(|_| CoreError::Config(format!("bad hermite order in {name}")))?;
            Ok(hermite(k, dim))
        }
        ["bump1d", s, k] => {
            if dim != 1 {
                return Err(CoreError::Config("bump1d requires dimension 1".into()));
            }
            let s: f64 = s.parse().map_err(|_| CoreError::Config(format!("bad S in {name}")))?;
            let k: u32 = k.parse().map_err(|_| CoreError::Config(format!("bad k in {name}")))?;
            bump_family_1d(s, k, &mollifier(1))
        }
        ["bump-dd", s] => {
            let s: f64 = s.parse().map_err(|_| CoreError::Config(format!("bad S in {name}")))?;
            bump_family_dd(s, &mollifier(dim))
        }
        _ => Err(CoreError::Config(format!("unknown test function '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: usize = 1 << 14;

    #[test]
    fn gaussian_seminorm_p0_is_one() {
        let est = gaussian(1).seminorm(0, GRID).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-6, "lower = {}", est.lower);
        assert!(est.upper >= est.lower);
    }

    #[test]
    fn weighted_gaussian_seminorm_p0() {
        // sup |t e^{-t²/2}| = e^{-1/2}
        let est = hermite(1, 1).seminorm(0, GRID).unwrap();
        assert!((est.lower - (-0.5f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn seminorms_are_monotone_in_p() {
        for tf in [gaussian(1), hermite(3, 1), mollifier(1), gaussian(2)] {
            let mut prev = 0.0;
            for p in 0..=3 {
                let est = tf.seminorm(p, 1 << 12).unwrap();
                assert!(
                    est.lower >= prev - 1e-12,
                    "N_p not monotone at p={p}: {} < {prev}",
                    est.lower
                );
                assert!(est.lower <= est.upper);
                prev = est.lower;
            }
        }
    }

    #[test]
    fn seminorm_lower_nondecreasing_under_refinement() {
        let tf = hermite(2, 1);
        let coarse = tf.seminorm(2, 1 << 10).unwrap().lower;
        let fine = tf.seminorm(2, 1 << 14).unwrap().lower;
        assert!(fine >= coarse - 1e-12);
    }

    #[test]
    fn certificate_dominates_finer_grid_sup() {
        for tf in [gaussian(1), hermite(3, 1), mollifier(1)] {
            let f = &tf.factors().unwrap()[0];
            for (a, b) in [(0usize, 0usize), (2, 1), (3, 3)] {
                let cert = f.cert(a, b);
                let fine = f.weighted_sup(a, b, 1 << 16);
                assert!(cert >= fine, "cert {cert} < fine-grid sup {fine} at ({a},{b})");
            }
        }
    }

    #[test]
    fn bump_1d_support_and_mass() {
        let base = mollifier(1);
        for &s in &[1.0, 2.5, 10.0] {
            let b = bump_family_1d(s, 2, &base).unwrap();
            let supp = b.support_box()[0];
            assert!((supp.lo - s).abs() < 1e-9);
            assert!((supp.hi - (s + s.powi(-2))).abs() < 1e-9);
            assert!((b.integral() - 1.0).abs() < 1e-9, "s={s}");
            // exactly zero outside the stated box
            assert_eq!(b.eval(&[supp.lo - 1e-6]), 0.0);
            assert_eq!(b.eval(&[supp.hi + 1e-6]), 0.0);
        }
        assert!(bump_family_1d(-1.0, 2, &base).is_err());
    }

    #[test]
    fn bump_1d_seminorm_growth_bound() {
        // N_p(φ_n) ≤ C N_p(φ) S^{(p+1)k+p} for S ≥ 1 with C = 2^p (p+1)
        let base = mollifier(1);
        let base_norms: Vec<f64> = (0..=2)
            .map(|p| base.seminorm(p, GRID).unwrap().lower)
            .collect();
        for &s in &[1.0, 2.0, 4.0, 8.0, 16.0] {
            for k in [2u32, 3] {
                let b = bump_family_1d(s, k, &base).unwrap();
                for p in 0..=2usize {
                    let np = b.seminorm(p, GRID).unwrap().lower;
                    let bound = bump_bound_constant_1d(p)
                        * base_norms[p]
                        * s.powi(((p + 1) as u32 * k + p as u32) as i32);
                    assert!(
                        np <= bound * (1.0 + 1e-9),
                        "S={s} k={k} p={p}: N_p={np} > bound={bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn bump_dd_support_mass_and_growth_bound() {
        let base = mollifier(2);
        let b1 = bump_family_dd(1.0, &base).unwrap();
        let sb = b1.support_box();
        assert!((sb[0].lo - 1.0).abs() < 1e-9 && (sb[0].hi - 2.0).abs() < 1e-9);
        assert!((sb[1].lo - 1.0).abs() < 1e-9 && (sb[1].hi - 2.0).abs() < 1e-9);
        assert!((b1.integral() - 1.0).abs() < 1e-9);

        let base_norms: Vec<f64> = (0..=2)
            .map(|p| base.seminorm(p, 1 << 12).unwrap().lower)
            .collect();
        for &s in &[1.0, 2.0, 4.0, 8.0, 16.0] {
            let b = bump_family_dd(s, &base).unwrap();
            assert!((b.integral() - 1.0).abs() < 1e-9);
            for p in 0..=2usize {
                let np = b.seminorm(p, 1 << 12).unwrap().lower;
                let bound =
                    bump_bound_constant_dd(p, 2) * base_norms[p] * s.powi((3 * 2 + 4 * p) as i32);
                assert!(
                    np <= bound * (1.0 + 1e-9),
                    "S={s} p={p}: N_p={np} > bound={bound}"
                );
            }
        }
    }

    #[test]
    fn bump_dd_reduces_to_1d_with_cubic_scaling() {
        let b_dd = bump_family_dd(2.0, &mollifier(1)).unwrap();
        let b_1d = bump_family_1d(2.0, 3, &mollifier(1)).unwrap();
        for &t in &[2.05, 2.1, 2.12, 2.2] {
            assert!((b_dd.eval(&[t]) - b_1d.eval(&[t])).abs() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_of_theta_is_zero() {
        let theta = mollifier(1);
        let i_theta = antiderivative_i(&theta, &theta).unwrap();
        for &t in &[-1.0, 0.2, 0.5, 0.9, 2.0] {
            assert!(i_theta.eval(&[t]).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn antiderivative_recovers_gaussian_from_derivative() {
        // I(g') = g
        let g = gaussian(1);
        let g_prime = g.mixed_derivative();
        let rec = antiderivative_i(&g_prime, &mollifier(1)).unwrap();
        for i in 0..=200 {
            let t = -10.0 + 20.0 * i as f64 / 200.0;
            let err = (rec.eval(&[t]) - g.eval(&[t])).abs();
            assert!(err < 1e-9, "t={t}, err={err}");
        }
    }

    #[test]
    fn antiderivative_derivative_identity() {
        // (Iφ)' = φ - θ·∫φ, via central differences of decreasing step
        let phi = gaussian(1);
        let theta = mollifier(1);
        let iphi = antiderivative_i(&phi, &theta).unwrap();
        let total = phi.integral();
        let target = |t: f64| phi.eval(&[t]) - total * theta.eval(&[t]);
        let mut errs = Vec::new();
        for &h in &[1e-3, 1e-4] {
            let mut worst: f64 = 0.0;
            for &t in &[-2.0, -0.5, 0.3, 0.7, 1.5] {
                let num = (iphi.eval(&[t + h]) - iphi.eval(&[t - h])) / (2.0 * h);
                worst = worst.max((num - target(t)).abs());
            }
            errs.push(worst);
        }
        // central differences are O(h²): one decade in h gives ≈ two decades
        // in error (factor-2 slack over the exact 100, plus a quadrature floor)
        assert!(errs[1] < errs[0] / 50.0 + 1e-11, "errors: {errs:?}");
    }

    #[test]
    fn antiderivative_weighted_sup_bound() {
        // sup |t|^p |Iφ(t)| ≤ C_p N_{p+2}(φ)
        let theta = mollifier(1);
        for phi in [gaussian(1), hermite(3, 1)] {
            let iphi = antiderivative_i(&phi, &theta).unwrap();
            for p in 0..=2usize {
                let np2 = phi.seminorm(p + 2, GRID).unwrap().lower;
                let bound = antiderivative_bound_constant(p) * np2;
                let mut sup: f64 = 0.0;
                for i in 0..=2000 {
                    let t = -30.0 + 60.0 * i as f64 / 2000.0;
                    sup = sup.max(t.abs().powi(p as i32) * iphi.eval(&[t]).abs());
                }
                assert!(sup <= bound, "p={p}: sup={sup} > bound={bound}");
            }
        }
    }

    #[test]
    fn tensor_antiderivative_recovers_tensor_gaussian() {
        // I_d(∂²(g⊗g)/∂t₁∂t₂) = g⊗g
        let g2 = gaussian(2);
        let mixed = g2.mixed_derivative();
        let rec = tensor_i_d(&mixed, &mollifier(1)).unwrap();
        for &x in &[-3.0, -0.7, 0.0, 1.3] {
            for &y in &[-2.0, 0.4, 2.2] {
                let err = (rec.eval(&[x, y]) - g2.eval(&[x, y])).abs();
                assert!(err < 1e-9, "({x},{y}): {err}");
            }
        }
    }

    #[test]
    fn tensor_antiderivative_of_theta_tensor_is_zero() {
        let theta2 = mollifier(2);
        let res = tensor_i_d(&theta2, &mollifier(1)).unwrap();
        for &x in &[0.2, 0.5, 0.8] {
            for &y in &[0.1, 0.6] {
                assert!(res.eval(&[x, y]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn antiderivative_is_linear() {
        let theta = mollifier(1);
        let phi = gaussian(1);
        let psi = hermite(2, 1);
        let combo = TestFunction::linear_combination(&[(2.5, &phi), (-1.25, &psi)]).unwrap();
        let i_combo = antiderivative_i(&combo, &theta).unwrap();
        let i_phi = antiderivative_i(&phi, &theta).unwrap();
        let i_psi = antiderivative_i(&psi, &theta).unwrap();
        for i in 0..=100 {
            let t = -8.0 + 16.0 * i as f64 / 100.0;
            let lhs = i_combo.eval(&[t]);
            let rhs = 2.5 * i_phi.eval(&[t]) - 1.25 * i_psi.eval(&[t]);
            assert!((lhs - rhs).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn tail_integral_of_compact_bump_is_plateau() {
        // Φ_n = 1 left of the bump, 0 right of it
        let b = bump_family_1d(2.0, 2, &mollifier(1)).unwrap();
        let phi_tail = tail_integral_phi(&b);
        assert!((phi_tail.eval(&[1.0]) - 1.0).abs() < 1e-10);
        assert!((phi_tail.eval(&[2.0]) - 1.0).abs() < 1e-10);
        assert_eq!(phi_tail.eval(&[2.26]), 0.0);
    }

    #[test]
    fn tail_integral_vanishes_past_unit_box() {
        let m = mollifier(2);
        let phi_tail = tail_integral_phi(&m);
        assert_eq!(phi_tail.eval(&[1.5, 0.2]), 0.0);
        assert_eq!(phi_tail.eval(&[0.2, 1.5]), 0.0);
        assert!((phi_tail.eval(&[-0.5, -0.5]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_integral_matches_direct_quadrature_at_random_points() {
        use rand::Rng;
        let g = gaussian(1);
        let phi_tail = tail_integral_phi(&g);
        let mut rng = crate::rng::stream(2024, 0);
        for _ in 0..100 {
            let t: f64 = rng.random_range(-6.0..6.0);
            let direct = crate::quad::adaptive(&|s| g.eval(&[s]), t, 44.0, 1e-12);
            assert!((phi_tail.eval(&[t]) - direct).abs() < 1e-8);
        }
    }

    #[test]
    fn cutoff_plateau_conditions() {
        let theta = cutoff_theta_dd(2);
        assert!((theta.eval(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
        assert_eq!(theta.eval(&[-1.0, 5.0]), 0.0);
        assert_eq!(theta.eval(&[5.0, -1.2]), 0.0);
        assert!((theta.eval(&[-0.5, -0.5]) - 1.0).abs() < 1e-12);
        // ∂θ/∂t₁ bounded by the 1-d step derivative bound
        let step = Fn1d::smooth_step();
        let bound = step.cert(0, 1);
        let mut sup: f64 = 0.0;
        for i in 0..=400 {
            let x = -1.0 + 0.5 * i as f64 / 400.0;
            for j in 0..=40 {
                let y = -1.0 + 3.0 * j as f64 / 40.0;
                sup = sup.max(theta.eval_deriv(&[1, 0], &[x, y]).abs());
            }
        }
        assert!(sup <= bound, "sup={sup} bound={bound}");
    }

    #[test]
    fn tail_integral_polynomial_bound_with_numeric_constant() {
        // sup_{t ≥ a} (1+|t^α|)|Φ^{(β)}(t)| ≤ C·N_{p+2d}(φ) at a = -1_d, with C
        // evaluated numerically from the integral-bound chain
        //   |φ^{(β)}(u)| Π_i (1+|u_i|^{α_i+2}) ≤ 2^d N_{p+2d}(φ),
        //   C(α) = 2^d · sup_{t≥a} (1+|t^α|) Π_i ∫_{t_i}^∞ du/(1+|u|^{α_i+2}).
        let axis_integral = |t: f64, a_pow: usize| -> f64 {
            let hi = 1e4;
            crate::quad::adaptive(&|u: f64| 1.0 / (1.0 + u.abs().powi(a_pow as i32 + 2)), t, hi, 1e-9)
                + hi.powi(-(a_pow as i32) - 1) / (a_pow as f64 + 1.0)
        };
        // d = 1
        for phi in [gaussian(1), hermite(2, 1)] {
            for p in 0..=2usize {
                let n = phi.seminorm(p + 2, 1 << 14).unwrap().lower;
                let tail = phi.tail_integral();
                for alpha in 0..=p {
                    for beta in 0..=p {
                        let mut c: f64 = 0.0;
                        for i in 0..=600 {
                            let t = -1.0 + 61.0 * i as f64 / 600.0;
                            c = c.max((1.0 + t.abs().powi(alpha as i32)) * axis_integral(t, alpha));
                        }
                        c *= 2.0;
                        let mut sup: f64 = 0.0;
                        for i in 0..=600 {
                            let t = -1.0 + 61.0 * i as f64 / 600.0;
                            let v = (1.0 + t.abs().powi(alpha as i32))
                                * tail.eval_deriv(&[beta], &[t]).abs();
                            sup = sup.max(v);
                        }
                        assert!(
                            sup <= c * n * (1.0 + 1e-9),
                            "d=1 α={alpha} β={beta}: sup {sup} > C·N = {}",
                            c * n
                        );
                    }
                }
            }
        }
        // d = 2, p = 0
        let phi = gaussian(2);
        let n = phi.seminorm(4, 1 << 12).unwrap().lower;
        let tail = phi.tail_integral();
        let mut c: f64 = 0.0;
        for i in 0..=60 {
            let t = -1.0 + 31.0 * i as f64 / 60.0;
            let prod = axis_integral(t, 0);
            c = c.max(2.0 * prod * prod);
        }
        c *= 4.0; // 2^d
        let mut sup: f64 = 0.0;
        for i in 0..=80 {
            for j in 0..=80 {
                let x = -1.0 + 21.0 * i as f64 / 80.0;
                let y = -1.0 + 21.0 * j as f64 / 80.0;
                // weight (1 + |t^(0,0)|) = 2
                sup = sup.max(2.0 * tail.eval(&[x, y]).abs());
            }
        }
        assert!(sup <= c * n, "d=2: sup {sup} > C·N = {}", c * n);
    }

    #[test]
    fn by_name_resolves_and_rejects() {
        assert!(by_name("gaussian", 1).is_ok());
        assert!(by_name("hermite-3", 1).is_ok());
        assert!(by_name("mollifier", 2).is_ok());
        assert!(by_name("bump1d:2.0:2", 1).is_ok());
        assert!(by_name("bump1d:2.0:2", 2).is_err());
        assert!(by_name("bump-dd:3.0", 2).is_ok());
        assert!(by_name("nonsense", 1).is_err());
    }

    #[test]
    fn seminorm_rejects_excessive_order() {
        assert!(gaussian(1).seminorm(9, 128).is_err());
    }
}
