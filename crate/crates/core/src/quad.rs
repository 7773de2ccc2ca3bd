//! 1-d adaptive quadrature, per-cell Gauss rules, and a nested-interval tail
//! integrator with divergence detection.

/// Adaptive Simpson integration of a smooth integrand on `[a, b]`.
///
/// The interval is first split into 32 uniform panels so that localized
/// features cannot hide between the initial probe points; each panel then
/// refines adaptively with the standard Richardson stopping estimate
/// `|S_left + S_right - S| < 15 tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive_with_panels(f, a, b, tol, 32)
}

/// [`adaptive`] with an explicit initial panel count.
pub fn adaptive_with_panels<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let ptol = (tol / panels as f64).max(1e-300);
    let mut acc = 0.0;
    for i in 0..panels {
        let pa = a + i as f64 * h;
        let pb = if i + 1 == panels { b } else { pa + h };
        let fa = f(pa);
        let fb = f(pb);
        let m = 0.5 * (pa + pb);
        let fm = f(m);
        let whole = simpson(pa, pb, fa, fm, fb);
        acc += adaptive_rec(f, pa, pb, fa, fm, fb, whole, ptol, 48);
    }
    acc
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// 4-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

/// Fixed 4-point Gauss–Legendre rule on one cell; exact for cubics, used for
/// per-grid-cell integrals where the cell width already controls the error.
pub fn gl4<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..4 {
        acc += GL4_W[i] * f(c + h * GL4_X[i]);
    }
    acc * h
}

/// 2-d tensor GL4 rule on a rectangle.
pub fn gl4_2d<F: Fn(f64, f64) -> f64>(f: &F, ax: f64, bx: f64, ay: f64, by: f64) -> f64 {
    let cx = 0.5 * (ax + bx);
    let hx = 0.5 * (bx - ax);
    let cy = 0.5 * (ay + by);
    let hy = 0.5 * (by - ay);
    let mut acc = 0.0;
    for i in 0..4 {
        let x = cx + hx * GL4_X[i];
        let mut row = 0.0;
        for j in 0..4 {
            row += GL4_W[j] * f(x, cy + hy * GL4_X[j]);
        }
        acc += GL4_W[i] * row;
    }
    acc * hx * hy
}

/// Outcome of a nested-interval tail integration on `[lo, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum TailOutcome {
    /// Partial integrals stabilized; value is Richardson-extrapolated.
    Converged(f64),
    /// Partial integrals still grow by ≥ 1% at the widest window.
    Growing,
}

/// Integrate `f` on `[lo, ∞)` by nested windows `[lo, lo·10^k]`, `k ≤ 8`.
///
/// If the partial integrals grow by at least 1% at the last decade, the
/// integral is reported as [`TailOutcome::Growing`]; otherwise the limit is
/// estimated by geometric (Richardson) extrapolation of the increments.
pub fn nested_tail<F: Fn(f64) -> f64>(f: &F, lo: f64, tol: f64) -> TailOutcome {
    assert!(lo > 0.0, "nested_tail requires a positive left endpoint");
    let mut partial = Vec::with_capacity(9);
    let mut acc = 0.0;
    let mut a = lo;
    for _ in 1..=8 {
        let b = a * 10.0;
        // split each decade for the adaptive rule
        acc += adaptive(f, a, 0.5 * (a + b), tol / 16.0);
        acc += adaptive(f, 0.5 * (a + b), b, tol / 16.0);
        partial.push(acc);
        a = b;
    }
    let n = partial.len();
    let last = partial[n - 1];
    let prev = partial[n - 2];
    let growth = (last - prev).abs();
    if growth >= 0.01 * last.abs().max(f64::MIN_POSITIVE) {
        return TailOutcome::Growing;
    }
    let d1 = partial[n - 2] - partial[n - 3];
    let d2 = last - prev;
    if d2.abs() <= 1e-14 * last.abs() || d1.abs() <= 0.0 {
        return TailOutcome::Converged(last);
    }
    let r = d2 / d1;
    if r > 0.0 && r < 1.0 {
        TailOutcome::Converged(last + d2 * r / (1.0 - r))
    } else {
        TailOutcome::Converged(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_integrates_gaussian_mass() {
        let v = adaptive(&|t: f64| (-0.5 * t * t).exp(), -40.0, 40.0, 1e-12);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let v = adaptive(&|t: f64| (10.0 * t).cos(), 0.0, 1.0, 1e-12);
        assert!((v - 10.0f64.sin() / 10.0).abs() < 1e-11);
    }

    #[test]
    fn gl4_is_exact_for_cubics() {
        let v = gl4(&|t| 3.0 * t * t * t - t + 2.0, -1.0, 3.0);
        // ∫ 3t³ - t + 2 dt = 3/4 t⁴ - t²/2 + 2t
        let exact = 0.75 * (81.0 - 1.0) - 0.5 * (9.0 - 1.0) + 2.0 * 4.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn nested_tail_converges_for_integrable_power() {
        // ∫_1^∞ x^{-1.5} dx = 2
        match nested_tail(&|x: f64| x.powf(-1.5), 1.0, 1e-10) {
            TailOutcome::Converged(v) => assert!((v - 2.0).abs() < 1e-2 * 2.0),
            TailOutcome::Growing => panic!("convergent tail misreported"),
        }
    }

    #[test]
    fn nested_tail_flags_divergence() {
        // ∫_1^∞ x^{-1} dx diverges (logarithmically, the hard case)
        assert_eq!(nested_tail(&|x: f64| 1.0 / x, 1.0, 1e-10), TailOutcome::Growing);
        // ∫_1^∞ x^{-0.5} dx diverges
        assert_eq!(
            nested_tail(&|x: f64| x.powf(-0.5), 1.0, 1e-10),
            TailOutcome::Growing
        );
    }

    #[test]
    fn nested_tail_converges_for_fast_decay() {
        match nested_tail(&|x: f64| (-x).exp(), 1.0, 1e-12) {
            TailOutcome::Converged(v) => assert!((v - (-1.0f64).exp()).abs() < 1e-9),
            TailOutcome::Growing => panic!("exponential tail misreported"),
        }
    }
}
