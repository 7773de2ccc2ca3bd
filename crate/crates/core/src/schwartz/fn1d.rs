//! One-dimensional smooth building blocks. Every d-dimensional test function
//! in this crate is a linear combination of tensor products of these.

use std::sync::{Arc, OnceLock};

use crate::jet::{Jet, P_MAX};
use crate::quad;

/// An interval, possibly unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn whole() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }
    pub fn is_compact(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
    pub fn intersect(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(o.lo),
            hi: self.hi.min(o.hi),
        }
    }
    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }
}

/// Where a Gaussian-weighted function underflows to exactly 0.0 in f64:
/// exp(-44²/2) = exp(-968) is below the smallest subnormal, and the Hermite
/// polynomial factors (degree ≤ 14 here) cannot lift that back up.
const GAUSS_DEAD: f64 = 44.0;

#[derive(Debug)]
enum Kind {
    /// `He_k(t) e^{-t²/2}` (probabilists' Hermite); `k = 0` is the Gaussian.
    HermiteGauss { k: usize },
    /// Normalized bump `exp(-1/(x(1-x))) / Z` on `(0,1)`, zero elsewhere.
    Mollifier,
    /// Smooth step: 0 on `(-∞,-1]`, 1 on `[-1/2,∞)`, monotone in between.
    SmoothStep,
    /// `amp · base(scale·(t - shift))` with `scale > 0`.
    Affine {
        base: Fn1d,
        amp: f64,
        scale: f64,
        shift: f64,
    },
    Product {
        a: Fn1d,
        b: Fn1d,
    },
    Lincomb {
        terms: Vec<(f64, Fn1d)>,
    },
    /// `t ↦ ∫_t^∞ base(s) ds` — smooth and bounded but not Schwartz.
    TailIntegral {
        base: Fn1d,
    },
    /// Antiderivative `Iφ(t) = ∫_{-∞}^t (φ(s) - θ(s)∫φ) ds`.
    Antideriv {
        phi: Fn1d,
        theta: Fn1d,
        total: f64,
    },
    /// `base^{(order)}` reinterpreted as a function in its own right.
    Deriv {
        base: Fn1d,
        order: usize,
    },
    Zero,
}

/// A smooth 1-d function with derivative evaluation up to [`P_MAX`], an exact
/// support descriptor, and grid-certified decay bounds.
#[derive(Clone, Debug)]
pub struct Fn1d {
    kind: Arc<Kind>,
}

fn mollifier_norm() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        quad::adaptive(
            &|x: f64| {
                if x <= 1e-6 || x >= 1.0 - 1e-6 {
                    0.0
                } else {
                    (-1.0 / (x * (1.0 - x))).exp()
                }
            },
            0.0,
            1.0,
            1e-15,
        )
    })
}

fn mollifier_jet(x: f64) -> Jet {
    if x <= 1e-6 || x >= 1.0 - 1e-6 {
        return Jet::constant(0.0);
    }
    let v = Jet::variable(x);
    let w = Jet::constant(1.0).sub(&v).mul(&v); // x(1-x)
    w.recip().neg().exp().scale(1.0 / mollifier_norm())
}

const CUM_N: usize = 1 << 16;

/// Cumulative of the normalized mollifier on a dense table.
fn mollifier_cum_table() -> &'static Vec<f64> {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let h = 1.0 / CUM_N as f64;
        let mut c = Vec::with_capacity(CUM_N + 1);
        c.push(0.0);
        let mut acc = 0.0;
        let f = |x: f64| mollifier_jet(x).deriv(0);
        for i in 0..CUM_N {
            let a = i as f64 * h;
            let b = a + h;
            acc += (h / 6.0) * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
            c.push(acc);
        }
        // renormalize so the table integrates exactly to 1
        let z = acc;
        for v in &mut c {
            *v /= z;
        }
        c
    })
}

/// `∫_0^u m(s) ds` for the normalized mollifier `m`, via a dense cumulative
/// table with cubic Hermite interpolation.
pub fn mollifier_cum(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let t = mollifier_cum_table();
    let h = 1.0 / CUM_N as f64;
    let i = ((u / h) as usize).min(CUM_N - 1);
    let x0 = i as f64 * h;
    let s = (u - x0) / h;
    let (c0, c1) = (t[i], t[i + 1]);
    let (d0, d1) = (
        mollifier_jet(x0).deriv(0) * h,
        mollifier_jet(x0 + h).deriv(0) * h,
    );
    let s2 = s * s;
    let s3 = s2 * s;
    c0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + d0 * (s3 - 2.0 * s2 + s)
        + c1 * (-2.0 * s3 + 3.0 * s2)
        + d1 * (s3 - s2)
}

fn hermite_e(n: usize, t: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = t;
    for k in 1..n {
        let h2 = t * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

impl Fn1d {
    fn from_kind(kind: Kind) -> Self {
        Fn1d {
            kind: Arc::new(kind),
        }
    }

    pub fn gaussian() -> Self {
        Fn1d::from_kind(Kind::HermiteGauss { k: 0 })
    }

    /// `He_k(t) e^{-t²/2}`.
    pub fn hermite(k: usize) -> Self {
        Fn1d::from_kind(Kind::HermiteGauss { k })
    }

    pub fn mollifier() -> Self {
        Fn1d::from_kind(Kind::Mollifier)
    }

    pub fn smooth_step() -> Self {
        Fn1d::from_kind(Kind::SmoothStep)
    }

    pub fn zero() -> Self {
        Fn1d::from_kind(Kind::Zero)
    }

    /// `amp · self(scale (t - shift))`, `scale > 0`.
    pub fn affine(&self, amp: f64, scale: f64, shift: f64) -> Self {
        assert!(scale > 0.0, "affine rescaling requires scale > 0");
        Fn1d::from_kind(Kind::Affine {
            base: self.clone(),
            amp,
            scale,
            shift,
        })
    }

    pub fn product(&self, other: &Fn1d) -> Self {
        Fn1d::from_kind(Kind::Product {
            a: self.clone(),
            b: other.clone(),
        })
    }

    pub fn lincomb(terms: Vec<(f64, Fn1d)>) -> Self {
        Fn1d::from_kind(Kind::Lincomb { terms })
    }

    /// `t ↦ ∫_t^∞ self(s) ds`.
    pub fn tail_integral(&self) -> Self {
        Fn1d::from_kind(Kind::TailIntegral { base: self.clone() })
    }

    /// `self^{(order)}` as a standalone function.
    pub fn derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        Fn1d::from_kind(Kind::Deriv {
            base: self.clone(),
            order,
        })
    }

    /// Antiderivative operator: `Iφ(t) = ∫_{-∞}^t (φ(s) - θ(s)·∫φ) ds`.
    pub(crate) fn antideriv(phi: &Fn1d, theta: &Fn1d) -> Self {
        let total = phi.integral();
        Fn1d::from_kind(Kind::Antideriv {
            phi: phi.clone(),
            theta: theta.clone(),
            total,
        })
    }

    /// Highest derivative order this function can evaluate.
    pub fn max_order(&self) -> usize {
        match &*self.kind {
            Kind::HermiteGauss { .. } | Kind::Mollifier | Kind::SmoothStep | Kind::Zero => P_MAX,
            Kind::Affine { base, .. } => base.max_order(),
            Kind::Product { a, b } => a.max_order().min(b.max_order()),
            Kind::Lincomb { terms } => terms
                .iter()
                .map(|(_, f)| f.max_order())
                .min()
                .unwrap_or(P_MAX),
            Kind::TailIntegral { base } => (base.max_order() + 1).min(P_MAX),
            Kind::Antideriv { phi, theta, .. } => {
                (phi.max_order().min(theta.max_order()) + 1).min(P_MAX)
            }
            Kind::Deriv { base, order } => base.max_order().saturating_sub(*order),
        }
    }

    /// Exact-zero support interval (mathematical support hull).
    pub fn support(&self) -> Interval {
        match &*self.kind {
            Kind::HermiteGauss { .. } => Interval::whole(),
            Kind::Mollifier => Interval { lo: 0.0, hi: 1.0 },
            Kind::SmoothStep => Interval {
                lo: -1.0,
                hi: f64::INFINITY,
            },
            Kind::Affine {
                base, scale, shift, ..
            } => {
                let s = base.support();
                Interval {
                    lo: shift + s.lo / scale,
                    hi: shift + s.hi / scale,
                }
            }
            Kind::Product { a, b } => a.support().intersect(&b.support()),
            Kind::Lincomb { terms } => terms
                .iter()
                .map(|(_, f)| f.support())
                .reduce(|x, y| x.hull(&y))
                .unwrap_or(Interval { lo: 0.0, hi: 0.0 }),
            Kind::TailIntegral { base } => Interval {
                lo: f64::NEG_INFINITY,
                hi: base.support().hi,
            },
            Kind::Antideriv { phi, theta, .. } => Interval {
                lo: phi.support().lo.min(theta.support().lo),
                hi: f64::INFINITY,
            },
            Kind::Deriv { base, .. } => base.support(),
            Kind::Zero => Interval { lo: 0.0, hi: 0.0 },
        }
    }

    /// `(lo, hi)` such that the function is *numerically zero* below `lo` and
    /// above `hi` (values and all derivatives). `±∞` means the corresponding
    /// side never dies (e.g. the smooth step to the right, a tail integral to
    /// the left).
    fn zero_dead(&self) -> (f64, f64) {
        match &*self.kind {
            Kind::HermiteGauss { .. } => (-GAUSS_DEAD, GAUSS_DEAD),
            Kind::Mollifier => (0.0, 1.0),
            Kind::SmoothStep => (-1.0, f64::INFINITY),
            Kind::Affine {
                base, scale, shift, ..
            } => {
                let (lo, hi) = base.zero_dead();
                (shift + lo / scale, shift + hi / scale)
            }
            // zero where either factor is zero
            Kind::Product { a, b } => {
                let (la, ha) = a.zero_dead();
                let (lb, hb) = b.zero_dead();
                (la.max(lb), ha.min(hb))
            }
            // zero only where every term is zero
            Kind::Lincomb { terms } => terms
                .iter()
                .map(|(_, f)| f.zero_dead())
                .reduce(|(l1, h1), (l2, h2)| (l1.min(l2), h1.max(h2)))
                .unwrap_or((0.0, 0.0)),
            Kind::TailIntegral { base } => {
                let (_, h) = base.zero_dead();
                (f64::NEG_INFINITY, h.min(base.support().hi))
            }
            // zero left of all mass; zero right of all mass because the
            // integrand has total mass zero by construction (enforced in eval)
            Kind::Antideriv { phi, theta, .. } => {
                let (lp, hp) = phi.zero_dead();
                let (lt, ht) = theta.zero_dead();
                (lp.min(lt), hp.max(ht))
            }
            Kind::Deriv { base, .. } => base.zero_dead(),
            Kind::Zero => (0.0, 0.0),
        }
    }

    /// Finite window containing every numerically live point, or `None` when
    /// one side stays live out to infinity (not Schwartz-class on that side).
    pub fn scan_window(&self) -> Option<Interval> {
        let supp = self.support();
        let (dl, dh) = self.zero_dead();
        let w = Interval {
            lo: supp.lo.max(dl),
            hi: supp.hi.min(dh),
        };
        if w.lo.is_finite() && w.hi.is_finite() && w.lo <= w.hi {
            Some(w)
        } else {
            None
        }
    }

    /// Evaluate the k-th derivative at `t`.
    pub fn eval(&self, k: usize, t: f64) -> f64 {
        debug_assert!(k <= self.max_order(), "derivative order out of range");
        match &*self.kind {
            Kind::HermiteGauss { k: k0 } => {
                let w = (-0.5 * t * t).exp();
                if w == 0.0 {
                    return 0.0;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * hermite_e(k0 + k, t) * w
            }
            Kind::Mollifier => mollifier_jet(t).deriv(k),
            Kind::SmoothStep => {
                if k == 0 {
                    mollifier_cum(2.0 * (t + 1.0))
                } else {
                    2f64.powi(k as i32) * mollifier_jet(2.0 * (t + 1.0)).deriv(k - 1)
                }
            }
            Kind::Affine {
                base,
                amp,
                scale,
                shift,
            } => amp * scale.powi(k as i32) * base.eval(k, scale * (t - shift)),
            Kind::Product { a, b } => {
                let mut acc = 0.0;
                for j in 0..=k {
                    acc += binom(k, j) * a.eval(j, t) * b.eval(k - j, t);
                }
                acc
            }
            Kind::Lincomb { terms } => terms.iter().map(|(c, f)| c * f.eval(k, t)).sum(),
            Kind::TailIntegral { base } => {
                if k == 0 {
                    tail_value(base, t)
                } else {
                    -base.eval(k - 1, t)
                }
            }
            Kind::Antideriv { phi, theta, total } => {
                if k == 0 {
                    antideriv_value(phi, theta, *total, t)
                } else {
                    phi.eval(k - 1, t) - total * theta.eval(k - 1, t)
                }
            }
            Kind::Deriv { base, order } => base.eval(k + order, t),
            Kind::Zero => 0.0,
        }
    }

    /// `∫ f` over the real line (exact zeros outside the live window).
    pub fn integral(&self) -> f64 {
        match &*self.kind {
            Kind::Lincomb { terms } => terms.iter().map(|(c, f)| c * f.integral()).sum(),
            Kind::Zero => 0.0,
            _ => {
                let w = self
                    .scan_window()
                    .expect("integral requires a finite live window");
                quad::adaptive(&|t| self.eval(0, t), w.lo, w.hi, 1e-13)
            }
        }
    }

    /// Dense-grid sup of `|t^α f^{(β)}(t)|` over the live window (a grid lower
    /// estimate of the true sup; outside the window the weighted value is
    /// exactly zero in f64).
    pub fn weighted_sup(&self, alpha: usize, beta: usize, points: usize) -> f64 {
        let w = match self.scan_window() {
            Some(w) => w,
            None => return f64::INFINITY,
        };
        let n = points.max(16);
        let h = (w.hi - w.lo) / n as f64;
        let mut best: f64 = 0.0;
        for i in 0..=n {
            let t = w.lo + i as f64 * h;
            let v = (t.powi(alpha as i32) * self.eval(beta, t)).abs();
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Decay certificate: an upper bound on `sup_t |t^α f^{(β)}(t)|`, built as
    /// a dense-grid sup with a fixed 20% slack. The families here are resolved
    /// well below 2¹⁴ points over their live windows, so the slack dominates
    /// the grid interpolation error.
    pub fn cert(&self, alpha: usize, beta: usize) -> f64 {
        1.2 * self.weighted_sup(alpha, beta, 1 << 14)
    }
}

fn tail_value(base: &Fn1d, t: f64) -> f64 {
    let supp = base.support();
    if t >= supp.hi {
        return 0.0;
    }
    // fast path: (affine images of) the mollifier use the cumulative table
    if let Kind::Affine {
        base: inner,
        amp,
        scale,
        shift,
    } = &*base.kind
    {
        if matches!(&*inner.kind, Kind::Mollifier) {
            let u = scale * (t - shift);
            return amp / scale * (1.0 - mollifier_cum(u));
        }
    }
    if matches!(&*base.kind, Kind::Mollifier) {
        return 1.0 - mollifier_cum(t);
    }
    // ∫_t^∞ g^{(k)}(s) ds = -g^{(k-1)}(t) when g^{(k-1)} vanishes at +∞
    if let Kind::Deriv { base: inner, order } = &*base.kind {
        if inner.scan_window().is_some() {
            return -inner.eval(order - 1, t);
        }
    }
    let w = base
        .scan_window()
        .expect("tail integral requires a finite live window");
    let lo = t.max(w.lo);
    if lo >= w.hi {
        return 0.0;
    }
    quad::adaptive(&|s| base.eval(0, s), lo, w.hi, 1e-12)
}

fn antideriv_value(phi: &Fn1d, theta: &Fn1d, total: f64, t: f64) -> f64 {
    let (lp, hp) = phi.zero_dead();
    let (lt, ht) = theta.zero_dead();
    let lo = lp.min(lt);
    let hi = hp.max(ht);
    if t <= lo || t >= hi {
        // left of all mass, or right of it: the integrand φ - θ∫φ has total
        // mass zero, so the antiderivative vanishes identically out there
        return 0.0;
    }
    let g = |s: f64| phi.eval(0, s) - total * theta.eval(0, s);
    if t - lo <= hi - t {
        quad::adaptive(&g, lo, t, 1e-12)
    } else {
        -quad::adaptive(&g, t, hi, 1e-12)
    }
}
