//! Truncated Taylor series ("jets") for machine-precision derivatives of
//! composed smooth functions, used for the mollifier family where symbolic
//! derivatives are unwieldy.

/// Maximum derivative order available throughout the test-function library.
pub const P_MAX: usize = 6;

const LEN: usize = P_MAX + 1;

/// Taylor coefficients `c[k] = f^{(k)}(x₀) / k!` of a smooth function at a
/// point, truncated at order [`P_MAX`].
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function evaluated at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    /// k-th derivative encoded by this jet.
    pub fn deriv(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 1..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for i in 0..LEN {
            c[i] = self.c[i] + o.c[i];
        }
        Jet { c }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for i in 0..LEN {
            c[i] = self.c[i] - o.c[i];
        }
        Jet { c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for i in 0..LEN {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += self.c[j] * o.c[i - j];
            }
            c[i] = acc;
        }
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut c = self.c;
        for v in &mut c {
            *v *= s;
        }
        Jet { c }
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    /// Reciprocal; requires a nonzero constant term.
    pub fn recip(&self) -> Jet {
        let mut c = [0.0; LEN];
        let inv0 = 1.0 / self.c[0];
        c[0] = inv0;
        for i in 1..LEN {
            let mut acc = 0.0;
            for j in 1..=i {
                acc += self.c[j] * c[i - j];
            }
            c[i] = -inv0 * acc;
        }
        Jet { c }
    }

    /// Exponential via the ODE `(exp f)' = (exp f) f'`.
    pub fn exp(&self) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = self.c[0].exp();
        for i in 1..LEN {
            let mut acc = 0.0;
            for j in 1..=i {
                acc += (j as f64) * self.c[j] * c[i - j];
            }
            c[i] = acc / i as f64;
        }
        Jet { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_jet_matches_analytic_derivatives() {
        // f(x) = exp(-x²/2); f''(x) = (x² - 1) exp(-x²/2)
        let x = 0.7;
        let v = Jet::variable(x);
        let f = v.mul(&v).scale(-0.5).exp();
        let e = (-0.5 * x * x).exp();
        assert!((f.deriv(0) - e).abs() < 1e-15);
        assert!((f.deriv(1) - (-x) * e).abs() < 1e-14);
        assert!((f.deriv(2) - (x * x - 1.0) * e).abs() < 1e-14);
    }

    #[test]
    fn recip_jet_matches_analytic_derivatives() {
        // f(x) = 1/x; f^{(k)}(x) = (-1)^k k! x^{-k-1}
        let x = 1.3;
        let f = Jet::variable(x).recip();
        for k in 0..=P_MAX {
            let mut fact = 1.0;
            for i in 1..=k {
                fact *= i as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let exact = sign * fact * x.powi(-(k as i32) - 1);
            assert!(
                (f.deriv(k) - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "order {k}"
            );
        }
    }
}
