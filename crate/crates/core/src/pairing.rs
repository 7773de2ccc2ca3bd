//! Pairings `⟨X, φ⟩` and `⟨Ẋ, φ⟩` by two independent routes, with explicit
//! error budgets:
//!
//! * the *quadrature* route integrates the simulated field against `φ` (or
//!   against `(-1)^d φ^{(1_d)}` for the white noise), handling jumps exactly
//!   through tail integrals `Σ_i Y_i Φ(τ_i)` and the Brownian part through
//!   exact integration of the grid interpolant;
//! * the *stochastic-integral* route evaluates
//!   `γA₁(φ) + σA₂(φ) + A₃(φ) + A₄(φ)` with a left-point grid Wiener sum,
//!   the exact jump sum `Σ Y_i φ(τ_i)`, and banded compensated Poisson sums.
//!
//! The two routes share the same grid increments and the same jump events, so
//! for compactly supported `φ` their difference is bounded by the reported
//! budget: quadrature tolerances plus a deterministic per-cell Brownian term
//! `Σ_cells |ΔW| · (dt/2) Σ_axes sup_cell |∂φ|` of order `O(√dt)`.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::levy_measure::LevyMeasure;
use crate::path_sim::PathSkeleton1D;
use crate::quad;
use crate::schwartz::TestFunction;
use crate::sheet_sim::SheetSkeleton;

const QUAD_TOL: f64 = 1e-10;
/// Error allowance per tabulated tail-integral evaluation.
const TABLE_EPS: f64 = 1e-11;

/// Which route produced a pairing value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    StochasticIntegral,
    ExactJumpSum,
}

/// Error budget, component by component; never silently absorbed.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ErrorBudget {
    /// Accumulated quadrature tolerances and table allowances.
    pub quadrature: f64,
    /// Deterministic bound on the Brownian grid-interpolation discrepancy.
    pub brownian_grid: f64,
    /// One-standard-deviation scale of the truncated small-jump remainder
    /// `√(∫φ² · Σ_{neglected bands} ∫ x²ν)`.
    pub neglected_small_jump: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.quadrature + self.brownian_grid + self.neglected_small_jump
    }
}

/// A pairing value with its method tag and error budget.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairingResult {
    pub value: f64,
    pub method: Method,
    pub budget: ErrorBudget,
}

/// Either simulated object the pairings accept.
#[derive(Clone, Copy)]
pub enum FieldRef<'a> {
    Path(&'a PathSkeleton1D),
    Sheet(&'a SheetSkeleton),
}

impl<'a> FieldRef<'a> {
    pub fn dim(&self) -> usize {
        match self {
            FieldRef::Path(_) => 1,
            FieldRef::Sheet(s) => s.dim,
        }
    }
    pub fn horizon(&self) -> f64 {
        match self {
            FieldRef::Path(p) => p.horizon,
            FieldRef::Sheet(s) => s.horizon,
        }
    }
    pub fn grid_dt(&self) -> f64 {
        match self {
            FieldRef::Path(p) => p.grid_dt,
            FieldRef::Sheet(s) => s.grid_dt,
        }
    }
    pub fn gamma(&self) -> f64 {
        match self {
            FieldRef::Path(p) => p.triplet.gamma,
            FieldRef::Sheet(s) => s.triplet.gamma,
        }
    }
    pub fn nu(&self) -> &LevyMeasure {
        match self {
            FieldRef::Path(p) => &p.triplet.nu,
            FieldRef::Sheet(s) => &s.triplet.nu,
        }
    }
    pub fn has_brownian(&self) -> bool {
        match self {
            FieldRef::Path(p) => !p.brownian.is_empty(),
            FieldRef::Sheet(s) => !s.brownian.is_empty(),
        }
    }
    pub fn neglected_variance(&self) -> f64 {
        match self {
            FieldRef::Path(p) => p.small.neglected_variance,
            FieldRef::Sheet(s) => s.neglected_variance,
        }
    }

    fn cells_per_axis(&self) -> usize {
        match self {
            FieldRef::Path(p) => {
                if p.brownian.is_empty() {
                    0
                } else {
                    p.brownian.len() - 1
                }
            }
            FieldRef::Sheet(s) => {
                if s.brownian.is_empty() {
                    0
                } else {
                    s.cells_per_axis
                }
            }
        }
    }

    /// Visit every Brownian grid cell with `[W(lower corner), Δ_x, Δ_y, Δ_xy]`
    /// (for d = 1: `[W_j, ΔW_j, 0, 0]`).
    fn for_each_brownian_cell<F: FnMut(usize, [f64; 4])>(&self, mut f: F) {
        match self {
            FieldRef::Path(p) => {
                for j in 0..p.brownian.len().saturating_sub(1) {
                    f(j, [p.brownian[j], p.brownian[j + 1] - p.brownian[j], 0.0, 0.0]);
                }
            }
            FieldRef::Sheet(s) => {
                if s.brownian.is_empty() {
                    return;
                }
                match s.dim {
                    1 => {
                        for j in 0..s.cells_per_axis {
                            f(j, [s.brownian[j], s.brownian[j + 1] - s.brownian[j], 0.0, 0.0]);
                        }
                    }
                    2 => {
                        let m = s.cells_per_axis + 1;
                        for j in 0..s.cells_per_axis {
                            for i in 0..s.cells_per_axis {
                                let w00 = s.brownian[j * m + i];
                                let w10 = s.brownian[j * m + i + 1];
                                let w01 = s.brownian[(j + 1) * m + i];
                                let w11 = s.brownian[(j + 1) * m + i + 1];
                                f(
                                    j * s.cells_per_axis + i,
                                    [w00, w10 - w00, w01 - w00, w11 - w10 - w01 + w00],
                                );
                            }
                        }
                    }
                    d => unimplemented!("Brownian pairing tables support d ≤ 2, got {d}"),
                }
            }
        }
    }

    /// Visit large jumps as `(position, size)`.
    fn for_each_jump<F: FnMut(&[f64], f64)>(&self, mut f: F) {
        match self {
            FieldRef::Path(p) => {
                for j in &p.jumps {
                    f(&[j.time], j.size);
                }
            }
            FieldRef::Sheet(s) => {
                for j in &s.jumps {
                    f(&j.pos, j.size);
                }
            }
        }
    }

    /// Visit small-jump bands as `(mean_rate, events)`.
    fn for_each_band<F: FnMut(f64, &mut dyn FnMut(&mut dyn FnMut(&[f64], f64)))>(
        &self,
        mut f: F,
    ) {
        match self {
            FieldRef::Path(p) => {
                for b in &p.small.bands {
                    f(b.mean_rate, &mut |visit| {
                        for &(t, x) in &b.events {
                            visit(&[t], x);
                        }
                    });
                }
            }
            FieldRef::Sheet(s) => {
                for b in &s.small_bands {
                    f(b.mean_rate, &mut |visit| {
                        for (p_, x) in &b.events {
                            visit(p_, *x);
                        }
                    });
                }
            }
        }
    }
}

/// The grid a [`Pairer`] was built for; pairings check compatibility.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldGrid {
    pub dim: usize,
    pub horizon: f64,
    pub cells_per_axis: usize,
}

impl FieldGrid {
    pub fn of(field: &FieldRef) -> Self {
        FieldGrid {
            dim: field.dim(),
            horizon: field.horizon(),
            cells_per_axis: field.cells_per_axis(),
        }
    }
    fn dt(&self) -> f64 {
        self.horizon / self.cells_per_axis.max(1) as f64
    }
}

/// Tables for one integrand on one grid: per-cell moments for exact
/// integration of the multilinear Brownian interpolant against the integrand,
/// lower-corner values for left-point Itô sums, and per-cell gradient bounds
/// for the deterministic route-difference budget.
struct CellTables {
    /// `∫_cell g`.
    m00: Vec<f64>,
    /// `∫_cell (x - x_cell) g`.
    m10: Vec<f64>,
    /// `∫_cell (y - y_cell) g` (d = 2 only).
    m01: Vec<f64>,
    /// `∫_cell (x - x_cell)(y - y_cell) g` (d = 2 only).
    m11: Vec<f64>,
    /// `g(lower corner)`.
    corners: Vec<f64>,
    /// `(dt/2)·Σ_axes sup_cell |∂g|`.
    grad_bound: Vec<f64>,
    /// accumulated Richardson estimates of the cell-rule error.
    rule_error: f64,
}

fn build_cell_tables_1d(g: &TestFunction, grid: &FieldGrid) -> CellTables {
    let n = grid.cells_per_axis;
    let dt = grid.dt();
    let mut m00 = Vec::with_capacity(n);
    let mut m10 = Vec::with_capacity(n);
    let mut corners = Vec::with_capacity(n);
    let mut grad = Vec::with_capacity(n);
    let mut rule_error = 0.0;
    // Lipschitz slack for sup_cell |g'| from endpoint values
    let d2_sup = g.cert(&[0], &[2]);
    for j in 0..n {
        let a = j as f64 * dt;
        let b = a + dt;
        let f0 = |t: f64| g.eval(&[t]);
        let whole = quad::gl4(&f0, a, b);
        let halves = quad::gl4(&f0, a, 0.5 * (a + b)) + quad::gl4(&f0, 0.5 * (a + b), b);
        rule_error += 2.0 * (whole - halves).abs();
        m00.push(halves);
        m10.push(quad::gl4(&|t: f64| (t - a) * g.eval(&[t]), a, b));
        corners.push(g.eval(&[a]));
        let d_a = g.eval_deriv(&[1], &[a]).abs();
        let d_b = g.eval_deriv(&[1], &[b]).abs();
        grad.push(0.5 * dt * (d_a.max(d_b) + 0.5 * dt * d2_sup));
    }
    CellTables {
        m00,
        m10,
        m01: Vec::new(),
        m11: Vec::new(),
        corners,
        grad_bound: grad,
        rule_error,
    }
}

fn build_cell_tables_2d(g: &TestFunction, grid: &FieldGrid) -> CellTables {
    let n = grid.cells_per_axis;
    let dt = grid.dt();
    let total = n * n;
    let mut m00 = Vec::with_capacity(total);
    let mut m10 = Vec::with_capacity(total);
    let mut m01 = Vec::with_capacity(total);
    let mut m11 = Vec::with_capacity(total);
    let mut corners = Vec::with_capacity(total);
    let mut grad = Vec::with_capacity(total);
    let mut rule_error = 0.0;
    let d2 = g.cert(&[0, 0], &[2, 0]) + g.cert(&[0, 0], &[1, 1]) + g.cert(&[0, 0], &[0, 2]);
    for j in 0..n {
        let ay = j as f64 * dt;
        let by = ay + dt;
        for i in 0..n {
            let ax = i as f64 * dt;
            let bx = ax + dt;
            let f0 = |x: f64, y: f64| g.eval(&[x, y]);
            let whole = quad::gl4_2d(&f0, ax, bx, ay, by);
            let mx = 0.5 * (ax + bx);
            let my = 0.5 * (ay + by);
            let refined = quad::gl4_2d(&f0, ax, mx, ay, my)
                + quad::gl4_2d(&f0, mx, bx, ay, my)
                + quad::gl4_2d(&f0, ax, mx, my, by)
                + quad::gl4_2d(&f0, mx, bx, my, by);
            rule_error += 4.0 * (whole - refined).abs();
            m00.push(refined);
            m10.push(quad::gl4_2d(&|x, y| (x - ax) * g.eval(&[x, y]), ax, bx, ay, by));
            m01.push(quad::gl4_2d(&|x, y| (y - ay) * g.eval(&[x, y]), ax, bx, ay, by));
            m11.push(quad::gl4_2d(
                &|x, y| (x - ax) * (y - ay) * g.eval(&[x, y]),
                ax,
                bx,
                ay,
                by,
            ));
            corners.push(g.eval(&[ax, ay]));
            let mut gsum = 0.0;
            for beta in [[1usize, 0], [0, 1]] {
                let c: f64 = [[ax, ay], [bx, ay], [ax, by], [bx, by]]
                    .iter()
                    .map(|p| g.eval_deriv(&beta, p).abs())
                    .fold(0.0, f64::max);
                gsum += c;
            }
            grad.push(0.5 * dt * (gsum + dt * d2));
        }
    }
    CellTables {
        m00,
        m10,
        m01,
        m11,
        corners,
        grad_bound: grad,
        rule_error,
    }
}

/// `∫_{ℝ₊^d} w(t) g(t) dt` with `w = Π t_i` (when `weight_volume`) or `w = 1`,
/// factorized across axes for the tensor-lincomb representation.
fn positive_orthant_integral(g: &TestFunction, weight_volume: bool, horizon: f64) -> Result<f64> {
    if g.scan_box().is_none() {
        return Err(CoreError::Precondition(
            "pairing requires a decay certificate (finite live window)".into(),
        ));
    }
    let mut total = 0.0;
    for (c, factors) in g.terms() {
        let mut prod = *c;
        for f in factors {
            if prod == 0.0 {
                break;
            }
            let w = f.scan_window().ok_or_else(|| {
                CoreError::Precondition("factor without a finite live window".into())
            })?;
            let lo = w.lo.max(0.0);
            let hi = w.hi.min(horizon);
            if lo >= hi {
                prod = 0.0;
                break;
            }
            prod *= quad::adaptive(
                &|t: f64| {
                    let wt = if weight_volume { t } else { 1.0 };
                    wt * f.eval(0, t)
                },
                lo,
                hi,
                QUAD_TOL,
            );
        }
        total += prod;
    }
    Ok(total)
}

/// Precomputed pairing machinery for one test function on one grid. Build it
/// once per `(φ, grid)` and reuse it across a seed ensemble.
pub struct Pairer {
    phi: TestFunction,
    phi_tail: TestFunction,    // Φ(t) = ∫_{[t,∞)} φ
    psi_tail: Option<TestFunction>,
    grid: FieldGrid,
    /// `A₁ = ∫ φ` over the positive orthant.
    integral_phi: f64,
    /// `∫ φ²` (for the small-jump remainder scale).
    integral_phi_sq: f64,
    /// `∫ Leb([0,t]) φ(t) dt` — drift and compensator weight.
    drift_weight_phi: f64,
    /// Same for ψ (independent quadrature route for the noise pairing).
    drift_weight_psi: Option<f64>,
    phi_cells: Option<CellTables>,
    psi_cells: Option<CellTables>,
}

impl Pairer {
    /// `with_noise` additionally prepares `φ^{(1_d)}` tables (for `pair_noise`
    /// and `stochastic_integral` cross-checks); `with_brownian` prepares the
    /// per-cell tables (needed whenever the field has a Brownian part).
    pub fn new(
        phi: &TestFunction,
        grid: FieldGrid,
        with_noise: bool,
        with_brownian: bool,
    ) -> Result<Self> {
        let dim = phi.dim();
        if dim != grid.dim {
            return Err(CoreError::Precondition(format!(
                "test function dimension {dim} ≠ field dimension {}",
                grid.dim
            )));
        }
        let box_ = phi.scan_box().ok_or_else(|| {
            CoreError::Precondition(
                "pairing requires a decay certificate (finite live window)".into(),
            )
        })?;
        for iv in &box_ {
            if iv.hi > grid.horizon + 1e-9 {
                return Err(CoreError::Precondition(format!(
                    "field horizon {} does not cover the live support (up to {})",
                    grid.horizon, iv.hi
                )));
            }
        }
        let psi = if with_noise {
            let max_order = phi
                .terms()
                .iter()
                .flat_map(|(_, fs)| fs.iter().map(|f| f.max_order()))
                .min()
                .unwrap_or(0);
            if max_order < 1 {
                return Err(CoreError::Precondition(
                    "noise pairing needs the mixed derivative φ^{(1_d)}".into(),
                ));
            }
            Some(phi.mixed_derivative())
        } else {
            None
        };
        let phi_tail = phi.tail_integral();
        let psi_tail = psi.as_ref().map(|p| p.tail_integral());
        let integral_phi = positive_orthant_integral(phi, false, grid.horizon)?;
        let integral_phi_sq = phi.squared_integral();
        let drift_weight_phi = positive_orthant_integral(phi, true, grid.horizon)?;
        let drift_weight_psi = match &psi {
            Some(p) => Some(positive_orthant_integral(p, true, grid.horizon)?),
            None => None,
        };
        let build = |g: &TestFunction| -> CellTables {
            match dim {
                1 => build_cell_tables_1d(g, &grid),
                2 => build_cell_tables_2d(g, &grid),
                _ => unreachable!(),
            }
        };
        let (phi_cells, psi_cells) = if with_brownian && grid.cells_per_axis > 0 {
            if dim > 2 {
                return Err(CoreError::Unsupported(
                    "Brownian pairing tables support d ≤ 2".into(),
                ));
            }
            (
                Some(build(phi)),
                psi.as_ref().map(build),
            )
        } else {
            (None, None)
        };
        Ok(Pairer {
            phi: phi.clone(),

            phi_tail,
            psi_tail,
            grid,
            integral_phi,
            integral_phi_sq,
            drift_weight_phi,
            drift_weight_psi,
            phi_cells,
            psi_cells,
        })
    }

    pub fn integral_phi(&self) -> f64 {
        self.integral_phi
    }

    fn check_grid(&self, field: &FieldRef) -> Result<()> {
        let g = FieldGrid::of(field);
        if g.dim != self.grid.dim || (g.horizon - self.grid.horizon).abs() > 1e-12 {
            return Err(CoreError::Precondition(
                "field does not match the grid this pairer was built for".into(),
            ));
        }
        if field.has_brownian() {
            if g.cells_per_axis != self.grid.cells_per_axis {
                return Err(CoreError::Precondition(
                    "Brownian grid resolution mismatch".into(),
                ));
            }
            if self.phi_cells.is_none() {
                return Err(CoreError::Precondition(
                    "pairer built without Brownian tables".into(),
                ));
            }
        }
        Ok(())
    }

    fn neglected_budget(&self, field: &FieldRef) -> f64 {
        (field.neglected_variance() * self.integral_phi_sq).sqrt()
    }

    /// Shared quadrature-route pairing of the field against integrand `g`
    /// (either φ or ψ), with precomputed tables. The Brownian part integrates
    /// the multilinear grid interpolant against `g` exactly via the per-cell
    /// moment tables; the reported Brownian budget bounds the difference to
    /// the left-point grid stochastic integral built from the same increments.
    fn pair_against(
        &self,
        field: &FieldRef,
        g_tail: &TestFunction,
        drift_weight: f64,
        cells: Option<&CellTables>,
    ) -> PairingResult {
        let mut quad_budget = 2.0 * QUAD_TOL;
        // drift part: γ ∫ Leb([0,t]) g(t) dt
        let mut value = field.gamma() * drift_weight;

        // large jumps: Σ Y_i Φ_g(τ_i), exact up to table allowances
        let mut n_events = 0usize;
        field.for_each_jump(|pos, size| {
            value += size * g_tail.eval(pos);
            n_events += 1;
        });

        // small-jump bands: Σ x Φ_g(τ) - mean_rate · ∫ Leb([0,t]) g(t) dt
        field.for_each_band(|mean_rate, events| {
            value -= mean_rate * drift_weight;
            quad_budget += QUAD_TOL;
            events(&mut |pos, x| {
                value += x * g_tail.eval(pos);
                n_events += 1;
            });
        });
        quad_budget += n_events as f64 * TABLE_EPS;

        // Brownian part: ∫ Ŵ(t) g(t) dt per cell,
        // Ŵ = w00 + Δx u + Δy v + Δxy uv with u = (x - x₀)/dt, v = (y - y₀)/dt
        let mut brownian_grid = 0.0;
        if field.has_brownian() {
            let t = cells.expect("checked by check_grid");
            let phi_t = self.phi_cells.as_ref().expect("checked by check_grid");
            let dt = self.grid.dt();
            let mut acc = 0.0;
            let mut bud = 0.0;
            let two_d = self.grid.dim == 2;
            field.for_each_brownian_cell(|idx, [w00, dx, dy, dxy]| {
                let mut v = w00 * t.m00[idx] + dx * t.m10[idx] / dt;
                if two_d {
                    v += dy * t.m01[idx] / dt + dxy * t.m11[idx] / (dt * dt);
                }
                acc += v;
                // bound on |Σ Δ_cell (mean_cell φ - φ(corner))|
                let inc = if two_d { dxy } else { dx };
                bud += inc.abs() * phi_t.grad_bound[idx];
            });
            value += acc;
            brownian_grid = bud;
            quad_budget += t.rule_error;
        }

        // a drift-free pure-jump pairing is an exact (finite) jump sum
        let pure_jump_sum =
            field.gamma() == 0.0 && !field.has_brownian() && n_events > 0 && {
                let mut no_bands = true;
                field.for_each_band(|_, _| no_bands = false);
                no_bands
            };
        PairingResult {
            value,
            method: if pure_jump_sum {
                Method::ExactJumpSum
            } else {
                Method::Quadrature
            },
            budget: ErrorBudget {
                quadrature: quad_budget,
                brownian_grid,
                neglected_small_jump: self.neglected_budget(field),
            },
        }
    }

    /// `⟨X, φ⟩ = ∫_{ℝ₊^d} X_t φ(t) dt`.
    pub fn pair_field(&self, field: &FieldRef) -> Result<PairingResult> {
        self.check_grid(field)?;
        Ok(self.pair_against(
            field,
            &self.phi_tail,
            self.drift_weight_phi,
            self.phi_cells.as_ref(),
        ))
    }

    /// `⟨Ẋ, φ⟩ = (-1)^d ⟨X, φ^{(1_d)}⟩`.
    pub fn pair_noise(&self, field: &FieldRef) -> Result<PairingResult> {
        self.check_grid(field)?;
        let psi_tail = self.psi_tail.as_ref().ok_or_else(|| {
            CoreError::Precondition("pairer built without noise tables".into())
        })?;
        let dw = self.drift_weight_psi.expect("psi tables imply drift weight");
        let mut res = self.pair_against(field, psi_tail, dw, self.psi_cells.as_ref());
        let sign = if self.grid.dim % 2 == 0 { 1.0 } else { -1.0 };
        res.value *= sign;
        Ok(res)
    }

    /// `∫ φ dX = γA₁(φ) + σA₂(φ) + A₃(φ) + A₄(φ)`.
    ///
    /// For unbounded-support `φ` the triplet must have a positive absolute
    /// moment; otherwise the white noise is almost surely *not* tempered and
    /// the pairing has no law-level meaning on Schwartz functions.
    pub fn stochastic_integral(&self, field: &FieldRef) -> Result<PairingResult> {
        self.check_grid(field)?;
        if !self.phi.is_compact() {
            let nu = field.nu();
            if nu.large_jump_mass() > 0.0 {
                let verdict = nu.classify_pam(&[1.0, 0.5, 0.25, 0.1, 0.05])?;
                if verdict.has_pam() != Some(true) {
                    return Err(CoreError::Precondition(
                        "stochastic integral against an unbounded-support test function \
                         requires a positive absolute moment: without PAM the Lévy white \
                         noise is almost surely not a tempered distribution"
                            .into(),
                    ));
                }
            }
        }
        let mut quad_budget = QUAD_TOL;
        // A₁
        let mut value = field.gamma() * self.integral_phi;
        // A₂: left-point Wiener sum against the cell increments
        if field.has_brownian() {
            let t = self.phi_cells.as_ref().expect("checked by check_grid");
            let two_d = self.grid.dim == 2;
            let mut acc = 0.0;
            field.for_each_brownian_cell(|idx, [_, dx, _, dxy]| {
                let inc = if two_d { dxy } else { dx };
                acc += inc * t.corners[idx];
            });
            value += acc;
        }
        // A₃: exact jump sum
        let mut n_events = 0usize;
        field.for_each_jump(|pos, size| {
            value += size * self.phi.eval(pos);
            n_events += 1;
        });
        // A₄: banded compensated sums
        field.for_each_band(|mean_rate, events| {
            value -= mean_rate * self.integral_phi;
            quad_budget += QUAD_TOL;
            events(&mut |pos, x| {
                value += x * self.phi.eval(pos);
                n_events += 1;
            });
        });
        let _ = n_events;

        Ok(PairingResult {
            value,
            method: Method::StochasticIntegral,
            budget: ErrorBudget {
                quadrature: quad_budget,
                brownian_grid: 0.0,
                neglected_small_jump: self.neglected_budget(field),
            },
        })
    }

    /// Consistency report `⟨Ẋ,φ⟩ = ∫ φ dX` for compactly supported `φ`.
    pub fn fubini_consistency(&self, field: &FieldRef) -> Result<FubiniReport> {
        if !self.phi.is_compact() {
            return Err(CoreError::Precondition(
                "consistency check requires compactly supported φ".into(),
            ));
        }
        let noise = self.pair_noise(field)?;
        let ito = self.stochastic_integral(field)?;
        // the two routes share jump events and grid increments; small-jump and
        // truncation terms cancel exactly, so the difference budget is the
        // quadrature allowances plus the deterministic Brownian cell bound
        let budget = noise.budget.quadrature + ito.budget.quadrature + noise.budget.brownian_grid;
        Ok(FubiniReport {
            noise_value: noise.value,
            integral_value: ito.value,
            difference: (noise.value - ito.value).abs(),
            budget,
            within_budget: (noise.value - ito.value).abs() <= budget,
            noise_budget: noise.budget,
            integral_budget: ito.budget,
        })
    }
}

/// Result of a two-route consistency check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FubiniReport {
    pub noise_value: f64,
    pub integral_value: f64,
    pub difference: f64,
    /// Bound on the route difference (quadrature + Brownian cell terms).
    pub budget: f64,
    pub within_budget: bool,
    pub noise_budget: ErrorBudget,
    pub integral_budget: ErrorBudget,
}

/// One-shot convenience wrappers (build a [`Pairer`] per call).
pub fn pair_field(field: &FieldRef, phi: &TestFunction) -> Result<PairingResult> {
    Pairer::new(phi, FieldGrid::of(field), false, field.has_brownian())?.pair_field(field)
}

pub fn pair_noise(field: &FieldRef, phi: &TestFunction) -> Result<PairingResult> {
    Pairer::new(phi, FieldGrid::of(field), true, field.has_brownian())?.pair_noise(field)
}

pub fn stochastic_integral(field: &FieldRef, phi: &TestFunction) -> Result<PairingResult> {
    Pairer::new(phi, FieldGrid::of(field), false, field.has_brownian())?.stochastic_integral(field)
}

pub fn fubini_consistency(field: &FieldRef, phi: &TestFunction) -> Result<FubiniReport> {
    Pairer::new(phi, FieldGrid::of(field), true, field.has_brownian())?.fubini_consistency(field)
}
