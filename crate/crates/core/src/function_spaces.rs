//! Homogeneous semi-norms on the free surface, compatibility conditions at
//! the contact points, and the reflection/Poisson extension constructions.
//!
//! Functions on a free-surface component are held as samples on an ascending
//! grid. Semi-norms of fractional order use the Gagliardo double integral;
//! integer and higher orders reduce to derivatives. Compatibility at a
//! contact point means the odd one-sided derivatives vanish there; the
//! non-compatible part is spanned by the odd bump functions and can be split
//! off exactly.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpacesError {
    #[error("semi-norm order {0} is not supported (need r >= 0)")]
    UnsupportedOrder(f64),
    #[error("not enough samples: {0}")]
    InsufficientResolution(String),
    #[error("periodic Neumann data must have zero mean (got {0:.3e})")]
    NonzeroMeanFlux(f64),
    #[error("operation requires a uniform sample grid")]
    NonUniformGrid,
}

/// Samples of a function on a single interval, ascending non-degenerate grid.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl BoundaryFunction {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> BoundaryFunction {
        assert_eq!(xs.len(), values.len());
        assert!(xs.len() >= 2, "need at least two samples");
        assert!(xs.windows(2).all(|w| w[1] > w[0]), "grid must be ascending");
        BoundaryFunction { xs, values }
    }

    pub fn from_fn(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> BoundaryFunction {
        let values = xs.iter().map(|&x| f(x)).collect();
        BoundaryFunction::new(xs, values)
    }

    pub fn uniform(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> BoundaryFunction {
        let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        BoundaryFunction::from_fn(xs, f)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Trapezoidal quadrature weights of the grid.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.len();
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        w
    }

    pub fn mean(&self) -> f64 {
        let w = self.weights();
        let total: f64 = w.iter().sum();
        self.values.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / total
    }

    /// First derivative on the same grid: three-point stencils, one-sided at
    /// the ends.
    pub fn derivative(&self) -> BoundaryFunction {
        let n = self.len();
        let mut dv = vec![0.0; n];
        for i in 0..n {
            let idx: [usize; 3] = if i == 0 {
                [0, 1, 2.min(n - 1)]
            } else if i == n - 1 {
                [n - 3, n - 2, n - 1]
            } else {
                [i - 1, i, i + 1]
            };
            let offsets: Vec<f64> = idx.iter().map(|&j| self.xs[j] - self.xs[i]).collect();
            let w = fd_weights(&offsets, 1);
            dv[i] = idx.iter().zip(&w).map(|(&j, &w)| w * self.values[j]).sum();
        }
        BoundaryFunction { xs: self.xs.clone(), values: dv }
    }

    fn l2_norm(&self) -> f64 {
        let w = self.weights();
        self.values
            .iter()
            .zip(&w)
            .map(|(v, w)| v * v * w)
            .sum::<f64>()
            .sqrt()
    }
}

/// Finite-difference weights for the given derivative order on arbitrary
/// offsets (exact on polynomials up to degree `offsets.len() - 1`).
pub fn fd_weights(offsets: &[f64], order: usize) -> Vec<f64> {
    let m = offsets.len();
    assert!(order < m, "stencil too short for derivative order");
    let scale = offsets.iter().fold(0.0f64, |s, t| s.max(t.abs())).max(1e-300);
    let mut v = DMatrix::zeros(m, m);
    for p in 0..m {
        for (i, &t) in offsets.iter().enumerate() {
            v[(p, i)] = (t / scale).powi(p as i32);
        }
    }
    let mut rhs = DVector::zeros(m);
    rhs[order] = (1..=order).map(|k| k as f64).product::<f64>();
    let w = v.lu().solve(&rhs).expect("degenerate finite-difference stencil");
    w.iter().map(|&wi| wi / scale.powi(order as i32)).collect()
}

/// Gagliardo double integral on the sample grid (diagonal excluded),
/// returning the squared semi-norm of order `r` in [0, 1).
fn gagliardo_sq(f: &BoundaryFunction, r: f64) -> f64 {
    let w = f.weights();
    let n = f.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = f.xs[i] - f.xs[j];
            let df = f.values[i] - f.values[j];
            acc += w[i] * w[j] * df * df / dx.abs().powf(2.0 * r + 1.0);
        }
    }
    acc
}

/// Homogeneous semi-norm of order `r >= 0` on an interval: Gagliardo double
/// integral for the fractional part, derivative reduction above one.
pub fn seminorm_interval(f: &BoundaryFunction, r: f64) -> Result<f64, SpacesError> {
    if !(r >= 0.0) {
        return Err(SpacesError::UnsupportedOrder(r));
    }
    if r < 1.0 {
        return Ok(gagliardo_sq(f, r).sqrt());
    }
    // r = k + sigma: L2 norms of derivatives 1..k, plus the Gagliardo
    // remainder of the k-th derivative when sigma > 0
    let rounded = r.round();
    let (k, sigma) = if (r - rounded).abs() < 1e-12 {
        (rounded as usize, 0.0)
    } else {
        (r.floor() as usize, r - r.floor())
    };
    let mut acc = 0.0;
    let mut d = f.clone();
    for _ in 0..k {
        d = d.derivative();
        let l2 = d.l2_norm();
        acc += l2 * l2;
    }
    if sigma > 0.0 {
        acc += gagliardo_sq(&d, sigma);
    }
    Ok(acc.sqrt())
}

/// Function on both free-surface components.
#[derive(Debug, Clone)]
pub struct GammaDFunction {
    pub minus: BoundaryFunction,
    pub plus: BoundaryFunction,
}

/// Contact-point bookkeeping: position, orientation sign (+1 at the left
/// extremity of a component), component index and whether the corner is the
/// left end of its component.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Corner {
    pub x: f64,
    pub sigma: f64,
    pub component: usize,
    pub left_end: bool,
}

impl GammaDFunction {
    pub fn new(minus: BoundaryFunction, plus: BoundaryFunction) -> GammaDFunction {
        GammaDFunction { minus, plus }
    }

    pub fn component(&self, k: usize) -> &BoundaryFunction {
        if k == 0 {
            &self.minus
        } else {
            &self.plus
        }
    }

    pub fn corners(&self) -> [Corner; 4] {
        let (al, bl) = self.minus.interval();
        let (ar, br) = self.plus.interval();
        [
            Corner { x: al, sigma: 1.0, component: 0, left_end: true },
            Corner { x: bl, sigma: -1.0, component: 0, left_end: false },
            Corner { x: ar, sigma: 1.0, component: 1, left_end: true },
            Corner { x: br, sigma: -1.0, component: 1, left_end: false },
        ]
    }

    pub fn min_component_length(&self) -> f64 {
        let (al, bl) = self.minus.interval();
        let (ar, br) = self.plus.interval();
        (bl - al).min(br - ar)
    }
}

/// Semi-norm on the two-component surface: component semi-norms of order
/// `s + 1/2` plus the mean-difference coupling.
pub fn seminorm_gamma_d(f: &GammaDFunction, s: f64) -> Result<f64, SpacesError> {
    let a = seminorm_interval(&f.minus, s + 0.5)?;
    let b = seminorm_interval(&f.plus, s + 0.5)?;
    Ok(a + b + (f.plus.mean() - f.minus.mean()).abs())
}

/// One-sided derivative estimate at a component end, exact on polynomials of
/// degree at most `exactness`. Returns the estimate and a cancellation scale.
fn one_sided_derivative(
    f: &BoundaryFunction,
    left_end: bool,
    order: usize,
    exactness: usize,
) -> Result<(f64, f64), SpacesError> {
    let m = exactness + 1;
    if f.len() < m {
        return Err(SpacesError::InsufficientResolution(format!(
            "{} samples, stencil needs {}",
            f.len(),
            m
        )));
    }
    let idx: Vec<usize> = if left_end {
        (0..m).collect()
    } else {
        (f.len() - m..f.len()).collect()
    };
    let x0 = if left_end { f.xs[0] } else { *f.xs.last().unwrap() };
    let offsets: Vec<f64> = idx.iter().map(|&j| f.xs[j] - x0).collect();
    let w = fd_weights(&offsets, order);
    let est: f64 = idx.iter().zip(&w).map(|(&j, &wi)| wi * f.values[j]).sum();
    let scale: f64 = idx.iter().zip(&w).map(|(&j, &wi)| (wi * f.values[j]).abs()).sum();
    Ok((est, scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Finite,
    Divergent,
    Inconclusive,
}

/// Weighted integrability indicator near a corner: partial sums of
/// `|x - c|^-1 |d^s f - alpha|^2` over shrinking exclusion radii; finite
/// means the sums stabilize, divergent means they keep growing.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedIndicator {
    pub partial_sums: [f64; 3],
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderTrace {
    /// Odd order `2l + 1`.
    pub order: usize,
    /// One-sided derivative estimate at the corner.
    pub alpha: f64,
    /// Whether alpha vanishes within stencil resolution.
    pub vanishes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerReport {
    pub x: f64,
    pub sigma: f64,
    pub traces: Vec<OrderTrace>,
    pub weighted: Option<WeightedIndicator>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub order: f64,
    pub corners: Vec<CornerReport>,
    /// All odd derivatives of order < s vanish and, at odd integer s, the
    /// weighted indicator with alpha = 0 is not divergent.
    pub compatible: bool,
    /// Membership in the trace space: at odd integer s the weighted
    /// indicator with the measured alpha must not diverge.
    pub in_trace_space: bool,
}

const ALPHA_REL_TOL: f64 = 1e-6;

/// Odd orders `2l + 1 <= s`.
fn odd_orders_upto(s: f64) -> Vec<usize> {
    let mut orders = Vec::new();
    let mut o = 1usize;
    while (o as f64) <= s + 1e-12 {
        orders.push(o);
        o += 2;
    }
    orders
}

fn weighted_indicator(
    f: &BoundaryFunction,
    corner_x: f64,
    left_end: bool,
    s: usize,
    alpha: f64,
) -> WeightedIndicator {
    let mut d = f.clone();
    for _ in 0..s {
        d = d.derivative();
    }
    let (a, b) = f.interval();
    let window = 0.25 * (b - a);
    let r0 = window / 8.0;
    let radii = [r0, r0 / 2.0, r0 / 4.0];
    let w = d.weights();
    let mut sums = [0.0f64; 3];
    for (k, &rk) in radii.iter().enumerate() {
        let mut acc = 0.0;
        for i in 0..d.len() {
            let dist = (d.xs[i] - corner_x).abs();
            let in_window = if left_end {
                d.xs[i] - corner_x <= window
            } else {
                corner_x - d.xs[i] <= window
            };
            if dist >= rk && in_window {
                let dev = d.values[i] - alpha;
                acc += w[i] * dev * dev / dist;
            }
        }
        sums[k] = acc;
    }
    let inc1 = (sums[1] - sums[0]).max(0.0);
    let inc2 = (sums[2] - sums[1]).max(0.0);
    let scale = sums[2].max(1e-300);
    let verdict = if inc2 <= 0.6 * inc1 + 1e-9 * scale {
        Verdict::Finite
    } else if inc2 >= 0.85 * inc1 && inc2 > 1e-6 * scale {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    };
    WeightedIndicator { partial_sums: sums, verdict }
}

/// Estimate the odd-derivative traces at each corner and the weighted
/// integrability indicator where the order is an odd integer.
pub fn compatibility_check(f: &GammaDFunction, s: f64) -> Result<CompatibilityReport, SpacesError> {
    if !(s >= 0.0) {
        return Err(SpacesError::UnsupportedOrder(s));
    }
    let orders = odd_orders_upto(s);
    let max_order = orders.last().cloned().unwrap_or(1);
    let exactness = max_order + 1;
    let s_is_odd_integer = (s - s.round()).abs() < 1e-12 && (s.round() as i64) % 2 == 1;

    let mut corners = Vec::new();
    let mut compatible = true;
    let mut in_trace_space = true;
    for c in f.corners() {
        let comp = f.component(c.component);
        let mut traces = Vec::new();
        for &o in &orders {
            let (alpha, scale) = one_sided_derivative(comp, c.left_end, o, exactness)?;
            let vanishes = alpha.abs() <= ALPHA_REL_TOL * scale.max(1e-300);
            if (o as f64) < s - 1e-12 && !vanishes {
                compatible = false;
            }
            traces.push(OrderTrace { order: o, alpha, vanishes });
        }
        let weighted = if s_is_odd_integer {
            let so = s.round() as usize;
            let alpha = traces
                .iter()
                .find(|t| t.order == so)
                .map(|t| t.alpha)
                .unwrap_or(0.0);
            // compatibility demands the weighted control with alpha = 0, the
            // trace space allows the measured alpha
            let wi_cc = weighted_indicator(comp, c.x, c.left_end, so, 0.0);
            let wi_tr = weighted_indicator(comp, c.x, c.left_end, so, alpha);
            if wi_cc.verdict == Verdict::Divergent {
                compatible = false;
            }
            if wi_tr.verdict == Verdict::Divergent {
                in_trace_space = false;
            }
            Some(wi_tr)
        } else {
            None
        };
        corners.push(CornerReport { x: c.x, sigma: c.sigma, traces, weighted });
    }
    Ok(CompatibilityReport { order: s, corners, compatible, in_trace_space })
}

/// Smooth step: 0 for u <= 0, 1 for u >= 1.
fn smooth_step(u: f64) -> f64 {
    let g = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let (g0, g1) = (g(u), g(1.0 - u));
    g0 / (g0 + g1)
}

/// Even plateau bump: 1 on |x| <= L/4, 0 for |x| >= L/2, smooth in between.
pub fn chi_plateau(support: f64, x: f64) -> f64 {
    let half = 0.5 * support;
    let quarter = 0.25 * support;
    smooth_step((half - x.abs()) / quarter)
}

/// Odd bump generator `chi_[2l+1](x) = |x|^(2l+1) chi_0(x) / (2l+1)!`; its
/// only nonvanishing one-sided derivative at 0 has order `2l+1` and value
/// plus/minus one.
pub fn chi_bump(l: usize, support: f64, x: f64) -> f64 {
    let order = 2 * l + 1;
    let fact: f64 = (1..=order).map(|k| k as f64).product();
    x.abs().powi(order as i32) * chi_plateau(support, x) / fact
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceCoefficient {
    pub corner_x: f64,
    pub sigma: f64,
    pub order: usize,
    /// One-sided odd derivative at the corner; the subtracted bump carries
    /// the weight `sigma * alpha`.
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub compatible_part: GammaDFunction,
    pub coefficients: Vec<TraceCoefficient>,
    pub support: f64,
}

/// Split `f` into a part with vanishing odd corner derivatives (orders
/// `2l+1 <= s`) and the explicit bump combination carrying the traces.
pub fn decompose_cc(f: &GammaDFunction, s: f64) -> Result<Decomposition, SpacesError> {
    let orders = odd_orders_upto(s);
    let support = f.min_component_length();
    let max_order = orders.last().cloned().unwrap_or(1);
    let exactness = max_order + 1;

    let mut coefficients = Vec::new();
    let mut parts = [f.minus.clone(), f.plus.clone()];
    for c in f.corners() {
        let comp = f.component(c.component);
        for &o in &orders {
            let l = (o - 1) / 2;
            let (alpha, _) = one_sided_derivative(comp, c.left_end, o, exactness)?;
            coefficients.push(TraceCoefficient { corner_x: c.x, sigma: c.sigma, order: o, alpha });
            let part = &mut parts[c.component];
            for i in 0..part.len() {
                let x = part.xs[i];
                part.values[i] -= c.sigma * alpha * chi_bump(l, support, x - c.x);
            }
        }
    }
    let [minus, plus] = parts;
    Ok(Decomposition {
        compatible_part: GammaDFunction::new(minus, plus),
        coefficients,
        support,
    })
}

/// Uniform samples over one period.
#[derive(Debug, Clone)]
pub struct PeriodicFunction {
    pub start: f64,
    pub period: f64,
    pub values: Vec<f64>,
}

impl PeriodicFunction {
    pub fn xs(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|j| self.start + self.period * j as f64 / n as f64).collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// View as an interval function over one closed period.
    pub fn to_boundary_function(&self) -> BoundaryFunction {
        let mut xs = self.xs();
        xs.push(self.start + self.period);
        let mut values = self.values.clone();
        values.push(self.values[0]);
        BoundaryFunction::new(xs, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionEnd {
    Left,
    Right,
}

/// Even reflection across one endpoint followed by periodization: the
/// extension agrees with `f` on its interval, satisfies
/// `f_B(a - t) = f(a + t)` at the reflection end, and has period `2 L`.
pub fn boussinesq_extend(
    f: &BoundaryFunction,
    end: ReflectionEnd,
) -> Result<PeriodicFunction, SpacesError> {
    let n = f.len() - 1;
    let (a, b) = f.interval();
    let ll = b - a;
    let dx = ll / n as f64;
    for w in f.xs.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
            return Err(SpacesError::NonUniformGrid);
        }
    }
    let mut values = Vec::with_capacity(2 * n);
    match end {
        ReflectionEnd::Left => {
            // one period starting at a - L: f_N, .., f_1, f_0, f_1, .., f_{N-1}
            for j in 0..n {
                values.push(f.values[n - j]);
            }
            for j in 0..n {
                values.push(f.values[j]);
            }
            Ok(PeriodicFunction { start: a - ll, period: 2.0 * ll, values })
        }
        ReflectionEnd::Right => {
            // one period starting at a: f_0, .., f_N, f_{N-1}, .., f_1
            for j in 0..n {
                values.push(f.values[j]);
            }
            for j in 0..n {
                values.push(f.values[n - j]);
            }
            Ok(PeriodicFunction { start: a, period: 2.0 * ll, values })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExtensionKind {
    Dirichlet,
    Neumann,
}

/// Harmonic extension of periodic boundary data into the strip below z = 0,
/// represented by its trigonometric modes; exactly harmonic mode by mode.
#[derive(Debug, Clone)]
pub struct HarmonicStrip {
    start: f64,
    period: f64,
    depth: f64,
    cos_coeff: Vec<f64>,
    sin_coeff: Vec<f64>,
    kind: ExtensionKind,
}

impl HarmonicStrip {
    fn multiplier(&self, k: usize, z: f64) -> f64 {
        if k == 0 {
            return match self.kind {
                ExtensionKind::Dirichlet => 1.0,
                ExtensionKind::Neumann => 0.0,
            };
        }
        let om = 2.0 * std::f64::consts::PI * k as f64 / self.period;
        match self.kind {
            ExtensionKind::Dirichlet => (om * z).exp(),
            ExtensionKind::Neumann => {
                // sinh((z + H0) om) / (cosh(H0 om) om), evaluated stably
                let h0 = self.depth;
                let num = (om * z).exp() * (1.0 - (-2.0 * om * (z + h0)).exp());
                let den = 1.0 + (-2.0 * om * h0).exp();
                num / (den * om)
            }
        }
    }

    pub fn eval(&self, x: f64, z: f64) -> f64 {
        let xi = x - self.start;
        let om0 = 2.0 * std::f64::consts::PI / self.period;
        let mut acc = self.cos_coeff[0] * self.multiplier(0, z);
        for k in 1..self.cos_coeff.len() {
            let m = self.multiplier(k, z);
            let (s, c) = (om0 * k as f64 * xi).sin_cos();
            acc += m * (self.cos_coeff[k] * c + self.sin_coeff[k] * s);
        }
        acc
    }

    /// Vertical derivative, analytic in each mode.
    pub fn eval_dz(&self, x: f64, z: f64) -> f64 {
        let xi = x - self.start;
        let om0 = 2.0 * std::f64::consts::PI / self.period;
        let mut acc = 0.0;
        for k in 1..self.cos_coeff.len() {
            let om = om0 * k as f64;
            let dm = match self.kind {
                ExtensionKind::Dirichlet => om * (om * z).exp(),
                ExtensionKind::Neumann => {
                    let h0 = self.depth;
                    let num = (om * z).exp() * (1.0 + (-2.0 * om * (z + h0)).exp());
                    let den = 1.0 + (-2.0 * om * h0).exp();
                    num / den
                }
            };
            let (s, c) = (om * xi).sin_cos();
            acc += dm * (self.cos_coeff[k] * c + self.sin_coeff[k] * s);
        }
        acc
    }
}

fn trig_coefficients(f: &PeriodicFunction) -> (Vec<f64>, Vec<f64>) {
    let n = f.values.len();
    let kmax = n / 2;
    let mut cos_coeff = vec![0.0; kmax + 1];
    let mut sin_coeff = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        let mut a = 0.0;
        let mut b = 0.0;
        for (j, &v) in f.values.iter().enumerate() {
            let ang = 2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
            a += v * ang.cos();
            b += v * ang.sin();
        }
        let norm = if k == 0 || 2 * k == n { 1.0 / n as f64 } else { 2.0 / n as f64 };
        cos_coeff[k] = norm * a;
        sin_coeff[k] = norm * b;
    }
    (cos_coeff, sin_coeff)
}

/// Harmonic extension with Dirichlet data `fB` on z = 0, decaying downward;
/// the horizontal derivative vanishes on the reflection lines of even data.
pub fn poisson_extend_dirichlet(fb: &PeriodicFunction, depth: f64) -> HarmonicStrip {
    let (cos_coeff, sin_coeff) = trig_coefficients(fb);
    HarmonicStrip {
        start: fb.start,
        period: fb.period,
        depth,
        cos_coeff,
        sin_coeff,
        kind: ExtensionKind::Dirichlet,
    }
}

/// Harmonic extension with Neumann data `dz f = fB` on z = 0, vanishing on
/// the floor z = -depth; the data must have zero mean.
pub fn poisson_extend_neumann(
    fb: &PeriodicFunction,
    depth: f64,
) -> Result<HarmonicStrip, SpacesError> {
    let mean = fb.mean();
    let scale = fb.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if mean.abs() > 1e-10 * scale {
        return Err(SpacesError::NonzeroMeanFlux(mean));
    }
    let (mut cos_coeff, sin_coeff) = trig_coefficients(fb);
    cos_coeff[0] = 0.0;
    Ok(HarmonicStrip {
        start: fb.start,
        period: fb.period,
        depth,
        cos_coeff,
        sin_coeff,
        kind: ExtensionKind::Neumann,
    })
}
