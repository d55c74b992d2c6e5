//! Adaptive Gauss–Kronrod (G10K21) quadrature with breakpoints, graded
//! endpoint singularities and semi-infinite tails, plus Riemann–Stieltjes
//! integration against monotone curves with jumps.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Values the quadrature can accumulate: scalars and complex matrices.
pub trait QuadValue: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn axpy(&mut self, w: f64, x: &Self);
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;

    fn scaled(&self, w: f64) -> Self {
        let mut z = self.zero_like();
        z.axpy(w, self);
        z
    }
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        *self += w * x;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for CMatrix {
    fn zero_like(&self) -> Self {
        CMatrix::zeros(self.nrows(), self.ncols())
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        *self += x * Complex64::from(w);
    }
    fn norm(&self) -> f64 {
        CMatrix::norm(self)
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Known behavior of the integrand at an interval end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Regular,
    /// `f ~ h(s) s^β` with `s` the distance to the end, `β > −1`.
    Power(f64),
    /// `f ~ h(s) ln s`.
    Log,
    /// Power law with exponent fitted from samples.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadWarning {
    ToleranceNotMet,
    /// Fitted tail decay is not integrable or did not settle.
    SlowDecay,
}

#[derive(Debug, Clone)]
pub struct IntegralResult<V> {
    pub value: V,
    pub err_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
    pub warnings: Vec<QuadWarning>,
}

impl<V: QuadValue> IntegralResult<V> {
    fn warn(&mut self, w: QuadWarning) {
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }
}

/// Tolerances and limits for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { abs_tol: 1e-9, rel_tol: 1e-8, max_panels: 4096 }
    }
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn checked<V: QuadValue>(f: &(impl Fn(f64) -> V + ?Sized), x: f64) -> Result<V> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { at: x })
    }
}

/// One G10K21 panel with the QUADPACK error heuristic.
fn gk21<V: QuadValue>(f: &(impl Fn(f64) -> V + ?Sized), a: f64, b: f64) -> Result<Panel<V>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = checked(f, c)?;
    let mut resk = fc.scaled(WGK[10]);
    let mut resg = fc.zero_like();
    let mut resabs = WGK[10] * fc.norm();
    let mut samples = Vec::with_capacity(21);
    samples.push((WGK[10], fc));
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = checked(f, c - dx)?;
        let f2 = checked(f, c + dx)?;
        resk.axpy(WGK[j], &f1);
        resk.axpy(WGK[j], &f2);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg.axpy(WG[j / 2], &f1);
            resg.axpy(WG[j / 2], &f2);
        }
        samples.push((WGK[j], f1));
        samples.push((WGK[j], f2));
    }
    let mean = resk.scaled(0.5);
    let resasc: f64 = samples
        .iter()
        .map(|(w, v)| {
            let mut d = v.clone();
            d.axpy(-1.0, &mean);
            w * d.norm()
        })
        .sum::<f64>()
        * h.abs();
    let resabs = resabs * h.abs();
    let mut diff = resk.clone();
    diff.axpy(-1.0, &resg);
    let mut err = diff.norm() * h.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel { a, b, value: resk.scaled(h), err })
}

/// One fixed G10K21 rule on `[a, b]`: value and error estimate.
pub fn gauss_kronrod_21(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let p = gk21(&f, a, b)?;
    Ok((p.value, p.err))
}

/// Closed-form contribution of `[0, eps]` near a singular end.
struct Tail<V> {
    value: V,
    err: f64,
    slow: bool,
}

/// Tail over `s ∈ [0, eps]` from samples `g(eps)`, `g(eps/4)`, `g(eps/16)`.
fn tail_estimate<V: QuadValue>(kind: Endpoint, eps: f64, g1: &V, g2: &V, g3: &V) -> Tail<V> {
    let fit = |beta: f64, ga: &V, gb: &V, e: f64| -> (V, f64) {
        // h = g / s^β sampled at e and e/4
        let ha = ga.scaled(e.powf(-beta));
        let hb = gb.scaled((0.25 * e).powf(-beta));
        let k = e.powf(beta + 1.0) / (beta + 1.0);
        let mut d = ha.clone();
        d.axpy(-1.0, &hb);
        (ha.scaled(k), d.norm() * k.abs())
    };
    match kind {
        Endpoint::Regular => {
            let mut d = g1.clone();
            d.axpy(-1.0, g2);
            Tail { value: g1.scaled(eps), err: d.norm() * eps, slow: false }
        }
        Endpoint::Power(beta) => {
            let (value, err) = fit(beta, g1, g2, eps);
            Tail { value, err, slow: false }
        }
        Endpoint::Log => {
            let l1 = eps.ln();
            let l2 = (0.25 * eps).ln();
            let h1 = g1.scaled(1.0 / l1);
            let mut d = h1.clone();
            d.axpy(-1.0 / l2, g2);
            let k = eps * (l1 - 1.0);
            Tail { value: h1.scaled(k), err: d.norm() * k.abs(), slow: false }
        }
        Endpoint::Auto => {
            let (n1, n2, n3) = (g1.norm(), g2.norm(), g3.norm());
            if n1 == 0.0 && n2 == 0.0 {
                return Tail { value: g1.zero_like(), err: 0.0, slow: false };
            }
            let slope = |a: f64, b: f64| {
                if b == 0.0 {
                    50.0
                } else {
                    ((a / b).ln() / 4f64.ln()).clamp(-0.98, 50.0)
                }
            };
            let b1 = slope(n1, n2);
            let b2 = slope(n2, n3);
            let (value, err) = fit(b1, g1, g2, eps);
            let drift = value.norm() * (b1 - b2).abs() / (b1 + 1.0);
            Tail { slow: b1 <= -0.95, err: err.max(drift), value }
        }
    }
}

/// Panels and tail pieces before adaptive refinement.
struct Layout<V> {
    intervals: Vec<(f64, f64)>,
    tails: Vec<Tail<V>>,
}

impl Quadrature {
    pub fn from_config(cfg: &Config) -> Self {
        Quadrature { abs_tol: cfg.quad_abs_tol, rel_tol: cfg.quad_rel_tol, max_panels: cfg.max_panels }
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    /// Geometric panels toward a singular end at `x0`, moving in direction
    /// `dir` (+1 for a left end), stopping once the closed-form tail is
    /// accurate. Returns the panels and the tail.
    fn grade<V: QuadValue>(
        &self,
        f: &(impl Fn(f64) -> V + ?Sized),
        x0: f64,
        width: f64,
        dir: f64,
        kind: Endpoint,
    ) -> Result<(Vec<(f64, f64)>, Tail<V>)> {
        let at = |s: f64| x0 + dir * s;
        let mut panels = Vec::new();
        let mut eps = 0.25 * width;
        panels.push((eps, width));
        let mut g1 = checked(f, at(eps))?;
        let mut g2 = checked(f, at(0.25 * eps))?;
        loop {
            let g3 = checked(f, at(eps / 16.0))?;
            let tail = tail_estimate(kind, eps, &g1, &g2, &g3);
            let next_eps = 0.25 * eps;
            let exhausted = next_eps < width * 1e-280 || at(next_eps / 16.0) == x0 || panels.len() >= 200;
            if tail.err <= 1e-3 * self.abs_tol || tail.value.norm() <= 1e-6 * self.abs_tol || exhausted {
                let panels = panels
                    .into_iter()
                    .map(|(lo, hi)| if dir > 0.0 { (at(lo), at(hi)) } else { (at(hi), at(lo)) })
                    .collect();
                return Ok((panels, tail));
            }
            panels.push((next_eps, eps));
            eps = next_eps;
            g1 = g2;
            g2 = g3;
        }
    }

    fn layout<V: QuadValue>(
        &self,
        f: &(impl Fn(f64) -> V + ?Sized),
        lo: f64,
        hi: f64,
        breaks: &[f64],
        lo_end: Endpoint,
        hi_end: Endpoint,
    ) -> Result<Layout<V>> {
        let mut pts = vec![lo];
        let span = hi - lo;
        for &b in breaks {
            if b > lo + 1e-15 * span && b < hi - 1e-15 * span && b > *pts.last().unwrap() {
                pts.push(b);
            }
        }
        pts.push(hi);
        let mut intervals = Vec::new();
        let mut tails = Vec::new();
        let last = pts.len() - 2;
        for (i, w) in pts.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let left = i == 0 && lo_end != Endpoint::Regular;
            let right = i == last && hi_end != Endpoint::Regular;
            match (left, right) {
                (false, false) => intervals.push((a, b)),
                (true, false) => {
                    let (p, t) = self.grade(f, a, b - a, 1.0, lo_end)?;
                    intervals.extend(p);
                    tails.push(t);
                }
                (false, true) => {
                    let (p, t) = self.grade(f, b, b - a, -1.0, hi_end)?;
                    intervals.extend(p);
                    tails.push(t);
                }
                (true, true) => {
                    let m = 0.5 * (a + b);
                    let (p, t) = self.grade(f, a, m - a, 1.0, lo_end)?;
                    intervals.extend(p);
                    tails.push(t);
                    let (p, t) = self.grade(f, b, b - m, -1.0, hi_end)?;
                    intervals.extend(p);
                    tails.push(t);
                }
            }
        }
        Ok(Layout { intervals, tails })
    }

    fn refine<V: QuadValue>(&self, f: &(impl Fn(f64) -> V + ?Sized), layout: Layout<V>) -> Result<IntegralResult<V>> {
        let mut active = BinaryHeap::new();
        for &(a, b) in &layout.intervals {
            active.push(gk21(f, a, b)?);
        }
        let mut done: Vec<Panel<V>> = Vec::new();
        let slow = layout.tails.iter().any(|t| t.slow);
        let tail_err: f64 = layout.tails.iter().map(|t| t.err).sum();
        let template = match (active.peek(), layout.tails.first()) {
            (Some(p), _) => p.value.zero_like(),
            (None, Some(t)) => t.value.zero_like(),
            (None, None) => return Err(Error::QuadratureFailure("empty layout".into())),
        };
        let sum = |active: &BinaryHeap<Panel<V>>, done: &[Panel<V>]| -> (V, f64) {
            let mut panels: Vec<&Panel<V>> = active.iter().chain(done.iter()).collect();
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let mut v = template.zero_like();
            let mut e = tail_err;
            for p in panels {
                v.axpy(1.0, &p.value);
                e += p.err;
            }
            for t in &layout.tails {
                v.axpy(1.0, &t.value);
            }
            (v, e)
        };
        let (mut value, mut err) = sum(&active, &done);
        let mut steps = 0usize;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * value.norm());
            let count = active.len() + done.len();
            if err <= tol || count >= self.max_panels || active.is_empty() {
                let (value, err) = sum(&active, &done);
                let converged = err <= tol;
                let mut r =
                    IntegralResult { value, err_estimate: err, panels_used: count, converged, warnings: vec![] };
                if !converged {
                    r.warn(QuadWarning::ToleranceNotMet);
                }
                if slow {
                    r.warn(QuadWarning::SlowDecay);
                }
                return Ok(r);
            }
            let worst = active.pop().expect("non-empty");
            let m = 0.5 * (worst.a + worst.b);
            if m <= worst.a || m >= worst.b || worst.b - worst.a < 1e-14 * worst.a.abs().max(worst.b.abs()) {
                done.push(worst);
                continue;
            }
            let l = gk21(f, worst.a, m)?;
            let r = gk21(f, m, worst.b)?;
            value.axpy(-1.0, &worst.value);
            value.axpy(1.0, &l.value);
            value.axpy(1.0, &r.value);
            err += l.err + r.err - worst.err;
            active.push(l);
            active.push(r);
            steps += 1;
            if steps.is_multiple_of(64) {
                (value, err) = sum(&active, &done);
            }
        }
    }

    /// `∫_lo^hi f` split at `breaks`, with optional singular end behavior.
    pub fn integrate<V: QuadValue>(
        &self,
        f: &(impl Fn(f64) -> V + ?Sized),
        lo: f64,
        hi: f64,
        breaks: &[f64],
        lo_end: Endpoint,
        hi_end: Endpoint,
    ) -> Result<IntegralResult<V>> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
        }
        if lo == hi {
            let z = checked(f, lo)?.zero_like();
            return Ok(IntegralResult {
                value: z,
                err_estimate: 0.0,
                panels_used: 0,
                converged: true,
                warnings: vec![],
            });
        }
        let layout = self.layout(f, lo, hi, breaks, lo_end, hi_end)?;
        self.refine(f, layout)
    }

    /// `∫_lo^∞ f`. The body `[lo, lo + T]` covers every breakpoint; the rest
    /// is compactified by `s = 1/(t − lo)` and graded toward `s = 0`.
    pub fn integrate_semi_infinite<V: QuadValue>(
        &self,
        f: &(impl Fn(f64) -> V + ?Sized),
        lo: f64,
        breaks: &[f64],
        lo_end: Endpoint,
    ) -> Result<IntegralResult<V>> {
        let reach = breaks.iter().fold(0.0_f64, |m, &b| m.max(b - lo));
        let t0 = (2.0 * reach).max(1.0);
        let body = self.integrate(f, lo, lo + t0, breaks, lo_end, Endpoint::Regular)?;
        let g = |s: f64| f(lo + 1.0 / s).scaled(1.0 / (s * s));
        let tail = self.integrate(&g, 0.0, 1.0 / t0, &[], Endpoint::Auto, Endpoint::Regular)?;
        let mut value = body.value;
        value.axpy(1.0, &tail.value);
        let mut warnings = body.warnings;
        for w in tail.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        Ok(IntegralResult {
            value,
            err_estimate: body.err_estimate + tail.err_estimate,
            panels_used: body.panels_used + tail.panels_used,
            converged: body.converged && tail.converged,
            warnings,
        })
    }
}

/// Carries the first error raised inside an integrand out of the quadrature.
/// The integrand returns NaN after a failure, which stops the integration.
#[derive(Debug, Default)]
pub struct ErrorTrap {
    err: std::sync::Mutex<Option<Error>>,
}

impl ErrorTrap {
    pub fn wrap(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.err.lock().unwrap();
                if slot.is_none() {
                    *slot = Some(e);
                }
                f64::NAN
            }
        }
    }

    /// Prefers the trapped error over whatever the quadrature reported.
    pub fn finish<T>(&self, r: Result<T>) -> Result<T> {
        if let Some(e) = self.err.lock().unwrap().take() {
            return Err(e);
        }
        r
    }
}

/// Scalar convenience wrapper with default tolerances.
pub fn integrate_piecewise(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breaks: &[f64]) -> Result<IntegralResult<f64>> {
    Quadrature::default().integrate(&f, lo, hi, breaks, Endpoint::Regular, Endpoint::Regular)
}

/// Scalar convenience wrapper with default tolerances.
pub fn integrate_semi_infinite(f: impl Fn(f64) -> f64, lo: f64, breaks: &[f64]) -> Result<IntegralResult<f64>> {
    Quadrature::default().integrate_semi_infinite(&f, lo, breaks, Endpoint::Regular)
}

/// Nondecreasing right-continuous curve with explicit jumps.
pub trait StieltjesCurve: Sync {
    /// Right-continuous value.
    fn value(&self, x: f64) -> Result<f64>;
    /// Left limit.
    fn left_limit(&self, x: f64) -> Result<f64>;
    /// `(location, mass)` pairs, ascending.
    fn jumps(&self) -> &[(f64, f64)];
    /// Points where the continuous part may lose smoothness, ascending.
    fn nodes(&self) -> Vec<f64>;
    /// The continuous part is constant outside this interval.
    fn support(&self) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsIntegral {
    pub value: f64,
    pub err_estimate: f64,
    pub converged: bool,
}

/// Romberg levels tried on a panel before it is split.
const RS_MAX_LEVEL: usize = 7;
const RS_MAX_DEPTH: usize = 30;
/// Bisections allowed per `rs_integrate` call.
const RS_MAX_SPLITS: usize = 4096;
const MONOTONE_SLACK: f64 = 1e-10;

fn rs_panels(curve: &impl StieltjesCurve, extra: &[f64]) -> Vec<(f64, f64)> {
    let (lo, hi) = curve.support();
    let mut pts: Vec<f64> =
        curve.nodes().into_iter().chain(extra.iter().copied()).filter(|&x| x > lo && x < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    pts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}

fn jump_part(f: &impl Fn(f64) -> f64, curve: &impl StieltjesCurve) -> Result<f64> {
    let mut s = 0.0;
    for &(x, m) in curve.jumps() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: x });
        }
        s += v * m;
    }
    Ok(s)
}

/// Curve samples on a uniform grid of a panel, endpoints excluding jumps.
fn panel_samples(curve: &impl StieltjesCurve, a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    let h = (b - a) / n as f64;
    let mut c = Vec::with_capacity(n + 1);
    c.push(curve.value(a)?);
    for j in 1..n {
        c.push(curve.value(a + j as f64 * h)?);
    }
    c.push(curve.left_limit(b)?);
    check_monotone(&c, a, h)?;
    Ok(c)
}

fn check_monotone(c: &[f64], a: f64, h: f64) -> Result<()> {
    for (j, w) in c.windows(2).enumerate() {
        if w[1] < w[0] - MONOTONE_SLACK {
            return Err(Error::NotMonotone { at: a + j as f64 * h, drop: w[0] - w[1] });
        }
    }
    Ok(())
}

/// `∫ f dC` as jumps plus Romberg-extrapolated midpoint Riemann–Stieltjes
/// sums on each panel between curve nodes and `extra` points of `f`.
pub fn rs_integrate(
    f: impl Fn(f64) -> f64,
    curve: &impl StieltjesCurve,
    extra_breaks: &[f64],
    abs_tol: f64,
) -> Result<RsIntegral> {
    let mut value = jump_part(&f, curve)?;
    let panels = rs_panels(curve, extra_breaks);
    let panel_tol = abs_tol / panels.len().max(1) as f64;
    let mut err = 0.0;
    let mut converged = true;
    let mut splits = RS_MAX_SPLITS;
    for (a, b) in panels {
        let (v, e, ok) = rs_adaptive(&f, curve, a, b, panel_tol, 0, &mut splits)?;
        value += v;
        err += e;
        converged &= ok;
    }
    Ok(RsIntegral { value, err_estimate: err, converged })
}

/// `rs_panel`, bisecting until each piece converges. Wide panels away from
/// zero split at the geometric mean, where curve features concentrate.
fn rs_adaptive(
    f: &impl Fn(f64) -> f64,
    curve: &impl StieltjesCurve,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    splits: &mut usize,
) -> Result<(f64, f64, bool)> {
    let (v, e, ok) = rs_panel(f, curve, a, b, tol)?;
    if ok || depth == RS_MAX_DEPTH || *splits == 0 {
        return Ok((v, e, ok));
    }
    *splits -= 1;
    let m = if a > 0.0 && b > 4.0 * a { (a * b).sqrt() } else { 0.5 * (a + b) };
    let (lv, le, lok) = rs_adaptive(f, curve, a, m, 0.5 * tol, depth + 1, splits)?;
    let (rv, re, rok) = rs_adaptive(f, curve, m, b, 0.5 * tol, depth + 1, splits)?;
    Ok((lv + rv, le + re, lok && rok))
}

fn rs_panel(
    f: &impl Fn(f64) -> f64,
    curve: &impl StieltjesCurve,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64, bool)> {
    let mut c = panel_samples(curve, a, b, 2)?;
    let total = c[c.len() - 1] - c[0];
    if total.abs() <= 1e-15 {
        return Ok((0.0, 0.0, true));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for level in 1..=RS_MAX_LEVEL {
        let n = c.len() - 1;
        let h = (b - a) / n as f64;
        let (mut s, mut sabs) = (0.0, 0.0f64);
        for j in 0..n {
            let m = a + (j as f64 + 0.5) * h;
            let fv = f(m);
            if !fv.is_finite() {
                return Err(Error::NonFiniteIntegrand { at: m });
            }
            s += fv * (c[j + 1] - c[j]);
            sabs += (fv * (c[j + 1] - c[j])).abs();
        }
        let mut row = vec![s];
        if let Some(prev) = rows.last() {
            for k in 0..prev.len() {
                let p = 4f64.powi(k as i32 + 1);
                row.push((p * row[k] - prev[k]) / (p - 1.0));
            }
        }
        if let Some(prev) = rows.last() {
            let cur = *row.last().unwrap();
            let e = (cur - prev.last().unwrap()).abs();
            // differences below the rounding level of the sum carry no information
            if level >= 3 && e <= tol.max(50.0 * f64::EPSILON * sabs) {
                return Ok((cur, e, true));
            }
            if level == RS_MAX_LEVEL {
                return Ok((cur, e, false));
            }
        }
        rows.push(row);
        // refine: insert midpoints
        let mut next = Vec::with_capacity(2 * n + 1);
        for (j, &cj) in c[..n].iter().enumerate() {
            next.push(cj);
            next.push(curve.value(a + (j as f64 + 0.5) * h)?);
        }
        next.push(c[n]);
        check_monotone(&next, a, 0.5 * h)?;
        c = next;
    }
    unreachable!("loop returns at the last level")
}

/// Lower and upper Darboux–Stieltjes sums with `n` cells per panel. They
/// bracket `∫ f dC` whenever `f` is monotone on every cell.
pub fn rs_darboux_bounds(
    f: impl Fn(f64) -> f64,
    curve: &impl StieltjesCurve,
    extra_breaks: &[f64],
    n: usize,
) -> Result<(f64, f64)> {
    let j = jump_part(&f, curve)?;
    let (mut lower, mut upper) = (j, j);
    for (a, b) in rs_panels(curve, extra_breaks) {
        let c = panel_samples(curve, a, b, n)?;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (f0, f1) = (f(x0), f(x1));
            let dc = c[k + 1] - c[k];
            if dc == 0.0 {
                continue;
            }
            lower += f0.min(f1) * dc;
            upper += f0.max(f1) * dc;
        }
    }
    Ok((lower, upper))
}
