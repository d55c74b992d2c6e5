//! Operator identities and trace formulas: the projector layer cake for the
//! derivative of the logarithm, the operator change of variables, trace
//! formulas for `Q_α` and `D_f`, and the log-difference projector integral.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::config::Config;
use crate::divergences::{Acc, ConvexFunctionSpec, DivergenceResult, Regime, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{spectral_profile, Band, CMatrix, Eigh, HermitianOperator, StatePair, ThresholdSplit};
use crate::quadrature::{gauss_kronrod_21, Endpoint, ErrorTrap, IntegralResult, Quadrature};

#[derive(Debug, Clone)]
pub struct OperatorIntegralResult {
    pub op: HermitianOperator,
    /// Frobenius-norm estimate summed over panels.
    pub err_estimate: f64,
    pub converged: bool,
}

impl OperatorIntegralResult {
    fn zero(dim: usize) -> Self {
        OperatorIntegralResult { op: HermitianOperator::zeros(dim), err_estimate: 0.0, converged: true }
    }

    fn add(&mut self, r: IntegralResult<CMatrix>, scale: f64) {
        let m = self.op.matrix() + r.value * num_complex::Complex64::new(scale, 0.0);
        self.op = HermitianOperator::from_matrix(m);
        self.err_estimate += scale.abs() * r.err_estimate;
        self.converged &= r.converged;
    }
}

/// Real function with known discontinuities, applied spectrally.
#[derive(Clone)]
pub struct ScalarFunction {
    pub name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub discontinuities: Vec<f64>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFunction({})", self.name)
    }
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        discontinuities: Vec<f64>,
    ) -> Self {
        ScalarFunction { name: name.into(), f: Arc::new(f), discontinuities }
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0, vec![])
    }

    /// `γ^k`.
    pub fn power(k: i32) -> Self {
        Self::new(format!("x^{k}"), move |x| x.powi(k), vec![])
    }

    /// Indicator of `[lo, hi]`.
    pub fn indicator(lo: f64, hi: f64) -> Self {
        let disc = [lo, hi].into_iter().filter(|&x| x > 0.0).collect();
        Self::new(format!("1[{lo},{hi}]"), move |x| if x >= lo && x <= hi { 1.0 } else { 0.0 }, disc)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Spectral data of `B` for the family `(B + t)^{-1/2}`, `t > 0`.
///
/// Sandwiches are formed in the eigenbasis of `B`, where `(B + t)^{-1/2}`
/// is diagonal; this avoids cancellation when `B` is singular and `t` is
/// tiny. Operators tagged "local" live in that basis.
struct Resolvent {
    eig: Eigh,
}

impl Resolvent {
    fn new(b: &HermitianOperator) -> Result<Self> {
        Ok(Resolvent { eig: b.eigh()? })
    }

    fn singular(&self, cfg: &Config) -> bool {
        self.eig.min() <= cfg.eta(self.eig.dim(), self.eig.spectral_norm())
    }

    /// `V† A V`.
    fn local(&self, a: &HermitianOperator) -> HermitianOperator {
        a.congruence(&self.eig.vectors.adjoint())
    }

    /// `V X V†`.
    fn global(&self, x: &HermitianOperator) -> HermitianOperator {
        x.congruence(&self.eig.vectors)
    }

    fn diag(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            self.eig.dim(),
            self.eig.values.iter().map(|&b| Complex64::new(f(b.max(0.0)), 0.0)),
        ))
    }

    /// `B(B + t)^{-1}`, local.
    fn damping(&self, t: f64) -> HermitianOperator {
        HermitianOperator::from_matrix(self.diag(|b| b / (b + t)))
    }

    /// `(B + t)^{-1/2} A (B + t)^{-1/2}`, local, from `A` already local.
    fn sandwich(&self, a_local: &HermitianOperator, t: f64) -> HermitianOperator {
        a_local.congruence(&self.diag(|b| 1.0 / (b + t).sqrt()))
    }

    fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.eig.values.iter().copied().filter(|&v| v > 0.0)
    }
}

fn positive_definite_eig(a: &HermitianOperator, cfg: &Config) -> Result<Eigh> {
    let e = a.eigh()?;
    if e.min() <= cfg.eta(a.dim(), e.spectral_norm()) {
        return Err(Error::NotPositiveDefinite { min_eig: e.min() });
    }
    Ok(e)
}

fn sorted_breaks(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.retain(|&x| x > lo && x < hi && x.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    v
}

/// Times `t > 0` at which `(B+t)^{-1/2} A (B+t)^{-1/2}` has eigenvalue `c`.
fn crossing_times(a: &HermitianOperator, b: &HermitianOperator, c: f64) -> Result<Vec<f64>> {
    if c <= 0.0 {
        return Ok(vec![]);
    }
    let e = a.combine(1.0, b, -c).eigh()?;
    Ok(e.values.into_iter().filter(|&l| l > 0.0).map(|l| l / c).collect())
}

/// `∫_0^{u+} {B > uA} du − ∫_{u−}^0 {B < uA} du`, which equals `D log[A](B)`.
pub fn dlog_layer_cake(a: &HermitianOperator, b: &HermitianOperator, cfg: &Config) -> Result<OperatorIntegralResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let ea = positive_definite_eig(a, cfg)?;
    let w = ea.reconstruct(|x| 1.0 / x.sqrt()).into_matrix();
    let c = b.congruence(&w).eigh()?;
    let (u_plus, u_minus) = (c.max().max(0.0), c.min().min(0.0));
    let q = Quadrature::from_config(cfg);
    let mut out = OperatorIntegralResult::zero(a.dim());
    let trap = ErrorTrap::default();
    let projector = |u: f64, band: Band| -> CMatrix {
        match ThresholdSplit::new(b, a, u, None, cfg) {
            Ok(s) => s.projector(band).op.into_matrix(),
            Err(e) => {
                trap.wrap(Err(e));
                CMatrix::from_element(a.dim(), a.dim(), f64::NAN.into())
            }
        }
    };
    if u_plus > 0.0 {
        let breaks = sorted_breaks(c.values.clone(), 0.0, u_plus);
        let f = |u: f64| projector(u, Band::Positive);
        out.add(trap.finish(q.integrate(&f, 0.0, u_plus, &breaks, Endpoint::Regular, Endpoint::Regular))?, 1.0);
    }
    if u_minus < 0.0 {
        let breaks = sorted_breaks(c.values.clone(), u_minus, 0.0);
        let f = |u: f64| projector(u, Band::Negative);
        out.add(trap.finish(q.integrate(&f, u_minus, 0.0, &breaks, Endpoint::Regular, Endpoint::Regular))?, -1.0);
    }
    Ok(out)
}

/// Both sides of the operator change of variables:
/// `∫_0^{λmax} {A > γB} h(γ) dγ` and
/// `∫_0^∞ (B+t)^{-1/2} X_t h(X_t) (B+t)^{-1/2} dt`, `X_t = (B+t)^{-1/2} A (B+t)^{-1/2}`.
pub fn change_of_variables_pair(
    a: &HermitianOperator,
    b: &HermitianOperator,
    h: &ScalarFunction,
    cfg: &Config,
) -> Result<(OperatorIntegralResult, OperatorIntegralResult)> {
    let prof = spectral_profile(a, b, None, cfg)?;
    if !prof.support_ok {
        return Err(Error::SupportViolation("change of variables requires supp(A) within supp(B)".into()));
    }
    let d = a.dim();
    let q = Quadrature::from_config(cfg);
    let trap = ErrorTrap::default();
    let nan = || CMatrix::from_element(d, d, f64::NAN.into());

    let mut lhs = OperatorIntegralResult::zero(d);
    let hi = prof.lambda_max;
    if hi > 0.0 {
        let mut breaks = prof.partition(0.0, hi);
        breaks.extend(h.discontinuities.iter().copied());
        let breaks = sorted_breaks(breaks, 0.0, hi);
        let f = |g: f64| match ThresholdSplit::new(a, b, g, Some(prof.eta), cfg) {
            Ok(s) => s.projector(Band::Positive).op.into_matrix() * num_complex::Complex64::new(h.eval(g), 0.0),
            Err(e) => {
                trap.wrap(Err(e));
                nan()
            }
        };
        lhs.add(trap.finish(q.integrate(&f, 0.0, hi, &breaks, Endpoint::Regular, Endpoint::Regular))?, 1.0);
    }

    let res = Resolvent::new(b)?;
    let mut breaks: Vec<f64> = res.eigenvalues().collect();
    for &c in &h.discontinuities {
        breaks.extend(crossing_times(a, b, c)?);
    }
    let breaks = sorted_breaks(breaks, 0.0, f64::INFINITY);
    let a_local = res.local(a);
    let f = |t: f64| {
        let x = res.sandwich(&a_local, t);
        match x.eigh() {
            Ok(e) => {
                let inner = e.reconstruct(|v| v * h.eval(v));
                res.global(&res.sandwich(&inner, t)).into_matrix()
            }
            Err(err) => {
                trap.wrap(Err(err));
                nan()
            }
        }
    };
    let lo_end = if res.singular(cfg) { Endpoint::Auto } else { Endpoint::Regular };
    let mut rhs = OperatorIntegralResult::zero(d);
    rhs.add(trap.finish(q.integrate_semi_infinite(&f, 0.0, &breaks, lo_end))?, 1.0);
    Ok((lhs, rhs))
}

/// Scalar `∫_0^∞ g(t) dt` with the first error trapped.
fn semi_infinite_scalar(
    q: &Quadrature,
    g: impl Fn(f64) -> Result<f64>,
    breaks: Vec<f64>,
    lo_end: Endpoint,
) -> Result<IntegralResult<f64>> {
    let trap = ErrorTrap::default();
    let f = |t: f64| trap.wrap(g(t));
    let breaks = sorted_breaks(breaks, 0.0, f64::INFINITY);
    trap.finish(q.integrate_semi_infinite(&f, 0.0, &breaks, lo_end))
}

fn trace_power(x: &HermitianOperator, p: f64) -> Result<f64> {
    Ok(x.eigh()?.values.iter().map(|&v| if v > 0.0 { v.powf(p) } else { 0.0 }).sum())
}

/// Beyond this `t` the `α < 1` integrand is evaluated as an increment.
const INCREMENT_FROM: f64 = 1.0;

/// `(x^q − y^q)/(x − y)` for `x, y > 0`, stable as `y → x`.
fn power_divided_difference(x: f64, y: f64, q: f64) -> f64 {
    let l = y.ln() - x.ln();
    if l == 0.0 {
        return q * x.powf(q - 1.0);
    }
    x.powf(q - 1.0) * (q * l).exp_m1() / l.exp_m1()
}

/// `Tr[(W + Δ_t)^p] − Tr[W^p]` with `W = V†σV` in the eigenbasis of `ρ`,
/// `Δ_t = W^{1/2} diag(δ) W^{1/2}` and `δ_i = (1 − r_i)/(r_i + t)`, so that
/// `Tr Y_t^p = (1+t)^{−p} Tr[(W + Δ_t)^p]`.
///
/// Written as the first-order term `p Tr[W^p diag(δ)]` plus the Taylor
/// remainder `∫_0^1 (1−s) Σ_ij f′^{[1]}(λ_i, λ_j) |Δ_ij|² ds` in the
/// eigenbasis of `W + sΔ_t`. Both pieces carry relative accuracy, unlike
/// the plain difference, which cancels as `t → ∞`.
struct PowerIncrement {
    w: HermitianOperator,
    w_half: CMatrix,
    w_pow_diag: Vec<f64>,
    r: Vec<f64>,
    p: f64,
    eta: f64,
}

impl PowerIncrement {
    fn new(res: &Resolvent, w: &HermitianOperator, p: f64, cfg: &Config) -> Result<Self> {
        let ew = w.eigh()?;
        let w_pow = ew.reconstruct(|v| if v > 0.0 { v.powf(p) } else { 0.0 });
        Ok(PowerIncrement {
            w: w.clone(),
            w_half: ew.reconstruct(|v| v.max(0.0).sqrt()).into_matrix(),
            w_pow_diag: (0..w.dim()).map(|i| w_pow.matrix()[(i, i)].re).collect(),
            r: res.eig.values.iter().map(|&r| r.max(0.0)).collect(),
            p,
            eta: cfg.eta(w.dim(), ew.spectral_norm()),
        })
    }

    fn eval(&self, t: f64) -> Result<f64> {
        let delta: Vec<f64> = self.r.iter().map(|&r| (1.0 - r) / (r + t)).collect();
        let first = self.p * self.w_pow_diag.iter().zip(&delta).map(|(w, d)| w * d).sum::<f64>();
        let dmat = HermitianOperator::from_real_diag(&delta).congruence(&self.w_half);
        let trap = ErrorTrap::default();
        let second = |s: f64| {
            let run = || -> Result<f64> {
                let e = self.w.combine(1.0, &dmat, s).eigh()?;
                let d = dmat.congruence(&e.vectors.adjoint());
                let mut acc = 0.0;
                for (i, &li) in e.values.iter().enumerate() {
                    for (j, &lj) in e.values.iter().enumerate() {
                        if li > self.eta && lj > self.eta {
                            acc +=
                                self.p * power_divided_difference(li, lj, self.p - 1.0) * d.matrix()[(i, j)].norm_sqr();
                        }
                    }
                }
                Ok((1.0 - s) * acc)
            };
            trap.wrap(run())
        };
        let (rem, _) = trap.finish(gauss_kronrod_21(second, 0.0, 1.0))?;
        Ok(first + rem)
    }
}

/// `Q_α` from its trace formula.
/// For `α > 1`: `(α−1) ∫_0^∞ Tr[X_t^α] dt`, `X_t = (σ+t)^{-1/2} ρ (σ+t)^{-1/2}`.
/// For `α < 1`: `Tr σ^{1−α} − α ∫_0^∞ (Tr[Y_t^{1−α}] − Tr σ^{1−α} (1+t)^{α−1}) dt`,
/// `Y_t = (ρ+t)^{-1/2} σ (ρ+t)^{-1/2}`. A singular `ρ` gives an integrable
/// `t^{α−1}` singularity at `t = 0`, handled by endpoint grading.
pub fn q_alpha_trace(pair: &StatePair, order: RenyiOrder) -> Result<DivergenceResult> {
    let a = order.alpha();
    let cfg = &pair.cfg;
    let q = Quadrature::from_config(cfg);
    let mut acc = Acc::new();
    match order.regime() {
        Regime::AboveOne => {
            pair.require_support("trace formula with alpha > 1")?;
            let res = Resolvent::new(&pair.sigma)?;
            let rho = res.local(&pair.rho);
            let g = |t: f64| trace_power(&res.sandwich(&rho, t), a);
            let lo_end = if res.singular(cfg) { Endpoint::Auto } else { Endpoint::Regular };
            let r = semi_infinite_scalar(&q, g, res.eigenvalues().collect(), lo_end)?;
            acc.add(r, a - 1.0);
        }
        Regime::BelowOne => {
            let res = Resolvent::new(&pair.rho)?;
            let s_pow = trace_power(&pair.sigma, 1.0 - a)?;
            let sigma = res.local(&pair.sigma);
            let incr = PowerIncrement::new(&res, &sigma, 1.0 - a, cfg)?;
            let g = |t: f64| {
                if t > INCREMENT_FROM {
                    return Ok((1.0 + t).powf(a - 1.0) * incr.eval(t)?);
                }
                let y = res.sandwich(&sigma, t);
                Ok(trace_power(&y, 1.0 - a)? - s_pow * (1.0 + t).powf(a - 1.0))
            };
            let lo_end = if res.singular(cfg) { Endpoint::Power(a - 1.0) } else { Endpoint::Regular };
            let mut breaks: Vec<f64> = res.eigenvalues().collect();
            breaks.push(INCREMENT_FROM);
            let r = semi_infinite_scalar(&q, g, breaks, lo_end)?;
            acc.add(r, -a);
            acc.exact(s_pow);
        }
    }
    Ok(acc.into_result("trace", &pair.profile))
}

/// `D_f = f(0) + ∫_0^∞ Tr[σ(σ+t)^{-1} X_t f′(X_t)] dt`.
pub fn f_divergence_trace(pair: &StatePair, f: &ConvexFunctionSpec) -> Result<DivergenceResult> {
    pair.require_support("f-divergence")?;
    let cfg = &pair.cfg;
    let q = Quadrature::from_config(cfg);
    let res = Resolvent::new(&pair.sigma)?;
    let mut breaks: Vec<f64> = res.eigenvalues().collect();
    for x0 in f.kink_points() {
        breaks.extend(crossing_times(&pair.rho, &pair.sigma, x0)?);
    }
    let rho = res.local(&pair.rho);
    let g = |t: f64| {
        let x = res.sandwich(&rho, t);
        let xf = x.eigh()?.reconstruct(|v| f.x_f_prime(v));
        Ok(res.damping(t).trace_product(&xf))
    };
    let lo_end = if res.singular(cfg) { Endpoint::Auto } else { Endpoint::Regular };
    let mut acc = Acc::new();
    acc.add(semi_infinite_scalar(&q, g, breaks, lo_end)?, 1.0);
    acc.exact(f.f_at_0() * pair.sigma.trace());
    Ok(acc.into_result("trace", &pair.profile))
}

/// `|∫ Tr[B(B+t)^{-1} X_t^α] dt − ((α−1)/α) ∫ Tr[X_t^α] dt|`.
pub fn order_identity_residual(a: &HermitianOperator, b: &HermitianOperator, alpha: f64, cfg: &Config) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidOrder(alpha));
    }
    let prof = spectral_profile(a, b, None, cfg)?;
    if !prof.support_ok {
        return Err(Error::SupportViolation("order identity requires supp(A) within supp(B)".into()));
    }
    let q = Quadrature::from_config(cfg);
    let res = Resolvent::new(b)?;
    let lo_end = if res.singular(cfg) { Endpoint::Auto } else { Endpoint::Regular };
    let a_local = res.local(a);
    let power = |t: f64| -> Result<HermitianOperator> {
        Ok(res.sandwich(&a_local, t).eigh()?.reconstruct(|v| if v > 0.0 { v.powf(alpha) } else { 0.0 }))
    };
    let breaks: Vec<f64> = res.eigenvalues().collect();
    let lhs = semi_infinite_scalar(&q, |t| Ok(res.damping(t).trace_product(&power(t)?)), breaks.clone(), lo_end)?;
    let rhs = semi_infinite_scalar(&q, |t| Ok(power(t)?.trace()), breaks, lo_end)?;
    Ok((lhs.value - (alpha - 1.0) / alpha * rhs.value).abs())
}

/// `∫_1^{λmax(A,B)} γ^{-1}{A > γB} dγ − ∫_1^{λmax(B,A)} γ^{-1}{B > γA} dγ`,
/// which equals `ln A − ln B`.
pub fn log_difference_projint(
    a: &HermitianOperator,
    b: &HermitianOperator,
    cfg: &Config,
) -> Result<OperatorIntegralResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    positive_definite_eig(a, cfg)?;
    positive_definite_eig(b, cfg)?;
    let q = Quadrature::from_config(cfg);
    let trap = ErrorTrap::default();
    let d = a.dim();
    let mut out = OperatorIntegralResult::zero(d);
    for (x, y, sign) in [(a, b, 1.0), (b, a, -1.0)] {
        let prof = spectral_profile(x, y, None, cfg)?;
        let hi = prof.lambda_max;
        if hi <= 1.0 {
            continue;
        }
        let f = |g: f64| match ThresholdSplit::new(x, y, g, Some(prof.eta), cfg) {
            Ok(s) => s.projector(Band::Positive).op.into_matrix() / num_complex::Complex64::new(g, 0.0),
            Err(e) => {
                trap.wrap(Err(e));
                CMatrix::from_element(d, d, f64::NAN.into())
            }
        };
        let breaks = prof.partition(1.0, hi);
        out.add(trap.finish(q.integrate(&f, 1.0, hi, &breaks, Endpoint::Regular, Endpoint::Regular))?, sign);
    }
    Ok(out)
}
