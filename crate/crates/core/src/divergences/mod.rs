//! Quasi Rényi, Rényi, Hellinger and f-divergences of a state pair through
//! the layer-cake, hockey-stick-integral and one-sided representations, and
//! the relative entropy formulas built on them.

mod convex;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use convex::ConvexFunctionSpec;

use crate::error::{Error, Result};
use crate::linalg::{Band, SpectralProfile, StatePair};
use crate::quadrature::{Endpoint, ErrorTrap, IntegralResult, QuadWarning, Quadrature};

/// Rényi order `α > 0`, `α ≠ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiOrder(f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowOne,
    AboveOne,
}

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            return Err(Error::Alpha1RequiresLimit);
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(RenyiOrder(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn regime(self) -> Regime {
        if self.0 < 1.0 {
            Regime::BelowOne
        } else {
            Regime::AboveOne
        }
    }
}

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($var:ident => $s:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($var),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$var),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$var => $s),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok($name::$var),)+
                    _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
                }
            }
        }
    };
}

named_enum!(
    /// Representation used for `Q_α`.
    QMethod { LayerCake => "layercake", HsIntegral => "hs_integral", OneSided => "onesided" }
);

named_enum!(
    /// Representation used for `D_f`.
    FMethod { LayerCake => "layercake", HsIntegral => "hs_integral", Trace => "trace" }
);

named_enum!(
    /// Representation used for `D(ρ‖σ)`.
    RelEntMethod {
        Projection => "projection",
        Frenkel => "frenkel",
        LayerCake => "layercake",
        RenyiLimit => "renyi_limit",
    }
);

#[derive(Debug, Clone)]
pub struct DivergenceResult {
    pub value: f64,
    pub method: String,
    pub err_estimate: f64,
    pub converged: bool,
    pub warnings: Vec<QuadWarning>,
    pub profile: Arc<SpectralProfile>,
}

/// Running sum of integral pieces.
#[derive(Debug, Clone, Default)]
pub(crate) struct Acc {
    pub value: f64,
    pub err: f64,
    pub converged: bool,
    pub warnings: Vec<QuadWarning>,
}

impl Acc {
    pub fn new() -> Self {
        Acc { value: 0.0, err: 0.0, converged: true, warnings: vec![] }
    }

    pub fn exact(&mut self, v: f64) {
        self.value += v;
    }

    pub fn add(&mut self, r: IntegralResult<f64>, scale: f64) {
        self.value += scale * r.value;
        self.err += scale.abs() * r.err_estimate;
        self.converged &= r.converged;
        for w in r.warnings {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }

    pub fn into_result(self, method: impl Into<String>, profile: &Arc<SpectralProfile>) -> DivergenceResult {
        DivergenceResult {
            value: self.value,
            method: method.into(),
            err_estimate: self.err,
            converged: self.converged,
            warnings: self.warnings,
            profile: profile.clone(),
        }
    }
}

/// Trace curves in γ fed to layer-cake integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TraceCurve {
    /// `Tr[σ{ρ > γσ}]`.
    SigmaAbove,
    /// `Tr[ρ{ρ > γσ}]`.
    RhoAbove,
    /// `Tr[ρ{ρ ≤ γσ}]`.
    RhoAtMost,
}

impl TraceCurve {
    pub fn eval(self, pair: &StatePair, gamma: f64) -> Result<f64> {
        let s = pair.split(gamma)?;
        Ok(match self {
            TraceCurve::SigmaAbove => s.trace_in(&pair.sigma, Band::Positive),
            TraceCurve::RhoAbove => s.trace_in(&pair.rho, Band::Positive),
            TraceCurve::RhoAtMost => s.trace_in(&pair.rho, Band::NonPositive),
        })
    }
}

/// Integration weight `w` with antiderivative `F` and behavior at `0⁺`.
pub(crate) struct Kernel<'a> {
    pub w: &'a dyn Fn(f64) -> f64,
    pub antiderivative: Option<&'a dyn Fn(f64) -> f64>,
    pub at_zero: Endpoint,
}

pub(crate) fn quadrature(pair: &StatePair) -> Quadrature {
    Quadrature::from_config(&pair.cfg)
}

fn merged_breaks(profile: &SpectralProfile, lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut b = profile.partition(lo, if hi.is_finite() { hi } else { f64::MAX });
    b.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `∫_0^hi w(γ) C(γ) dγ`; `hi = ∞` switches to the semi-infinite rule.
/// On `[0, λ_min]` the curve is constant when `ρ` has full support in
/// `supp σ`, and that panel is done in closed form.
pub(crate) fn layer_cake(
    pair: &StatePair,
    kernel: &Kernel,
    curve: TraceCurve,
    hi: f64,
    extra: &[f64],
    q: &Quadrature,
) -> Result<Acc> {
    let prof = &pair.profile;
    let mut acc = Acc::new();
    let mut lo = 0.0;
    if prof.support_ok && prof.rho_full_on_support() {
        let b1 = prof.lambda_min().min(hi);
        let c = curve.eval(pair, 0.5 * b1)?;
        if c == 0.0 {
            lo = b1;
        } else if let Some(big_f) = kernel.antiderivative {
            let f0 = big_f(0.0);
            if f0.is_finite() {
                acc.exact(c * (big_f(b1) - f0));
                lo = b1;
            }
        }
    }
    if lo >= hi {
        return Ok(acc);
    }
    let breaks = merged_breaks(prof, lo, hi, extra);
    let trap = ErrorTrap::default();
    let g = |x: f64| trap.wrap(curve.eval(pair, x).map(|c| if c == 0.0 { 0.0 } else { (kernel.w)(x) * c }));
    let lo_end = if lo == 0.0 { kernel.at_zero } else { Endpoint::Regular };
    let r = if hi.is_finite() {
        trap.finish(q.integrate(&g, lo, hi, &breaks, lo_end, Endpoint::Regular))?
    } else {
        trap.finish(q.integrate_semi_infinite(&g, lo, &breaks, lo_end))?
    };
    acc.add(r, 1.0);
    Ok(acc)
}

/// `∫_1^hi k(γ) E_γ(ρ‖σ) dγ + ∫_{β₂}^1 k̃(u) Tr(uσ − ρ)_+ du`.
pub(crate) fn hockey_stick_integral(
    pair: &StatePair,
    upper_kernel: &dyn Fn(f64) -> f64,
    lower_kernel: &dyn Fn(f64) -> f64,
    lower_at_zero: Endpoint,
    extra: &[f64],
    q: &Quadrature,
) -> Result<Acc> {
    let prof = &pair.profile;
    let mut acc = Acc::new();
    let trap = ErrorTrap::default();
    let hi = if prof.support_ok { prof.lambda_max.max(1.0) } else { f64::INFINITY };
    if hi > 1.0 {
        let breaks = merged_breaks(prof, 1.0, hi, extra);
        let g = |x: f64| trap.wrap(pair.split(x).map(|s| upper_kernel(x) * s.positive_part()));
        let r = if hi.is_finite() {
            trap.finish(q.integrate(&g, 1.0, hi, &breaks, Endpoint::Regular, Endpoint::Regular))?
        } else {
            trap.finish(q.integrate_semi_infinite(&g, 1.0, &breaks, Endpoint::Regular))?
        };
        acc.add(r, 1.0);
    }
    let lo = prof.beta2.min(1.0);
    if lo < 1.0 {
        let breaks = merged_breaks(prof, lo, 1.0, extra);
        let g = |u: f64| {
            trap.wrap(pair.split(u).map(|s| {
                let v = s.negative_part();
                if v == 0.0 {
                    0.0
                } else {
                    lower_kernel(u) * v
                }
            }))
        };
        let lo_end = if lo == 0.0 { lower_at_zero } else { Endpoint::Regular };
        let r = trap.finish(q.integrate(&g, lo, 1.0, &breaks, lo_end, Endpoint::Regular))?;
        acc.add(r, 1.0);
    }
    Ok(acc)
}

/// `Q_α(ρ‖σ)`.
pub fn q_alpha(pair: &StatePair, order: RenyiOrder, method: QMethod) -> Result<DivergenceResult> {
    q_alpha_with(pair, order, method, &quadrature(pair))
}

pub(crate) fn q_alpha_with(
    pair: &StatePair,
    order: RenyiOrder,
    method: QMethod,
    q: &Quadrature,
) -> Result<DivergenceResult> {
    let a = order.alpha();
    let prof = &pair.profile;
    if order.regime() == Regime::AboveOne {
        pair.require_support("Q_alpha with alpha > 1")?;
    }
    let hi = if prof.support_ok { prof.lambda_max } else { f64::INFINITY };
    let acc = match method {
        QMethod::LayerCake => {
            let w = |g: f64| a * g.powf(a - 1.0);
            let big_f = |g: f64| g.powf(a);
            let k = Kernel { w: &w, antiderivative: Some(&big_f), at_zero: Endpoint::Power(a - 1.0) };
            layer_cake(pair, &k, TraceCurve::SigmaAbove, hi, &[], q)?
        }
        QMethod::HsIntegral => {
            let upper = |g: f64| g.powf(a - 2.0);
            let lower = |u: f64| u.powf(a - 2.0);
            let mut acc = hockey_stick_integral(pair, &upper, &lower, Endpoint::Auto, &[], q)?;
            acc.value *= a * (a - 1.0);
            acc.err *= (a * (a - 1.0)).abs();
            acc.exact(pair.sigma.trace() + a * (pair.rho.trace() - pair.sigma.trace()));
            acc
        }
        QMethod::OneSided => match order.regime() {
            Regime::BelowOne => {
                let w = |g: f64| (1.0 - a) * g.powf(a - 2.0);
                let big_f = |g: f64| -g.powf(a - 1.0);
                let k = Kernel { w: &w, antiderivative: Some(&big_f), at_zero: Endpoint::Auto };
                let mut acc = layer_cake(pair, &k, TraceCurve::RhoAtMost, hi, &[], q)?;
                if hi.is_finite() {
                    acc.exact(pair.rho.trace() * hi.powf(a - 1.0));
                }
                acc
            }
            Regime::AboveOne => {
                let w = |g: f64| (a - 1.0) * g.powf(a - 2.0);
                let big_f = |g: f64| g.powf(a - 1.0);
                let k = Kernel { w: &w, antiderivative: Some(&big_f), at_zero: Endpoint::Power(a - 2.0) };
                layer_cake(pair, &k, TraceCurve::RhoAbove, hi, &[], q)?
            }
        },
    };
    Ok(acc.into_result(method.name(), prof))
}

/// `D_α = ln Q_α / (α − 1)` in nats.
pub fn d_alpha(pair: &StatePair, order: RenyiOrder, method: QMethod) -> Result<DivergenceResult> {
    d_alpha_with(pair, order, method, &quadrature(pair))
}

fn d_alpha_with(pair: &StatePair, order: RenyiOrder, method: QMethod, q: &Quadrature) -> Result<DivergenceResult> {
    let mut r = q_alpha_with(pair, order, method, q)?;
    if !(r.value > 0.0) {
        return Err(Error::NonPositiveQ(r.value));
    }
    let a = order.alpha();
    r.err_estimate /= (a - 1.0).abs() * r.value;
    r.value = r.value.ln() / (a - 1.0);
    Ok(r)
}

/// `H_α = (Q_α − 1)/(α − 1)`.
pub fn hellinger_alpha(pair: &StatePair, order: RenyiOrder, method: QMethod) -> Result<DivergenceResult> {
    let mut r = q_alpha(pair, order, method)?;
    let a = order.alpha();
    r.value = (r.value - 1.0) / (a - 1.0);
    r.err_estimate /= (a - 1.0).abs();
    Ok(r)
}

/// `D_f(ρ‖σ)`.
pub fn f_divergence(pair: &StatePair, f: &ConvexFunctionSpec, method: FMethod) -> Result<DivergenceResult> {
    pair.require_support("f-divergence")?;
    let q = quadrature(pair);
    let prof = &pair.profile;
    let kinks = f.kink_points();
    let acc = match method {
        FMethod::LayerCake => {
            let w = |g: f64| f.f_prime(g);
            let big_f = |g: f64| f.f(g);
            let k = Kernel { w: &w, antiderivative: Some(&big_f), at_zero: f.f_prime_at_zero };
            let mut acc = layer_cake(pair, &k, TraceCurve::SigmaAbove, prof.lambda_max, &kinks, &q)?;
            acc.exact(f.f_at_0() * pair.sigma.trace());
            acc
        }
        FMethod::HsIntegral => {
            if !f.has_second() {
                return Err(Error::MissingSecondDerivative(f.name.clone()));
            }
            let f2 = |x: f64| f.f_second(x).unwrap_or(0.0);
            let mut acc = hockey_stick_integral(pair, &f2, &f2, Endpoint::Auto, &kinks, &q)?;
            for &(x0, jump) in &f.kinks {
                let s = pair.split(x0)?;
                acc.exact(jump * if x0 > 1.0 { s.positive_part() } else { s.negative_part() });
            }
            let (tr_r, tr_s) = (pair.rho.trace(), pair.sigma.trace());
            acc.exact(f.f(1.0) * tr_s + f.f_prime(1.0) * (tr_r - tr_s));
            acc
        }
        FMethod::Trace => return crate::trace_reps::f_divergence_trace(pair, f),
    };
    Ok(acc.into_result(method.name(), prof))
}

/// Umegaki relative entropy `D(ρ‖σ)` in nats.
pub fn relative_entropy(pair: &StatePair, method: RelEntMethod) -> Result<DivergenceResult> {
    pair.require_support("relative entropy")?;
    let q = quadrature(pair);
    let prof = &pair.profile;
    let (tr_r, tr_s) = (pair.rho.trace(), pair.sigma.trace());
    let acc = match method {
        RelEntMethod::Projection => {
            let mut acc = Acc::new();
            let trap = ErrorTrap::default();
            let hi = prof.lambda_max;
            if hi > 1.0 {
                let breaks = merged_breaks(prof, 1.0, hi, &[]);
                let g = |x: f64| trap.wrap(TraceCurve::RhoAbove.eval(pair, x).map(|c| c / x));
                acc.add(trap.finish(q.integrate(&g, 1.0, hi, &breaks, Endpoint::Regular, Endpoint::Regular))?, 1.0);
            }
            let lo = prof.beta2.min(1.0);
            if lo < 1.0 {
                // ∫_1^{1/β₂} γ⁻¹ Tr[ρ{σ > γρ}] dγ with u = 1/γ
                let breaks = merged_breaks(prof, lo, 1.0, &[]);
                let g = |u: f64| {
                    trap.wrap(pair.split(u).map(|s| {
                        let c = s.trace_in(&pair.rho, Band::Negative);
                        if c == 0.0 {
                            0.0
                        } else {
                            c / u
                        }
                    }))
                };
                let lo_end = if lo == 0.0 { Endpoint::Auto } else { Endpoint::Regular };
                acc.add(trap.finish(q.integrate(&g, lo, 1.0, &breaks, lo_end, Endpoint::Regular))?, -1.0);
            }
            acc.exact(tr_s - tr_r);
            acc
        }
        RelEntMethod::Frenkel => {
            let inv = |x: f64| 1.0 / x;
            let mut acc = hockey_stick_integral(pair, &inv, &inv, Endpoint::Auto, &[], &q)?;
            acc.exact(tr_r - tr_s);
            acc
        }
        RelEntMethod::LayerCake => {
            let w = |g: f64| g.ln();
            let big_f = |g: f64| if g > 0.0 { g * g.ln() - g } else { 0.0 };
            let k = Kernel { w: &w, antiderivative: Some(&big_f), at_zero: Endpoint::Log };
            let mut acc = layer_cake(pair, &k, TraceCurve::SigmaAbove, prof.lambda_max, &[], &q)?;
            acc.exact(tr_r);
            acc
        }
        RelEntMethod::RenyiLimit => renyi_limit(pair, &q)?,
    };
    Ok(acc.into_result(method.name(), prof))
}

/// Step schedule for the Rényi-limit extrapolation.
pub const RENYI_LIMIT_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `(D_{1+ε} + D_{1−ε})/2` on a halving schedule with two Richardson levels.
fn renyi_limit(pair: &StatePair, q: &Quadrature) -> Result<Acc> {
    let tight = q.with_tol(q.abs_tol * 1e-3, q.rel_tol * 1e-3);
    let mut acc = Acc::new();
    let mut level0 = Vec::new();
    for eps in RENYI_LIMIT_STEPS {
        let up = d_alpha_with(pair, RenyiOrder::new(1.0 + eps)?, QMethod::LayerCake, &tight)?;
        let dn = d_alpha_with(pair, RenyiOrder::new(1.0 - eps)?, QMethod::LayerCake, &tight)?;
        acc.converged &= up.converged && dn.converged;
        level0.push(0.5 * (up.value + dn.value));
    }
    let level1: Vec<f64> = level0.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    let best = (16.0 * level1[1] - level1[0]) / 15.0;
    acc.value = best;
    acc.err = (best - level1[1]).abs();
    Ok(acc)
}

/// `|D_α(ρ‖σ) − α/(1−α) · D_{1−α}(σ‖ρ)|` for `α ∈ (0, 1)`.
pub fn skew_symmetry_residual(pair: &StatePair, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidOrder(alpha));
    }
    let lhs = d_alpha(pair, RenyiOrder::new(alpha)?, QMethod::LayerCake)?.value;
    let rhs = d_alpha(&pair.swapped()?, RenyiOrder::new(1.0 - alpha)?, QMethod::LayerCake)?.value;
    Ok((lhs - alpha / (1.0 - alpha) * rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::linalg::QuantumState;
    use num_complex::Complex64;

    fn commuting() -> StatePair {
        let cfg = Config::default();
        StatePair::new(QuantumState::from_real_diag(&[0.75, 0.25]).unwrap(), QuantumState::maximally_mixed(2), &cfg)
            .unwrap()
    }

    fn plus_vs_mixed() -> StatePair {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = QuantumState::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]);
        StatePair::new(plus, QuantumState::maximally_mixed(2), &Config::default()).unwrap()
    }

    fn same() -> StatePair {
        let cfg = Config::default();
        let r = QuantumState::new(
            crate::linalg::HermitianOperator::from_real_rows(2, &[0.6, 0.2, 0.2, 0.4]).into_matrix(),
            &cfg,
            false,
        )
        .unwrap();
        StatePair::new(r.clone(), r, &cfg).unwrap()
    }

    const KL: f64 = 0.130_812_035_941_137_3;

    #[test]
    fn order_validation() {
        assert!(matches!(RenyiOrder::new(1.0), Err(Error::Alpha1RequiresLimit)));
        assert!(matches!(RenyiOrder::new(-0.5), Err(Error::InvalidOrder(_))));
        assert_eq!(RenyiOrder::new(0.5).unwrap().regime(), Regime::BelowOne);
    }

    #[test]
    fn quasi_renyi_examples_all_methods() {
        for &m in QMethod::ALL {
            let o2 = RenyiOrder::new(2.0).unwrap();
            assert!((q_alpha(&same(), o2, m).unwrap().value - 1.0).abs() < 1e-9, "{m}");
            assert!((q_alpha(&commuting(), o2, m).unwrap().value - 1.25).abs() < 1e-9, "{m}");
            let half = RenyiOrder::new(0.5).unwrap();
            let v = q_alpha(&plus_vs_mixed(), half, m).unwrap().value;
            assert!((v - 0.5f64.sqrt()).abs() < 1e-9, "{m}: {v}");
        }
    }

    #[test]
    fn renyi_examples() {
        let o3 = RenyiOrder::new(3.0).unwrap();
        let d = d_alpha(&plus_vs_mixed(), o3, QMethod::LayerCake).unwrap().value;
        assert!((d - 2f64.ln()).abs() < 1e-9);
        let d = d_alpha(&commuting(), RenyiOrder::new(2.0).unwrap(), QMethod::LayerCake).unwrap().value;
        assert!((d - 1.25f64.ln()).abs() < 1e-9);
        assert!(d_alpha(&same(), o3, QMethod::HsIntegral).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn hellinger_examples() {
        let o2 = RenyiOrder::new(2.0).unwrap();
        assert!(hellinger_alpha(&same(), o2, QMethod::LayerCake).unwrap().value.abs() < 1e-9);
        assert!((hellinger_alpha(&commuting(), o2, QMethod::LayerCake).unwrap().value - 0.25).abs() < 1e-9);
        assert!((hellinger_alpha(&plus_vs_mixed(), o2, QMethod::LayerCake).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn f_divergence_examples() {
        for &m in FMethod::ALL {
            let kl = f_divergence(&commuting(), &ConvexFunctionSpec::kl(), m).unwrap().value;
            assert!((kl - KL).abs() < 1e-9, "{m}: {kl}");
            let tv = f_divergence(&commuting(), &ConvexFunctionSpec::total_variation(), m).unwrap().value;
            assert!((tv - 0.25).abs() < 1e-9, "{m}: {tv}");
            let z = f_divergence(&same(), &ConvexFunctionSpec::chi2(), m).unwrap().value;
            assert!(z.abs() < 1e-9, "{m}: {z}");
        }
    }

    #[test]
    fn relative_entropy_examples() {
        for &m in RelEntMethod::ALL {
            let v = relative_entropy(&commuting(), m).unwrap();
            assert!((v.value - KL).abs() < 1e-8, "{m}: {}", v.value);
            assert!(relative_entropy(&same(), m).unwrap().value.abs() < 1e-8, "{m}");
            let v = relative_entropy(&plus_vs_mixed(), m).unwrap().value;
            assert!((v - 2f64.ln()).abs() < 1e-7, "{m}: {v}");
        }
    }

    #[test]
    fn skew_symmetry_commuting() {
        assert!(skew_symmetry_residual(&commuting(), 0.3).unwrap() < 1e-8);
        assert!(skew_symmetry_residual(&same(), 0.5).unwrap() < 1e-8);
    }

    #[test]
    fn support_violation_for_alpha_above_one() {
        let pair = plus_vs_mixed().swapped().unwrap();
        let r = q_alpha(&pair, RenyiOrder::new(2.0).unwrap(), QMethod::LayerCake);
        assert!(matches!(r, Err(Error::SupportViolation(_))));
        assert!(matches!(relative_entropy(&pair, RelEntMethod::Frenkel), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn alpha_below_one_without_support() {
        // σ = |+⟩⟨+|, ρ = I/2: Q_α = Tr[σ^{1−α}]-like value 2^{−α}
        let pair = plus_vs_mixed().swapped().unwrap();
        let a = 0.5;
        for &m in QMethod::ALL {
            let v = q_alpha(&pair, RenyiOrder::new(a).unwrap(), m).unwrap().value;
            assert!((v - 2f64.powf(-a)).abs() < 1e-7, "{m}: {v}");
        }
    }
}
