//! Neyman–Pearson tests `S_n(a) = {ρ^⊗n > e^{na} σ^⊗n}` on tensor powers,
//! their finite-n error bounds in terms of `D_α(ρ^⊗n‖σ^⊗n)`, the
//! Hoeffding and Chernoff threshold choices, and the quantum Markov
//! inequality.

use rayon::prelude::*;

use crate::divergences::{d_alpha, f_divergence, ConvexFunctionSpec, FMethod, QMethod, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{Band, StatePair};
use crate::oracles;

/// Slack allowed when comparing a bound with a measured probability.
pub const BOUND_SLACK: f64 = 1e-9;

/// Orders `0.05, 0.10, …, 0.95` over which exponent bounds are optimized.
pub fn alpha_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSpec {
    pub n: usize,
    pub a: f64,
    pub alpha: RenyiOrder,
    /// Type-II rate for the Hoeffding threshold.
    pub r: f64,
    /// Prior of `ρ` for the Chernoff threshold.
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpErrors {
    /// `1 − Tr[ρ^⊗n S]`.
    pub type1_error: f64,
    /// `Tr[σ^⊗n S]`.
    pub type2_error: f64,
    /// `Tr[ρ^⊗n S]`.
    pub type1_success: f64,
}

/// Errors of `S_n(a)` on an already tensorized pair.
pub fn np_errors_tensorized(pair_n: &StatePair, n: usize, a: f64) -> Result<NpErrors> {
    let s = pair_n.split((n as f64 * a).exp())?;
    let success = s.trace_in(&pair_n.rho, Band::Positive);
    Ok(NpErrors {
        type1_error: 1.0 - success,
        type2_error: s.trace_in(&pair_n.sigma, Band::Positive),
        type1_success: success,
    })
}

pub fn np_errors(pair: &StatePair, n: usize, a: f64) -> Result<NpErrors> {
    np_errors_tensorized(&pair.tensor_power(n)?, n, a)
}

/// `exp(−na − (α−1)(na − D_n))`.
pub fn bound_type2(n: usize, a: f64, alpha: f64, d_n: f64) -> f64 {
    let na = n as f64 * a;
    (-na - (alpha - 1.0) * (na - d_n)).exp()
}

/// `exp(−(α−1)(na − D_n))`: bounds `Tr[ρ^⊗n S]` for `α > 1` and
/// `1 − Tr[ρ^⊗n S]` for `α < 1`.
pub fn bound_type1(n: usize, a: f64, alpha: f64, d_n: f64) -> f64 {
    (-(alpha - 1.0) * (n as f64 * a - d_n)).exp()
}

fn holds(bound: f64, measured: f64) -> bool {
    bound >= measured - BOUND_SLACK
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub a: f64,
    pub alpha: f64,
    pub d_n: f64,
    pub type1_error: f64,
    pub type2_error: f64,
    pub type1_success: f64,
    pub bound_type2: f64,
    /// Only for `α > 1`.
    pub bound_type1_success: Option<f64>,
    /// Only for `α < 1`.
    pub bound_type1_error: Option<f64>,
    pub holds_type2: bool,
    pub holds_type1_success: Option<bool>,
    pub holds_type1_error: Option<bool>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.holds_type2 && self.holds_type1_success.unwrap_or(true) && self.holds_type1_error.unwrap_or(true)
    }

    fn new(n: usize, a: f64, alpha: f64, d_n: f64, e: NpErrors) -> Self {
        let b2 = bound_type2(n, a, alpha, d_n);
        let b1 = bound_type1(n, a, alpha, d_n);
        let (b1s, b1e) = if alpha > 1.0 { (Some(b1), None) } else { (None, Some(b1)) };
        BoundReport {
            n,
            a,
            alpha,
            d_n,
            type1_error: e.type1_error,
            type2_error: e.type2_error,
            type1_success: e.type1_success,
            bound_type2: b2,
            bound_type1_success: b1s,
            bound_type1_error: b1e,
            holds_type2: holds(b2, e.type2_error),
            holds_type1_success: b1s.map(|b| holds(b, e.type1_success)),
            holds_type1_error: b1e.map(|b| holds(b, e.type1_error)),
        }
    }
}

/// `D_α(ρ^⊗n‖σ^⊗n)` from the layer-cake formula on the product pair.
pub fn tensor_divergence(pair_n: &StatePair, order: RenyiOrder) -> Result<f64> {
    Ok(d_alpha(pair_n, order, QMethod::LayerCake)?.value)
}

pub fn prop_bounds(pair: &StatePair, spec: &TestSpec) -> Result<BoundReport> {
    let pair_n = pair.tensor_power(spec.n)?;
    let d_n = tensor_divergence(&pair_n, spec.alpha)?;
    let e = np_errors_tensorized(&pair_n, spec.n, spec.a)?;
    Ok(BoundReport::new(spec.n, spec.a, spec.alpha.alpha(), d_n, e))
}

/// Bound reports over a grid, reusing tensor powers and divergences.
pub fn bounds_grid(pair: &StatePair, ns: &[usize], thresholds: &[f64], alphas: &[f64]) -> Result<Vec<BoundReport>> {
    let orders: Vec<RenyiOrder> = alphas.iter().map(|&a| RenyiOrder::new(a)).collect::<Result<_>>()?;
    let per_n: Vec<Vec<BoundReport>> = ns
        .par_iter()
        .map(|&n| {
            let pair_n = pair.tensor_power(n)?;
            let d: Vec<f64> = orders.par_iter().map(|&o| tensor_divergence(&pair_n, o)).collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for &a in thresholds {
                let e = np_errors_tensorized(&pair_n, n, a)?;
                for (o, &d_n) in orders.iter().zip(&d) {
                    rows.push(BoundReport::new(n, a, o.alpha(), d_n, e));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingReport {
    pub a: f64,
    pub type1_error: f64,
    pub type2_error: f64,
    /// `exp(−n((α−1)/α)(r − D_n/n))`.
    pub bound_type1_error: f64,
    /// `exp(−nr)`.
    pub bound_type2: f64,
    pub holds: (bool, bool),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffReport {
    pub a: f64,
    /// `p(1 − Tr[ρ^⊗n S]) + (1 − p) Tr[σ^⊗n S]`.
    pub average_error: f64,
    /// `2 p^α (1−p)^{1−α} e^{−(1−α) D_n}` at the requested order.
    pub bound: f64,
    pub best_bound: f64,
    pub best_alpha: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymReport {
    pub hoeffding: HoeffdingReport,
    pub chernoff: ChernoffReport,
}

fn chernoff_bound(p: f64, alpha: f64, d_n: f64) -> f64 {
    2.0 * p.powf(alpha) * (1.0 - p).powf(1.0 - alpha) * (-(1.0 - alpha) * d_n).exp()
}

/// Hoeffding and Chernoff thresholds with their guarantees, for `α ∈ (0, 1)`.
pub fn asym_exponents(pair: &StatePair, spec: &TestSpec) -> Result<AsymReport> {
    let alpha = spec.alpha.alpha();
    if alpha >= 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    if !(spec.p > 0.0 && spec.p < 1.0) || !(spec.r >= 0.0) {
        return Err(Error::InvalidArgument("need 0 < p < 1 and r >= 0".into()));
    }
    let n = spec.n;
    let nf = n as f64;
    let pair_n = pair.tensor_power(n)?;
    let d_n = tensor_divergence(&pair_n, spec.alpha)?;

    let a_h = (spec.r + (alpha - 1.0) * d_n / nf) / alpha;
    let e = np_errors_tensorized(&pair_n, n, a_h)?;
    let b1 = (-nf * (alpha - 1.0) / alpha * (spec.r - d_n / nf)).exp();
    let b2 = (-nf * spec.r).exp();
    let hoeffding = HoeffdingReport {
        a: a_h,
        type1_error: e.type1_error,
        type2_error: e.type2_error,
        bound_type1_error: b1,
        bound_type2: b2,
        holds: (holds(b1, e.type1_error), holds(b2, e.type2_error)),
    };

    let a_c = ((1.0 - spec.p) / spec.p).ln() / nf;
    let e = np_errors_tensorized(&pair_n, n, a_c)?;
    let avg = spec.p * e.type1_error + (1.0 - spec.p) * e.type2_error;
    let bound = chernoff_bound(spec.p, alpha, d_n);
    let grid: Vec<(f64, f64)> = alpha_grid()
        .into_par_iter()
        .map(|al| Ok((al, chernoff_bound(spec.p, al, tensor_divergence(&pair_n, RenyiOrder::new(al)?)?))))
        .collect::<Result<_>>()?;
    let (best_alpha, best_bound) = grid.into_iter().fold((alpha, bound), |b, c| if c.1 < b.1 { c } else { b });
    let chernoff = ChernoffReport {
        a: a_c,
        average_error: avg,
        bound,
        best_bound,
        best_alpha,
        holds: holds(best_bound, avg) && holds(bound, avg),
    };
    Ok(AsymReport { hoeffding, chernoff })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovReport {
    /// `Tr[σ{ρ > cσ}]`.
    pub lhs: f64,
    /// `D_f(ρ‖σ)/f(c)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Quantum Markov inequality `Tr[σ{ρ > cσ}] ≤ D_f(ρ‖σ)/f(c)`.
pub fn markov_bound(pair: &StatePair, f: &ConvexFunctionSpec, c: f64) -> Result<MarkovReport> {
    if !f.is_nondecreasing() || f.f_at_0() < 0.0 {
        return Err(Error::InvalidArgument(format!("{} must be nondecreasing with f(0) >= 0", f.name)));
    }
    pair.require_support("Markov inequality")?;
    if !(c > 0.0 && c < pair.profile.lambda_max) {
        return Err(Error::BadThreshold(c));
    }
    let fc = f.f(c);
    if !(fc > 0.0) {
        return Err(Error::NonPositiveDenominator(fc));
    }
    let lhs = pair.split(c)?.trace_in(&pair.sigma, Band::Positive);
    let rhs = f_divergence(pair, f, FMethod::LayerCake)?.value / fc;
    Ok(MarkovReport { lhs, rhs, holds: lhs <= rhs + BOUND_SLACK })
}

/// Type-II bounds with the layer-cake divergence and with the sandwiched
/// one, for `α > 1`. The first is never larger.
pub fn sandwiched_comparison(pair: &StatePair, n: usize, a: f64, alpha: f64) -> Result<(f64, f64)> {
    let order = RenyiOrder::new(alpha)?;
    if alpha <= 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    let d_n = tensor_divergence(&pair.tensor_power(n)?, order)?;
    let q = oracles::sandwiched_q(&pair.rho, &pair.sigma, alpha, &pair.cfg)?;
    let d_sw = n as f64 * q.ln() / (alpha - 1.0);
    Ok((bound_type2(n, a, alpha, d_n), bound_type2(n, a, alpha, d_sw)))
}

/// Type-I error bounds with the layer-cake divergence and with the Petz
/// one, for `α < 1`. The Petz version is never smaller.
pub fn petz_relaxation(pair: &StatePair, n: usize, a: f64, alpha: f64) -> Result<(f64, f64)> {
    let order = RenyiOrder::new(alpha)?;
    if alpha >= 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    let d_n = tensor_divergence(&pair.tensor_power(n)?, order)?;
    let q = oracles::petz_q(&pair.rho, &pair.sigma, alpha, &pair.cfg)?;
    let d_petz = n as f64 * q.ln() / (alpha - 1.0);
    Ok((bound_type1(n, a, alpha, d_n), bound_type1(n, a, alpha, d_petz)))
}
