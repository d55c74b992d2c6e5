//! Dual objective `∫ g dP − ∫ f★(g) dQ` of an f-divergence over the
//! Riemann–Stieltjes distributions, and its optimum at `g = f′`.

use std::fmt;
use std::sync::Arc;

use crate::divergences::{Acc, ConvexFunctionSpec, DivergenceResult};
use crate::error::{Error, Result};
use crate::linalg::StatePair;
use crate::quadrature::{rs_integrate, StieltjesCurve};
use crate::rs_dist::{build_rs_distribution, RSDistribution, Weight, JUMP_THRESHOLD};

/// Samples per mass-carrying panel when checking the witness domain.
const DOMAIN_SAMPLES: usize = 64;

#[derive(Clone)]
pub struct DualWitness {
    pub label: String,
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Points where `g` may be non-smooth.
    pub breaks: Vec<f64>,
}

impl fmt::Debug for DualWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DualWitness({})", self.label)
    }
}

impl DualWitness {
    pub fn new(label: impl Into<String>, g: impl Fn(f64) -> f64 + Send + Sync + 'static, breaks: Vec<f64>) -> Self {
        DualWitness { label: label.into(), g: Arc::new(g), breaks }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c, vec![])
    }

    /// `g = f′`, the maximizer.
    pub fn derivative(f: &ConvexFunctionSpec) -> Self {
        let f = f.clone();
        let breaks = f.kink_points();
        Self::new(format!("{}'", f.name), move |x| f.f_prime(x), breaks)
    }

    /// Linear interpolation through `knots` (ascending in `x`), constant
    /// beyond the ends.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Self {
        assert!(!knots.is_empty(), "piecewise-linear witness needs knots");
        let breaks = knots.iter().map(|k| k.0).collect();
        let g = move |x: f64| {
            let i = knots.partition_point(|k| k.0 <= x);
            if i == 0 {
                return knots[0].1;
            }
            if i == knots.len() {
                return knots[i - 1].1;
            }
            let ((x0, y0), (x1, y1)) = (knots[i - 1], knots[i]);
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        };
        Self::new("piecewise_linear", g, breaks)
    }

    /// `g` clipped to `[lo, hi]`.
    pub fn clipped(self, lo: f64, hi: f64) -> Self {
        let inner = self.g.clone();
        DualWitness {
            label: format!("{}∧[{lo},{hi}]", self.label),
            g: Arc::new(move |x| inner(x).clamp(lo, hi)),
            breaks: self.breaks,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }
}

/// Dual objective value; `NegInfinity` is returned when the witness leaves
/// the domain of `f★` where `Q` carries mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    Finite { value: f64, err_estimate: f64 },
    NegInfinity { at: f64 },
}

impl Objective {
    pub fn value(&self) -> f64 {
        match *self {
            Objective::Finite { value, .. } => value,
            Objective::NegInfinity { .. } => f64::NEG_INFINITY,
        }
    }

    /// The finite value, or `DomainViolation`.
    pub fn finite(&self) -> Result<f64> {
        match *self {
            Objective::Finite { value, .. } => Ok(value),
            Objective::NegInfinity { at } => Err(Error::DomainViolation { at }),
        }
    }
}

/// First mass-carrying point of `Q` where `g` leaves `dom f★`.
fn domain_violation(q: &RSDistribution, f: &ConvexFunctionSpec, g: &DualWitness) -> Result<Option<f64>> {
    let bad = |x: f64| !f.in_conjugate_domain(g.eval(x));
    if let Some(&(x, _)) = q.jumps.iter().find(|&&(x, m)| m > JUMP_THRESHOLD && bad(x)) {
        return Ok(Some(x));
    }
    let (lo, hi) = q.support();
    let mut edges = vec![lo];
    edges.extend(q.nodes().into_iter().filter(|&x| x > lo && x < hi));
    edges.push(hi);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a || q.left_limit(b)? - q.value(a)? <= JUMP_THRESHOLD {
            continue;
        }
        for k in 0..DOMAIN_SAMPLES {
            let x = a + (b - a) * (k as f64 + 0.5) / DOMAIN_SAMPLES as f64;
            if bad(x) {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

fn objective_on(
    p: &RSDistribution,
    q: &RSDistribution,
    f: &ConvexFunctionSpec,
    g: &DualWitness,
    tol: f64,
) -> Result<Objective> {
    if let Some(at) = domain_violation(q, f, g)? {
        return Ok(Objective::NegInfinity { at });
    }
    let mut breaks = g.breaks.clone();
    breaks.extend(f.kink_points());
    let first = rs_integrate(|x| g.eval(x), p, &breaks, tol)?;
    let second = rs_integrate(
        |x| {
            let c = f.conjugate(g.eval(x));
            // only reached off the mass of Q
            if c.is_finite() {
                c
            } else {
                0.0
            }
        },
        q,
        &breaks,
        tol,
    )?;
    Ok(Objective::Finite { value: first.value - second.value, err_estimate: first.err_estimate + second.err_estimate })
}

/// `∫ g dP − ∫ f★(g) dQ`.
pub fn duality_objective(pair: &StatePair, f: &ConvexFunctionSpec, g: &DualWitness) -> Result<Objective> {
    pair.require_support("duality objective")?;
    let p = build_rs_distribution(pair, Weight::Rho)?;
    let q = build_rs_distribution(pair, Weight::Sigma)?;
    objective_on(&p, &q, f, g, pair.cfg.quad_abs_tol)
}

/// Objectives of several witnesses sharing one pair of distributions.
pub fn duality_objectives(pair: &StatePair, f: &ConvexFunctionSpec, gs: &[DualWitness]) -> Result<Vec<Objective>> {
    pair.require_support("duality objective")?;
    let p = build_rs_distribution(pair, Weight::Rho)?;
    let q = build_rs_distribution(pair, Weight::Sigma)?;
    gs.iter().map(|g| objective_on(&p, &q, f, g, pair.cfg.quad_abs_tol)).collect()
}

/// Objective at `g = f′`, which equals `D_f(ρ‖σ)`.
pub fn duality_optimum(pair: &StatePair, f: &ConvexFunctionSpec) -> Result<DivergenceResult> {
    let obj = duality_objective(pair, f, &DualWitness::derivative(f))?;
    let mut acc = Acc::new();
    match obj {
        Objective::Finite { value, err_estimate } => {
            acc.value = value;
            acc.err = err_estimate;
        }
        Objective::NegInfinity { at } => return Err(Error::DomainViolation { at }),
    }
    Ok(acc.into_result("duality", &pair.profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::linalg::QuantumState;

    const KL: f64 = 0.130_812_035_941_137_3;

    fn diag_pair(r: &[f64], s: &[f64]) -> StatePair {
        let c = Config::default();
        StatePair::new(QuantumState::from_real_diag(r).unwrap(), QuantumState::from_real_diag(s).unwrap(), &c).unwrap()
    }

    fn commuting() -> StatePair {
        diag_pair(&[0.75, 0.25], &[0.5, 0.5])
    }

    #[test]
    fn objective_examples() {
        let kl = ConvexFunctionSpec::kl();
        let v = duality_objective(&commuting(), &kl, &DualWitness::derivative(&kl)).unwrap().value();
        assert!((v - KL).abs() < 1e-12);
        let v = duality_objective(&commuting(), &kl, &DualWitness::constant(0.0)).unwrap().value();
        assert!((v + (-1f64).exp()).abs() < 1e-12);
        let same = diag_pair(&[0.3, 0.7], &[0.3, 0.7]);
        let v = duality_objective(&same, &kl, &DualWitness::derivative(&kl)).unwrap().value();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn optimum_examples() {
        let p = commuting();
        assert!((duality_optimum(&p, &ConvexFunctionSpec::kl()).unwrap().value - KL).abs() < 1e-12);
        assert!((duality_optimum(&p, &ConvexFunctionSpec::chi2()).unwrap().value - 0.25).abs() < 1e-12);
        assert!((duality_optimum(&p, &ConvexFunctionSpec::total_variation()).unwrap().value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn domain_violation_is_negative_infinity() {
        let tv = ConvexFunctionSpec::total_variation();
        let obj = duality_objective(&commuting(), &tv, &DualWitness::constant(0.9)).unwrap();
        assert!(matches!(obj, Objective::NegInfinity { .. }));
        assert_eq!(obj.value(), f64::NEG_INFINITY);
        assert!(matches!(obj.finite(), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn hellinger_two_matches_chi2_with_shift() {
        let p = commuting();
        let g = DualWitness::piecewise_linear(vec![(0.0, -1.0), (1.0, 0.5), (2.0, 1.5)]);
        let shifted = DualWitness::piecewise_linear(vec![(0.0, -3.0), (1.0, -1.5), (2.0, -0.5)]);
        let h = duality_objective(&p, &ConvexFunctionSpec::hellinger(2.0), &g).unwrap().value();
        let c = duality_objective(&p, &ConvexFunctionSpec::chi2(), &shifted).unwrap().value();
        assert!((h - c).abs() < 1e-8, "{h} vs {c}");
    }

    #[test]
    fn witness_helpers() {
        let w = DualWitness::piecewise_linear(vec![(0.0, 0.0), (2.0, 4.0)]).clipped(-1.0, 1.0);
        assert_eq!(w.eval(0.25), 0.5);
        assert_eq!(w.eval(1.5), 1.0);
        assert_eq!(w.eval(-1.0), 0.0);
    }
}
