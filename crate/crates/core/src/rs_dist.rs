//! Riemann–Stieltjes distributions `γ ↦ Tr[X{ρ ≤ γσ}]` with `X ∈ {ρ, σ}`,
//! divergences as Stieltjes integrals against them, and the change of
//! measure between the two.

use std::fmt;
use std::str::FromStr;

use crate::divergences::{Acc, ConvexFunctionSpec, DivergenceResult};
use crate::error::{Error, Result};
use crate::linalg::{Band, StatePair};
use crate::quadrature::{rs_integrate, RsIntegral, StieltjesCurve};

/// Jumps lighter than this are treated as numerical noise.
pub const JUMP_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `P(γ) = Tr[ρ{ρ ≤ γσ}]`.
    Rho,
    /// `Q(γ) = Tr[σ{ρ ≤ γσ}]`.
    Sigma,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weight::Rho => "rho",
            Weight::Sigma => "sigma",
        })
    }
}

impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(Weight::Rho),
            "sigma" => Ok(Weight::Sigma),
            _ => Err(Error::InvalidArgument(format!("unknown weight '{s}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RSDistribution {
    pub weight: Weight,
    pub jumps: Vec<(f64, f64)>,
    pub support_max: f64,
    pub total_mass: f64,
    pair: StatePair,
}

impl RSDistribution {
    fn weight_op(&self) -> &crate::linalg::HermitianOperator {
        match self.weight {
            Weight::Rho => &self.pair.rho,
            Weight::Sigma => &self.pair.sigma,
        }
    }

    fn band_trace(&self, gamma: f64, band: Band) -> Result<f64> {
        Ok(self.pair.split(gamma)?.trace_in(self.weight_op(), band))
    }

    /// Continuous part: the curve minus all jumps at or below `γ`.
    pub fn smooth_curve(&self, gamma: f64) -> Result<f64> {
        if gamma < 0.0 {
            return Ok(0.0);
        }
        let split = self.pair.split(gamma)?;
        // a γ inside a breakpoint's zero band already sees that jump
        let nearest = (split.rank(Band::Zero) > 0)
            .then(|| {
                (0..self.jumps.len())
                    .min_by(|&i, &j| (self.jumps[i].0 - gamma).abs().total_cmp(&(self.jumps[j].0 - gamma).abs()))
            })
            .flatten();
        let jumped: f64 = (self.jumps.iter().enumerate())
            .filter(|&(i, j)| j.0 <= gamma || Some(i) == nearest)
            .map(|(_, j)| j.1)
            .sum();
        Ok(split.trace_in(self.weight_op(), Band::NonPositive) - jumped)
    }

    pub fn pair(&self) -> &StatePair {
        &self.pair
    }
}

impl StieltjesCurve for RSDistribution {
    fn value(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        self.band_trace(x, Band::NonPositive)
    }

    fn left_limit(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        self.band_trace(x, Band::Negative)
    }

    fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    fn nodes(&self) -> Vec<f64> {
        self.pair.profile.distinct().into_iter().map(|(b, _)| b).collect()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.support_max)
    }
}

/// Distribution of `X{ρ ≤ γσ}` with jumps read off the zero band of
/// `ρ − γσ` at `γ = 0` and at each breakpoint.
pub fn build_rs_distribution(pair: &StatePair, weight: Weight) -> Result<RSDistribution> {
    let mut dist = RSDistribution {
        weight,
        jumps: Vec::new(),
        support_max: pair.profile.lambda_max,
        total_mass: 0.0,
        pair: pair.clone(),
    };
    dist.total_mass = dist.weight_op().trace();
    let mut locations = vec![0.0];
    locations.extend(dist.nodes());
    let mut jumps = Vec::new();
    for g in locations {
        let mass = dist.band_trace(g, Band::Zero)?;
        if mass > JUMP_THRESHOLD && jumps.last().is_none_or(|&(l, _)| l < g) {
            jumps.push((g, mass));
        }
    }
    dist.jumps = jumps;
    Ok(dist)
}

fn to_result(r: RsIntegral, method: &str, pair: &StatePair) -> DivergenceResult {
    let mut acc = Acc::new();
    acc.value = r.value;
    acc.err = r.err_estimate;
    acc.converged = r.converged;
    acc.into_result(method, &pair.profile)
}

/// `D_f = ∫ f(γ) dQ(γ)`.
pub fn f_div_rs(pair: &StatePair, f: &ConvexFunctionSpec) -> Result<DivergenceResult> {
    pair.require_support("Riemann-Stieltjes f-divergence")?;
    let q = build_rs_distribution(pair, Weight::Sigma)?;
    let r = rs_integrate(|g| f.f(g), &q, &f.kink_points(), pair.cfg.quad_abs_tol)?;
    Ok(to_result(r, "rs", pair))
}

/// `D(ρ‖σ) = ∫ ln γ dP(γ)`.
pub fn relative_entropy_rs(pair: &StatePair) -> Result<DivergenceResult> {
    pair.require_support("Riemann-Stieltjes relative entropy")?;
    let p = build_rs_distribution(pair, Weight::Rho)?;
    let r = rs_integrate(f64::ln, &p, &[], pair.cfg.quad_abs_tol)?;
    Ok(to_result(r, "rs_p", pair))
}

/// `|∫ g dP − ∫ γ g(γ) dQ|`.
pub fn change_of_measure_residual(pair: &StatePair, g: impl Fn(f64) -> f64) -> Result<f64> {
    pair.require_support("change of measure")?;
    let tol = pair.cfg.quad_abs_tol;
    let p = build_rs_distribution(pair, Weight::Rho)?;
    let q = build_rs_distribution(pair, Weight::Sigma)?;
    let lhs = rs_integrate(&g, &p, &[], tol)?.value;
    let rhs = rs_integrate(|x| x * g(x), &q, &[], tol)?.value;
    Ok((lhs - rhs).abs())
}

/// One row of the tabulated `P`, `Q` staircase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsRow {
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
    pub jump_p: f64,
    pub jump_q: f64,
}

/// `P` and `Q` on a uniform grid over `[0, 1.25 λmax]` merged with the jump
/// locations.
pub fn rs_table(pair: &StatePair, points: usize) -> Result<Vec<RsRow>> {
    let p = build_rs_distribution(pair, Weight::Rho)?;
    let q = build_rs_distribution(pair, Weight::Sigma)?;
    let hi = 1.25 * pair.profile.lambda_max.max(1.0);
    let n = points.max(2);
    let mut grid: Vec<f64> = (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect();
    grid.extend(p.jumps.iter().chain(&q.jumps).map(|j| j.0));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let jump_at = |d: &RSDistribution, g: f64| d.jumps.iter().find(|j| j.0 == g).map_or(0.0, |j| j.1);
    grid.into_iter()
        .map(|g| {
            let s = pair.split(g)?;
            Ok(RsRow {
                gamma: g,
                p: s.trace_in(&pair.rho, Band::NonPositive),
                q: s.trace_in(&pair.sigma, Band::NonPositive),
                jump_p: jump_at(&p, g),
                jump_q: jump_at(&q, g),
            })
        })
        .collect()
}
