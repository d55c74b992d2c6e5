//! Hockey-stick divergence `E_γ(A‖B) = Tr[(A − γB)_+]`, its one-sided
//! derivatives in γ, and the noncommutative minimum.

use crate::config::Config;
use crate::error::Result;
use crate::linalg::{Band, CMatrix, HermitianOperator, ThresholdSplit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HockeyStickValue {
    pub gamma: f64,
    pub value: f64,
    /// `−Tr[B{A > γB}]`.
    pub right_deriv: f64,
    /// `−Tr[B{A ≥ γB}]`.
    pub left_deriv: f64,
}

/// Value and both semi-derivatives from one eigendecomposition of `A − γB`.
pub fn e_gamma(a: &HermitianOperator, b: &HermitianOperator, gamma: f64, cfg: &Config) -> Result<HockeyStickValue> {
    let split = ThresholdSplit::new(a, b, gamma, None, cfg)?;
    Ok(from_split(&split, b))
}

pub(crate) fn from_split(split: &ThresholdSplit, b: &HermitianOperator) -> HockeyStickValue {
    let e = split.eig.expectations(b);
    let (mut strict, mut weak) = (0.0, 0.0);
    for (i, &lam) in split.eig.values.iter().enumerate() {
        if lam > split.eta {
            strict += e[i];
        }
        if lam >= -split.eta {
            weak += e[i];
        }
    }
    HockeyStickValue { gamma: split.gamma, value: split.positive_part(), right_deriv: -strict, left_deriv: -weak }
}

/// `‖X‖₁` as the sum of absolute eigenvalues.
pub fn trace_norm(x: &HermitianOperator) -> Result<f64> {
    Ok(x.eigh()?.values.iter().map(|v| v.abs()).sum())
}

/// `Tr[A ∧ B] = (Tr[A + B] − ‖A − B‖₁)/2`.
pub fn nc_min_trace(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    let tn = trace_norm(&a.combine(1.0, b, -1.0))?;
    Ok(0.5 * (a.trace() + b.trace() - tn))
}

/// The (generally non-Hermitian) operator `A{A ≤ B} + B{B < A}`, whose
/// trace is `Tr[A ∧ B]`.
pub fn nc_min_operator(a: &HermitianOperator, b: &HermitianOperator, cfg: &Config) -> Result<CMatrix> {
    let split = ThresholdSplit::new(a, b, 1.0, None, cfg)?;
    let below = split.projector(Band::NonPositive).op;
    let above = split.projector(Band::Positive).op;
    Ok(a.matrix() * below.matrix() + b.matrix() * above.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diag(d)
    }

    #[test]
    fn equal_arguments() {
        let r = HermitianOperator::from_real_rows(2, &[0.6, 0.2, 0.2, 0.4]);
        let v = e_gamma(&r, &r, 0.3, &Config::default()).unwrap();
        assert!((v.value - 0.7).abs() < 1e-14);
        assert!((v.right_deriv + 1.0).abs() < 1e-14);
    }

    #[test]
    fn commuting_pair_at_one() {
        let v = e_gamma(&diag(&[0.75, 0.25]), &diag(&[0.5, 0.5]), 1.0, &Config::default()).unwrap();
        assert!((v.value - 0.25).abs() < 1e-15);
        assert!((v.right_deriv + 0.5).abs() < 1e-15);
        assert!(v.left_deriv <= v.right_deriv);
    }

    #[test]
    fn semi_derivatives_differ_at_breakpoint() {
        let v = e_gamma(&diag(&[0.75, 0.25]), &diag(&[0.5, 0.5]), 1.5, &Config::default()).unwrap();
        assert!(v.value.abs() < 1e-15);
        assert!(v.right_deriv.abs() < 1e-15);
        assert!((v.left_deriv + 0.5).abs() < 1e-15);
    }

    #[test]
    fn noncommuting_pair_at_one() {
        let b = HermitianOperator::from_real_rows(2, &[0.5, 0.4, 0.4, 0.5]);
        let v = e_gamma(&diag(&[0.9, 0.1]), &b, 1.0, &Config::default()).unwrap();
        assert!((v.value - 0.4 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn noncommutative_minimum() {
        let r = HermitianOperator::from_real_rows(2, &[0.6, 0.2, 0.2, 0.4]);
        assert!((nc_min_trace(&r, &r).unwrap() - 1.0).abs() < 1e-14);
        assert!((nc_min_trace(&diag(&[0.75, 0.25]), &diag(&[0.5, 0.5])).unwrap() - 0.75).abs() < 1e-15);
        assert!(nc_min_trace(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap().abs() < 1e-15);
        let b = HermitianOperator::from_real_rows(2, &[0.5, 0.4, 0.4, 0.5]);
        let a = diag(&[0.9, 0.1]);
        let op = nc_min_operator(&a, &b, &Config::default()).unwrap();
        assert!((op.trace().re - nc_min_trace(&a, &b).unwrap()).abs() < 1e-14);
    }
}
