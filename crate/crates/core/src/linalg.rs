//! Dense Hermitian kernels: validation, eigendecomposition, threshold
//! projectors `{A > γB}`, pencil profiles and the Fréchet derivative of `ln`.

use std::ops::Deref;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::Config;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Dense complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    /// Validates hermiticity within `cfg.hermiticity_tol` and symmetrizes.
    pub fn new(raw: CMatrix, cfg: &Config) -> Result<Self> {
        let (rows, cols) = raw.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NonSquare { rows, cols });
        }
        let mut worst = (0.0_f64, 0, 0);
        for i in 0..rows {
            for j in 0..cols {
                let dev = (raw[(i, j)] - raw[(j, i)].conj()).norm();
                if !dev.is_finite() {
                    return Err(Error::NotHermitian { row: i, col: j, deviation: f64::INFINITY });
                }
                if dev > worst.0 {
                    worst = (dev, i, j);
                }
            }
        }
        if worst.0 > cfg.hermiticity_tol {
            return Err(Error::NotHermitian { row: worst.1, col: worst.2, deviation: worst.0 });
        }
        Ok(Self::from_matrix(raw))
    }

    /// Wraps a matrix known to be Hermitian up to rounding; symmetrizes it.
    pub fn from_matrix(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianOperator { m: h }
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let n = d.len();
        HermitianOperator { m: CMatrix::from_fn(n, n, |i, j| if i == j { d[i].into() } else { 0.0.into() }) }
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Self::from_matrix(CMatrix::from_fn(dim, dim, |i, j| entries[i * dim + j].into()))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator { m: CMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator { m: CMatrix::zeros(dim, dim) }
    }

    /// Projector onto a unit vector.
    pub fn pure(v: &[Complex64]) -> Self {
        let n = v.len();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self::from_matrix(CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / (norm * norm)))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Re Tr[self · other]`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                s += (self.m[(i, j)] * other.m[(j, i)]).re;
            }
        }
        s
    }

    pub fn eigh(&self) -> Result<Eigh> {
        Eigh::new(&self.m)
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(self.eigh()?.spectral_norm())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &HermitianOperator, b: f64) -> HermitianOperator {
        HermitianOperator { m: &self.m * Complex64::from(a) + &other.m * Complex64::from(b) }
    }

    pub fn scale(&self, a: f64) -> HermitianOperator {
        HermitianOperator { m: &self.m * Complex64::from(a) }
    }

    pub fn frobenius_distance(&self, other: &HermitianOperator) -> f64 {
        (&self.m - &other.m).norm()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Functional calculus `f(self)` through the eigendecomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
        Ok(self.eigh()?.reconstruct(f))
    }

    /// `K · self · K†` for a rectangular `K`.
    pub fn congruence(&self, k: &CMatrix) -> HermitianOperator {
        Self::from_matrix(k * &self.m * k.adjoint())
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { m: self.m.kronecker(&other.m) }
    }

    /// `self^{⊗n}`; `n = 0` gives the 1×1 identity.
    pub fn tensor_power(&self, n: usize) -> HermitianOperator {
        let mut out = HermitianOperator::identity(1);
        for _ in 0..n {
            out = out.kron(self);
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let n = m.nrows();
        let (diag, v) = jacobi_eigen(m).ok_or(Error::EigSolverFailure { dim: n })?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Ok(Eigh { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        self.reconstruct_weights(&self.values.iter().map(|&v| f(v)).collect::<Vec<_>>())
    }

    /// `V diag(w) V†`.
    pub fn reconstruct_weights(&self, w: &[f64]) -> HermitianOperator {
        let mut scaled = self.vectors.clone();
        for (c, &wc) in w.iter().enumerate() {
            scaled.column_mut(c).scale_mut(wc);
        }
        HermitianOperator::from_matrix(scaled * self.vectors.adjoint())
    }

    /// `⟨v_i|X|v_i⟩` for every eigenvector.
    pub fn expectations(&self, x: &HermitianOperator) -> Vec<f64> {
        let xv = x.matrix() * &self.vectors;
        (0..self.dim()).map(|c| self.vectors.column(c).dotc(&xv.column(c)).re).collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi for a Hermitian matrix: unsorted eigenvalues and the
/// unitary whose columns are the eigenvectors. `None` if it fails to
/// converge or meets a non-finite entry.
fn jacobi_eigen(m: &CMatrix) -> Option<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let mut v = CMatrix::identity(n, n);
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    // unit scale keeps the squared sums below clear of underflow and overflow
    let scale = m.iter().fold(0.0_f64, |s, z| s.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 {
        return Some((vec![0.0; n], v));
    }
    let mut a = m.unscale(scale);
    let frob = a.norm();
    let target = (f64::EPSILON * frob).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for q in 1..n {
            for p in 0..q {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= target {
            return Some(((0..n).map(|i| scale * a[(i, i)].re).collect(), v));
        }
        for q in 1..n {
            for p in 0..q {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // unitary D†J with D = diag(.., e^{iφ}, ..) making a_pq real, J a real rotation
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let (vpp, vpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let (vqp, vqq) = (-phase.conj() * s, phase.conj() * c);
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * vpp + y * vqp;
                    a[(k, q)] = x * vpq + y * vqq;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = vpp.conj() * x + vqp.conj() * y;
                    a[(q, k)] = vpq.conj() * x + vqq.conj() * y;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * vpp + y * vqp;
                    v[(k, q)] = x * vpq + y * vqq;
                }
            }
        }
    }
    None
}

/// Orthogonal projector with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub op: HermitianOperator,
    pub rank: usize,
}

/// Spectral band of `A − γB` relative to the zero band `[−η, η]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// λ > η, the projector `{A > γB}`.
    Positive,
    /// λ ≥ −η, the projector `{A ≥ γB}`.
    NonNegative,
    /// |λ| ≤ η.
    Zero,
    /// λ ≤ η, the projector `{A ≤ γB}`.
    NonPositive,
    /// λ < −η.
    Negative,
}

impl Band {
    fn contains(self, lambda: f64, eta: f64) -> bool {
        match self {
            Band::Positive => lambda > eta,
            Band::NonNegative => lambda >= -eta,
            Band::Zero => lambda.abs() <= eta,
            Band::NonPositive => lambda <= eta,
            Band::Negative => lambda < -eta,
        }
    }
}

/// One eigendecomposition of `A − γB`, queried for projectors and traces.
#[derive(Debug, Clone)]
pub struct ThresholdSplit {
    pub gamma: f64,
    pub eta: f64,
    pub eig: Eigh,
}

impl ThresholdSplit {
    pub fn new(
        a: &HermitianOperator,
        b: &HermitianOperator,
        gamma: f64,
        eta: Option<f64>,
        cfg: &Config,
    ) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(a.dim(), b.dim()));
        }
        let eig = a.combine(1.0, b, -gamma).eigh()?;
        // rounding in A − γB scales with the inputs, not with the difference
        let scale = a.frobenius_norm() + gamma.abs() * b.frobenius_norm();
        let eta = eta.unwrap_or_else(|| cfg.eta(a.dim(), scale));
        Ok(ThresholdSplit { gamma, eta, eig })
    }

    fn members(&self, band: Band) -> impl Iterator<Item = usize> + '_ {
        (0..self.eig.dim()).filter(move |&i| band.contains(self.eig.values[i], self.eta))
    }

    pub fn rank(&self, band: Band) -> usize {
        self.members(band).count()
    }

    pub fn projector(&self, band: Band) -> Projector {
        let w: Vec<f64> =
            (0..self.eig.dim()).map(|i| if band.contains(self.eig.values[i], self.eta) { 1.0 } else { 0.0 }).collect();
        Projector { op: self.eig.reconstruct_weights(&w), rank: self.rank(band) }
    }

    /// `Tr[X · P_band]`.
    pub fn trace_in(&self, x: &HermitianOperator, band: Band) -> f64 {
        let e = self.eig.expectations(x);
        self.members(band).map(|i| e[i]).sum()
    }

    /// `Tr[(A − γB)_+]`.
    pub fn positive_part(&self) -> f64 {
        self.eig.values.iter().filter(|&&v| v > 0.0).sum()
    }

    /// `Tr[(A − γB)_−] = Tr[(γB − A)_+]`.
    pub fn negative_part(&self) -> f64 {
        -self.eig.values.iter().filter(|&&v| v < 0.0).sum::<f64>()
    }
}

/// Spectral projector of `A − γB`: `{A > γB}` if `strict`, else `{A ≥ γB}`.
pub fn projector_positive(
    a: &HermitianOperator,
    b: &HermitianOperator,
    gamma: f64,
    strict: bool,
    eta: Option<f64>,
    cfg: &Config,
) -> Result<Projector> {
    let split = ThresholdSplit::new(a, b, gamma, eta, cfg)?;
    Ok(split.projector(if strict { Band::Positive } else { Band::NonNegative }))
}

/// Positive semidefinite operator with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    op: HermitianOperator,
    pub min_eig: f64,
}

impl QuantumState {
    /// Validates a raw matrix as a state. With `renormalize`, divides by the
    /// trace instead of rejecting a trace mismatch.
    pub fn new(raw: CMatrix, cfg: &Config, renormalize: bool) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(raw, cfg)?, cfg, renormalize)
    }

    pub fn from_operator(op: HermitianOperator, cfg: &Config, renormalize: bool) -> Result<Self> {
        let min_eig = op.eigh()?.min();
        if min_eig < -cfg.psd_tol {
            return Err(Error::NotPsd { min_eig });
        }
        let tr = op.trace();
        if renormalize {
            if !(tr > 0.0) {
                return Err(Error::TraceMismatch { trace: tr });
            }
            return Ok(QuantumState { op: op.scale(1.0 / tr), min_eig: min_eig / tr });
        }
        if (tr - 1.0).abs() > cfg.trace_tol {
            return Err(Error::TraceMismatch { trace: tr });
        }
        Ok(QuantumState { op, min_eig })
    }

    pub fn from_real_diag(p: &[f64]) -> Result<Self> {
        Self::from_operator(HermitianOperator::from_real_diag(p), &Config::default(), false)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        QuantumState { op: HermitianOperator::identity(dim).scale(1.0 / dim as f64), min_eig: 1.0 / dim as f64 }
    }

    pub fn pure(v: &[Complex64]) -> Self {
        QuantumState { op: HermitianOperator::pure(v), min_eig: 0.0 }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn tensor_power(&self, n: usize) -> QuantumState {
        QuantumState { op: self.op.tensor_power(n), min_eig: self.min_eig.max(0.0).powi(n as i32) }
    }
}

impl Deref for QuantumState {
    type Target = HermitianOperator;
    fn deref(&self) -> &HermitianOperator {
        &self.op
    }
}

pub fn validate_hermitian(raw: CMatrix, cfg: &Config) -> Result<HermitianOperator> {
    HermitianOperator::new(raw, cfg)
}

pub fn validate_state(raw: CMatrix, cfg: &Config, renormalize: bool) -> Result<QuantumState> {
    QuantumState::new(raw, cfg, renormalize)
}

/// Breakpoints and support data of the pencil `(ρ, σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    /// Eigenvalues of `σ^{-1/2}ρσ^{-1/2}` on `supp σ`, ascending, with multiplicity.
    pub breakpoints: Vec<f64>,
    pub d_max: f64,
    pub support_ok: bool,
    /// `exp(−D_max(σ‖ρ))`.
    pub beta2: f64,
    pub lambda_max: f64,
    /// Zero band used for `σ`'s kernel.
    pub eta: f64,
    pub dim: usize,
}

impl SpectralProfile {
    pub fn lambda_min(&self) -> f64 {
        self.breakpoints.first().copied().unwrap_or(0.0)
    }

    /// Whether `ρ` has no kernel inside `supp σ`.
    pub fn rho_full_on_support(&self) -> bool {
        self.lambda_min() > self.merge_tol(0.0)
    }

    fn merge_tol(&self, g: f64) -> f64 {
        self.eta.max(1e-14) * (1.0 + g)
    }

    /// Distinct breakpoints strictly inside `(lo, hi)`.
    pub fn partition(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &b in &self.breakpoints {
            if b <= lo + self.merge_tol(lo) || b >= hi - self.merge_tol(hi) {
                continue;
            }
            if out.last().is_some_and(|&l| b - l <= self.merge_tol(b)) {
                continue;
            }
            out.push(b);
        }
        out
    }

    /// Distinct breakpoints with summed multiplicities.
    pub fn distinct(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &b in &self.breakpoints {
            match out.last_mut() {
                Some((l, m)) if b - *l <= self.merge_tol(b) => *m += 1,
                _ => out.push((b, 1)),
            }
        }
        out
    }
}

/// Spectrum of `y^{-1/2} x y^{-1/2}` on `supp y`, and whether `x ≪ y`.
fn relative_spectrum(
    x: &HermitianOperator,
    y: &HermitianOperator,
    eta: Option<f64>,
    cfg: &Config,
) -> Result<(Vec<f64>, bool, f64)> {
    let d = y.dim();
    if x.dim() != d {
        return Err(Error::DimensionMismatch(x.dim(), d));
    }
    let ey = y.eigh()?;
    let ex_norm = x.spectral_norm()?;
    let eta_y = eta.unwrap_or_else(|| cfg.eta(d, ey.spectral_norm()));
    let support: Vec<usize> = (0..d).filter(|&i| ey.values[i] > eta_y).collect();
    let kernel: Vec<usize> = (0..d).filter(|&i| ey.values[i] <= eta_y).collect();
    let col = |idx: &[usize], scale: &dyn Fn(usize) -> f64| {
        CMatrix::from_fn(d, idx.len(), |r, c| ey.vectors[(r, idx[c])] * scale(idx[c]))
    };
    let support_ok = if kernel.is_empty() {
        true
    } else {
        let vk = col(&kernel, &|_| 1.0);
        let block = HermitianOperator::from_matrix(vk.adjoint() * x.matrix() * &vk);
        let eta_x = eta.unwrap_or_else(|| cfg.eta(d, ex_norm.max(ey.spectral_norm())));
        block.spectral_norm()? <= eta_x
    };
    if support.is_empty() {
        return Ok((Vec::new(), support_ok, eta_y));
    }
    let w = col(&support, &|i| 1.0 / ey.values[i].sqrt());
    let m = HermitianOperator::from_matrix(w.adjoint() * x.matrix() * &w);
    let vals = m.eigh()?.values.into_iter().map(|v| v.max(0.0)).collect();
    Ok((vals, support_ok, eta_y))
}

/// Breakpoints, `D_max` and support data for `(ρ, σ)`.
pub fn spectral_profile(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    eta: Option<f64>,
    cfg: &Config,
) -> Result<SpectralProfile> {
    let (breakpoints, support_ok, eta_s) = relative_spectrum(rho, sigma, eta, cfg)?;
    let (reverse, sigma_in_rho, _) = relative_spectrum(sigma, rho, eta, cfg)?;
    let lambda_max = breakpoints.last().copied().unwrap_or(0.0);
    let d_max = if support_ok { lambda_max.ln() } else { f64::INFINITY };
    let beta2 = match reverse.last() {
        Some(&m) if sigma_in_rho && m > 0.0 => 1.0 / m,
        _ => 0.0,
    };
    Ok(SpectralProfile { breakpoints, d_max, support_ok, beta2, lambda_max, eta: eta_s, dim: rho.dim() })
}

/// `D log[A](B)` by first divided differences of `ln` in `A`'s eigenbasis.
pub fn frechet_dlog(a: &HermitianOperator, b: &HermitianOperator, cfg: &Config) -> Result<HermitianOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let ea = a.eigh()?;
    let tol = cfg.eta(a.dim(), ea.spectral_norm());
    if ea.min() <= tol {
        return Err(Error::NotPositiveDefinite { min_eig: ea.min() });
    }
    let v = &ea.vectors;
    let mut bt = v.adjoint() * b.matrix() * v;
    let lam = &ea.values;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            bt[(i, j)] *= log_divided_difference(lam[i], lam[j]);
        }
    }
    Ok(HermitianOperator::from_matrix(v * bt * v.adjoint()))
}

/// `(ln x − ln y)/(x − y)`, continuous across `x = y`.
pub fn log_divided_difference(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    let r = (hi - lo) / lo;
    if r < 1e-8 {
        let m = 0.5 * (hi + lo);
        let z = (hi - lo) / (2.0 * m);
        (1.0 + z * z / 3.0) / m
    } else {
        r.ln_1p() / (hi - lo)
    }
}

/// `(ρ, σ)` with its cached spectral profile.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub rho: QuantumState,
    pub sigma: QuantumState,
    pub profile: Arc<SpectralProfile>,
    pub cfg: Config,
}

impl StatePair {
    pub fn new(rho: QuantumState, sigma: QuantumState, cfg: &Config) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
        }
        let profile = spectral_profile(&rho, &sigma, None, cfg)?;
        Ok(StatePair { rho, sigma, profile: Arc::new(profile), cfg: cfg.clone() })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `(σ, ρ)`.
    pub fn swapped(&self) -> Result<Self> {
        Self::new(self.sigma.clone(), self.rho.clone(), &self.cfg)
    }

    /// `(ρ^{⊗n}, σ^{⊗n})`, subject to the dimension cap.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        let dim = self.dim().checked_pow(n as u32).unwrap_or(usize::MAX);
        if dim > self.cfg.dim_cap {
            return Err(Error::DimensionCapExceeded { dim, cap: self.cfg.dim_cap });
        }
        Self::new(self.rho.tensor_power(n), self.sigma.tensor_power(n), &self.cfg)
    }

    pub fn split(&self, gamma: f64) -> Result<ThresholdSplit> {
        ThresholdSplit::new(&self.rho, &self.sigma, gamma, None, &self.cfg)
    }

    pub fn require_support(&self, what: &str) -> Result<()> {
        if self.profile.support_ok {
            Ok(())
        } else {
            Err(Error::SupportViolation(format!("{what} requires supp(rho) within supp(sigma)")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validates_maximally_mixed() {
        let cfg = Config::default();
        let raw = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let s = QuantumState::new(raw, &cfg, false).unwrap();
        assert!((s.min_eig - 0.5).abs() < 1e-14);
    }

    #[test]
    fn validates_correlated_qubit() {
        let cfg = Config::default();
        let raw = HermitianOperator::from_real_rows(2, &[0.5, 0.4, 0.4, 0.5]).into_matrix();
        let s = QuantumState::new(raw, &cfg, false).unwrap();
        let e = s.eigh().unwrap();
        assert!((e.values[0] - 0.1).abs() < 1e-14 && (e.values[1] - 0.9).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let raw = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 1.), c(0., 1.), c(1., 0.)]);
        assert!(matches!(HermitianOperator::new(raw, &Config::default()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_bad_states() {
        let cfg = Config::default();
        let neg = HermitianOperator::from_real_diag(&[1.5, -0.5]).into_matrix();
        assert!(matches!(QuantumState::new(neg, &cfg, false), Err(Error::NotPsd { .. })));
        let big = HermitianOperator::from_real_diag(&[1.0, 1.0]).into_matrix();
        assert!(matches!(QuantumState::new(big.clone(), &cfg, false), Err(Error::TraceMismatch { .. })));
        let s = QuantumState::new(big, &cfg, true).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-15);
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(rect, &cfg), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn projector_on_commuting_pair() {
        let cfg = Config::default();
        let a = HermitianOperator::from_real_diag(&[0.75, 0.25]);
        let b = HermitianOperator::from_real_diag(&[0.5, 0.5]);
        let p = projector_positive(&a, &b, 1.0, true, None, &cfg).unwrap();
        assert_eq!(p.rank, 1);
        assert!(p.op.frobenius_distance(&HermitianOperator::from_real_diag(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn projector_at_equality() {
        let cfg = Config::default();
        let a = HermitianOperator::from_real_rows(2, &[0.6, 0.1, 0.1, 0.4]);
        let strict = projector_positive(&a, &a, 1.0, true, None, &cfg).unwrap();
        let weak = projector_positive(&a, &a, 1.0, false, None, &cfg).unwrap();
        assert_eq!(strict.rank, 0);
        assert_eq!(weak.rank, 2);
        assert!(weak.op.frobenius_distance(&HermitianOperator::identity(2)) < 1e-14);
    }

    #[test]
    fn projector_noncommuting() {
        let cfg = Config::default();
        let a = HermitianOperator::from_real_diag(&[0.9, 0.1]);
        let b = HermitianOperator::from_real_rows(2, &[0.5, 0.4, 0.4, 0.5]);
        let split = ThresholdSplit::new(&a, &b, 1.0, None, &cfg).unwrap();
        assert!((split.eig.max() - 0.4 * 2f64.sqrt()).abs() < 1e-14);
        let p = split.projector(Band::Positive);
        assert_eq!(p.rank, 1);
        let diff = a.combine(1.0, &b, -1.0);
        let pd = HermitianOperator::from_matrix(diff.matrix() * p.op.matrix());
        assert!(pd.frobenius_distance(&p.op.scale(0.4 * 2f64.sqrt())) < 1e-13);
    }

    #[test]
    fn profile_examples() {
        let cfg = Config::default();
        let p = spectral_profile(
            &HermitianOperator::from_real_diag(&[0.75, 0.25]),
            &HermitianOperator::from_real_diag(&[0.5, 0.5]),
            None,
            &cfg,
        )
        .unwrap();
        assert!((p.breakpoints[0] - 0.5).abs() < 1e-14 && (p.breakpoints[1] - 1.5).abs() < 1e-14);
        assert!((p.d_max - 1.5f64.ln()).abs() < 1e-14);
        assert!((p.beta2 - 0.5).abs() < 1e-14);

        let same = HermitianOperator::from_real_rows(2, &[0.6, 0.1, 0.1, 0.4]);
        let p = spectral_profile(&same, &same, None, &cfg).unwrap();
        assert!(p.breakpoints.iter().all(|b| (b - 1.0).abs() < 1e-13));
        assert!(p.d_max.abs() < 1e-13);

        let p = spectral_profile(
            &HermitianOperator::from_real_diag(&[1.0, 0.0]),
            &HermitianOperator::from_real_diag(&[0.5, 0.5]),
            None,
            &cfg,
        )
        .unwrap();
        assert!(p.support_ok);
        assert!(p.breakpoints[0].abs() < 1e-14 && (p.breakpoints[1] - 2.0).abs() < 1e-14);
        assert!((p.d_max - 2f64.ln()).abs() < 1e-14);
        assert_eq!(p.beta2, 0.0);
    }

    #[test]
    fn profile_detects_support_violation() {
        let cfg = Config::default();
        let p = spectral_profile(
            &HermitianOperator::from_real_diag(&[0.5, 0.5]),
            &HermitianOperator::from_real_diag(&[1.0, 0.0]),
            None,
            &cfg,
        )
        .unwrap();
        assert!(!p.support_ok);
        assert_eq!(p.d_max, f64::INFINITY);
        assert_eq!(p.breakpoints.len(), 1);
        assert!((p.beta2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn partition_merges_degenerate_breakpoints() {
        let cfg = Config::default();
        let same = HermitianOperator::from_real_diag(&[0.2, 0.3, 0.5]);
        let p = spectral_profile(&same, &same, None, &cfg).unwrap();
        assert_eq!(p.partition(0.0, 2.0), vec![p.breakpoints[0]]);
        assert_eq!(p.distinct().len(), 1);
        assert_eq!(p.distinct()[0].1, 3);
    }

    #[test]
    fn dlog_examples() {
        let cfg = Config::default();
        let e = std::f64::consts::E;
        let b = HermitianOperator::from_real_rows(2, &[0.3, -1.0, -1.0, 2.0]);
        let id = frechet_dlog(&HermitianOperator::identity(2), &b, &cfg).unwrap();
        assert!(id.frobenius_distance(&b) < 1e-14);

        let a = HermitianOperator::from_real_diag(&[1.0, e]);
        let d = frechet_dlog(&a, &HermitianOperator::identity(2), &cfg).unwrap();
        assert!(d.frobenius_distance(&HermitianOperator::from_real_diag(&[1.0, 1.0 / e])) < 1e-14);

        let x = HermitianOperator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]);
        let d = frechet_dlog(&a, &x, &cfg).unwrap();
        let off = 1.0 / (e - 1.0);
        assert!(d.frobenius_distance(&HermitianOperator::from_real_rows(2, &[0.0, off, off, 0.0])) < 1e-14);

        assert!(matches!(
            frechet_dlog(&HermitianOperator::from_real_diag(&[1.0, 0.0]), &b, &cfg),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn divided_difference_is_continuous() {
        let exact = |x: f64, y: f64| (x.ln() - y.ln()) / (x - y);
        assert!((log_divided_difference(2.0, 3.0) - exact(2.0, 3.0)).abs() < 1e-15);
        assert!((log_divided_difference(2.0, 2.0) - 0.5).abs() < 1e-15);
        assert!((log_divided_difference(2.0, 2.0 + 1e-10) - 1.0 / (2.0 + 5e-11)).abs() < 1e-15);
    }

    #[test]
    fn tensor_power_of_state() {
        let s = QuantumState::from_real_diag(&[0.75, 0.25]).unwrap();
        let t = s.tensor_power(2);
        assert_eq!(t.dim(), 4);
        assert!((t.trace() - 1.0).abs() < 1e-15);
        assert!((t.matrix()[(0, 0)].re - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn eigh_is_accurate_on_clustered_spectra() {
        use crate::oracles::{random_hermitian, seeded_rng};
        let mut rng = seeded_rng(3);
        for d in [2, 4, 7] {
            let h = random_hermitian(d, &mut rng);
            let u = h.eigh().unwrap().vectors;
            let spectrum: Vec<f64> = (0..d).map(|i| -0.38 + 1e-4 * (i as f64).powi(3)).collect();
            let m = HermitianOperator::from_real_diag(&spectrum).congruence(&u);
            let e = m.eigh().unwrap();
            let lam = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, e.values.iter().map(|&v| c(v, 0.0))));
            assert!((m.matrix() * &e.vectors - &e.vectors * lam).norm() < 1e-14);
            assert!((e.vectors.adjoint() * &e.vectors - CMatrix::identity(d, d)).norm() < 1e-14);
            for (a, b) in e.values.iter().zip(&spectrum) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }
}
