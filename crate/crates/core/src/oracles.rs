//! Closed-form reference values (Umegaki, Petz, sandwiched, classical) and
//! seeded random states, channels and commuting pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};

use crate::config::Config;
use crate::divergences::ConvexFunctionSpec;
use crate::error::{Error, Result};
use crate::linalg::{spectral_profile, CMatrix, HermitianOperator, QuantumState, StatePair};

fn support_eta(x: &HermitianOperator, cfg: &Config) -> Result<(crate::linalg::Eigh, f64)> {
    let e = x.eigh()?;
    let eta = cfg.eta(x.dim(), e.spectral_norm());
    Ok((e, eta))
}

/// `x ↦ x^p` on the support, `0` on the kernel.
fn support_power(x: &HermitianOperator, p: f64, cfg: &Config) -> Result<HermitianOperator> {
    let (e, eta) = support_eta(x, cfg)?;
    Ok(e.reconstruct(|v| if v > eta { v.powf(p) } else { 0.0 }))
}

fn require_support(rho: &HermitianOperator, sigma: &HermitianOperator, cfg: &Config, what: &str) -> Result<()> {
    if spectral_profile(rho, sigma, None, cfg)?.support_ok {
        Ok(())
    } else {
        Err(Error::SupportViolation(format!("{what} requires supp(rho) within supp(sigma)")))
    }
}

/// `Tr[ρ(ln ρ − ln σ)]` with `0 ln 0 = 0`.
pub fn umegaki(rho: &HermitianOperator, sigma: &HermitianOperator, cfg: &Config) -> Result<f64> {
    require_support(rho, sigma, cfg, "relative entropy")?;
    let (er, eta_r) = support_eta(rho, cfg)?;
    let (es, eta_s) = support_eta(sigma, cfg)?;
    let ent: f64 = er.values.iter().filter(|&&v| v > eta_r).map(|&v| v * v.ln()).sum();
    let ln_sigma = es.reconstruct(|v| if v > eta_s { v.ln() } else { 0.0 });
    Ok(ent - rho.trace_product(&ln_sigma))
}

/// `Tr[ρ^α σ^{1−α}]`.
pub fn petz_q(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64, cfg: &Config) -> Result<f64> {
    if alpha > 1.0 {
        require_support(rho, sigma, cfg, "Petz divergence with alpha > 1")?;
    }
    Ok(support_power(rho, alpha, cfg)?.trace_product(&support_power(sigma, 1.0 - alpha, cfg)?))
}

/// `Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]`.
pub fn sandwiched_q(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64, cfg: &Config) -> Result<f64> {
    if alpha > 1.0 {
        require_support(rho, sigma, cfg, "sandwiched divergence with alpha > 1")?;
    }
    let s = support_power(sigma, (1.0 - alpha) / (2.0 * alpha), cfg)?;
    let inner = rho.congruence(s.matrix());
    Ok(inner.eigh()?.values.iter().map(|&v| if v > 0.0 { v.powf(alpha) } else { 0.0 }).sum())
}

#[derive(Debug, Clone)]
pub enum DivKind<'a> {
    F(&'a ConvexFunctionSpec),
    /// Rényi divergence; `α = 1` gives the Kullback–Leibler divergence.
    Renyi(f64),
}

/// Classical divergence of probability vectors, in nats.
pub fn classical_divergence(p: &[f64], q: &[f64], kind: DivKind) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    for v in [p, q] {
        if v.iter().any(|&x| !(x >= 0.0)) || (v.iter().sum::<f64>() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument("not a probability vector".into()));
        }
    }
    let off_support = p.iter().zip(q).any(|(&pi, &qi)| qi == 0.0 && pi > 0.0);
    match kind {
        DivKind::F(f) => {
            if off_support {
                return Err(Error::SupportViolation("f-divergence requires p << q".into()));
            }
            Ok(p.iter().zip(q).filter(|(_, &qi)| qi > 0.0).map(|(&pi, &qi)| qi * f.f(pi / qi)).sum())
        }
        DivKind::Renyi(1.0) => {
            if off_support {
                return Err(Error::SupportViolation("relative entropy requires p << q".into()));
            }
            Ok(p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum())
        }
        DivKind::Renyi(a) => {
            if !(a > 0.0) {
                return Err(Error::InvalidOrder(a));
            }
            if a > 1.0 && off_support {
                return Err(Error::SupportViolation("Renyi divergence with alpha > 1 requires p << q".into()));
            }
            let s: f64 = p
                .iter()
                .zip(q)
                .filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0)
                .map(|(&pi, &qi)| pi.powf(a) * qi.powf(1.0 - a))
                .sum();
            Ok(s.ln() / (a - 1.0))
        }
    }
}

/// Quantum channel in Kraus form.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub kraus_ops: Vec<CMatrix>,
    pub dim_in: usize,
    pub dim_out: usize,
    /// `‖Σ K†K − I‖_max`.
    pub completeness_residual: f64,
}

impl ChannelSpec {
    pub fn new(kraus_ops: Vec<CMatrix>) -> Result<Self> {
        let first = kraus_ops.first().ok_or_else(|| Error::BadDimensions("no Kraus operators".into()))?;
        let (dim_out, dim_in) = first.shape();
        if kraus_ops.iter().any(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::BadDimensions("Kraus operators differ in shape".into()));
        }
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus_ops {
            sum += k.adjoint() * k;
        }
        sum -= CMatrix::identity(dim_in, dim_in);
        let completeness_residual = sum.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        Ok(ChannelSpec { kraus_ops, dim_in, dim_out, completeness_residual })
    }

    pub fn apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        if x.dim() != self.dim_in {
            return Err(Error::DimensionMismatch(x.dim(), self.dim_in));
        }
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus_ops {
            out += k * x.matrix() * k.adjoint();
        }
        Ok(HermitianOperator::from_matrix(out))
    }

    pub fn apply_state(&self, s: &QuantumState, cfg: &Config) -> Result<QuantumState> {
        QuantumState::from_operator(self.apply(s)?, cfg, true)
    }
}

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// `(G + G†)/2` with `G` complex Gaussian.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = gaussian(rng, dim, dim);
    HermitianOperator::from_matrix((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Columns of the QR `Q` factor with phases fixed by `R`'s diagonal.
fn isometry(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let qr = gaussian(rng, rows, cols).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..cols {
        let d = r[(c, c)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for x in q.column_mut(c).iter_mut() {
                *x *= phase;
            }
        }
    }
    q
}

/// `GG†/Tr` with `G` a `dim × rank` complex Gaussian matrix.
pub fn random_state(dim: usize, rank: usize, rng: &mut impl Rng, cfg: &Config) -> Result<QuantumState> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::BadDimensions(format!("state({dim}, {rank})")));
    }
    let g = gaussian(rng, dim, rank);
    QuantumState::from_operator(HermitianOperator::from_matrix(&g * g.adjoint()), cfg, true)
}

/// Kraus slices of a random isometry `C^{dim_in} → C^{dim_out} ⊗ C^{kraus_rank}`.
pub fn random_channel(dim_in: usize, dim_out: usize, kraus_rank: usize, rng: &mut impl Rng) -> Result<ChannelSpec> {
    if dim_in == 0 || dim_out == 0 || kraus_rank == 0 || dim_out * kraus_rank < dim_in {
        return Err(Error::BadDimensions(format!("channel({dim_in}, {dim_out}, {kraus_rank})")));
    }
    let v = isometry(rng, dim_out * kraus_rank, dim_in);
    let kraus = (0..kraus_rank).map(|j| v.rows(j * dim_out, dim_out).into_owned()).collect();
    ChannelSpec::new(kraus)
}

/// Two states diagonal in one random basis with Dirichlet(1) spectra.
pub fn random_commuting_pair(dim: usize, rng: &mut impl Rng, cfg: &Config) -> Result<(QuantumState, QuantumState)> {
    if dim == 0 {
        return Err(Error::BadDimensions("commuting_pair(0)".into()));
    }
    let u = isometry(rng, dim, dim);
    let mut spectrum = || -> Vec<f64> {
        if dim == 1 {
            return vec![1.0];
        }
        Dirichlet::new(&vec![1.0; dim]).expect("valid Dirichlet parameters").sample(rng)
    };
    let (p, q) = (spectrum(), spectrum());
    let make = |d: &[f64]| {
        let diag = HermitianOperator::from_real_diag(d);
        QuantumState::from_operator(diag.congruence(&u), cfg, true)
    };
    Ok((make(&p)?, make(&q)?))
}

/// Full-rank random pair.
pub fn random_pair(dim: usize, rng: &mut impl Rng, cfg: &Config) -> Result<StatePair> {
    let rho = random_state(dim, dim, rng, cfg)?;
    let sigma = random_state(dim, dim, rng, cfg)?;
    StatePair::new(rho, sigma, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    State { dim: usize, rank: usize },
    Channel { dim_in: usize, dim_out: usize, kraus_rank: usize },
    CommutingPair { dim: usize },
}

#[derive(Debug, Clone)]
pub enum Instance {
    State(QuantumState),
    Channel(ChannelSpec),
    CommutingPair(QuantumState, QuantumState),
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic in `seed`.
pub fn random_instance(kind: InstanceKind, seed: u64, cfg: &Config) -> Result<Instance> {
    let mut rng = seeded_rng(seed);
    Ok(match kind {
        InstanceKind::State { dim, rank } => Instance::State(random_state(dim, rank, &mut rng, cfg)?),
        InstanceKind::Channel { dim_in, dim_out, kraus_rank } => {
            Instance::Channel(random_channel(dim_in, dim_out, kraus_rank, &mut rng)?)
        }
        InstanceKind::CommutingPair { dim } => {
            let (a, b) = random_commuting_pair(dim, &mut rng, cfg)?;
            Instance::CommutingPair(a, b)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    fn diag(d: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diag(d)
    }

    fn plus() -> HermitianOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        HermitianOperator::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)])
    }

    #[test]
    fn umegaki_examples() {
        let c = cfg();
        let r = diag(&[0.75, 0.25]);
        let m = diag(&[0.5, 0.5]);
        assert!(umegaki(&r, &r, &c).unwrap().abs() < 1e-14);
        assert!((umegaki(&r, &m, &c).unwrap() - 0.130_812_035_941_137_3).abs() < 1e-12);
        assert!((umegaki(&plus(), &m, &c).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(matches!(umegaki(&m, &plus(), &c), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn petz_and_sandwiched_examples() {
        let c = cfg();
        let r = diag(&[0.75, 0.25]);
        let m = diag(&[0.5, 0.5]);
        assert!((petz_q(&r, &r, 1.7, &c).unwrap() - 1.0).abs() < 1e-12);
        assert!((petz_q(&r, &m, 0.5, &c).unwrap() - 0.965_925_826_289_068_3).abs() < 1e-12);
        assert!((petz_q(&plus(), &m, 2.0, &c).unwrap() - 2.0).abs() < 1e-12);
        assert!((sandwiched_q(&r, &r, 3.0, &c).unwrap() - 1.0).abs() < 1e-12);
        assert!((sandwiched_q(&plus(), &m, 2.0, &c).unwrap() - 2.0).abs() < 1e-12);
        assert!((sandwiched_q(&r, &m, 2.0, &c).unwrap() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn classical_examples() {
        let p = [0.75, 0.25];
        let q = [0.5, 0.5];
        let kl = ConvexFunctionSpec::kl();
        assert!(classical_divergence(&p, &p, DivKind::F(&kl)).unwrap().abs() < 1e-15);
        assert!(classical_divergence(&p, &p, DivKind::Renyi(2.0)).unwrap().abs() < 1e-15);
        assert!((classical_divergence(&p, &q, DivKind::F(&kl)).unwrap() - 0.130_812_035_941_137_3).abs() < 1e-12);
        assert!((classical_divergence(&p, &q, DivKind::Renyi(2.0)).unwrap() - 1.25f64.ln()).abs() < 1e-12);
        assert!((classical_divergence(&p, &q, DivKind::Renyi(1.0)).unwrap() - 0.130_812_035_941_137_3).abs() < 1e-12);
        assert!(matches!(
            classical_divergence(&[1.0, 0.0], &[0.0, 1.0], DivKind::Renyi(2.0)),
            Err(Error::SupportViolation(_))
        ));
    }

    #[test]
    fn random_instance_examples() {
        let c = cfg();
        match random_instance(InstanceKind::State { dim: 2, rank: 2 }, 7, &c).unwrap() {
            Instance::State(s) => {
                assert!((s.trace() - 1.0).abs() < 1e-12);
                assert!(s.eigh().unwrap().min() > 0.0);
            }
            _ => unreachable!(),
        }
        match random_instance(InstanceKind::Channel { dim_in: 2, dim_out: 2, kraus_rank: 2 }, 7, &c).unwrap() {
            Instance::Channel(ch) => assert!(ch.completeness_residual < 1e-12),
            _ => unreachable!(),
        }
        match random_instance(InstanceKind::CommutingPair { dim: 3 }, 1, &c).unwrap() {
            Instance::CommutingPair(a, b) => {
                let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
                assert!(comm.norm() < 1e-12);
            }
            _ => unreachable!(),
        }
        assert!(matches!(
            random_instance(InstanceKind::State { dim: 2, rank: 3 }, 0, &c),
            Err(Error::BadDimensions(_))
        ));
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let c = cfg();
        let a = random_state(3, 3, &mut seeded_rng(11), &c).unwrap();
        let b = random_state(3, 3, &mut seeded_rng(11), &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn channel_preserves_trace_and_positivity() {
        let c = cfg();
        let mut rng = seeded_rng(3);
        let ch = random_channel(3, 2, 3, &mut rng).unwrap();
        let s = random_state(3, 2, &mut rng, &c).unwrap();
        let out = ch.apply(&s).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-10);
        assert!(out.eigh().unwrap().min() > -1e-10);
    }

    #[test]
    fn commuting_pairs_reduce_to_classical() {
        let c = cfg();
        let mut rng = seeded_rng(5);
        let (a, b) = random_commuting_pair(4, &mut rng, &c).unwrap();
        let ea = a.eigh().unwrap();
        let p: Vec<f64> = ea.values.clone();
        let q = ea.expectations(&b);
        for alpha in [0.4, 2.0] {
            let cl = p.iter().zip(&q).map(|(x, y)| x.powf(alpha) * y.powf(1.0 - alpha)).sum::<f64>();
            assert!((petz_q(&a, &b, alpha, &c).unwrap() - cl).abs() < 1e-10);
            assert!((sandwiched_q(&a, &b, alpha, &c).unwrap() - cl).abs() < 1e-10);
        }
    }
}
