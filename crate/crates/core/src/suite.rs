//! Randomized property checks behind `verify` and the acceptance tests.
//!
//! Every case is drawn from its own seeded generator, so results do not
//! depend on thread scheduling. Errors inside a check count as failures.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::divergences::{
    d_alpha, f_divergence, q_alpha, relative_entropy, skew_symmetry_residual, ConvexFunctionSpec, FMethod, QMethod,
    RelEntMethod, RenyiOrder,
};
use crate::duality::{duality_objectives, duality_optimum, DualWitness};
use crate::error::{Error, Result};
use crate::exponents::{
    asym_exponents, bounds_grid, markov_bound, petz_relaxation, prop_bounds, sandwiched_comparison, TestSpec,
    BOUND_SLACK,
};
use crate::hockey_stick::{e_gamma, nc_min_trace, trace_norm};
use crate::linalg::{frechet_dlog, HermitianOperator, QuantumState, StatePair};
use crate::oracles::{
    classical_divergence, petz_q, random_channel, random_commuting_pair, random_hermitian, random_pair, random_state,
    sandwiched_q, seeded_rng, umegaki, DivKind,
};
use crate::quadrature::StieltjesCurve;
use crate::rs_dist::{build_rs_distribution, change_of_measure_residual, f_div_rs, relative_entropy_rs, Weight};
use crate::trace_reps::{
    change_of_variables_pair, dlog_layer_cake, log_difference_projint, order_identity_residual, q_alpha_trace,
    ScalarFunction,
};

const Q_ORDERS: [f64; 6] = [0.3, 0.5, 0.9, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteParams {
    /// Instances per check; checks with a fixed size ignore it.
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
}

impl SuiteParams {
    pub fn new(trials: usize, dims: Vec<usize>, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("dims must be a nonempty list of integers ≥ 2".into()));
        }
        Ok(SuiteParams { trials, dims, seed })
    }

    /// Acceptance sizes: 100 pairs over dims 2, 3, 4.
    pub fn acceptance() -> Self {
        SuiteParams { trials: 100, dims: vec![2, 3, 4], seed: 20_240_601 }
    }

    fn dim(&self, i: usize) -> usize {
        self.dims[i % self.dims.len()]
    }

    /// Independent generator for case `i` of stream `stream`.
    fn rng(&self, stream: u64, i: usize) -> rand_chacha::ChaCha8Rng {
        let mix =
            self.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
        seeded_rng(mix)
    }

    fn pairs(&self, stream: u64, count: usize, cfg: &Config) -> Result<Vec<StatePair>> {
        (0..count).map(|i| random_pair(self.dim(i), &mut self.rng(stream, i), cfg)).collect()
    }

    fn qubit_pairs(&self, stream: u64, count: usize, cfg: &Config) -> Result<Vec<StatePair>> {
        (0..count).map(|i| random_pair(2, &mut self.rng(stream, i), cfg)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Largest residual or violation seen.
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
    /// First error raised by a case, if any.
    pub error: Option<String>,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<44} worst={:<11.3e} tol={:<9.1e} cases={}",
            if self.passed { "ok" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.cases
        )?;
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<CheckReport>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// One-line summary naming the failing checks.
    pub fn summary(&self) -> String {
        let failing: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failing.is_empty() {
            format!("criterion {}: PASS ({})", self.id, self.title)
        } else {
            format!("criterion {}: FAIL ({}) failing: {}", self.id, self.title, failing.join(", "))
        }
    }
}

/// Runs `f` over `cases` in parallel; entry `j` of its output feeds check
/// `names[j]`, which passes when every value is at most `tols[j]`.
fn run<I: Sync>(
    names: &[&str],
    tols: &[f64],
    cases: &[I],
    f: impl Fn(&I) -> Result<Vec<f64>> + Sync,
) -> Vec<CheckReport> {
    assert_eq!(names.len(), tols.len());
    let outcomes: Vec<Result<Vec<f64>>> = cases.par_iter().map(&f).collect();
    let mut worst = vec![0.0f64; names.len()];
    let mut error = None;
    for o in outcomes {
        match o {
            Ok(v) => {
                debug_assert_eq!(v.len(), names.len());
                for (w, x) in worst.iter_mut().zip(v) {
                    // NaN must register as a failure
                    *w = if x.is_nan() { f64::INFINITY } else { w.max(x) };
                }
            }
            Err(e) => {
                error.get_or_insert(e.to_string());
            }
        }
    }
    names
        .iter()
        .zip(tols)
        .zip(worst)
        .map(|((name, &tol), w)| CheckReport {
            name: name.to_string(),
            passed: error.is_none() && w <= tol && !cases.is_empty(),
            worst: w,
            tolerance: tol,
            cases: cases.len(),
            error: error.clone(),
        })
        .collect()
}

/// A check that could not even build its cases.
fn setup_failure(names: &[&str], tols: &[f64], e: Error) -> Vec<CheckReport> {
    names
        .iter()
        .zip(tols)
        .map(|(n, &t)| CheckReport {
            name: n.to_string(),
            passed: false,
            worst: f64::INFINITY,
            tolerance: t,
            cases: 0,
            error: Some(e.to_string()),
        })
        .collect()
}

fn checked<I: Sync>(
    names: &[&str],
    tols: &[f64],
    cases: Result<Vec<I>>,
    f: impl Fn(&I) -> Result<Vec<f64>> + Sync,
) -> Vec<CheckReport> {
    match cases {
        Ok(c) => run(names, tols, &c, f),
        Err(e) => setup_failure(names, tols, e),
    }
}

/// `max` that propagates NaN instead of dropping it.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| nan_max(m, x.abs()))
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::NEG_INFINITY, nan_max)
}

fn q(pair: &StatePair, alpha: f64, method: QMethod) -> Result<f64> {
    Ok(q_alpha(pair, RenyiOrder::new(alpha)?, method)?.value)
}

pub const CRITERIA: [&str; 12] = [
    "representation equivalence",
    "relative entropy vs Umegaki",
    "trace representation",
    "operator identities",
    "orderings",
    "data processing",
    "classical reduction",
    "Riemann-Stieltjes machinery",
    "hypothesis-testing bounds",
    "duality",
    "skew symmetry",
    "order identity",
];

pub fn criterion(id: usize, params: &SuiteParams, cfg: &Config) -> Result<Criterion> {
    let checks = match id {
        1 => representation(params, cfg),
        2 => relent_vs_umegaki(params, cfg),
        3 => trace_representation(params, cfg),
        4 => operator_identities(params, cfg),
        5 => orderings(params, cfg),
        6 => data_processing(params, cfg),
        7 => classical_reduction(params, cfg),
        8 => rs_machinery(params, cfg),
        9 => testing_bounds(params, cfg),
        10 => duality(params, cfg),
        11 => skew_symmetry(params, cfg),
        12 => order_identity(params, cfg),
        _ => return Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    Ok(Criterion { id, title: CRITERIA[id - 1], checks })
}

pub fn all_criteria(params: &SuiteParams, cfg: &Config) -> Vec<Criterion> {
    (1..=CRITERIA.len()).map(|id| criterion(id, params, cfg).expect("ids are in range")).collect()
}

/// Absolute 1e-6 on values up to ~1e9 needs tolerances near the rounding floor.
fn tight(cfg: &Config) -> Config {
    Config { quad_abs_tol: cfg.quad_abs_tol.min(1e-11), quad_rel_tol: cfg.quad_rel_tol.min(1e-14), ..cfg.clone() }
}

fn representation(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let cfg = &tight(cfg);
    checked(
        &["Q layercake vs hs_integral", "Q layercake vs onesided"],
        &[1e-6, 1e-6],
        params.pairs(1, params.trials, cfg),
        |p| {
            let (mut hs, mut os) = (0.0f64, 0.0f64);
            for a in Q_ORDERS {
                let lc = q(p, a, QMethod::LayerCake)?;
                hs = nan_max(hs, (lc - q(p, a, QMethod::HsIntegral)?).abs());
                os = nan_max(os, (lc - q(p, a, QMethod::OneSided)?).abs());
            }
            Ok(vec![hs, os])
        },
    )
}

fn relent_vs_umegaki(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    checked(&["frenkel vs umegaki", "projection vs umegaki"], &[1e-5, 1e-5], params.pairs(1, params.trials, cfg), |p| {
        let u = umegaki(&p.rho, &p.sigma, &p.cfg)?;
        Ok(vec![
            (relative_entropy(p, RelEntMethod::Frenkel)?.value - u).abs(),
            (relative_entropy(p, RelEntMethod::Projection)?.value - u).abs(),
        ])
    })
}

fn trace_representation(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    checked(
        &["trace vs layercake, alpha > 1", "trace vs layercake, alpha < 1"],
        &[1e-5, 1e-4],
        params.pairs(1, params.trials, cfg),
        |p| {
            let diff = |a: f64| -> Result<f64> {
                let order = RenyiOrder::new(a)?;
                Ok((q_alpha_trace(p, order)?.value - q(p, a, QMethod::LayerCake)?).abs())
            };
            Ok(vec![max_abs([diff(1.5)?, diff(2.0)?, diff(3.0)?]), max_abs([diff(0.3)?, diff(0.5)?])])
        },
    )
}

fn operator_identities(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let cfg = &tight(cfg);
    let cases: Result<Vec<(QuantumState, HermitianOperator, QuantumState)>> = (0..50)
        .map(|i| {
            let mut rng = params.rng(4, i);
            let d = params.dim(i);
            Ok((random_state(d, d, &mut rng, cfg)?, random_hermitian(d, &mut rng), random_state(d, d, &mut rng, cfg)?))
        })
        .collect();
    checked(&["dlog layer cake vs Frechet", "change of variables"], &[1e-6, 1e-6], cases, |(a, h, b)| {
        let dlog = dlog_layer_cake(a.op(), h, cfg)?.op.frobenius_distance(&frechet_dlog(a.op(), h, cfg)?);
        let lmax = StatePair::new(a.clone(), b.clone(), cfg)?.profile.lambda_max;
        let mut cov = 0.0f64;
        for func in [ScalarFunction::indicator(0.0, lmax), ScalarFunction::power(1), ScalarFunction::power(2)] {
            let (lhs, rhs) = change_of_variables_pair(a.op(), b.op(), &func, cfg)?;
            cov = nan_max(cov, lhs.op.frobenius_distance(&rhs.op));
        }
        Ok(vec![dlog, cov])
    })
}

fn orderings(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let tol = 1e-9;
    checked(
        &["Q <= Petz for alpha < 1", "Q <= sandwiched for alpha > 1"],
        &[tol, tol],
        params.pairs(5, 2 * params.trials, cfg),
        |p| {
            let mut petz = f64::NEG_INFINITY;
            let mut sw = f64::NEG_INFINITY;
            for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
                petz = nan_max(petz, q(p, a, QMethod::LayerCake)? - petz_q(&p.rho, &p.sigma, a, cfg)?);
            }
            for a in [1.2, 1.5, 2.0, 3.0] {
                sw = nan_max(sw, q(p, a, QMethod::LayerCake)? - sandwiched_q(&p.rho, &p.sigma, a, cfg)?);
            }
            Ok(vec![petz, sw])
        },
    )
}

fn data_processing(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let cases: Result<Vec<(StatePair, StatePair)>> = (0..50)
        .map(|i| {
            let mut rng = params.rng(6, i);
            let (din, dout) = (params.dim(i), params.dim(i + 1));
            let pair = random_pair(din, &mut rng, cfg)?;
            let ch = random_channel(din, dout, 2 + i % 2, &mut rng)?;
            let out = StatePair::new(ch.apply_state(&pair.rho, cfg)?, ch.apply_state(&pair.sigma, cfg)?, cfg)?;
            Ok((pair, out))
        })
        .collect();
    let fs = [ConvexFunctionSpec::kl(), ConvexFunctionSpec::chi2(), ConvexFunctionSpec::total_variation()];
    checked(
        &["hockey-stick under channels", "f-divergences under channels", "Renyi under channels"],
        &[1e-8, 1e-8, 1e-8],
        cases,
        |(p, out)| {
            let mut e = f64::NEG_INFINITY;
            for g in [0.25, 0.5, 1.0, 2.0, 4.0] {
                e = nan_max(e, e_gamma(&out.rho, &out.sigma, g, cfg)?.value - e_gamma(&p.rho, &p.sigma, g, cfg)?.value);
            }
            let mut fd = f64::NEG_INFINITY;
            for f in &fs {
                fd = nan_max(
                    fd,
                    f_divergence(out, f, FMethod::LayerCake)?.value - f_divergence(p, f, FMethod::LayerCake)?.value,
                );
            }
            let mut dr = f64::NEG_INFINITY;
            for a in [0.3, 0.5, 0.9, 1.5, 2.0, 3.0] {
                let order = RenyiOrder::new(a)?;
                dr = nan_max(
                    dr,
                    d_alpha(out, order, QMethod::LayerCake)?.value - d_alpha(p, order, QMethod::LayerCake)?.value,
                );
            }
            Ok(vec![e, fd, dr])
        },
    )
}

/// The f-divergences exercised by the classical and duality checks.
fn builtin_fs() -> Vec<ConvexFunctionSpec> {
    vec![
        ConvexFunctionSpec::kl(),
        ConvexFunctionSpec::chi2(),
        ConvexFunctionSpec::total_variation(),
        ConvexFunctionSpec::hinge(),
    ]
}

/// `|got − want|`, divided by `|want|` once that exceeds one.
fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

fn classical_reduction(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let cases: Result<Vec<(StatePair, Vec<f64>, Vec<f64>)>> = (0..params.trials)
        .map(|i| {
            let (r, s) = random_commuting_pair(params.dim(i), &mut params.rng(7, i), cfg)?;
            let eig = r.op().eigh()?;
            let q = eig.expectations(s.op());
            let pair = StatePair::new(r, s, cfg)?;
            Ok((pair, eig.values.to_vec(), q))
        })
        .collect();
    let mut fs = builtin_fs();
    fs.push(ConvexFunctionSpec::hellinger(0.5));
    fs.push(ConvexFunctionSpec::hellinger(2.0));
    fs.push(ConvexFunctionSpec::power(3.0));
    checked(
        &[
            "Renyi (layercake, hs, onesided)",
            "Renyi (trace)",
            "Renyi (Petz, sandwiched oracles)",
            "f-divergence (layercake, hs)",
            "f-divergence (trace)",
            "f-divergence (rs, dual optimum)",
            "relative entropy (all methods)",
            "hockey-stick",
        ],
        &[1e-10; 8],
        cases,
        |(pair, p, qv)| {
            let mut out = vec![0.0f64; 8];
            for a in Q_ORDERS {
                let order = RenyiOrder::new(a)?;
                let want = classical_divergence(p, qv, DivKind::Renyi(a))?;
                for &m in QMethod::ALL.iter() {
                    out[0] = nan_max(out[0], rel(d_alpha(pair, order, m)?.value, want));
                }
                let tq = q_alpha_trace(pair, order)?.value;
                out[1] = nan_max(out[1], rel(tq.ln() / (a - 1.0), want));
                let petz = petz_q(&pair.rho, &pair.sigma, a, cfg)?.ln() / (a - 1.0);
                let sw = sandwiched_q(&pair.rho, &pair.sigma, a, cfg)?.ln() / (a - 1.0);
                out[2] = nan_max(nan_max(out[2], rel(petz, want)), rel(sw, want));
            }
            for f in &fs {
                let want = classical_divergence(p, qv, DivKind::F(f))?;
                for m in [FMethod::LayerCake, FMethod::HsIntegral] {
                    out[3] = nan_max(out[3], rel(f_divergence(pair, f, m)?.value, want));
                }
                out[4] = nan_max(out[4], rel(f_divergence(pair, f, FMethod::Trace)?.value, want));
                out[5] = nan_max(out[5], rel(f_div_rs(pair, f)?.value, want));
                out[5] = nan_max(out[5], rel(duality_optimum(pair, f)?.value, want));
            }
            let kl = classical_divergence(p, qv, DivKind::Renyi(1.0))?;
            for &m in RelEntMethod::ALL.iter() {
                out[6] = nan_max(out[6], rel(relative_entropy(pair, m)?.value, kl));
            }
            out[6] = nan_max(out[6], rel(relative_entropy_rs(pair)?.value, kl));
            out[6] = nan_max(out[6], rel(umegaki(&pair.rho, &pair.sigma, cfg)?, kl));
            for g in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let want: f64 = p.iter().zip(qv.iter()).map(|(&x, &y)| (x - g * y).max(0.0)).sum();
                out[7] = nan_max(out[7], rel(e_gamma(&pair.rho, &pair.sigma, g, cfg)?.value, want));
            }
            Ok(out)
        },
    )
}

fn rs_machinery(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let fs = [ConvexFunctionSpec::kl(), ConvexFunctionSpec::chi2(), ConvexFunctionSpec::total_variation()];
    checked(
        &["f_div_rs vs layercake", "change of measure", "monotone P and Q"],
        &[1e-6, 1e-8, 1e-12],
        params.pairs(8, params.trials, cfg),
        |pair| {
            let mut div = 0.0f64;
            for f in &fs {
                div = nan_max(div, (f_div_rs(pair, f)?.value - f_divergence(pair, f, FMethod::LayerCake)?.value).abs());
            }
            let com = max_abs([
                change_of_measure_residual(pair, |_| 1.0)?,
                change_of_measure_residual(pair, |g| g)?,
                change_of_measure_residual(pair, f64::ln)?,
            ]);
            let hi = 1.25 * pair.profile.lambda_max;
            let mut drop = 0.0f64;
            for w in [Weight::Rho, Weight::Sigma] {
                let d = build_rs_distribution(pair, w)?;
                let mut prev = d.value(0.0)?;
                for k in 1..1000 {
                    let v = d.value(hi * k as f64 / 999.0)?;
                    drop = nan_max(drop, prev - v);
                    prev = v;
                }
            }
            Ok(vec![div, com, drop])
        },
    )
}

fn commuting_hand_pair(cfg: &Config) -> Result<StatePair> {
    StatePair::new(QuantumState::from_real_diag(&[0.75, 0.25])?, QuantumState::maximally_mixed(2), cfg)
}

fn testing_bounds(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let mut checks = checked(
        &[
            "threshold-test bounds hold",
            "Hoeffding and Chernoff bounds hold",
            "Markov inequality, f = (x-1)_+",
            "layer-cake bound <= sandwiched",
            "layer-cake bound <= Petz",
        ],
        &[0.0, 0.0, 0.0, BOUND_SLACK, BOUND_SLACK],
        params.qubit_pairs(9, 50, cfg),
        |pair| {
            let mut flags = 0.0;
            for r in bounds_grid(pair, &[1, 2, 3], &[-0.2, 0.0, 0.2], &[0.5, 2.0])? {
                if !r.all_hold() {
                    flags += 1.0;
                }
            }
            let mut asym = 0.0;
            let mut markov = 0.0;
            let mut sw = f64::NEG_INFINITY;
            let mut petz = f64::NEG_INFINITY;
            let hinge = ConvexFunctionSpec::hinge();
            for n in [1, 2, 3] {
                let spec = TestSpec { n, a: 0.0, alpha: RenyiOrder::new(0.5)?, r: 0.05, p: 0.5 };
                let rep = asym_exponents(pair, &spec)?;
                if !(rep.hoeffding.holds.0 && rep.hoeffding.holds.1 && rep.chernoff.holds) {
                    asym += 1.0;
                }
                let pn = pair.tensor_power(n)?;
                for theta in [0.25, 0.5, 0.75] {
                    let c = 1.0 + theta * (pn.profile.lambda_max - 1.0);
                    if !markov_bound(&pn, &hinge, c)?.holds {
                        markov += 1.0;
                    }
                }
                for a in [-0.2, 0.0, 0.2] {
                    let (layer, sand) = sandwiched_comparison(pair, n, a, 2.0)?;
                    sw = nan_max(sw, layer - sand);
                    let (layer, pz) = petz_relaxation(pair, n, a, 0.5)?;
                    petz = nan_max(petz, layer - pz);
                }
            }
            Ok(vec![flags, asym, markov, sw, petz])
        },
    );
    checks.extend(checked(
        &["hand cell: bound 0.686", "hand cell: measured 0.5"],
        &[1e-3, 1e-3],
        commuting_hand_pair(cfg).map(|p| vec![p]),
        |pair| {
            let spec = TestSpec { n: 1, a: 0.3, alpha: RenyiOrder::new(2.0)?, r: 0.0, p: 0.5 };
            let r = prop_bounds(pair, &spec)?;
            let holds = if r.holds_type2 { 0.0 } else { f64::INFINITY };
            Ok(vec![(r.bound_type2 - 0.686).abs().max(holds), (r.type2_error - 0.5).abs()])
        },
    ));
    checks
}

/// Random piecewise-linear witness kept inside the conjugate domain.
fn random_witness(f: &ConvexFunctionSpec, lmax: f64, rng: &mut impl Rng) -> DualWitness {
    let mut xs: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.2 * lmax)).collect();
    xs.sort_by(f64::total_cmp);
    let knots = xs.into_iter().map(|x| (x, rng.gen_range(-3.0..3.0))).collect();
    let (lo, hi) = f.conjugate_domain;
    let lo = if lo.is_finite() { lo } else { f64::NEG_INFINITY };
    let hi = if hi.is_finite() { hi } else { f64::INFINITY };
    DualWitness::piecewise_linear(knots).clipped(lo, hi)
}

fn duality(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    checked(
        &["strong duality at g = f'", "weak duality, random witnesses", "Hellinger-2 vs shifted chi2"],
        &[1e-6, 1e-8, 1e-8],
        params.pairs(10, params.trials, cfg).map(|v| v.into_iter().enumerate().collect::<Vec<_>>()),
        |(i, pair)| {
            let mut rng = params.rng(11, *i);
            let mut strong = 0.0f64;
            let mut weak = f64::NEG_INFINITY;
            for f in builtin_fs() {
                let target = f_div_rs(pair, &f)?.value;
                strong = nan_max(strong, (duality_optimum(pair, &f)?.value - target).abs());
                let gs: Vec<DualWitness> =
                    (0..50).map(|_| random_witness(&f, pair.profile.lambda_max, &mut rng)).collect();
                weak = nan_max(weak, max_of(duality_objectives(pair, &f, &gs)?.iter().map(|o| o.value() - target)));
            }
            let knots: Vec<(f64, f64)> = {
                let mut xs: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.2 * pair.profile.lambda_max)).collect();
                xs.sort_by(f64::total_cmp);
                xs.into_iter().map(|x| (x, rng.gen_range(-1.0..3.0))).collect()
            };
            let shifted: Vec<(f64, f64)> = knots.iter().map(|&(x, y)| (x, y - 2.0)).collect();
            let hel =
                duality_objectives(pair, &ConvexFunctionSpec::hellinger(2.0), &[DualWitness::piecewise_linear(knots)])?;
            let chi = duality_objectives(pair, &ConvexFunctionSpec::chi2(), &[DualWitness::piecewise_linear(shifted)])?;
            Ok(vec![strong, weak, (hel[0].value() - chi[0].value()).abs()])
        },
    )
}

fn skew_symmetry(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    checked(&["skew symmetry"], &[1e-8], params.pairs(1, params.trials, cfg), |p| {
        Ok(vec![max_abs([
            skew_symmetry_residual(p, 0.25)?,
            skew_symmetry_residual(p, 0.5)?,
            skew_symmetry_residual(p, 0.75)?,
        ])])
    })
}

fn order_identity(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    checked(&["order identity"], &[1e-6], params.pairs(12, 50, cfg), |p| {
        let mut worst = 0.0f64;
        for a in [1.5, 2.0, 2.5, 3.0] {
            worst = nan_max(worst, order_identity_residual(&p.rho, &p.sigma, a, cfg)?);
        }
        Ok(vec![worst])
    })
}

/// Further module invariants reported by `verify` alongside the criteria.
pub fn module_checks(params: &SuiteParams, cfg: &Config) -> Vec<CheckReport> {
    let pairs = params.pairs(20, params.trials, cfg);
    let mut out = checked(
        &[
            "E_1 is half the trace distance",
            "E_gamma convex and nonincreasing",
            "E_gamma via noncommutative minimum",
            "divergences nonnegative",
            "f-divergence methods agree",
            "relative entropy methods agree",
            "Petz limit at alpha -> 1",
            "log difference projection integral",
            "RS curves reach total mass",
        ],
        &[1e-12, 1e-12, 1e-10, 1e-10, 1e-6, 1e-5, 1e-3, 1e-6, 1e-9],
        pairs,
        |p| {
            let diff = p.rho.combine(1.0, &p.sigma, -1.0);
            let e1 = (e_gamma(&p.rho, &p.sigma, 1.0, cfg)?.value - 0.5 * trace_norm(&diff)?).abs();
            let hi = 1.5 * p.profile.lambda_max;
            let grid: Vec<f64> = (0..=40).map(|k| hi * k as f64 / 40.0).collect();
            let vals: Result<Vec<f64>> = grid.iter().map(|&g| Ok(e_gamma(&p.rho, &p.sigma, g, cfg)?.value)).collect();
            let vals = vals?;
            let mut shape = 0.0f64;
            for w in vals.windows(3) {
                shape = nan_max(nan_max(shape, w[1] - w[0]), 2.0 * w[1] - w[0] - w[2]);
            }
            let mut nc = 0.0f64;
            for g in [0.5, 1.0, 2.0] {
                let min = nc_min_trace(&p.rho, &p.sigma.scale(g))?;
                nc = nan_max(nc, (e_gamma(&p.rho, &p.sigma, g, cfg)?.value - (p.rho.trace() - min)).abs());
            }
            let mut neg = 0.0f64;
            let mut fagree = 0.0f64;
            for f in [ConvexFunctionSpec::kl(), ConvexFunctionSpec::chi2(), ConvexFunctionSpec::hellinger(0.5)] {
                let vals: Vec<f64> =
                    FMethod::ALL.iter().map(|&m| f_divergence(p, &f, m).map(|r| r.value)).collect::<Result<_>>()?;
                neg = nan_max(neg, -vals[0]);
                fagree = nan_max(fagree, max_abs(vals.iter().map(|v| v - vals[0])));
            }
            for a in Q_ORDERS {
                neg = nan_max(neg, -d_alpha(p, RenyiOrder::new(a)?, QMethod::LayerCake)?.value);
            }
            let rel: Vec<f64> =
                RelEntMethod::ALL.iter().map(|&m| relative_entropy(p, m).map(|r| r.value)).collect::<Result<_>>()?;
            let relagree = max_abs(rel.iter().map(|v| v - rel[0]));
            let u = umegaki(&p.rho, &p.sigma, cfg)?;
            let petz_lim = (petz_q(&p.rho, &p.sigma, 1.0 - 1e-4, cfg)?.ln() / -1e-4 - u).abs();
            let ld = log_difference_projint(&p.rho, &p.sigma, cfg)?.op;
            let exact = p.rho.map_spectrum(f64::ln)?.combine(1.0, &p.sigma.map_spectrum(f64::ln)?, -1.0);
            let logdiff = ld.frobenius_distance(&exact);
            let mut mass = 0.0f64;
            for w in [Weight::Rho, Weight::Sigma] {
                let d = build_rs_distribution(p, w)?;
                mass = nan_max(mass, (d.value(d.support_max * (1.0 + 1e-9) + 1e-12)? - d.total_mass).abs());
            }
            Ok(vec![e1, shape, nc, neg, fagree, relagree, petz_lim, logdiff, mass])
        },
    );
    let channels: Result<Vec<_>> = (0..params.trials)
        .map(|i| {
            let mut rng = params.rng(21, i);
            let (din, dout) = (params.dim(i), params.dim(i + 1));
            Ok((random_channel(din, dout, 2, &mut rng)?, random_state(din, din, &mut rng, cfg)?))
        })
        .collect();
    out.extend(checked(&["channels are trace preserving"], &[1e-10], channels, |(ch, s)| {
        let image = ch.apply(s.op())?;
        let min_eig = image.eigh()?.min();
        Ok(vec![ch.completeness_residual.max((image.trace() - 1.0).abs()).max(-min_eig)])
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(SuiteParams::new(0, vec![2], 1).is_err());
        assert!(SuiteParams::new(3, vec![], 1).is_err());
        assert!(SuiteParams::new(3, vec![1], 1).is_err());
        assert!(SuiteParams::new(3, vec![2, 3], 1).is_ok());
    }

    #[test]
    fn run_flags_errors_and_nan() {
        let r = run(&["a"], &[1.0], &[0.5, f64::NAN], |&x| Ok(vec![x]));
        assert!(!r[0].passed && r[0].worst.is_infinite());
        let r = run(&["a"], &[1.0], &[0.5, 2.0], |&x| {
            if x > 1.0 {
                Err(Error::InvalidArgument("boom".into()))
            } else {
                Ok(vec![x])
            }
        });
        assert!(!r[0].passed && r[0].error.as_deref().unwrap().contains("boom"));
        let r = run(&["a"], &[1.0], &[0.5, 0.25], |&x| Ok(vec![x]));
        assert!(r[0].passed && r[0].worst == 0.5);
    }

    #[test]
    fn small_suite_is_deterministic() {
        let params = SuiteParams::new(3, vec![2], 7).unwrap();
        let cfg = Config::default();
        let a = criterion(11, &params, &cfg).unwrap();
        let b = criterion(11, &params, &cfg).unwrap();
        assert!(a.passed(), "{:?}", a.checks);
        assert_eq!(a.checks[0].worst, b.checks[0].worst);
    }
}
