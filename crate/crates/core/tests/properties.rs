//! Randomized invariants over seeded state ensembles.

use proptest::prelude::*;

use qdiv::config::Config;
use qdiv::divergences::{d_alpha, f_divergence, ConvexFunctionSpec, FMethod, QMethod, RenyiOrder};
use qdiv::duality::{duality_objective, DualWitness};
use qdiv::hockey_stick::{e_gamma, nc_min_trace, trace_norm};
use qdiv::linalg::{frechet_dlog, Band, HermitianOperator, StatePair, ThresholdSplit};
use qdiv::oracles::{
    classical_divergence, petz_q, random_channel, random_commuting_pair, random_pair, seeded_rng, umegaki, DivKind,
};
use qdiv::quadrature::{integrate_piecewise, rs_darboux_bounds, rs_integrate, StieltjesCurve};
use qdiv::rs_dist::{build_rs_distribution, f_div_rs, Weight};

fn cfg() -> Config {
    Config::default()
}

fn pair(dim: usize, seed: u64) -> StatePair {
    random_pair(dim, &mut seeded_rng(seed), &cfg()).unwrap()
}

fn commuting(dim: usize, seed: u64) -> StatePair {
    let c = cfg();
    let (r, s) = random_commuting_pair(dim, &mut seeded_rng(seed), &c).unwrap();
    StatePair::new(r, s, &c).unwrap()
}

fn builtin_fs() -> Vec<ConvexFunctionSpec> {
    vec![
        ConvexFunctionSpec::kl(),
        ConvexFunctionSpec::chi2(),
        ConvexFunctionSpec::total_variation(),
        ConvexFunctionSpec::hinge(),
        ConvexFunctionSpec::hellinger(0.5),
        ConvexFunctionSpec::hellinger(2.0),
    ]
}

/// Eigenvalues of `ρ` and the matching diagonal of `σ` in `ρ`'s eigenbasis.
fn classical(p: &StatePair) -> (Vec<f64>, Vec<f64>) {
    let e = p.rho.eigh().unwrap();
    let q = e.expectations(&p.sigma);
    let clip = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
    (clip(e.values.clone()), clip(q))
}

fn dims() -> impl Strategy<Value = usize> {
    2usize..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_bands_are_complementary(dim in dims(), seed in any::<u64>(), gamma in 0.0f64..6.0) {
        let p = pair(dim, seed);
        let s = ThresholdSplit::new(&p.rho, &p.sigma, gamma, None, &p.cfg).unwrap();
        let sum = s.projector(Band::Positive).op.combine(1.0, &s.projector(Band::NonPositive).op, 1.0);
        prop_assert!(sum.frobenius_distance(&HermitianOperator::identity(dim)) < 1e-12);
        prop_assert_eq!(s.rank(Band::Positive) + s.rank(Band::NonPositive), dim);
        let p2 = s.projector(Band::Positive).op;
        let sq = HermitianOperator::from_matrix(p2.matrix() * p2.matrix());
        prop_assert!(sq.frobenius_distance(&p2) < 1e-12);
    }

    #[test]
    fn positive_rank_is_nonincreasing(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        let hi = 1.5 * p.profile.lambda_max;
        let mut prev = dim;
        for k in 0..=200 {
            let g = hi * k as f64 / 200.0;
            let r = ThresholdSplit::new(&p.rho, &p.sigma, g, None, &p.cfg).unwrap().rank(Band::Positive);
            prop_assert!(r <= prev, "rank rose at {g}");
            let below = p.profile.breakpoints.iter().filter(|&&b| b > g).count();
            prop_assert_eq!(r, below);
            prev = r;
        }
    }

    #[test]
    fn breakpoints_are_generalized_eigenvalues(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        for &g in &p.profile.breakpoints {
            let e = p.rho.combine(1.0, &p.sigma, -g).eigh().unwrap();
            let smallest = e.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let scale = p.rho.frobenius_norm() + g * p.sigma.frobenius_norm();
            prop_assert!(smallest <= 1e-10 * scale, "gamma {g}: {smallest}");
        }
    }

    #[test]
    fn dlog_in_own_direction_is_identity(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        let d = frechet_dlog(&p.rho, &p.rho, &p.cfg).unwrap();
        prop_assert!(d.frobenius_distance(&HermitianOperator::identity(dim)) < 1e-9);
    }

    #[test]
    fn hockey_stick_identities(dim in dims(), seed in any::<u64>(), gamma in 0.0f64..4.0) {
        let p = pair(dim, seed);
        let e1 = e_gamma(&p.rho, &p.sigma, 1.0, &p.cfg).unwrap().value;
        let tn = trace_norm(&p.rho.combine(1.0, &p.sigma, -1.0)).unwrap();
        prop_assert!((e1 - 0.5 * tn).abs() < 1e-12);
        let v = e_gamma(&p.rho, &p.sigma, gamma, &p.cfg).unwrap();
        let via_min = p.rho.trace() - nc_min_trace(&p.rho, &p.sigma.scale(gamma)).unwrap();
        prop_assert!((v.value - via_min).abs() < 1e-12);
        prop_assert!(v.left_deriv <= v.right_deriv + 1e-15);
    }

    #[test]
    fn hockey_stick_is_convex_nonincreasing(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        let hi = 1.2 * p.profile.lambda_max;
        let vals: Vec<f64> = (0..=80)
            .map(|k| e_gamma(&p.rho, &p.sigma, hi * k as f64 / 80.0, &p.cfg).unwrap().value)
            .collect();
        for w in vals.windows(3) {
            prop_assert!(w[1] <= w[0] + 1e-14);
            prop_assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-14);
        }
    }

    #[test]
    fn hockey_stick_right_derivative(dim in dims(), seed in any::<u64>(), t in 0.1f64..0.9) {
        let p = pair(dim, seed);
        let bps = &p.profile.breakpoints;
        // strictly between two breakpoints
        let k = bps.len() / 2;
        let g = bps[k - 1] + t * (bps[k] - bps[k - 1]);
        let v = e_gamma(&p.rho, &p.sigma, g, &p.cfg).unwrap();
        let h = 1e-7 * (bps[k] - bps[k - 1]);
        let fd = (e_gamma(&p.rho, &p.sigma, g + h, &p.cfg).unwrap().value - v.value) / h;
        prop_assert!((fd - v.right_deriv).abs() < 1e-5 * (1.0 + v.right_deriv.abs()), "{fd} vs {}", v.right_deriv);
    }

    #[test]
    fn channels_contract_hockey_stick(dim in dims(), seed in any::<u64>(), gamma in 0.2f64..3.0) {
        let p = pair(dim, seed);
        let mut rng = seeded_rng(seed ^ 0x5555);
        let ch = random_channel(dim, 2, 2, &mut rng).unwrap();
        let (r, s) = (ch.apply_state(&p.rho, &p.cfg).unwrap(), ch.apply_state(&p.sigma, &p.cfg).unwrap());
        prop_assert!((r.trace() - 1.0).abs() < 1e-10);
        prop_assert!(r.eigh().unwrap().min() > -1e-10);
        let after = e_gamma(&r, &s, gamma, &p.cfg).unwrap().value;
        let before = e_gamma(&p.rho, &p.sigma, gamma, &p.cfg).unwrap().value;
        prop_assert!(after <= before + 1e-10);
    }

    #[test]
    fn convex_specs_are_consistent(x in 0.0f64..20.0, y in -5.0f64..5.0) {
        for f in builtin_fs() {
            prop_assert!(f.f(1.0).abs() < 1e-15, "{}", f.name);
            if f.in_conjugate_domain(y) {
                prop_assert!(f.f(x) + f.conjugate(y) >= x * y - 1e-9, "{} at ({x}, {y})", f.name);
            }
            prop_assert!(f.convexity_defect(20.0, 200) <= 1e-10, "{}", f.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn negated_derivative_integrates_to_trace(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        let r = integrate_piecewise(
            |g| -e_gamma(&p.rho, &p.sigma, g, &p.cfg).unwrap().right_deriv,
            0.0,
            p.profile.lambda_max,
            &p.profile.breakpoints,
        )
        .unwrap();
        prop_assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn divergences_are_nonnegative(dim in dims(), seed in any::<u64>(), alpha in 0.2f64..3.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let p = pair(dim, seed);
        for f in [ConvexFunctionSpec::kl(), ConvexFunctionSpec::chi2(), ConvexFunctionSpec::total_variation()] {
            prop_assert!(f_divergence(&p, &f, FMethod::LayerCake).unwrap().value >= -1e-9);
        }
        let d = d_alpha(&p, RenyiOrder::new(alpha).unwrap(), QMethod::LayerCake).unwrap().value;
        prop_assert!(d >= -1e-9, "D_{alpha} = {d}");
    }

    #[test]
    fn commuting_pairs_reduce_to_classical(dim in dims(), seed in any::<u64>(), alpha in 0.2f64..3.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let p = commuting(dim, seed);
        let (pv, qv) = classical(&p);
        let want = classical_divergence(&pv, &qv, DivKind::Renyi(alpha)).unwrap();
        let got = d_alpha(&p, RenyiOrder::new(alpha).unwrap(), QMethod::LayerCake).unwrap().value;
        prop_assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{got} vs {want}");
        let kl = ConvexFunctionSpec::kl();
        let want = classical_divergence(&pv, &qv, DivKind::F(&kl)).unwrap();
        let got = f_div_rs(&p, &kl).unwrap().value;
        prop_assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn rs_curves_are_monotone_to_unit_mass(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        for w in [Weight::Rho, Weight::Sigma] {
            let c = build_rs_distribution(&p, w).unwrap();
            let hi = 1.25 * c.support_max;
            let mut prev = 0.0;
            for k in 0..=400 {
                let v = c.value(hi * k as f64 / 400.0).unwrap();
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
            prop_assert!((prev - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn commuting_rs_curves_are_pure_jumps(dim in dims(), seed in any::<u64>()) {
        let p = commuting(dim, seed);
        for w in [Weight::Rho, Weight::Sigma] {
            let c = build_rs_distribution(&p, w).unwrap();
            let hi = 1.25 * c.support_max;
            for k in 0..=100 {
                let s = c.smooth_curve(hi * k as f64 / 100.0).unwrap();
                prop_assert!(s.abs() < 1e-10, "{s}");
            }
        }
    }

    #[test]
    fn darboux_sums_bracket_rs_integral(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        let c = build_rs_distribution(&p, Weight::Sigma).unwrap();
        let f = |x: f64| x * x;
        let v = rs_integrate(f, &c, &[], 1e-10).unwrap().value;
        let (lo, hi) = rs_darboux_bounds(f, &c, &[], 64).unwrap();
        prop_assert!(lo <= v + 1e-9 && v <= hi + 1e-9, "{lo} <= {v} <= {hi}");
    }

    #[test]
    fn weak_duality_holds(dim in dims(), seed in any::<u64>(), ys in prop::collection::vec(-3.0f64..3.0, 4)) {
        let p = pair(dim, seed);
        let hi = 1.2 * p.profile.lambda_max;
        for f in [ConvexFunctionSpec::kl(), ConvexFunctionSpec::chi2(), ConvexFunctionSpec::total_variation()] {
            let knots: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (hi * i as f64 / 3.0, y)).collect();
            let g = match f.name.as_str() {
                "tv" => DualWitness::piecewise_linear(knots).clipped(-0.5, 0.5),
                _ => DualWitness::piecewise_linear(knots),
            };
            let obj = duality_objective(&p, &f, &g).unwrap().value();
            let d = f_div_rs(&p, &f).unwrap().value;
            prop_assert!(obj <= d + 1e-8, "{}: {obj} > {d}", f.name);
        }
    }

    #[test]
    fn petz_derivative_approaches_umegaki(dim in dims(), seed in any::<u64>()) {
        let p = pair(dim, seed);
        let u = umegaki(&p.rho, &p.sigma, &p.cfg).unwrap();
        let eps = 1e-5;
        let slope = (petz_q(&p.rho, &p.sigma, 1.0 + eps, &p.cfg).unwrap() - 1.0) / eps;
        prop_assert!((slope - u).abs() < 1e-3 * u.max(1.0), "{slope} vs {u}");
    }
}

#[test]
fn panel_rule_is_exact_on_polynomials() {
    for k in 0..=15 {
        let r = integrate_piecewise(|x| x.powi(k), 0.5, 2.0, &[]).unwrap();
        let want = (2f64.powi(k + 1) - 0.5f64.powi(k + 1)) / (k + 1) as f64;
        assert!((r.value - want).abs() < 1e-13 * want.max(1.0), "degree {k}");
    }
}
