//! Convex generators `f` with derivatives, kinks and convex conjugates.

use std::fmt;
use std::sync::Arc;

use crate::quadrature::Endpoint;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex function on `[0, ∞)` together with the data every
/// representation needs.
#[derive(Clone)]
pub struct ConvexFunctionSpec {
    pub name: String,
    f: RealFn,
    f_prime: RealFn,
    f_second: Option<RealFn>,
    conjugate: RealFn,
    /// Closed interval outside which `f★ = +∞`.
    pub conjugate_domain: (f64, f64),
    /// `(x, jump of f′ at x)`, ascending.
    pub kinks: Vec<(f64, f64)>,
    /// Behavior of `f′` as `x → 0⁺`.
    pub f_prime_at_zero: Endpoint,
    /// Behavior of `f″` as `x → 0⁺`.
    pub f_second_at_zero: Endpoint,
    /// Whether `f` is nondecreasing on `[0, ∞)`.
    nondecreasing: bool,
}

impl fmt::Debug for ConvexFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunctionSpec").field("name", &self.name).field("kinks", &self.kinks).finish()
    }
}

impl ConvexFunctionSpec {
    /// Assembles a custom generator. `conjugate` must return `+∞` outside
    /// `conjugate_domain`.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_second: Option<RealFn>,
        conjugate: impl Fn(f64) -> f64 + Send + Sync + 'static,
        conjugate_domain: (f64, f64),
        kinks: Vec<(f64, f64)>,
    ) -> Self {
        ConvexFunctionSpec {
            name: name.into(),
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
            f_second,
            conjugate: Arc::new(conjugate),
            conjugate_domain,
            kinks,
            f_prime_at_zero: Endpoint::Regular,
            f_second_at_zero: Endpoint::Regular,
            nondecreasing: false,
        }
    }

    /// `x ln x`, conjugate `e^{y−1}`.
    pub fn kl() -> Self {
        let mut s = Self::custom(
            "xlogx",
            |x| if x > 0.0 { x * x.ln() } else { 0.0 },
            |x| 1.0 + x.ln(),
            Some(Arc::new(|x: f64| 1.0 / x)),
            |y| (y - 1.0).exp(),
            (f64::NEG_INFINITY, f64::INFINITY),
            vec![],
        );
        s.f_prime_at_zero = Endpoint::Log;
        s.f_second_at_zero = Endpoint::Power(-1.0);
        s
    }

    /// `(x − 1)²`; the conjugate on `[0, ∞)` is `y + y²/4` for `y ≥ −2`, else `−1`.
    pub fn chi2() -> Self {
        Self::custom(
            "chi2",
            |x| (x - 1.0) * (x - 1.0),
            |x| 2.0 * (x - 1.0),
            Some(Arc::new(|_| 2.0)),
            |y| if y >= -2.0 { y + 0.25 * y * y } else { -1.0 },
            (f64::NEG_INFINITY, f64::INFINITY),
            vec![],
        )
    }

    /// `½|x − 1|` with `f′ = ±½` (value `+½` at the kink).
    pub fn total_variation() -> Self {
        Self::custom(
            "tv",
            |x| 0.5 * (x - 1.0).abs(),
            |x| if x < 1.0 { -0.5 } else { 0.5 },
            Some(Arc::new(|_| 0.0)),
            |y| if (-0.5..=0.5).contains(&y) { y } else { f64::INFINITY },
            (-0.5, 0.5),
            vec![(1.0, 1.0)],
        )
    }

    /// `(x − 1)_+`.
    pub fn hinge() -> Self {
        let mut s = Self::custom(
            "hinge",
            |x| (x - 1.0).max(0.0),
            |x| if x < 1.0 { 0.0 } else { 1.0 },
            Some(Arc::new(|_| 0.0)),
            |y| if y <= 1.0 { y.max(0.0) } else { f64::INFINITY },
            (f64::NEG_INFINITY, 1.0),
            vec![(1.0, 1.0)],
        );
        s.nondecreasing = true;
        s
    }

    /// Hellinger generator `(x^α − 1)/(α − 1)`; `H_α = D_f`.
    pub fn hellinger(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha != 1.0, "Hellinger order must be positive and not 1");
        let a = alpha;
        let conj_power = a / (a - 1.0);
        let conjugate = move |y: f64| {
            let z = (a - 1.0) * y / a;
            if a > 1.0 {
                if y >= 0.0 {
                    z.powf(conj_power) + 1.0 / (a - 1.0)
                } else {
                    1.0 / (a - 1.0)
                }
            } else if y < 0.0 {
                z.powf(conj_power) + 1.0 / (a - 1.0)
            } else {
                f64::INFINITY
            }
        };
        let domain = if a > 1.0 { (f64::NEG_INFINITY, f64::INFINITY) } else { (f64::NEG_INFINITY, 0.0) };
        let mut s = Self::custom(
            format!("hellinger({alpha})"),
            move |x| (x.powf(a) - 1.0) / (a - 1.0),
            move |x| a * x.powf(a - 1.0) / (a - 1.0),
            Some(Arc::new(move |x: f64| a * x.powf(a - 2.0))),
            conjugate,
            domain,
            vec![],
        );
        if a < 1.0 {
            s.f_prime_at_zero = Endpoint::Power(a - 1.0);
        }
        s.f_second_at_zero = Endpoint::Power(a - 2.0);
        s
    }

    /// `x^α` for `α > 1`, whose divergence is `Q_α`. Not normalized: `f(1) = 1`.
    pub fn power(alpha: f64) -> Self {
        assert!(alpha > 1.0, "power generator needs alpha > 1");
        let a = alpha;
        let mut s = Self::custom(
            format!("power({alpha})"),
            move |x| x.powf(a),
            move |x| a * x.powf(a - 1.0),
            Some(Arc::new(move |x: f64| a * (a - 1.0) * x.powf(a - 2.0))),
            move |y| if y <= 0.0 { 0.0 } else { (a - 1.0) * (y / a).powf(a / (a - 1.0)) },
            (f64::NEG_INFINITY, f64::INFINITY),
            vec![],
        );
        s.nondecreasing = true;
        s.f_second_at_zero = Endpoint::Power(a - 2.0);
        s
    }

    /// Looks up a built-in generator by CLI name.
    pub fn by_name(name: &str, alpha: Option<f64>) -> Option<Self> {
        match name {
            "xlogx" | "kl" => Some(Self::kl()),
            "chi2" => Some(Self::chi2()),
            "tv" => Some(Self::total_variation()),
            "hinge" => Some(Self::hinge()),
            "hellinger" => alpha.filter(|&a| a > 0.0 && a != 1.0).map(Self::hellinger),
            _ => None,
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        (self.f_prime)(x)
    }

    /// `x f′(x)`, with its limit `0` at `x = 0`.
    pub fn x_f_prime(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            x * (self.f_prime)(x)
        }
    }

    pub fn f_second(&self, x: f64) -> Option<f64> {
        self.f_second.as_ref().map(|g| g(x))
    }

    pub fn has_second(&self) -> bool {
        self.f_second.is_some()
    }

    pub fn f_at_0(&self) -> f64 {
        self.f(0.0)
    }

    /// `f★(y)`, `+∞` off the domain.
    pub fn conjugate(&self, y: f64) -> f64 {
        let (lo, hi) = self.conjugate_domain;
        if y < lo || y > hi {
            f64::INFINITY
        } else {
            (self.conjugate)(y)
        }
    }

    pub fn in_conjugate_domain(&self, y: f64) -> bool {
        self.conjugate(y).is_finite()
    }

    pub fn kink_points(&self) -> Vec<f64> {
        self.kinks.iter().map(|k| k.0).collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    /// Midpoint convexity on a grid over `[0, hi]`; returns the worst violation.
    pub fn convexity_defect(&self, hi: f64, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..=n {
                let x = hi * i as f64 / n as f64;
                let y = hi * j as f64 / n as f64;
                let d = self.f(0.5 * (x + y)) - 0.5 * (self.f(x) + self.f(y));
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Worst violation of `f(x) + f★(y) ≥ xy` over the product grid.
    pub fn fenchel_young_defect(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in xs {
            for &y in ys {
                let c = self.conjugate(y);
                if c.is_finite() {
                    worst = worst.max(x * y - self.f(x) - c);
                }
            }
        }
        worst
    }
}
