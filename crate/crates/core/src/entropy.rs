//! Binary relative entropy and the generalized Chernoff-Hoeffding bound.
//!
//! For variables `X_i ∈ [a_i, a_i + b]` with `a_i ≤ 0` whose subset product
//! moments satisfy `E[∏_{i∈S} X_i] ≤ ∏_{i∈S} c_i`, the sum `X = Σ X_i` obeys
//!
//! ```text
//! P(X ≥ (c̄ + t) n) ≤ exp(-n · D((c̄ - ā + t)/b ‖ (c̄ - ā)/b))
//! ```
//!
//! for every `t ∈ [0, b + ā - c̄]`. Everything here is a pure function of its
//! arguments.

use serde::Serialize;

use crate::error::{param, Error, Result};

/// Tolerance used when deciding which branch of the bound applies, and for
/// the slack allowed on the parameter range checks.
pub const CASE_TOL: f64 = 1e-12;

/// Largest λ the closed form is allowed to hand to samplers that need λ < 1.
pub const LAMBDA_CAP: f64 = 1.0 - 1e-6;

/// Binary relative entropy `D(p ‖ q)` in nats.
///
/// Uses `0 ln 0 = 0` and `ln(x/0) = ∞`, so the result is `+∞` exactly when
/// `q = 0 < p` or `p < 1 = q`.
pub fn kl_div(p: f64, q: f64) -> Result<f64> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::Domain(format!("kl_div: p = {p} is outside [0, 1]")));
    }
    if !(q.is_finite() && (0.0..=1.0).contains(&q)) {
        return Err(Error::Domain(format!("kl_div: q = {q} is outside [0, 1]")));
    }
    if p == q {
        return Ok(0.0);
    }
    let head = if p == 0.0 {
        0.0
    } else if q == 0.0 {
        return Ok(f64::INFINITY);
    } else {
        // p ln(p/q) with p/q = 1 + (p - q)/q
        p * ((p - q) / q).ln_1p()
    };
    let tail = if p == 1.0 {
        0.0
    } else if q == 1.0 {
        return Ok(f64::INFINITY);
    } else {
        // (1-p) ln((1-p)/(1-q)) with (1-p)/(1-q) = 1 + (q - p)/(1 - q)
        (1.0 - p) * ((q - p) / (1.0 - q)).ln_1p()
    };
    Ok((head + tail).max(0.0))
}

/// The tuple `(a_1..a_n, b, c_1..c_n, t)` the bound is stated for.
///
/// Construction validates every range constraint, so a `BoundParams` value
/// always describes an admissible instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundParams {
    a: Vec<f64>,
    b: f64,
    c: Vec<f64>,
    t: f64,
}

impl BoundParams {
    pub fn new(a: Vec<f64>, b: f64, c: Vec<f64>, t: f64) -> Result<Self> {
        let params = Self { a, b, c, t };
        params.validate()?;
        Ok(params)
    }

    /// Same `a_i` and `c_i` for every variable.
    pub fn uniform(n: usize, a: f64, b: f64, c: f64, t: f64) -> Result<Self> {
        Self::new(vec![a; n], b, vec![c; n], t)
    }

    /// Copy with a different deviation parameter.
    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.b, self.c.clone(), t)
    }

    fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if n == 0 {
            return Err(param("n", "need at least one variable"));
        }
        if self.c.len() != n {
            return Err(param("c", format!("has {} entries but a has {n}", self.c.len())));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(param("b", format!("must be positive and finite, got {}", self.b)));
        }
        let slack = CASE_TOL * self.b.max(1.0);
        for (i, (&a, &c)) in self.a.iter().zip(&self.c).enumerate() {
            if !a.is_finite() || a > 0.0 {
                return Err(param("a", format!("a[{i}] = {a} must be finite and ≤ 0")));
            }
            if !c.is_finite() || c < a - slack || c > a + self.b + slack {
                return Err(param(
                    "c",
                    format!("c[{i}] = {c} must lie in [a[{i}], a[{i}] + b] = [{a}, {}]", a + self.b),
                ));
            }
        }
        let t_max = self.t_max();
        if !self.t.is_finite() || self.t < 0.0 || self.t > t_max + slack {
            return Err(param(
                "t",
                format!("t = {} must lie in [0, b + mean(a) - mean(c)] = [0, {t_max}]", self.t),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mean_a(&self) -> f64 {
        mean(&self.a)
    }

    pub fn mean_c(&self) -> f64 {
        mean(&self.c)
    }

    /// Upper end `b + ā - c̄` of the admissible deviation range.
    pub fn t_max(&self) -> f64 {
        (self.b + self.mean_a() - self.mean_c()).max(0.0)
    }

    /// Threshold `(c̄ + t) n` of the tail event.
    pub fn tail_threshold(&self) -> f64 {
        (self.mean_c() + self.t) * self.n() as f64
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Parameters after the affine map `x ↦ (x - a_i)/b` onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedParams {
    pub ctilde_i: Vec<f64>,
    pub ctilde: f64,
    pub ttilde: f64,
}

impl NormalizedParams {
    /// Builds normalized parameters directly, checking their ranges.
    pub fn new(ctilde: f64, ttilde: f64, n: usize) -> Result<Self> {
        if !(ctilde.is_finite() && (0.0..=1.0).contains(&ctilde)) {
            return Err(param("ctilde", format!("{ctilde} is outside [0, 1]")));
        }
        if !(ttilde.is_finite() && ttilde >= 0.0 && ttilde <= 1.0 - ctilde + CASE_TOL) {
            return Err(param("ttilde", format!("{ttilde} is outside [0, 1 - ctilde]")));
        }
        Ok(Self {
            ctilde_i: vec![ctilde; n],
            ctilde,
            ttilde: ttilde.min(1.0 - ctilde),
        })
    }

    pub fn n(&self) -> usize {
        self.ctilde_i.len()
    }

    /// `c̃ ∈ (0, 1)` and `t̃ < 1 - c̃`: the range where λ is optimized.
    pub fn is_interior(&self) -> bool {
        self.ctilde > CASE_TOL && self.ctilde < 1.0 - CASE_TOL && self.ttilde < 1.0 - self.ctilde - CASE_TOL
    }
}

pub fn normalize(params: &BoundParams) -> NormalizedParams {
    let b = params.b();
    let ctilde_i = params
        .a()
        .iter()
        .zip(params.c())
        .map(|(&a, &c)| ((c - a) / b).clamp(0.0, 1.0))
        .collect();
    let ctilde = ((params.mean_c() - params.mean_a()) / b).clamp(0.0, 1.0);
    let ttilde = (params.t() / b).clamp(0.0, 1.0 - ctilde);
    NormalizedParams {
        ctilde_i,
        ctilde,
        ttilde,
    }
}

/// The free parameter λ together with the objective value it attains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub g_value: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda = {lambda} is outside [0, 1)")))
    }
}

/// `g(λ) = (λc̃ + 1 - λ) / (1 - λ)^(1 - c̃ - t̃)`; `g(λ)^n` bounds the tail
/// probability for every λ in `[0, 1)`.
pub fn g_objective(lambda: f64, norm: &NormalizedParams) -> Result<f64> {
    check_lambda(lambda)?;
    let exponent = (1.0 - norm.ctilde - norm.ttilde).max(0.0);
    let numerator = 1.0 - lambda * (1.0 - norm.ctilde);
    Ok(numerator / (1.0 - lambda).powf(exponent))
}

/// Closed-form minimizer `λ* = t̃ / ((1 - c̃)(c̃ + t̃))` of [`g_objective`].
pub fn optimize_lambda(norm: &NormalizedParams) -> Result<LambdaChoice> {
    if !norm.is_interior() {
        return Err(Error::Domain(format!(
            "lambda optimization needs ctilde in (0, 1) and ttilde < 1 - ctilde, got ctilde = {}, ttilde = {}",
            norm.ctilde, norm.ttilde
        )));
    }
    let (c, t) = (norm.ctilde, norm.ttilde);
    let lambda = t / ((1.0 - c) * (c + t));
    Ok(LambdaChoice {
        lambda,
        g_value: g_objective(lambda, norm)?,
    })
}

/// Grid search over `points` equally spaced λ in `[0, upper]`.
///
/// Kept alongside the closed form so the two can be cross-checked.
pub fn grid_minimize_lambda(norm: &NormalizedParams, points: usize, upper: f64) -> Result<LambdaChoice> {
    check_lambda(upper)?;
    if points < 2 {
        return Err(Error::Domain("grid search needs at least two points".into()));
    }
    let mut best = LambdaChoice {
        lambda: 0.0,
        g_value: g_objective(0.0, norm)?,
    };
    for k in 1..points {
        let lambda = upper * k as f64 / (points - 1) as f64;
        let g_value = g_objective(lambda, norm)?;
        if g_value < best.g_value {
            best = LambdaChoice { lambda, g_value };
        }
    }
    Ok(best)
}

/// Which branch of the case analysis produced the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    /// `c̃ ∈ (0, 1)`, `t̃ < 1 - c̃`; the λ-optimized entropy bound.
    Interior,
    /// `c̄ = ā`: every variable sits at its lower end almost surely.
    BoundaryCEqualsA,
    /// `t = b + ā - c̄`: the tail event forces every variable to its top.
    BoundaryTMax,
}

impl BoundCase {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundCase::Interior => "interior",
            BoundCase::BoundaryCEqualsA => "boundary_c_equals_a",
            BoundCase::BoundaryTMax => "boundary_t_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEvaluation {
    pub value: f64,
    pub case: BoundCase,
    pub normalized: NormalizedParams,
    /// Optimal λ; present only in the interior case.
    pub lambda_star: Option<LambdaChoice>,
}

/// Evaluates the bound and reports which case applied.
pub fn evaluate_bound(params: &BoundParams) -> Result<BoundEvaluation> {
    let norm = normalize(params);
    let n = params.n() as f64;
    let (value, case, lambda_star) = if norm.ctilde <= CASE_TOL {
        let value = if norm.ttilde <= CASE_TOL { 1.0 } else { 0.0 };
        (value, BoundCase::BoundaryCEqualsA, None)
    } else if norm.ttilde >= 1.0 - norm.ctilde - CASE_TOL {
        let value = norm.ctilde.powi(params.n() as i32);
        (value, BoundCase::BoundaryTMax, None)
    } else {
        let d = kl_div(norm.ctilde + norm.ttilde, norm.ctilde)?;
        let value = (-d * n).exp();
        (value, BoundCase::Interior, Some(optimize_lambda(&norm)?))
    };
    Ok(BoundEvaluation {
        value: value.clamp(0.0, 1.0),
        case,
        normalized: norm,
        lambda_star,
    })
}

/// Upper bound on `P(X ≥ (c̄ + t) n)`.
pub fn chernoff_bound(params: &BoundParams) -> Result<f64> {
    evaluate_bound(params).map(|e| e.value)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Reference values computed with mpmath at 40 digits.
    const D_07_05: f64 = 0.082_282_878_505_051_846;
    const EXP_NEG_D_075_05: f64 = 0.877_382_675_301_661_64;
    const BOUND_N20_P05_T02: f64 = 0.192_885_685_223_364_22;

    #[test]
    fn kl_div_reference_values() {
        assert_eq!(kl_div(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(kl_div(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(kl_div(1.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(kl_div(1.0, 0.25).unwrap(), 4f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(kl_div(0.7, 0.5).unwrap(), D_07_05, max_relative = 1e-13);
        assert_relative_eq!(kl_div(0.0, 0.75).unwrap(), 4f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn kl_div_infinite_exactly_on_boundary() {
        assert_eq!(kl_div(0.3, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_div(1.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_div(0.3, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_div(0.0, 1.0).unwrap(), f64::INFINITY);
        assert!(kl_div(1.0, 1e-300).unwrap().is_finite());
    }

    #[test]
    fn kl_div_rejects_out_of_range() {
        for (p, q) in [(-0.1, 0.5), (0.5, 1.1), (f64::NAN, 0.5), (0.5, f64::INFINITY)] {
            assert!(matches!(kl_div(p, q), Err(Error::Domain(_))), "({p}, {q})");
        }
    }

    #[test]
    fn kl_div_nonnegative_on_grid() {
        let grid: Vec<f64> = (0..200).map(|k| k as f64 / 199.0).collect();
        for &p in &grid {
            for &q in &grid {
                let d = kl_div(p, q).unwrap();
                assert!(d >= 0.0, "D({p} ‖ {q}) = {d}");
                if p == q {
                    assert_eq!(d, 0.0);
                } else {
                    assert!(d > 0.0, "D({p} ‖ {q}) should be positive");
                }
            }
        }
    }

    #[test]
    fn kl_div_small_gap_is_accurate() {
        // D(q + h ‖ q) ≈ h² / (2 q (1 - q)) for tiny h
        let (q, h) = (0.3, 1e-7);
        let expected = h * h / (2.0 * q * (1.0 - q));
        assert_relative_eq!(kl_div(q + h, q).unwrap(), expected, max_relative = 1e-6);
    }

    #[test]
    fn normalize_examples() {
        let p = BoundParams::new(vec![0.0, 0.0], 1.0, vec![0.3, 0.5], 0.1).unwrap();
        let norm = normalize(&p);
        assert_eq!(norm.ctilde_i, vec![0.3, 0.5]);
        assert_relative_eq!(norm.ctilde, 0.4, max_relative = 1e-15);
        assert_relative_eq!(norm.ttilde, 0.1);

        let p = BoundParams::new(vec![-1.0], 2.0, vec![0.0], 0.5).unwrap();
        let norm = normalize(&p);
        assert_eq!(norm.ctilde_i, vec![0.5]);
        assert_eq!(norm.ctilde, 0.5);
        assert_eq!(norm.ttilde, 0.25);

        let p = BoundParams::new(vec![-1.0, -2.0, 0.0], 4.0, vec![1.0, 0.0, 2.0], 1.0).unwrap();
        let norm = normalize(&p);
        // (1+1)/4, (0+2)/4, (2-0)/4 and (1 - (-1))/4
        assert_eq!(norm.ctilde_i, vec![0.5, 0.5, 0.5]);
        assert_eq!(norm.ctilde, 0.5);
        assert_eq!(norm.ttilde, 0.25);
        let mean = norm.ctilde_i.iter().sum::<f64>() / 3.0;
        assert!((mean - norm.ctilde).abs() <= 1e-12);
    }

    #[test]
    fn invalid_params_name_the_field() {
        let field_of = |r: Result<BoundParams>| match r {
            Err(Error::InvalidParam { field, .. }) => field,
            other => panic!("expected InvalidParam, got {other:?}"),
        };
        assert_eq!(field_of(BoundParams::new(vec![], 1.0, vec![], 0.0)), "n");
        assert_eq!(field_of(BoundParams::uniform(2, 0.0, 0.0, 0.0, 0.0)), "b");
        assert_eq!(field_of(BoundParams::uniform(2, 0.5, 1.0, 0.5, 0.0)), "a");
        assert_eq!(field_of(BoundParams::uniform(2, 0.0, 1.0, 1.5, 0.0)), "c");
        assert_eq!(field_of(BoundParams::uniform(2, 0.0, 1.0, -0.1, 0.0)), "c");
        assert_eq!(field_of(BoundParams::uniform(2, 0.0, 1.0, 0.5, 0.6)), "t");
        assert_eq!(field_of(BoundParams::uniform(2, 0.0, 1.0, 0.5, -0.1)), "t");
        assert_eq!(field_of(BoundParams::new(vec![0.0], 1.0, vec![0.5, 0.5], 0.0)), "c");
    }

    #[test]
    fn g_objective_examples() {
        let norm = NormalizedParams::new(0.3, 0.2, 4).unwrap();
        assert_eq!(g_objective(0.0, &norm).unwrap(), 1.0);

        let norm = NormalizedParams::new(0.5, 0.0, 1).unwrap();
        assert_relative_eq!(
            g_objective(0.5, &norm).unwrap(),
            1.060_660_171_779_821_3,
            max_relative = 1e-14
        );

        let norm = NormalizedParams::new(0.5, 0.25, 1).unwrap();
        assert_relative_eq!(
            g_objective(2.0 / 3.0, &norm).unwrap(),
            EXP_NEG_D_075_05,
            max_relative = 1e-13
        );

        assert!(matches!(g_objective(1.0, &norm), Err(Error::Domain(_))));
        assert!(matches!(g_objective(-0.1, &norm), Err(Error::Domain(_))));
    }

    #[test]
    fn optimize_lambda_examples() {
        let zero = optimize_lambda(&NormalizedParams::new(0.5, 0.0, 1).unwrap()).unwrap();
        assert_eq!(zero.lambda, 0.0);
        assert_eq!(zero.g_value, 1.0);

        let norm = NormalizedParams::new(0.5, 0.25, 1).unwrap();
        let choice = optimize_lambda(&norm).unwrap();
        assert_relative_eq!(choice.lambda, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(choice.g_value, EXP_NEG_D_075_05, max_relative = 1e-13);
        let grid = grid_minimize_lambda(&norm, 10_000, LAMBDA_CAP).unwrap();
        assert!((grid.lambda - 2.0 / 3.0).abs() < 2e-4);

        let norm = NormalizedParams::new(0.25, 0.25, 1).unwrap();
        let choice = optimize_lambda(&norm).unwrap();
        assert_relative_eq!(choice.lambda, 2.0 / 3.0, max_relative = 1e-15);
        let grid = grid_minimize_lambda(&norm, 10_000, LAMBDA_CAP).unwrap();
        assert!((grid.lambda - 2.0 / 3.0).abs() < 2e-4);
        assert!(choice.g_value <= grid.g_value + 1e-9);
    }

    #[test]
    fn optimize_lambda_rejects_boundary_cases() {
        for (c, t) in [(0.0, 0.5), (1.0, 0.0), (0.4, 0.6)] {
            let norm = NormalizedParams::new(c, t, 3).unwrap();
            assert!(matches!(optimize_lambda(&norm), Err(Error::Domain(_))), "({c}, {t})");
        }
    }

    #[test]
    fn chernoff_bound_examples() {
        let p = BoundParams::uniform(20, 0.0, 1.0, 0.5, 0.2).unwrap();
        let eval = evaluate_bound(&p).unwrap();
        assert_eq!(eval.case, BoundCase::Interior);
        assert_relative_eq!(eval.value, BOUND_N20_P05_T02, max_relative = 1e-12);

        let p = BoundParams::uniform(7, 0.0, 1.0, 0.3, 0.0).unwrap();
        assert_eq!(chernoff_bound(&p).unwrap(), 1.0);

        for (prob, n) in [(0.25, 5), (0.5, 10), (0.75, 20)] {
            let p = BoundParams::uniform(n, 0.0, 1.0, prob, 1.0 - prob).unwrap();
            let eval = evaluate_bound(&p).unwrap();
            assert_eq!(eval.case, BoundCase::BoundaryTMax);
            assert!((eval.value - prob.powi(n as i32)).abs() <= 1e-12);
        }
    }

    #[test]
    fn c_equals_a_branch() {
        let p = BoundParams::new(vec![-1.0, -0.5], 2.0, vec![-1.0, -0.5], 0.0).unwrap();
        let eval = evaluate_bound(&p).unwrap();
        assert_eq!(eval.case, BoundCase::BoundaryCEqualsA);
        assert_eq!(eval.value, 1.0);

        let p = p.with_t(0.3).unwrap();
        let eval = evaluate_bound(&p).unwrap();
        assert_eq!(eval.case, BoundCase::BoundaryCEqualsA);
        assert_eq!(eval.value, 0.0);
    }

    #[test]
    fn bound_is_one_only_at_zero_deviation() {
        for c in [0.1, 0.5, 0.9, 1.0] {
            let base = BoundParams::uniform(6, 0.0, 1.0, c, 0.0).unwrap();
            assert_eq!(chernoff_bound(&base).unwrap(), 1.0);
            let t_max = base.t_max();
            if t_max > 0.0 {
                let v = chernoff_bound(&base.with_t(t_max * 0.01).unwrap()).unwrap();
                assert!(v < 1.0, "c = {c}: {v}");
            }
        }
    }

    #[test]
    fn bound_monotone_in_t_and_mean_c() {
        let base = BoundParams::uniform(12, -0.5, 2.0, 0.3, 0.0).unwrap();
        let t_max = base.t_max();
        let mut prev = f64::INFINITY;
        for k in 0..=200 {
            let v = chernoff_bound(&base.with_t(t_max * k as f64 / 200.0).unwrap()).unwrap();
            assert!(v <= prev + 1e-15, "not non-increasing at step {k}");
            prev = v;
        }

        // raise c̄ while holding the threshold c̄ + t fixed
        let target = 0.9;
        let mut prev = 0.0;
        for k in 0..=100 {
            let ctilde = 0.01 + (target - 0.01) * k as f64 / 100.0;
            let c = -0.5 + 2.0 * ctilde;
            let p = BoundParams::uniform(12, -0.5, 2.0, c, 2.0 * (target - ctilde)).unwrap();
            let v = chernoff_bound(&p).unwrap();
            assert!(v >= prev - 1e-15, "not non-decreasing at step {k}");
            prev = v;
        }
    }

    #[test]
    fn bound_not_monotone_in_mean_c_at_fixed_deviation() {
        // with t̃ fixed the exponent D(c̃ + t̃ ‖ c̃) is smallest near c̃ = (1 - t̃)/2
        let at = |ctilde: f64| chernoff_bound(&BoundParams::uniform(12, 0.0, 1.0, ctilde, 0.1).unwrap()).unwrap();
        assert!(at(0.2) < at(0.45));
        assert!(at(0.45) > at(0.8));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn binomial_series_inequality(lambda in 0.0f64..1.0, x in 0.0f64..=1.0) {
            let lhs = (1.0 - lambda).powf(1.0 - x);
            let rhs = 1.0 - (1.0 - x) * lambda;
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn closed_form_beats_grid(c in 0.01f64..0.99, frac in 0.0f64..0.99) {
            let t = frac * (1.0 - c);
            let norm = NormalizedParams::new(c, t, 1).unwrap();
            let best = optimize_lambda(&norm).unwrap();
            prop_assert!(best.lambda >= 0.0 && best.lambda < 1.0);
            let via_entropy = (-kl_div(c + t, c).unwrap()).exp();
            prop_assert!((best.g_value - via_entropy).abs() <= 1e-10 * via_entropy);
            for k in 0..200 {
                let lambda = LAMBDA_CAP * k as f64 / 199.0;
                prop_assert!(best.g_value <= g_objective(lambda, &norm).unwrap() + 1e-9);
            }
        }

        #[test]
        fn bound_invariant_under_rescaling(
            n in 1usize..40,
            a in -1.0f64..=0.0,
            // c = a + c̃·b loses ~1e-16/c̃ relative accuracy in c̃, which the
            // bound amplifies by n·D; keep interior c̃ away from 0
            ctilde in prop_oneof![Just(0.0), 1e-3f64..=1.0],
            frac in 0.0f64..=1.0,
            scale in 0.01f64..100.0,
        ) {
            let b = 1.5;
            let c = a + ctilde * b;
            let p = BoundParams::uniform(n, a, b, c, 0.0).unwrap();
            let p = p.with_t(frac * p.t_max()).unwrap();
            let scaled = BoundParams::uniform(n, a * scale, b * scale, c * scale, p.t() * scale).unwrap();
            let (v, w) = (chernoff_bound(&p).unwrap(), chernoff_bound(&scaled).unwrap());
            prop_assert!((v - w).abs() <= 1e-10 * v.max(w).max(f64::MIN_POSITIVE), "{} vs {}", v, w);
        }
    }
}
