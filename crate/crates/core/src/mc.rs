//! The constructive sampling process behind the bound.
//!
//! One round samples `x` from the model, maps it to `x̃ ∈ [0, 1]^n`, draws
//! bits `y_i ~ Bernoulli(x̃_i)` independently given `x`, and draws a random
//! index set `𝓘` that contains each index independently with probability λ.
//! The quantity of interest is `∏_{i∈𝓘} y_i`. Exact counterparts of every
//! expectation are computed on enumerable models, and [`verify_chain`] checks
//! the full inequality chain
//!
//! ```text
//! (λc̃ + 1 - λ)^n ≥ ∏(λc̃_i + 1 - λ) ≥ E[∏_𝓘 Y] ≥ E[∏_𝓘 Y | tail] P(tail)
//!                                              ≥ (1 - λ)^{n(1 - c̃ - t̃)} P(tail)
//! ```

use rand::Rng;
use serde::Serialize;

use crate::entropy::{g_objective, normalize, BoundParams};
use crate::error::{Error, Result};
use crate::models::{tail_slack, JointModel, MomentCertificate, DEFAULT_CERTIFY_BUDGET};
use crate::sampling::{block_count, block_len, map_blocks, stream_rng, Moments, StreamDomain, BLOCK_ROUNDS};

/// Absolute tolerance for every link of the exact chain.
pub const CHAIN_TOL: f64 = 1e-10;

/// Minimum draw budget for conditional estimation.
pub const MIN_REJECTION_DRAWS: u64 = 10_000_000;

/// Draws allowed per requested acceptance, on top of the minimum.
pub const DRAWS_PER_ACCEPTANCE: u64 = 10_000;

/// Largest `n` for which [`exact_bit_moment`] enumerates all bit patterns.
pub const BIT_ENUMERATION_MAX_N: usize = 16;

/// One realization of the process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingRound {
    pub x: Vec<f64>,
    pub xtilde: Vec<f64>,
    pub y: Vec<bool>,
    pub subset: Vec<usize>,
    pub product: bool,
    pub sum_exceeds: bool,
}

/// Validated `(model, params, λ)` triple that draws rounds.
#[derive(Debug, Clone)]
pub struct Process<'a> {
    model: &'a JointModel,
    params: &'a BoundParams,
    lambda: f64,
    cut: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda = {lambda} is outside [0, 1)")))
    }
}

impl<'a> Process<'a> {
    pub fn new(model: &'a JointModel, params: &'a BoundParams, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        model.check_range(params)?;
        let threshold = params.tail_threshold();
        Ok(Self {
            model,
            params,
            lambda,
            cut: threshold - tail_slack(threshold),
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SamplingRound {
        let n = self.model.n();
        let mut x = vec![0.0; n];
        self.model.sample_into(rng, &mut x);
        let b = self.params.b();
        let xtilde: Vec<f64> = x
            .iter()
            .zip(self.params.a())
            .map(|(&v, &a)| ((v - a) / b).clamp(0.0, 1.0))
            .collect();
        let y: Vec<bool> = xtilde.iter().map(|&p| rng.gen::<f64>() < p).collect();
        let subset: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < self.lambda).collect();
        let product = subset.iter().all(|&i| y[i]);
        let sum_exceeds = x.iter().sum::<f64>() >= self.cut;
        SamplingRound {
            x,
            xtilde,
            y,
            subset,
            product,
            sum_exceeds,
        }
    }

    /// Same draws as [`draw`](Self::draw), keeping only `(product, sum_exceeds)`.
    fn draw_product<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [f64], y: &mut [bool]) -> (bool, bool) {
        self.model.sample_into(rng, x);
        let b = self.params.b();
        for ((bit, &v), &a) in y.iter_mut().zip(x.iter()).zip(self.params.a()) {
            *bit = rng.gen::<f64>() < ((v - a) / b).clamp(0.0, 1.0);
        }
        let mut product = true;
        for &bit in y.iter() {
            let included = rng.gen::<f64>() < self.lambda;
            product &= !included || bit;
        }
        (product, x.iter().sum::<f64>() >= self.cut)
    }
}

pub fn draw_round<R: Rng + ?Sized>(
    model: &JointModel,
    params: &BoundParams,
    lambda: f64,
    rng: &mut R,
) -> Result<SamplingRound> {
    Ok(Process::new(model, params, lambda)?.draw(rng))
}

/// Monte Carlo estimate of a bit-valued expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub conditional_on_tail: bool,
    /// Rounds drawn, including rejected ones.
    pub draws: u64,
}

/// Seed, parallelism and rejection budget for an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub workers: usize,
    /// Overrides the default rejection budget when set.
    pub max_draws: Option<u64>,
}

impl SamplerConfig {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self {
            seed,
            workers: workers.max(1),
            max_draws: None,
        }
    }
}

/// `max(10^7, 10^4 · n_samples)` draws.
pub fn default_rejection_budget(n_samples: u64) -> u64 {
    MIN_REJECTION_DRAWS.max(n_samples.saturating_mul(DRAWS_PER_ACCEPTANCE))
}

/// Estimates `E[∏_{i∈𝓘} Y_i]`, or with `conditional` its value given the
/// tail event `Σ X_i ≥ (c̄ + t) n`, by rejection.
pub fn estimate_product(
    model: &JointModel,
    params: &BoundParams,
    lambda: f64,
    n_samples: u64,
    conditional: bool,
    cfg: &SamplerConfig,
) -> Result<Estimate> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    let process = Process::new(model, params, lambda)?;
    if conditional {
        estimate_conditional(&process, n_samples, cfg)
    } else {
        Ok(estimate_unconditional(&process, n_samples, cfg))
    }
}

fn estimate_unconditional(process: &Process<'_>, n_samples: u64, cfg: &SamplerConfig) -> Estimate {
    let n = process.model.n();
    let parts = map_blocks(cfg.workers, 0..block_count(n_samples), |k| {
        let mut rng = stream_rng(cfg.seed, StreamDomain::Estimate, k);
        let (mut x, mut y) = (vec![0.0; n], vec![false; n]);
        let mut m = Moments::default();
        for _ in 0..block_len(n_samples, k) {
            let (product, _) = process.draw_product(&mut rng, &mut x, &mut y);
            m.push(f64::from(u8::from(product)));
        }
        m
    });
    let mut total = Moments::default();
    for part in &parts {
        total.merge(part);
    }
    Estimate {
        mean: total.mean(),
        std_error: total.std_error(),
        n_samples,
        conditional_on_tail: false,
        draws: n_samples,
    }
}

fn estimate_conditional(process: &Process<'_>, n_samples: u64, cfg: &SamplerConfig) -> Result<Estimate> {
    let n = process.model.n();
    let budget = cfg.max_draws.unwrap_or_else(|| default_rejection_budget(n_samples));
    let total_blocks = block_count(budget);
    let wave = (cfg.workers as u64 * 4).max(1);
    let mut moments = Moments::default();
    let mut next = 0;
    while next < total_blocks {
        let end = (next + wave).min(total_blocks);
        let blocks = map_blocks(cfg.workers, next..end, |k| {
            let mut rng = stream_rng(cfg.seed, StreamDomain::Estimate, k);
            let (mut x, mut y) = (vec![0.0; n], vec![false; n]);
            let mut accepted = Vec::new();
            for i in 0..block_len(budget, k) {
                let (product, exceeds) = process.draw_product(&mut rng, &mut x, &mut y);
                if exceeds {
                    accepted.push((i, product));
                }
            }
            accepted
        });
        for (offset, accepted) in blocks.iter().enumerate() {
            let block = next + offset as u64;
            for &(i, product) in accepted {
                moments.push(f64::from(u8::from(product)));
                if moments.count == n_samples {
                    return Ok(Estimate {
                        mean: moments.mean(),
                        std_error: moments.std_error(),
                        n_samples,
                        conditional_on_tail: true,
                        draws: block * BLOCK_ROUNDS + i + 1,
                    });
                }
            }
        }
        next = end;
    }
    Err(Error::TailTooRare {
        requested: n_samples,
        accepted: moments.count,
        draws: budget,
        budget,
    })
}

fn normalized_factor<'p>(params: &'p BoundParams, lambda: f64) -> impl Fn(usize, f64) -> f64 + 'p {
    move |i, x| {
        let xt = ((x - params.a()[i]) / params.b()).clamp(0.0, 1.0);
        1.0 - lambda * (1.0 - xt)
    }
}

/// `E[∏_{i∈𝓘} Y_i] = E[∏_i (λ X̃_i + 1 - λ)]`, exactly.
pub fn exact_product_expectation(model: &JointModel, params: &BoundParams, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    model.check_range(params)?;
    Ok(model
        .weighted_sum_law(normalized_factor(params, lambda))?
        .total_weighted())
}

/// Exact `E[∏_{i∈𝓘} Y_i | tail]` and `P(tail)`; the conditional value is
/// `None` when the tail has probability zero.
pub fn exact_conditional_product_expectation(
    model: &JointModel,
    params: &BoundParams,
    lambda: f64,
) -> Result<(Option<f64>, f64)> {
    check_lambda(lambda)?;
    model.check_range(params)?;
    let law = model.weighted_sum_law(normalized_factor(params, lambda))?;
    let threshold = params.tail_threshold();
    let p_tail = law.tail_mass(threshold);
    let conditional = (p_tail > 0.0).then(|| law.tail_weighted(threshold) / p_tail);
    Ok((conditional, p_tail))
}

/// `E[∏_{i∈S} X̃_i]`, exactly.
pub fn exact_normalized_moment(model: &JointModel, params: &BoundParams, subset: &[usize]) -> Result<f64> {
    model.check_range(params)?;
    let mut mask = vec![false; model.n()];
    for &i in subset {
        *mask
            .get_mut(i)
            .ok_or_else(|| Error::Domain(format!("subset index {i} is out of range")))? = true;
    }
    let law = model.weighted_sum_law(|i, x| {
        if mask[i] {
            ((x - params.a()[i]) / params.b()).clamp(0.0, 1.0)
        } else {
            1.0
        }
    })?;
    Ok(law.total_weighted())
}

/// `E[∏_{i∈S} Y_i]` by summing over every atom and every bit pattern
/// `y ∈ {0,1}^n` with its conditional probability. Exponential in `n`.
pub fn exact_bit_moment(model: &JointModel, params: &BoundParams, subset: &[usize]) -> Result<f64> {
    let n = model.n();
    if n > BIT_ENUMERATION_MAX_N {
        return Err(Error::Domain(format!(
            "bit-pattern enumeration is limited to n ≤ {BIT_ENUMERATION_MAX_N}"
        )));
    }
    model.check_range(params)?;
    let mut need = 0u32;
    for &i in subset {
        if i >= n {
            return Err(Error::Domain(format!("subset index {i} is out of range")));
        }
        need |= 1 << i;
    }
    let mut total = 0.0;
    model.for_each_atom(|x, p| {
        let xt: Vec<f64> = x
            .iter()
            .zip(params.a())
            .map(|(&v, &a)| ((v - a) / params.b()).clamp(0.0, 1.0))
            .collect();
        for pattern in 0u32..(1 << n) {
            if pattern & need != need {
                continue;
            }
            let prob: f64 = (0..n)
                .map(|i| if pattern >> i & 1 == 1 { xt[i] } else { 1.0 - xt[i] })
                .product();
            total += p * prob;
        }
    })?;
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkStatus {
    Pass,
    Fail,
    /// The tail has probability zero; the conditional link holds trivially.
    Vacuous,
}

/// One inequality `lhs ≥ rhs` of the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub status: LinkStatus,
}

impl ChainLink {
    fn check(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let status = if lhs >= rhs - CHAIN_TOL {
            LinkStatus::Pass
        } else {
            LinkStatus::Fail
        };
        Self { name, lhs, rhs, status }
    }

    fn vacuous(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            name,
            lhs,
            rhs,
            status: LinkStatus::Vacuous,
        }
    }

    pub fn holds(&self) -> bool {
        self.status != LinkStatus::Fail
    }
}

/// Result of certifying the moment condition up to a subset size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub max_subset_size: usize,
    pub checked: u64,
    pub violated: u64,
    /// Violated certificate with the largest excess, if any.
    pub worst: Option<MomentCertificate>,
    pub holds: bool,
}

pub fn check_hypothesis(model: &JointModel, params: &BoundParams, max_subset_size: usize) -> Result<HypothesisCheck> {
    let mut check = HypothesisCheck {
        max_subset_size: max_subset_size.min(model.n()),
        checked: 0,
        violated: 0,
        worst: None,
        holds: true,
    };
    model.for_each_certificate(params, max_subset_size, DEFAULT_CERTIFY_BUDGET, |cert| {
        check.checked += 1;
        if !cert.satisfied {
            check.violated += 1;
            check.holds = false;
            let excess = cert.exact_moment - cert.bound_product;
            let worse = check
                .worst
                .as_ref()
                .is_none_or(|w| excess > w.exact_moment - w.bound_product);
            if worse {
                check.worst = Some(cert);
            }
        }
    })?;
    Ok(check)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainOutcome {
    Pass,
    LinkFailed,
    /// The moment condition fails, so the chain carries no guarantee.
    HypothesisViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub lambda: f64,
    pub tail_probability: f64,
    pub conditional_expectation: Option<f64>,
    pub hypothesis: HypothesisCheck,
    pub links: Vec<ChainLink>,
    pub outcome: ChainOutcome,
}

/// Evaluates every inequality of the chain exactly on an enumerable model.
///
/// The moment condition is certified for subsets up to `max_subset_size`;
/// pass the model's `n` for the full check.
pub fn verify_chain(
    model: &JointModel,
    params: &BoundParams,
    lambda: f64,
    max_subset_size: usize,
) -> Result<ChainReport> {
    check_lambda(lambda)?;
    model.check_range(params)?;
    let norm = normalize(params);
    let n = params.n() as f64;
    let hypothesis = check_hypothesis(model, params, max_subset_size)?;

    let amgm = (1.0 - lambda * (1.0 - norm.ctilde)).powi(params.n() as i32);
    let per_variable: f64 = norm.ctilde_i.iter().map(|&c| 1.0 - lambda * (1.0 - c)).product();
    let expectation = exact_product_expectation(model, params, lambda)?;
    let (conditional, p_tail) = exact_conditional_product_expectation(model, params, lambda)?;
    let lower = (1.0 - lambda).powf(n * (1.0 - norm.ctilde - norm.ttilde).max(0.0));
    let g_pow_n = g_objective(lambda, &norm)?.powi(params.n() as i32);

    let mut links = vec![
        ChainLink::check("am_gm", amgm, per_variable),
        ChainLink::check("moment_condition", per_variable, expectation),
    ];
    match conditional {
        Some(cond) => {
            links.push(ChainLink::check("total_expectation", expectation, cond * p_tail));
            links.push(ChainLink::check(
                "conditional_lower_bound",
                cond * p_tail,
                lower * p_tail,
            ));
        }
        None => {
            links.push(ChainLink::vacuous("total_expectation", expectation, 0.0));
            links.push(ChainLink::vacuous("conditional_lower_bound", 0.0, 0.0));
        }
    }
    links.push(ChainLink::check("tail_bound", g_pow_n, p_tail));

    let outcome = if !hypothesis.holds {
        ChainOutcome::HypothesisViolated
    } else if links.iter().all(ChainLink::holds) {
        ChainOutcome::Pass
    } else {
        ChainOutcome::LinkFailed
    };
    Ok(ChainReport {
        lambda,
        tail_probability: p_tail,
        conditional_expectation: conditional,
        hypothesis,
        links,
        outcome,
    })
}
