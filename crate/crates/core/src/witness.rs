//! Randomized search for a statistically dependent subset.
//!
//! Given sample access to `[0,1]`-valued `(X_1, ..., X_n)` whose sum exceeds
//! `(c + t) n` with probability well above `exp(-D(c+t ‖ c) n)`, some subset
//! `S` must satisfy `E[∏_{i∈S} X_i] > c^|S|`. The search runs the bit/subset
//! process, tallies `∏_{i∈𝓘} y_i` per drawn subset `𝓘`, then re-estimates the
//! best-ranked subset on fresh rounds so that selection bias cannot produce a
//! `found` verdict on its own.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::entropy::{kl_div, LAMBDA_CAP};
use crate::error::{param, Error, Result};
use crate::models::JointModel;
use crate::sampling::{block_count, block_len, map_blocks, stream_rng, Moments, StreamDomain};

/// Ceiling on search rounds actually drawn.
pub const SEARCH_ROUNDS_CAP: u64 = 100_000;

/// Ceiling on confirmation rounds actually drawn.
pub const CONFIRM_ROUNDS_CAP: u64 = 50_000;

/// A subset needs this many search rounds before it can be ranked.
pub const DEFAULT_MIN_CANDIDATE_ROUNDS: u64 = 32;

/// Standard errors the confirmation estimate must clear the threshold by.
pub const CONFIRM_Z: f64 = 2.0;

/// Failure probability used in the confirmation budget.
const CONFIRM_DELTA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessParams {
    pub n: usize,
    pub c: f64,
    pub t: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub m_search: u64,
    pub m_confirm: u64,
    pub margin_threshold: f64,
    pub min_candidate_rounds: u64,
}

/// Budgets derived from `(n, c, t, α)`, with the raw formula values kept
/// for reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budgets {
    pub m_search: u64,
    pub m_confirm: u64,
    pub margin_threshold: f64,
    pub lambda: f64,
    pub m_search_formula: f64,
    pub m_confirm_formula: f64,
}

fn check_core(n: usize, c: f64, t: f64, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(param("n", "need at least one variable"));
    }
    if !(c.is_finite() && c > 0.0 && c < 1.0) {
        return Err(param("c", format!("{c} is outside (0, 1)")));
    }
    if !(t.is_finite() && t > 0.0 && t <= 1.0 - c + 1e-12) {
        return Err(param("t", format!("{t} is outside (0, 1 - c]")));
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
        return Err(param("alpha", format!("{alpha} is outside (0, 1)")));
    }
    Ok(())
}

/// λ from the closed-form optimum (capped below 1), margin `α^{4/ct}/8`,
/// `m_search = ⌈64 α^{-4/ct} n ln(n+1)⌉` and
/// `m_confirm = ⌈64 margin^{-2} ln(1/0.01)⌉`, the round counts clipped to
/// [`SEARCH_ROUNDS_CAP`] and [`CONFIRM_ROUNDS_CAP`].
pub fn default_budgets(n: usize, c: f64, t: f64, alpha: f64) -> Result<Budgets> {
    check_core(n, c, t, alpha)?;
    let lambda = (t / ((1.0 - c) * (c + t))).min(LAMBDA_CAP);
    let exponent = 4.0 / (c * t);
    let scale = alpha.powf(exponent);
    let margin_threshold = scale / 8.0;
    let m_search_formula = 64.0 / scale * n as f64 * (n as f64 + 1.0).ln();
    let m_confirm_formula = 64.0 / (margin_threshold * margin_threshold) * (1.0 / CONFIRM_DELTA).ln();
    if margin_threshold <= 0.0 || !m_search_formula.is_finite() || !m_confirm_formula.is_finite() {
        return Err(Error::BudgetOverflow(format!(
            "alpha^(4/(c t)) = {alpha}^{exponent} is too small for desk-scale budgets"
        )));
    }
    let rounds = |formula: f64, cap: u64| (formula.ceil().max(1.0).min(cap as f64)) as u64;
    Ok(Budgets {
        m_search: rounds(m_search_formula, SEARCH_ROUNDS_CAP),
        m_confirm: rounds(m_confirm_formula, CONFIRM_ROUNDS_CAP),
        margin_threshold,
        lambda,
        m_search_formula,
        m_confirm_formula,
    })
}

impl WitnessParams {
    pub fn with_default_budgets(n: usize, c: f64, t: f64, alpha: f64) -> Result<Self> {
        let b = default_budgets(n, c, t, alpha)?;
        Ok(Self {
            n,
            c,
            t,
            alpha,
            lambda: b.lambda,
            m_search: b.m_search,
            m_confirm: b.m_confirm,
            margin_threshold: b.margin_threshold,
            min_candidate_rounds: DEFAULT_MIN_CANDIDATE_ROUNDS,
        })
    }

    /// Validates the parameters; a too-small α is a warning, not an error.
    pub fn validate(&self) -> Result<Vec<String>> {
        check_core(self.n, self.c, self.t, self.alpha)?;
        if !(self.lambda.is_finite() && self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(param("lambda", format!("{} is outside (0, 1)", self.lambda)));
        }
        if self.m_search == 0 {
            return Err(param("m_search", "must be positive"));
        }
        if self.m_confirm == 0 {
            return Err(param("m_confirm", "must be positive"));
        }
        if !(self.margin_threshold.is_finite() && self.margin_threshold > 0.0) {
            return Err(param("margin_threshold", "must be positive"));
        }
        let floor = (-kl_div((self.c + self.t).min(1.0), self.c)? * self.n as f64).exp();
        let mut warnings = Vec::new();
        if self.alpha < floor {
            warnings.push(format!(
                "alpha = {} is below exp(-D(c+t || c) n) = {floor}; no guarantee applies",
                self.alpha
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    /// Confirmed (or best rejected) subset, 0-based and sorted.
    pub subset: Vec<usize>,
    pub empirical_moment: f64,
    pub std_error: f64,
    /// `c^|S| + margin_threshold`.
    pub threshold: f64,
    pub verdict: Verdict,
    pub samples_used: u64,
    /// Search-phase excess `mean - c^|S|` of the confirmed candidate.
    pub search_excess: f64,
    pub distinct_subsets: usize,
    pub eligible_candidates: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    rounds: u64,
    hits: u64,
}

fn read_oracle<R: Rng + ?Sized>(oracle: &JointModel, rng: &mut R, x: &mut [f64]) -> Result<()> {
    oracle.sample_into(rng, x);
    match x.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(Error::OracleOutOfRange { index, value: x[index] }),
        None => Ok(()),
    }
}

/// Runs search and confirmation with streams derived from `seed`.
pub fn find_dependent_set(oracle: &JointModel, wp: &WitnessParams, seed: u64, workers: usize) -> Result<WitnessReport> {
    let mut diagnostics = wp.validate()?;
    if oracle.n() != wp.n {
        return Err(Error::InvalidModel(format!(
            "oracle has n = {} but witness parameters have n = {}",
            oracle.n(),
            wp.n
        )));
    }
    let n = wp.n;

    let blocks = map_blocks(
        workers,
        0..block_count(wp.m_search),
        |k| -> Result<BTreeMap<Vec<usize>, Tally>> {
            let mut rng = stream_rng(seed, StreamDomain::Search, k);
            let mut x = vec![0.0; n];
            let mut y = vec![false; n];
            let mut tallies: BTreeMap<Vec<usize>, Tally> = BTreeMap::new();
            for _ in 0..block_len(wp.m_search, k) {
                read_oracle(oracle, &mut rng, &mut x)?;
                for (bit, &p) in y.iter_mut().zip(&x) {
                    *bit = rng.gen::<f64>() < p;
                }
                let subset: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < wp.lambda).collect();
                if subset.is_empty() {
                    continue;
                }
                let hit = subset.iter().all(|&i| y[i]);
                let tally = tallies.entry(subset).or_default();
                tally.rounds += 1;
                tally.hits += u64::from(hit);
            }
            Ok(tallies)
        },
    );
    let mut tallies: BTreeMap<Vec<usize>, Tally> = BTreeMap::new();
    for block in blocks {
        for (subset, t) in block? {
            let entry = tallies.entry(subset).or_default();
            entry.rounds += t.rounds;
            entry.hits += t.hits;
        }
    }

    let excess = |subset: &[usize], t: &Tally| t.hits as f64 / t.rounds as f64 - wp.c.powi(subset.len() as i32);
    let mut candidates: Vec<(&Vec<usize>, &Tally, f64)> = tallies
        .iter()
        .filter(|(_, t)| t.rounds >= wp.min_candidate_rounds)
        .map(|(s, t)| (s, t, excess(s, t)))
        .collect();
    candidates.sort_by(|l, r| r.2.total_cmp(&l.2).then(r.1.rounds.cmp(&l.1.rounds)).then(l.0.cmp(r.0)));

    let Some(&(best, _, search_excess)) = candidates.first() else {
        diagnostics.push(format!(
            "no subset reached {} search rounds ({} distinct subsets seen)",
            wp.min_candidate_rounds,
            tallies.len()
        ));
        return Ok(WitnessReport {
            subset: Vec::new(),
            empirical_moment: 0.0,
            std_error: 0.0,
            threshold: 1.0 + wp.margin_threshold,
            verdict: Verdict::NotFound,
            samples_used: wp.m_search,
            search_excess: 0.0,
            distinct_subsets: tallies.len(),
            eligible_candidates: 0,
            diagnostics,
        });
    };
    let subset = best.clone();

    let parts = map_blocks(workers, 0..block_count(wp.m_confirm), |k| -> Result<Moments> {
        let mut rng = stream_rng(seed, StreamDomain::Confirm, k);
        let mut x = vec![0.0; n];
        let mut m = Moments::default();
        for _ in 0..block_len(wp.m_confirm, k) {
            read_oracle(oracle, &mut rng, &mut x)?;
            let mut hit = true;
            for &i in &subset {
                hit &= rng.gen::<f64>() < x[i];
            }
            m.push(f64::from(u8::from(hit)));
        }
        Ok(m)
    });
    let mut confirm = Moments::default();
    for part in parts {
        confirm.merge(&part?);
    }
    let threshold = wp.c.powi(subset.len() as i32) + wp.margin_threshold;
    let (mean, se) = (confirm.mean(), confirm.std_error());
    let verdict = if mean > threshold + CONFIRM_Z * se {
        Verdict::Found
    } else {
        diagnostics.push(format!(
            "confirmation estimate {mean} did not clear {threshold} by {CONFIRM_Z} standard errors ({se})"
        ));
        Verdict::NotFound
    };
    Ok(WitnessReport {
        subset,
        empirical_moment: mean,
        std_error: se,
        threshold,
        verdict,
        samples_used: wp.m_search + wp.m_confirm,
        search_excess,
        distinct_subsets: tallies.len(),
        eligible_candidates: candidates.len(),
        diagnostics,
    })
}
