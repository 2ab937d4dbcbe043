//! Joint laws for `(X_1, ..., X_n)`.
//!
//! Every model can be sampled. Models whose support is a finite list of
//! atoms also get an exact engine: subset product moments, tail masses and
//! arbitrary product-weighted expectations are computed by summing over the
//! support. Product-form models (`independent`, `boolean_iid`) are folded one
//! coordinate at a time into the law of the running sum, which keeps e.g.
//! `n = 20` Boolean variables at 21 states instead of 2^20 atoms.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{BoundParams, CASE_TOL};
use crate::error::{Error, Result};

/// Default cap on the number of atoms (or sum-law states) the exact engine
/// will materialize.
pub const DEFAULT_SUPPORT_CAP: u128 = 1_000_000;

/// Default cap on atom visits spent by [`JointModel::for_each_certificate`].
pub const DEFAULT_CERTIFY_BUDGET: u128 = 1_000_000_000;

/// Above this many variables, certificates must be streamed.
pub const MATERIALIZE_MAX_N: usize = 20;

const PROB_TOL: f64 = 1e-12;

/// One support point of a one-dimensional marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub p: f64,
}

/// One support point of a joint law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub x: Vec<f64>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    /// Finite atoms with positive probabilities summing to one.
    Discrete(Vec<Atom>),
    /// Continuous uniform on `[lo, hi]`; makes a model sampling-only.
    Uniform { lo: f64, hi: f64 },
}

impl Marginal {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidModel(format!("Bernoulli p = {p} is outside [0, 1]")));
        }
        Self::discrete(vec![Atom { x: 0.0, p: 1.0 - p }, Atom { x: 1.0, p }])
    }

    /// Zero-probability atoms are dropped.
    pub fn discrete(atoms: Vec<Atom>) -> Result<Self> {
        check_probabilities(atoms.iter().map(|a| a.p), atoms.len())?;
        if let Some(a) = atoms.iter().find(|a| !a.x.is_finite()) {
            return Err(Error::InvalidModel(format!("atom value {} is not finite", a.x)));
        }
        Ok(Marginal::Discrete(atoms.into_iter().filter(|a| a.p > 0.0).collect()))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidModel(format!("uniform range [{lo}, {hi}] is invalid")));
        }
        Ok(Marginal::Uniform { lo, hi })
    }

    fn atoms(&self) -> Option<&[Atom]> {
        match self {
            Marginal::Discrete(atoms) => Some(atoms),
            Marginal::Uniform { .. } => None,
        }
    }

    fn range(&self) -> (f64, f64) {
        match self {
            Marginal::Discrete(atoms) => atoms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                (lo.min(a.x), hi.max(a.x))
            }),
            Marginal::Uniform { lo, hi } => (*lo, *hi),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Marginal::Discrete(atoms) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.p;
                    if u < acc {
                        return a.x;
                    }
                }
                atoms.last().map_or(0.0, |a| a.x)
            }
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
        }
    }
}

fn check_probabilities(probs: impl Iterator<Item = f64>, len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::InvalidModel("support is empty".into()));
    }
    let mut total = 0.0;
    for p in probs {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "probability {p} is negative or not finite"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidModel(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Independent(Vec<Marginal>),
    BooleanIid(f64),
    PlantedClique {
        in_clique: Vec<bool>,
        marginal: Marginal,
    },
    ExchangeableMixture {
        rho: f64,
        marginal: Marginal,
    },
    ExplicitTable {
        atoms: Vec<SupportPoint>,
        cumulative: Vec<f64>,
    },
}

/// An oracle for the joint law of `(X_1, ..., X_n)`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    n: usize,
    kind: Kind,
    support_cap: u128,
}

impl JointModel {
    /// Independent coordinates with the given marginals.
    pub fn independent(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidModel("need at least one variable".into()));
        }
        Ok(Self::build(marginals.len(), Kind::Independent(marginals)))
    }

    /// `n` independent Bernoulli(p) bits.
    pub fn boolean_iid(n: usize, p: f64) -> Result<Self> {
        check_n(n)?;
        Marginal::bernoulli(p)?;
        Ok(Self::build(n, Kind::BooleanIid(p)))
    }

    /// Variables in `clique` share one draw from `marginal`; the rest are
    /// independent draws from the same marginal.
    pub fn planted_clique(n: usize, clique: &[usize], marginal: Marginal) -> Result<Self> {
        check_n(n)?;
        let mut in_clique = vec![false; n];
        for &i in clique {
            if i >= n {
                return Err(Error::InvalidModel(format!(
                    "clique index {i} is out of range for n = {n}"
                )));
            }
            in_clique[i] = true;
        }
        Ok(Self::build(n, Kind::PlantedClique { in_clique, marginal }))
    }

    /// With probability `rho` every variable copies one shared draw from
    /// `marginal`; otherwise all variables are drawn independently.
    pub fn exchangeable_mixture(n: usize, rho: f64, marginal: Marginal) -> Result<Self> {
        check_n(n)?;
        if !(rho.is_finite() && (0.0..=1.0).contains(&rho)) {
            return Err(Error::InvalidModel(format!(
                "mixing weight rho = {rho} is outside [0, 1]"
            )));
        }
        Ok(Self::build(n, Kind::ExchangeableMixture { rho, marginal }))
    }

    pub fn explicit_table(atoms: Vec<SupportPoint>) -> Result<Self> {
        Self::explicit_table_with_cap(atoms, DEFAULT_SUPPORT_CAP)
    }

    pub fn explicit_table_with_cap(atoms: Vec<SupportPoint>, cap: u128) -> Result<Self> {
        check_probabilities(atoms.iter().map(|a| a.p), atoms.len())?;
        if atoms.len() as u128 > cap {
            return Err(Error::SupportTooLarge {
                atoms: atoms.len() as u128,
                cap,
            });
        }
        let n = atoms[0].x.len();
        check_n(n)?;
        for (k, atom) in atoms.iter().enumerate() {
            if atom.x.len() != n {
                return Err(Error::InvalidModel(format!(
                    "atom {k} has {} coordinates, expected {n}",
                    atom.x.len()
                )));
            }
            if atom.x.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidModel(format!("atom {k} has a non-finite coordinate")));
            }
        }
        let atoms: Vec<SupportPoint> = atoms.into_iter().filter(|a| a.p > 0.0).collect();
        let cumulative = atoms
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.p;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            n,
            kind: Kind::ExplicitTable { atoms, cumulative },
            support_cap: cap,
        })
    }

    fn build(n: usize, kind: Kind) -> Self {
        Self {
            n,
            kind,
            support_cap: DEFAULT_SUPPORT_CAP,
        }
    }

    /// Replaces the enumeration cap.
    pub fn with_support_cap(mut self, cap: u128) -> Self {
        self.support_cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Independent(_) => "independent",
            Kind::BooleanIid(_) => "boolean_iid",
            Kind::PlantedClique { .. } => "planted_clique",
            Kind::ExchangeableMixture { .. } => "exchangeable_mixture",
            Kind::ExplicitTable { .. } => "explicit_table",
        }
    }

    /// Capability flag: whether the exact engine can be used at all.
    pub fn is_enumerable(&self) -> bool {
        match &self.kind {
            Kind::Independent(ms) => ms.iter().all(|m| m.atoms().is_some()),
            Kind::BooleanIid(_) | Kind::ExplicitTable { .. } => true,
            Kind::PlantedClique { marginal, .. } | Kind::ExchangeableMixture { marginal, .. } => {
                marginal.atoms().is_some()
            }
        }
    }

    /// Number of atoms of the joint support, counted with multiplicity over
    /// branches. `None` for sampling-only models.
    pub fn support_size(&self) -> Option<u128> {
        if !self.is_enumerable() {
            return None;
        }
        let len = |m: &Marginal| m.atoms().map_or(0, |a| a.len()) as u128;
        let pow = |base: u128, exp: usize| (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base));
        Some(match &self.kind {
            Kind::Independent(ms) => ms.iter().fold(1u128, |acc, m| acc.saturating_mul(len(m))),
            Kind::BooleanIid(p) => {
                let atoms = if *p == 0.0 || *p == 1.0 { 1 } else { 2 };
                pow(atoms, self.n)
            }
            Kind::PlantedClique { in_clique, marginal } => {
                let free = in_clique.iter().filter(|&&b| !b).count();
                pow(len(marginal), free).saturating_mul(len(marginal))
            }
            Kind::ExchangeableMixture { rho, marginal } => {
                let shared = if *rho > 0.0 { len(marginal) } else { 0 };
                let free = if *rho < 1.0 { pow(len(marginal), self.n) } else { 0 };
                shared.saturating_add(free)
            }
            Kind::ExplicitTable { atoms, .. } => atoms.len() as u128,
        })
    }

    /// Smallest and largest value variable `i` can take.
    pub fn value_range(&self, i: usize) -> (f64, f64) {
        match &self.kind {
            Kind::Independent(ms) => ms[i].range(),
            Kind::BooleanIid(p) if *p == 0.0 => (0.0, 0.0),
            Kind::BooleanIid(p) if *p == 1.0 => (1.0, 1.0),
            Kind::BooleanIid(_) => (0.0, 1.0),
            Kind::PlantedClique { marginal, .. } | Kind::ExchangeableMixture { marginal, .. } => marginal.range(),
            Kind::ExplicitTable { atoms, .. } => {
                atoms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                    (lo.min(a.x[i]), hi.max(a.x[i]))
                })
            }
        }
    }

    /// Checks that every variable stays inside `[a_i, a_i + b]`.
    pub fn check_range(&self, params: &BoundParams) -> Result<()> {
        if params.n() != self.n {
            return Err(Error::InvalidModel(format!(
                "model has n = {} but parameters have n = {}",
                self.n,
                params.n()
            )));
        }
        let slack = CASE_TOL * params.b().max(1.0);
        for i in 0..self.n {
            let (lo, hi) = self.value_range(i);
            let (a, top) = (params.a()[i], params.a()[i] + params.b());
            if lo < a - slack || hi > top + slack {
                return Err(Error::InvalidModel(format!(
                    "variable {i} takes values in [{lo}, {hi}], outside [a_i, a_i + b] = [{a}, {top}]"
                )));
            }
        }
        Ok(())
    }

    /// Draws one realization into `out`, which must have length `n`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        match &self.kind {
            Kind::Independent(ms) => {
                for (slot, m) in out.iter_mut().zip(ms) {
                    *slot = m.sample(rng);
                }
            }
            Kind::BooleanIid(p) => {
                for slot in out.iter_mut() {
                    *slot = if rng.gen::<f64>() < *p { 1.0 } else { 0.0 };
                }
            }
            Kind::PlantedClique { in_clique, marginal } => {
                let shared = marginal.sample(rng);
                for (slot, &tied) in out.iter_mut().zip(in_clique) {
                    *slot = if tied { shared } else { marginal.sample(rng) };
                }
            }
            Kind::ExchangeableMixture { rho, marginal } => {
                if rng.gen::<f64>() < *rho {
                    out.fill(marginal.sample(rng));
                } else {
                    for slot in out.iter_mut() {
                        *slot = marginal.sample(rng);
                    }
                }
            }
            Kind::ExplicitTable { atoms, cumulative } => {
                let u: f64 = rng.gen();
                let k = cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1);
                out.copy_from_slice(&atoms[k].x);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.sample_into(rng, &mut out);
        out
    }

    fn require_enumerable(&self, what: &'static str) -> Result<u128> {
        let size = self.support_size().ok_or(Error::NotEnumerable(what))?;
        Ok(size)
    }

    fn is_product_form(&self) -> bool {
        matches!(self.kind, Kind::Independent(_) | Kind::BooleanIid(_))
    }

    fn product_marginals(&self) -> Vec<Vec<Atom>> {
        match &self.kind {
            Kind::Independent(ms) => ms.iter().map(|m| m.atoms().unwrap_or(&[]).to_vec()).collect(),
            Kind::BooleanIid(p) => {
                let atoms = match Marginal::bernoulli(*p) {
                    Ok(Marginal::Discrete(atoms)) => atoms,
                    _ => unreachable!("validated at construction"),
                };
                vec![atoms; self.n]
            }
            _ => unreachable!("not a product-form model"),
        }
    }

    /// Visits every atom of the joint support by brute force.
    ///
    /// Errors if the model is sampling-only or the support exceeds the cap.
    pub fn for_each_atom(&self, mut visit: impl FnMut(&[f64], f64)) -> Result<()> {
        let size = self.require_enumerable("atom enumeration")?;
        if size > self.support_cap {
            return Err(Error::SupportTooLarge {
                atoms: size,
                cap: self.support_cap,
            });
        }
        match &self.kind {
            Kind::Independent(_) | Kind::BooleanIid(_) => {
                let marginals = self.product_marginals();
                let factors: Vec<&[Atom]> = marginals.iter().map(Vec::as_slice).collect();
                for_each_product(&factors, 1.0, |x, p| visit(x, p));
            }
            Kind::PlantedClique { in_clique, marginal } => {
                let atoms = marginal.atoms().unwrap_or(&[]);
                let free: Vec<usize> = (0..self.n).filter(|&i| !in_clique[i]).collect();
                let mut factors = vec![atoms];
                factors.extend(std::iter::repeat_n(atoms, free.len()));
                let mut x = vec![0.0; self.n];
                for_each_product(&factors, 1.0, |vals, p| {
                    let mut rest = vals[1..].iter();
                    for (slot, &tied) in x.iter_mut().zip(in_clique) {
                        *slot = if tied { vals[0] } else { *rest.next().unwrap() };
                    }
                    visit(&x, p);
                });
            }
            Kind::ExchangeableMixture { rho, marginal } => {
                let atoms = marginal.atoms().unwrap_or(&[]);
                if *rho > 0.0 {
                    let mut x = vec![0.0; self.n];
                    for a in atoms {
                        x.fill(a.x);
                        visit(&x, rho * a.p);
                    }
                }
                if *rho < 1.0 {
                    let factors = vec![atoms; self.n];
                    for_each_product(&factors, 1.0 - rho, |x, p| visit(x, p));
                }
            }
            Kind::ExplicitTable { atoms, .. } => {
                for a in atoms {
                    visit(&a.x, a.p);
                }
            }
        }
        Ok(())
    }

    /// All atoms of the joint support.
    pub fn support(&self) -> Result<Vec<SupportPoint>> {
        let mut out = Vec::new();
        self.for_each_atom(|x, p| out.push(SupportPoint { x: x.to_vec(), p }))?;
        Ok(out)
    }

    /// Law of `Σ x_i` carrying, per sum value, the probability mass and the
    /// expectation of `∏_i factor(i, x_i)` restricted to that sum.
    pub fn weighted_sum_law(&self, factor: impl Fn(usize, f64) -> f64) -> Result<SumLaw> {
        self.require_enumerable("exact computation")?;
        if self.is_product_form() {
            return self.fold_sum_law(&factor);
        }
        let mut points = Vec::new();
        self.for_each_atom(|x, p| {
            let weight: f64 = x.iter().enumerate().map(|(i, &v)| factor(i, v)).product();
            points.push(SumPoint {
                sum: x.iter().sum(),
                mass: p,
                weighted: p * weight,
            });
        })?;
        Ok(SumLaw::merged(points))
    }

    fn fold_sum_law(&self, factor: &impl Fn(usize, f64) -> f64) -> Result<SumLaw> {
        let mut states = vec![SumPoint {
            sum: 0.0,
            mass: 1.0,
            weighted: 1.0,
        }];
        for (i, atoms) in self.product_marginals().iter().enumerate() {
            let mut next = Vec::with_capacity(states.len() * atoms.len());
            for s in &states {
                for a in atoms {
                    next.push(SumPoint {
                        sum: s.sum + a.x,
                        mass: s.mass * a.p,
                        weighted: s.weighted * a.p * factor(i, a.x),
                    });
                }
            }
            states = SumLaw::merged(next).points;
            if states.len() as u128 > self.support_cap {
                return Err(Error::SupportTooLarge {
                    atoms: states.len() as u128,
                    cap: self.support_cap,
                });
            }
        }
        Ok(SumLaw { points: states })
    }

    /// `E[∏_{i∈subset} X_i]`; the empty subset gives 1.
    pub fn exact_moment(&self, subset: &[usize]) -> Result<f64> {
        let mask = self.subset_mask(subset)?;
        let law = self.weighted_sum_law(|i, x| if mask[i] { x } else { 1.0 })?;
        Ok(law.total_weighted())
    }

    /// `P(Σ X_i ≥ threshold)`.
    pub fn exact_tail(&self, threshold: f64) -> Result<f64> {
        let law = self.weighted_sum_law(|_, _| 1.0)?;
        Ok(law.tail_mass(threshold))
    }

    fn subset_mask(&self, subset: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &i in subset {
            if i >= self.n {
                return Err(Error::Domain(format!(
                    "subset index {i} is out of range for n = {}",
                    self.n
                )));
            }
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Streams one certificate per subset of size `1..=max_subset_size`, in
    /// order of size and then lexicographically.
    pub fn for_each_certificate(
        &self,
        params: &BoundParams,
        max_subset_size: usize,
        budget: u128,
        mut sink: impl FnMut(MomentCertificate),
    ) -> Result<()> {
        let size = self.require_enumerable("moment certification")?;
        if params.n() != self.n {
            return Err(Error::InvalidModel(format!(
                "model has n = {} but parameters have n = {}",
                self.n,
                params.n()
            )));
        }
        let max_size = max_subset_size.min(self.n);
        let subsets: u128 = (1..=max_size)
            .map(|k| binomial(self.n, k))
            .fold(0u128, u128::saturating_add);
        let needed = subsets.saturating_mul(size);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        for k in 1..=max_size {
            for subset in (0..self.n).combinations(k) {
                let exact_moment = self.exact_moment(&subset)?;
                let bound_product: f64 = subset.iter().map(|&i| params.c()[i]).product();
                sink(MomentCertificate::new(subset, exact_moment, bound_product));
            }
        }
        Ok(())
    }

    /// Materialized form of [`for_each_certificate`](Self::for_each_certificate)
    /// with the default budget; limited to `n ≤ 20`.
    pub fn certify_moments(&self, params: &BoundParams, max_subset_size: usize) -> Result<Vec<MomentCertificate>> {
        if self.n > MATERIALIZE_MAX_N {
            return Err(Error::Domain(format!(
                "n = {} exceeds {MATERIALIZE_MAX_N}; stream certificates instead",
                self.n
            )));
        }
        let mut out = Vec::new();
        self.for_each_certificate(params, max_subset_size, DEFAULT_CERTIFY_BUDGET, |c| out.push(c))?;
        Ok(out)
    }

    /// Smallest common constant `c` with `E[∏_{i∈S} X_i] ≤ c^|S|` for all
    /// subsets up to `max_subset_size`. Needs nonnegative variables.
    pub fn tightest_common_c(&self, max_subset_size: usize) -> Result<f64> {
        if (0..self.n).any(|i| self.value_range(i).0 < 0.0) {
            return Err(Error::Domain("tightest_common_c needs nonnegative variables".into()));
        }
        let mut best: f64 = 0.0;
        for k in 1..=max_subset_size.min(self.n) {
            for subset in (0..self.n).combinations(k) {
                let m = self.exact_moment(&subset)?.max(0.0);
                best = best.max(m.powf(1.0 / k as f64));
            }
        }
        Ok(best)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidModel("need at least one variable".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc.saturating_mul((n - j) as u128) / (j as u128 + 1))
}

/// Odometer over the Cartesian product of `factors`.
fn for_each_product(factors: &[&[Atom]], weight: f64, mut visit: impl FnMut(&[f64], f64)) {
    if factors.iter().any(|f| f.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; factors.len()];
    let mut x: Vec<f64> = factors.iter().map(|f| f[0].x).collect();
    loop {
        let p = factors.iter().zip(&idx).fold(weight, |acc, (f, &k)| acc * f[k].p);
        visit(&x, p);
        let mut pos = factors.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < factors[pos].len() {
                x[pos] = factors[pos][idx[pos]].x;
                break;
            }
            idx[pos] = 0;
            x[pos] = factors[pos][0].x;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumPoint {
    pub sum: f64,
    pub mass: f64,
    pub weighted: f64,
}

/// Distribution of `Σ X_i`, sorted by sum, with equal sums merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumLaw {
    pub points: Vec<SumPoint>,
}

/// Slack when comparing a floating-point sum against a tail threshold.
pub fn tail_slack(threshold: f64) -> f64 {
    1e-9 * threshold.abs().max(1.0)
}

impl SumLaw {
    fn merged(mut points: Vec<SumPoint>) -> Self {
        for p in points.iter_mut() {
            // fold -0.0 into 0.0 so equal sums merge
            p.sum += 0.0;
        }
        points.sort_by(|l, r| l.sum.total_cmp(&r.sum));
        let mut out: Vec<SumPoint> = Vec::with_capacity(points.len());
        for p in points {
            match out.last_mut() {
                Some(last) if last.sum == p.sum => {
                    last.mass += p.mass;
                    last.weighted += p.weighted;
                }
                _ => out.push(p),
            }
        }
        Self { points: out }
    }

    fn in_tail(threshold: f64) -> impl Fn(&&SumPoint) -> bool {
        let cut = threshold - tail_slack(threshold);
        move |p: &&SumPoint| p.sum >= cut
    }

    pub fn total_weighted(&self) -> f64 {
        self.points.iter().map(|p| p.weighted).sum()
    }

    pub fn tail_mass(&self, threshold: f64) -> f64 {
        let m: f64 = self
            .points
            .iter()
            .filter(Self::in_tail(threshold))
            .map(|p| p.mass)
            .sum();
        m.clamp(0.0, 1.0)
    }

    /// Weighted expectation restricted to the tail event (not divided by its
    /// probability).
    pub fn tail_weighted(&self, threshold: f64) -> f64 {
        self.points
            .iter()
            .filter(Self::in_tail(threshold))
            .map(|p| p.weighted)
            .sum()
    }

    pub fn min_sum(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.sum)
    }
}

/// Exact check of the moment condition for one subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCertificate {
    pub subset: Vec<usize>,
    pub exact_moment: f64,
    pub bound_product: f64,
    pub satisfied: bool,
}

impl MomentCertificate {
    pub fn new(subset: Vec<usize>, exact_moment: f64, bound_product: f64) -> Self {
        Self {
            satisfied: exact_moment <= bound_product + PROB_TOL,
            subset,
            exact_moment,
            bound_product,
        }
    }
}
