//! The frequency sets `A(s,M) = {h ∈ Z^s : Σ_j a_j |h_j|^{b_j} < x}` with
//! `x = ln M / ln(1/ω)`, their exact cardinality `n(x,s)` and enumeration.
//!
//! All threshold comparisons are done in exponent space and are strict.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::KorobovParams;
use crate::series::weighted_power;
use crate::tractability::{a_limit, Limit};

/// A multi-index `h ∈ Z^s`. Orders lexicographically, negatives first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyIndex(Vec<i64>);

impl FrequencyIndex {
    pub fn new(components: Vec<i64>) -> Self {
        FrequencyIndex(components)
    }

    pub fn zero(s: usize) -> Self {
        FrequencyIndex(vec![0; s])
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FrequencyIndex) -> FrequencyIndex {
        FrequencyIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &FrequencyIndex) -> FrequencyIndex {
        FrequencyIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl From<Vec<i64>> for FrequencyIndex {
    fn from(v: Vec<i64>) -> Self {
        FrequencyIndex(v)
    }
}

impl std::ops::Index<usize> for FrequencyIndex {
    type Output = i64;
    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

/// `Σ_j a_j |h_j|^{b_j}`; `ω_h` is `ω` raised to this.
pub fn exponent(params: &KorobovParams, h: &FrequencyIndex) -> Result<f64> {
    if h.len() != params.s() {
        return Err(Error::DimensionMismatch {
            expected: params.s(),
            got: h.len(),
        });
    }
    Ok(raw_exponent(
        params.a_terms(),
        params.b_terms(),
        h.components(),
    ))
}

pub(crate) fn raw_exponent(a: &[f64], b: &[f64], h: &[i64]) -> f64 {
    h.iter()
        .zip(a.iter().zip(b))
        .map(|(&hj, (&aj, &bj))| weighted_power(aj, bj, hj.unsigned_abs()))
        .sum()
}

/// `x(ε) = ln(ε^{-2}) / ln(ω^{-1})`.
pub fn x_of_eps(omega: f64, eps: f64) -> Result<f64> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::OmegaOutOfRange(omega));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        });
    }
    Ok((-2.0 * eps.ln()) / (-omega.ln()))
}

/// `x = ln M / ln(1/ω)`, the exponent budget of `A(s,M)`.
pub fn x_of_m(omega: f64, m: f64) -> f64 {
    m.ln() / (-omega.ln())
}

/// Largest `h ≥ 0` with `a·h^b < r`, for `r > 0`.
pub(crate) fn max_abs(a: f64, b: f64, r: f64) -> u64 {
    debug_assert!(r > 0.0);
    if a.is_infinite() || a >= r {
        return 0;
    }
    let estimate = (r / a).powf(1.0 / b);
    let mut h = if estimate >= 9.0e15 {
        9.0e15 as u64
    } else {
        estimate.floor() as u64
    };
    while h > 0 && weighted_power(a, b, h) >= r {
        h -= 1;
    }
    while weighted_power(a, b, h + 1) < r {
        h += 1;
    }
    h
}

/// Per-coordinate weights `(a_j, b_j)`, without the monotonicity requirement on `a`.
///
/// Used directly for rescaled lattices (e.g. `a_j m_j^{b_j}` on the dual of a grid).
#[derive(Debug, Clone)]
pub(crate) struct ExponentWeights {
    a: Vec<f64>,
    b: Vec<f64>,
    /// `prefix_min[d] = min(a_1..a_d)`, `+∞` for `d = 0`.
    prefix_min: Vec<f64>,
    integral: bool,
}

impl ExponentWeights {
    pub(crate) fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        let mut prefix_min = Vec::with_capacity(a.len() + 1);
        prefix_min.push(f64::INFINITY);
        for &aj in &a {
            let last = *prefix_min.last().unwrap();
            prefix_min.push(last.min(aj));
        }
        let integral = a
            .iter()
            .chain(&b)
            .all(|v| v.is_finite() && v.fract() == 0.0);
        ExponentWeights {
            a,
            b,
            prefix_min,
            integral,
        }
    }

    pub(crate) fn from_params(params: &KorobovParams) -> Self {
        Self::new(params.a_terms().to_vec(), params.b_terms().to_vec())
    }

    pub(crate) fn s(&self) -> usize {
        self.a.len()
    }

    pub(crate) fn exponent(&self, h: &[i64]) -> f64 {
        raw_exponent(&self.a, &self.b, h)
    }

    /// Number of `h ∈ Z^s` with exponent strictly below `x`.
    pub(crate) fn count(&self, x: f64) -> u64 {
        self.count_within(x, u64::MAX).unwrap_or(u64::MAX)
    }

    /// As [`ExponentWeights::count`], but gives up with `None` once the count exceeds `cap`.
    pub(crate) fn count_within(&self, x: f64, cap: u64) -> Option<u64> {
        let mut memo = if self.integral {
            Some(HashMap::new())
        } else {
            None
        };
        let n = self.count_rec(x, self.s(), cap, &mut memo);
        (n <= cap).then_some(n)
    }

    /// Returns the exact count, or some value above `cap` once that is certain.
    fn count_rec(
        &self,
        r: f64,
        d: usize,
        cap: u64,
        memo: &mut Option<HashMap<(u64, usize), u64>>,
    ) -> u64 {
        if r <= 0.0 {
            return 0;
        }
        // Only h = 0 survives once the budget is at most every remaining a_j.
        if d == 0 || r <= self.prefix_min[d] {
            return 1;
        }
        let key = (r.to_bits(), d);
        if let Some(m) = memo.as_ref() {
            if let Some(&v) = m.get(&key) {
                return v;
            }
        }
        let (a, b) = (self.a[d - 1], self.b[d - 1]);
        let hmax = max_abs(a, b, r);
        let mut total = self.count_rec(r, d - 1, cap, memo);
        for h in 1..=hmax {
            if total > cap {
                return total;
            }
            let sub = self.count_rec(r - weighted_power(a, b, h), d - 1, cap, memo);
            total = total.saturating_add(sub.saturating_mul(2));
        }
        if let Some(m) = memo.as_mut() {
            m.insert(key, total);
        }
        total
    }

    /// All `h` with exponent below `x`, in recursion order.
    pub(crate) fn collect(&self, x: f64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        if x <= 0.0 {
            return out;
        }
        let mut current = vec![0i64; self.s()];
        self.collect_rec(x, self.s(), &mut current, &mut out);
        out
    }

    fn collect_rec(&self, r: f64, d: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if r <= 0.0 {
            return;
        }
        if d == 0 || r <= self.prefix_min[d] {
            for c in current.iter_mut().take(d) {
                *c = 0;
            }
            out.push(current.clone());
            return;
        }
        let (a, b) = (self.a[d - 1], self.b[d - 1]);
        let hmax = max_abs(a, b, r);
        current[d - 1] = 0;
        self.collect_rec(r, d - 1, current, out);
        for h in 1..=hmax {
            let rest = r - weighted_power(a, b, h);
            for sign in [-1i64, 1] {
                current[d - 1] = sign * h as i64;
                self.collect_rec(rest, d - 1, current, out);
            }
        }
        current[d - 1] = 0;
    }
}

/// `n(x,s) = |{h ∈ Z^s : Σ a_j|h_j|^{b_j} < x}|`, by the dimension recurrence
/// `n(x,s) = n(x,s−1) + 2 Σ_{h ≥ 1, a_s h^{b_s} < x} n(x − a_s h^{b_s}, s−1)`.
///
/// Returns 0 for `x ≤ 0`. Saturates at `u64::MAX`.
pub fn count(params: &KorobovParams, x: f64) -> u64 {
    ExponentWeights::from_params(params).count(x)
}

/// An enumerated `A(s,M)` in deterministic order: nondecreasing exponent,
/// ties broken lexicographically.
#[derive(Debug, Clone)]
pub struct IndexSet {
    params: KorobovParams,
    threshold_x: f64,
    members: Vec<FrequencyIndex>,
    exponents: Vec<f64>,
}

impl IndexSet {
    pub fn params(&self) -> &KorobovParams {
        &self.params
    }

    pub fn threshold_x(&self) -> f64 {
        self.threshold_x
    }

    pub fn members(&self) -> &[FrequencyIndex] {
        &self.members
    }

    /// Exponents of the members, aligned with [`IndexSet::members`].
    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Membership by the defining inequality.
    pub fn contains(&self, h: &FrequencyIndex) -> bool {
        h.len() == self.params.s()
            && raw_exponent(self.params.a_terms(), self.params.b_terms(), h.components())
                < self.threshold_x
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FrequencyIndex, f64)> {
        self.members.iter().zip(self.exponents.iter().copied())
    }
}

/// `n(x,s)` if it is at most `cap`, else `None`; the work stays proportional to `cap`.
pub fn count_capped(params: &KorobovParams, x: f64, cap: u64) -> Option<u64> {
    ExponentWeights::from_params(params).count_within(x, cap)
}

/// Enumerates `{h : exponent(h) < x}`; fails if there are more than `cap` members.
pub fn enumerate(params: &KorobovParams, x: f64, cap: u64) -> Result<IndexSet> {
    let weights = ExponentWeights::from_params(params);
    let _ = weights.count_within(x, cap).ok_or(Error::CapExceeded {
        what: "index set",
        needed: cap as u128 + 1,
        cap: cap as u128,
    })?;
    let mut pairs: Vec<(f64, Vec<i64>)> = weights
        .collect(x)
        .into_iter()
        .map(|h| (weights.exponent(&h), h))
        .collect();
    pairs.sort_by(|(ea, ha), (eb, hb)| ea.total_cmp(eb).then_with(|| ha.cmp(hb)));
    let (exponents, members) = pairs
        .into_iter()
        .map(|(e, h)| (e, FrequencyIndex(h)))
        .unzip();
    Ok(IndexSet {
        params: params.clone(),
        threshold_x: x,
        members,
        exponents,
    })
}

/// `j(x) = sup{j : x > a_j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JOfX {
    Finite(usize),
    Infinite,
}

impl JOfX {
    /// `min(s, j(x))`.
    pub fn capped(self, s: usize) -> usize {
        match self {
            JOfX::Finite(j) => j.min(s),
            JOfX::Infinite => s,
        }
    }
}

const J_SEARCH_LIMIT: usize = 1 << 62;

/// `j(x) = sup{j ∈ N : x > a_j}` for `x > a_1`.
pub fn j_of_x(params: &KorobovParams, x: f64) -> Result<JOfX> {
    let a1 = params.a_term(1)?;
    if !(x > a1) {
        return Err(Error::JUndefined { x, a1 });
    }
    if let Limit::Finite(sup) = a_limit(params.a_family()) {
        if x > sup {
            return Ok(JOfX::Infinite);
        }
    }
    // a is nondecreasing: gallop to a j with a_j ≥ x, then bisect.
    let below = |j: usize| -> Result<bool> { Ok(params.a_term(j)? < x) };
    let mut lo = 1usize; // a_lo < x
    let mut hi = 2usize;
    while below(hi)? {
        lo = hi;
        if hi >= J_SEARCH_LIMIT {
            return Err(Error::InvalidInput(format!(
                "j(x) exceeds {J_SEARCH_LIMIT} for x = {x}"
            )));
        }
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(JOfX::Finite(lo))
}

/// Lower and upper product bounds on `n(x,s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `⌈(y/a)^{1/b}⌉` evaluated through the same strict comparison used for counting.
fn ceil_root(a: f64, b: f64, y: f64) -> u64 {
    if y <= 0.0 {
        0
    } else {
        max_abs(a, b, y) + 1
    }
}

/// Product bounds on `n(x,s)`: the lower product with splitting weights
/// `alphas` (default `α_j = (j−1)/j`, i.e. the `1/s` split) and the upper
/// product `Π_{j ≤ min(s,j(x))} (2⌈(x/a_j)^{1/b_j}⌉ − 1)`.
///
/// Lower factors are clamped below at 1 (a factor `2⌈0⌉ − 1` arises only
/// when some `α_j = 1`).
pub fn lemma1_bounds(
    params: &KorobovParams,
    x: f64,
    alphas: Option<&[f64]>,
) -> Result<SandwichBounds> {
    let s = params.s();
    let default_alphas: Vec<f64>;
    let alphas = match alphas {
        Some(al) => {
            if al.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    got: al.len(),
                });
            }
            if let Some(&bad) = al.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::OutOfRange {
                    name: "alpha",
                    value: bad,
                    range: "[0, 1]",
                });
            }
            al
        }
        None => {
            default_alphas = (1..=s).map(|j| (j as f64 - 1.0) / j as f64).collect();
            &default_alphas
        }
    };
    let jx = j_of_x(params, x)?.capped(s);
    let (a, b) = (params.a_terms(), params.b_terms());
    let mut lower = 1.0;
    let mut upper = 1.0;
    for j in 0..jx {
        let tail: f64 = alphas[j + 1..].iter().product();
        let split = x * (1.0 - alphas[j]) * tail;
        let lf = (2 * ceil_root(a[j], b[j], split)) as f64 - 1.0;
        lower *= lf.max(1.0);
        upper *= (2 * ceil_root(a[j], b[j], x)) as f64 - 1.0;
    }
    Ok(SandwichBounds { lower, upper })
}

/// `3^{j*}·x^{B(s) + ln 3/δ}`, an upper bound on `n(x,s)` valid when
/// `a_j ≥ e^{δj}` for `j* ≤ j ≤ s`.
pub fn count_upper_pt(params: &KorobovParams, x: f64, delta: f64, j_star: usize) -> Result<f64> {
    if j_star == 0 {
        return Err(Error::ZeroIndex);
    }
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, ∞)",
        });
    }
    let a1 = params.a_terms()[0];
    if !(x > a1) {
        return Err(Error::JUndefined { x, a1 });
    }
    for j in j_star..=params.s() {
        let aj = params.a_terms()[j - 1];
        if aj < (delta * j as f64).exp() {
            return Err(Error::GrowthPrecondition { j, a_j: aj });
        }
    }
    let exponent = params.b_sum() + 3f64.ln() / delta;
    Ok(3f64.powi(j_star as i32) * x.powf(exponent))
}
