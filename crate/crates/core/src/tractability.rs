//! Decision procedures for exponential convergence and tractability of
//! `L_2`-approximation in terms of the sequences `a` and `b`:
//!
//! | quantity | rule |
//! |---|---|
//! | EXP rate `p*(s)` | `1/B(s)`, `B(s) = Σ_{j≤s} 1/b_j` |
//! | UEXP | `B = Σ_j 1/b_j < ∞`, rate `1/B` |
//! | WT | `lim a_j = ∞` |
//! | WT+UEXP | both of the above |
//! | PT ⇔ SPT (⇔ …+UEXP) | `B < ∞` and `α* = liminf (ln a_j)/j > 0` |
//! | SPT exponent `τ*` | `max(B, ln 3/α*) ≤ τ* ≤ B + ln 3/α*`, `τ* = B` if `α* = ∞` |
//!
//! Tail quantities are read off the family kind:
//!
//! | family | `lim x_j` | `α*` | `Σ 1/x_j` |
//! |---|---|---|---|
//! | `constant(c)` | `c` | 0 | ∞ |
//! | `power(c,k)` | ∞ if `k>0` | 0 | finite iff `k>1` (interval) |
//! | `geometric(c,r)` | ∞ if `r>1` | `ln r` | `1/(c(r−1))` |
//! | `exponential(c,α)` | ∞ if `α>0` | `α` | `1/(c(e^α−1))` |
//! | `super_geometric(c,r)` | ∞ if `r>1` | ∞ if `r>1` | finite iff `r>1` (interval) |
//! | `explicit` + repeat | last value | 0 | ∞ |
//! | `explicit` + family | the family's | the family's | listed + family tail |
//! | `explicit`, no tail | unknown | unknown | unknown |
//!
//! Weak tractability here means `lim log n(ε,s)/(s + log ε^{-1}) = 0`; the
//! stricter notion sometimes used for integration is not decided.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::{Role, SequenceFamily, TailRule};

/// Limit of a nondecreasing sequence (its supremum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite(f64),
    Infinite,
    Unknown,
}

/// A nonnegative extended real that may be undecidable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
    Unknown,
}

/// Certified enclosure `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn widen(v: f64, rel: f64) -> Self {
        Interval {
            lo: v * (1.0 - rel),
            hi: v * (1.0 + rel),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn add(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
    }
}

/// Value of a series of positive terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesSum {
    Finite(Interval),
    Infinite,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            _ => Verdict::Unknown,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

fn serialize_tagged<S: Serializer>(
    finite: Option<f64>,
    word: &str,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match finite {
        Some(v) => s.serialize_f64(v),
        None => s.serialize_str(word),
    }
}

impl Serialize for Limit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Limit::Finite(v) => serialize_tagged(Some(*v), "", s),
            Limit::Infinite => serialize_tagged(None, "infinite", s),
            Limit::Unknown => serialize_tagged(None, "unknown", s),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => serialize_tagged(Some(*v), "", s),
            Extended::Infinite => serialize_tagged(None, "infinite", s),
            Extended::Unknown => serialize_tagged(None, "unknown", s),
        }
    }
}

impl Serialize for SeriesSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SeriesSum::Finite(iv) => iv.serialize(s),
            SeriesSum::Infinite => s.serialize_str("infinite"),
            SeriesSum::Unknown => s.serialize_str("unknown"),
        }
    }
}

/// `lim_j x_j` for a nondecreasing family.
pub fn a_limit(f: &SequenceFamily) -> Limit {
    match f {
        SequenceFamily::Constant { c } => Limit::Finite(*c),
        SequenceFamily::Power { c, k } => {
            if *k > 0.0 {
                Limit::Infinite
            } else {
                Limit::Finite(*c)
            }
        }
        SequenceFamily::Geometric { c, r } | SequenceFamily::SuperGeometric { c, r } => {
            if *r > 1.0 {
                Limit::Infinite
            } else {
                Limit::Finite(*c)
            }
        }
        SequenceFamily::Exponential { c, alpha } => {
            if *alpha > 0.0 {
                Limit::Infinite
            } else {
                Limit::Finite(*c)
            }
        }
        SequenceFamily::Explicit { values, tail } => match tail {
            Some(TailRule::Repeat) => values.last().map_or(Limit::Unknown, |v| Limit::Finite(*v)),
            Some(TailRule::Continue(g)) => a_limit(g),
            None => Limit::Unknown,
        },
    }
}

/// `α* = liminf_j (ln x_j)/j`.
pub fn alpha_star(f: &SequenceFamily) -> Extended {
    match f {
        SequenceFamily::Constant { .. } | SequenceFamily::Power { .. } => Extended::Finite(0.0),
        SequenceFamily::Geometric { r, .. } => Extended::Finite(r.ln()),
        SequenceFamily::Exponential { alpha, .. } => Extended::Finite(*alpha),
        SequenceFamily::SuperGeometric { r, .. } => {
            if *r > 1.0 {
                Extended::Infinite
            } else {
                Extended::Finite(0.0)
            }
        }
        SequenceFamily::Explicit { tail, .. } => match tail {
            Some(TailRule::Repeat) => Extended::Finite(0.0),
            Some(TailRule::Continue(g)) => alpha_star(g),
            None => Extended::Unknown,
        },
    }
}

const POWER_PARTIAL_TERMS: usize = 100_000;
const REL_ROUNDING: f64 = 1e-13;

/// `Σ_{j > from} 1/x_j` with a certified enclosure.
pub fn reciprocal_tail_sum(f: &SequenceFamily, from: usize) -> SeriesSum {
    let from_f = from as f64;
    match f {
        SequenceFamily::Constant { .. } => SeriesSum::Infinite,
        SequenceFamily::Power { c, k } => {
            if *k <= 1.0 {
                return SeriesSum::Infinite;
            }
            let last = from + POWER_PARTIAL_TERMS;
            let partial: f64 = (from + 1..=last)
                .rev()
                .map(|j| 1.0 / (c * (j as f64).powf(*k)))
                .sum();
            let lf = last as f64;
            // ∫_{L+1}^∞ ≤ Σ_{j>L} ≤ ∫_L^∞ of t^{-k}/c
            let lo_tail = (lf + 1.0).powf(1.0 - k) / ((k - 1.0) * c);
            let hi_tail = lf.powf(1.0 - k) / ((k - 1.0) * c);
            SeriesSum::Finite(Interval {
                lo: (partial + lo_tail) * (1.0 - REL_ROUNDING),
                hi: (partial + hi_tail) * (1.0 + REL_ROUNDING),
            })
        }
        SequenceFamily::Geometric { c, r } => {
            if *r <= 1.0 {
                return SeriesSum::Infinite;
            }
            let v = r.powf(-from_f) / (c * (r - 1.0));
            SeriesSum::Finite(Interval::widen(v, REL_ROUNDING))
        }
        SequenceFamily::Exponential { c, alpha } => {
            if *alpha <= 0.0 {
                return SeriesSum::Infinite;
            }
            let v = (-alpha * from_f).exp() / (c * alpha.exp_m1());
            SeriesSum::Finite(Interval::widen(v, REL_ROUNDING))
        }
        SequenceFamily::SuperGeometric { c, r } => {
            if *r <= 1.0 {
                return SeriesSum::Infinite;
            }
            let ln_r = r.ln();
            let term = |j: f64| (-ln_r * j * j).exp() / c;
            let mut partial = 0.0;
            let mut j = from_f + 1.0;
            loop {
                partial += term(j);
                // consecutive ratio beyond j is at most r^{-(2j+3)}
                let tail = term(j + 1.0) / (1.0 - (-ln_r * (2.0 * j + 3.0)).exp());
                if tail <= 1e-17 * partial || tail < f64::MIN_POSITIVE {
                    return SeriesSum::Finite(Interval {
                        lo: partial * (1.0 - REL_ROUNDING),
                        hi: (partial + tail) * (1.0 + REL_ROUNDING),
                    });
                }
                j += 1.0;
            }
        }
        SequenceFamily::Explicit { values, tail } => {
            let listed: f64 = values.iter().skip(from).map(|v| 1.0 / v).sum();
            let listed = Interval::widen(listed, REL_ROUNDING);
            match tail {
                Some(TailRule::Repeat) => SeriesSum::Infinite,
                Some(TailRule::Continue(g)) => match reciprocal_tail_sum(g, from.max(values.len()))
                {
                    SeriesSum::Finite(iv) => SeriesSum::Finite(listed.add(iv)),
                    other => other,
                },
                None => SeriesSum::Unknown,
            }
        }
    }
}

/// Tractability and convergence verdicts for a pair of sequence families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TractabilityReport {
    pub s: usize,
    /// `B(s) = Σ_{j≤s} 1/b_j`.
    pub b_s: f64,
    /// `B = Σ_j 1/b_j`.
    pub b_total: SeriesSum,
    pub a_limit: Limit,
    pub alpha_star: Extended,
    /// Best EXP rate `p*(s) = 1/B(s)`.
    pub exp_rate_ps: f64,
    pub uexp: Verdict,
    /// `p* = 1/B` when `B` is finite.
    pub uexp_rate: Option<Interval>,
    pub wt: Verdict,
    pub wt_uexp: Verdict,
    /// PT ⇔ SPT ⇔ SPT+UEXP.
    pub pt_spt: Verdict,
    /// Bracket `[max(B, ln3/α*), B + ln3/α*]` for the SPT exponent, present iff PT holds.
    pub tau_star: Option<Interval>,
    pub wt_notion: &'static str,
}

impl TractabilityReport {
    pub fn has_unknown(&self) -> bool {
        [self.uexp, self.wt, self.wt_uexp, self.pt_spt].contains(&Verdict::Unknown)
    }
}

/// Classifies `(a, b)`; `s` only affects `B(s)` and `p*(s)`.
pub fn analyze(a: &SequenceFamily, b: &SequenceFamily, s: usize) -> Result<TractabilityReport> {
    if s == 0 {
        return Err(Error::ZeroDimension);
    }
    a.check_infinite(Role::A)?;
    b.check_infinite(Role::B)?;
    let mut b_s = 0.0;
    for j in 1..=s {
        b_s += 1.0 / b.term(j)?;
    }
    let b_total = reciprocal_tail_sum(b, 0);
    let a_lim = a_limit(a);
    let alpha = alpha_star(a);

    let uexp = match b_total {
        SeriesSum::Finite(_) => Verdict::Yes,
        SeriesSum::Infinite => Verdict::No,
        SeriesSum::Unknown => Verdict::Unknown,
    };
    let uexp_rate = match b_total {
        SeriesSum::Finite(iv) => Some(Interval {
            lo: 1.0 / iv.hi,
            hi: 1.0 / iv.lo,
        }),
        _ => None,
    };
    let wt = match a_lim {
        Limit::Infinite => Verdict::Yes,
        Limit::Finite(_) => Verdict::No,
        Limit::Unknown => Verdict::Unknown,
    };
    let alpha_positive = match alpha {
        Extended::Finite(v) => Verdict::from_bool(v > 0.0),
        Extended::Infinite => Verdict::Yes,
        Extended::Unknown => Verdict::Unknown,
    };
    let pt_spt = uexp.and(alpha_positive);
    let tau_star = match (pt_spt, b_total, alpha) {
        (Verdict::Yes, SeriesSum::Finite(bb), Extended::Infinite) => Some(bb),
        (Verdict::Yes, SeriesSum::Finite(bb), Extended::Finite(al)) => {
            let l3 = 3f64.ln() / al;
            Some(Interval {
                lo: bb.lo.max(l3),
                hi: bb.hi + l3,
            })
        }
        _ => None,
    };
    Ok(TractabilityReport {
        s,
        b_s,
        b_total,
        a_limit: a_lim,
        alpha_star: alpha,
        exp_rate_ps: 1.0 / b_s,
        uexp,
        uexp_rate,
        wt,
        wt_uexp: uexp.and(wt),
        pt_spt,
        tau_star,
        wt_notion: "lim log n(eps,s)/(s + log 1/eps) = 0",
    })
}

fn fmt_series(v: &SeriesSum) -> String {
    match v {
        SeriesSum::Finite(iv) if iv.hi - iv.lo <= 1e-12 * iv.hi.abs() => {
            format!("{:.12}", iv.mid())
        }
        SeriesSum::Finite(iv) => format!("[{:.12}, {:.12}]", iv.lo, iv.hi),
        SeriesSum::Infinite => "infinite".into(),
        SeriesSum::Unknown => "unknown".into(),
    }
}

impl fmt::Display for TractabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lim = match self.a_limit {
            Limit::Finite(v) => format!("{v}"),
            Limit::Infinite => "infinite".into(),
            Limit::Unknown => "unknown".into(),
        };
        let alpha = match self.alpha_star {
            Extended::Finite(v) => format!("{v:.12}"),
            Extended::Infinite => "infinite".into(),
            Extended::Unknown => "unknown".into(),
        };
        let rows: Vec<(&str, String)> = vec![
            ("s", self.s.to_string()),
            ("B(s)", format!("{:.12}", self.b_s)),
            ("B", fmt_series(&self.b_total)),
            ("lim a_j", lim),
            ("alpha*", alpha),
            ("EXP rate p*(s)", format!("{:.12}", self.exp_rate_ps)),
            ("UEXP", self.uexp.to_string()),
            (
                "UEXP rate p*",
                self.uexp_rate
                    .map_or("n/a".into(), |iv| format!("[{:.12}, {:.12}]", iv.lo, iv.hi)),
            ),
            ("WT", self.wt.to_string()),
            ("WT+UEXP", self.wt_uexp.to_string()),
            ("PT/SPT", self.pt_spt.to_string()),
            (
                "tau* bracket",
                self.tau_star
                    .map_or("n/a".into(), |iv| format!("[{:.12}, {:.12}]", iv.lo, iv.hi)),
            ),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            writeln!(f, "{k:<width$}  {v}")?;
        }
        Ok(())
    }
}

/// Least-squares fit of `ln ln(1/e) ≈ p·ln n + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub p: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Fits the exponential-convergence exponent `p` in `e(n) ≈ C q^{(n/C_1)^p}`
/// from `(n, e)` pairs ordered by increasing `n`.
pub fn fit_exponential_rate(errors: &[(f64, f64)]) -> Result<RateFit> {
    for &(_, e) in errors {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::InvalidInput(format!("error {e} outside (0, 1)")));
        }
    }
    let logs: Vec<(f64, f64)> = errors.iter().map(|&(n, e)| (n, -e.ln())).collect();
    fit_exponential_rate_log(&logs)
}

/// Same as [`fit_exponential_rate`] but takes `(n, ln(1/e))`, which stays
/// representable long after `e` itself underflows.
pub fn fit_exponential_rate_log(log_errors: &[(f64, f64)]) -> Result<RateFit> {
    if log_errors.len() < 8 {
        return Err(Error::InvalidInput(format!(
            "need at least 8 points, got {}",
            log_errors.len()
        )));
    }
    for w in log_errors.windows(2) {
        if !(w[1].1 > w[0].1) {
            return Err(Error::InvalidInput(format!(
                "errors must be strictly decreasing (n = {} -> {})",
                w[0].0, w[1].0
            )));
        }
    }
    for &(n, l) in log_errors {
        if !(n > 0.0 && l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bad point (n = {n}, ln 1/e = {l})"
            )));
        }
    }
    let xs: Vec<f64> = log_errors.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = log_errors.iter().map(|(_, l)| l.ln()).collect();
    let (p, intercept) = least_squares(&xs, &ys);
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - p * x - intercept).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    Ok(RateFit {
        p,
        intercept,
        residual,
    })
}

/// Slope and intercept of the ordinary least-squares line.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
