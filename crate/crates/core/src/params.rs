//! Parameterization of the weighted Korobov space: `ω ∈ (0,1)`, the weight
//! sequences `a` and `b`, and the dimension `s`.
//!
//! Sequences are closed-form families rather than raw arrays so that tail
//! quantities (limits, series sums, exponential growth rates) can be decided
//! analytically; see [`crate::tractability`].
//!
//! # Config format
//!
//! ```json
//! {"omega": 0.5, "s": 4,
//!  "a": {"family": "geometric", "c": 1, "r": 3},
//!  "b": {"family": "power", "c": 1, "k": 2}}
//! ```
//!
//! Families: `constant{c}` (c), `power{c,k}` (c·j^k), `geometric{c,r}` (c·r^j),
//! `exponential{c,alpha}` (c·e^{alpha·j}), `super_geometric{c,r}` (c·r^{j²}) and
//! `explicit{values, tail}` where `tail` is `"repeat"` (last value repeated),
//! a family object (continuation: term j is the family's j-th term), or absent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which role a sequence plays; `a` must additionally be nondecreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    A,
    B,
}

/// How an explicit list continues past its last entry.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule {
    /// The last listed value is repeated forever.
    Repeat,
    /// Term `j` beyond the list is the `j`-th term of this family.
    Continue(Box<SequenceFamily>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TailRepr {
    Keyword(TailKeyword),
    Family(Box<SequenceFamily>),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TailKeyword {
    Repeat,
}

impl Serialize for TailRule {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TailRule::Repeat => TailRepr::Keyword(TailKeyword::Repeat).serialize(serializer),
            TailRule::Continue(f) => TailRepr::Family(f.clone()).serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for TailRule {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        Ok(match TailRepr::deserialize(deserializer)? {
            TailRepr::Keyword(TailKeyword::Repeat) => TailRule::Repeat,
            TailRepr::Family(f) => TailRule::Continue(f),
        })
    }
}

/// A closed-form sequence `j ↦ x_j`, `j = 1, 2, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceFamily {
    Constant {
        c: f64,
    },
    Power {
        c: f64,
        k: f64,
    },
    Geometric {
        c: f64,
        r: f64,
    },
    Exponential {
        c: f64,
        alpha: f64,
    },
    SuperGeometric {
        c: f64,
        r: f64,
    },
    Explicit {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailRule>,
    },
}

impl SequenceFamily {
    pub fn constant(c: f64) -> Self {
        SequenceFamily::Constant { c }
    }

    pub fn power(c: f64, k: f64) -> Self {
        SequenceFamily::Power { c, k }
    }

    pub fn geometric(c: f64, r: f64) -> Self {
        SequenceFamily::Geometric { c, r }
    }

    pub fn exponential(c: f64, alpha: f64) -> Self {
        SequenceFamily::Exponential { c, alpha }
    }

    pub fn super_geometric(c: f64, r: f64) -> Self {
        SequenceFamily::SuperGeometric { c, r }
    }

    /// Explicit list whose last value repeats.
    pub fn explicit(values: Vec<f64>) -> Self {
        SequenceFamily::Explicit {
            values,
            tail: Some(TailRule::Repeat),
        }
    }

    /// Explicit list continued by `family` past its end.
    pub fn explicit_then(values: Vec<f64>, family: SequenceFamily) -> Self {
        SequenceFamily::Explicit {
            values,
            tail: Some(TailRule::Continue(Box::new(family))),
        }
    }

    /// Explicit list with no declared tail; terms past the end are undefined.
    pub fn explicit_finite(values: Vec<f64>) -> Self {
        SequenceFamily::Explicit { values, tail: None }
    }

    /// The `j`-th term (1-based).
    pub fn term(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(Error::ZeroIndex);
        }
        let jf = j as f64;
        Ok(match self {
            SequenceFamily::Constant { c } => *c,
            SequenceFamily::Power { c, k } => c * jf.powf(*k),
            SequenceFamily::Geometric { c, r } => c * r.powf(jf),
            SequenceFamily::Exponential { c, alpha } => c * (alpha * jf).exp(),
            SequenceFamily::SuperGeometric { c, r } => c * r.powf(jf * jf),
            SequenceFamily::Explicit { values, tail } => {
                if j <= values.len() {
                    values[j - 1]
                } else {
                    match tail {
                        Some(TailRule::Repeat) => match values.last() {
                            Some(v) => *v,
                            None => return Err(Error::UndefinedTerm { j, len: 0 }),
                        },
                        Some(TailRule::Continue(f)) => f.term(j)?,
                        None => {
                            return Err(Error::UndefinedTerm {
                                j,
                                len: values.len(),
                            })
                        }
                    }
                }
            }
        })
    }

    /// Checks the family's parameters so that the whole infinite sequence is
    /// valid for `role`: every term at least 1, and nondecreasing for `a`.
    ///
    /// Explicit lists without a tail rule are checked on their listed values only.
    pub fn check_infinite(&self, role: Role) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidFamily(format!("{self:?}: {msg}")));
        match self {
            SequenceFamily::Constant { c } => {
                if !(c.is_finite() && *c >= 1.0) {
                    return bad("requires c >= 1");
                }
            }
            SequenceFamily::Power { c, k } => {
                if !(c.is_finite() && k.is_finite() && *c >= 1.0 && *k >= 0.0) {
                    return bad("requires c >= 1 and k >= 0");
                }
            }
            SequenceFamily::Geometric { c, r } | SequenceFamily::SuperGeometric { c, r } => {
                if !(c.is_finite() && r.is_finite() && *c > 0.0 && *r >= 1.0 && c * r >= 1.0) {
                    return bad("requires r >= 1 and c*r >= 1");
                }
            }
            SequenceFamily::Exponential { c, alpha } => {
                if !(c.is_finite()
                    && alpha.is_finite()
                    && *c > 0.0
                    && *alpha >= 0.0
                    && c * alpha.exp() >= 1.0)
                {
                    return bad("requires alpha >= 0 and c*e^alpha >= 1");
                }
            }
            SequenceFamily::Explicit { values, tail } => {
                if values.is_empty() {
                    return bad("explicit list must be nonempty");
                }
                for (i, v) in values.iter().enumerate() {
                    if v.is_nan() || *v < 1.0 {
                        return bad(&format!("value #{} is below 1", i + 1));
                    }
                    if role == Role::A && i > 0 && values[i - 1] > *v {
                        return bad(&format!("values decrease at #{}", i + 1));
                    }
                }
                if let Some(TailRule::Continue(f)) = tail {
                    f.check_infinite(role)?;
                    let next = f.term(values.len() + 1)?;
                    if next < 1.0 {
                        return bad("continuation drops below 1");
                    }
                    if role == Role::A && next < values[values.len() - 1] {
                        return bad("continuation is below the last listed value");
                    }
                }
            }
        }
        Ok(())
    }

    /// True when terms past any finite prefix are determined.
    pub fn has_decidable_tail(&self) -> bool {
        match self {
            SequenceFamily::Explicit { tail: None, .. } => false,
            SequenceFamily::Explicit {
                tail: Some(TailRule::Continue(f)),
                ..
            } => f.has_decidable_tail(),
            _ => true,
        }
    }
}

/// Serializable form of [`KorobovParams`]; validation turns it into the real thing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega: f64,
    pub s: usize,
    pub a: SequenceFamily,
    pub b: SequenceFamily,
}

impl ParamsConfig {
    pub fn validate(self) -> Result<KorobovParams> {
        KorobovParams::new(self.omega, self.a, self.b, self.s)
    }
}

/// Parses a JSON document, reporting the failing path on error.
pub(crate) fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            path: if path.is_empty() { ".".into() } else { path },
            reason: e.into_inner().to_string(),
        }
    })
}

/// Validated space parameters. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct KorobovParams {
    omega: f64,
    s: usize,
    a: SequenceFamily,
    b: SequenceFamily,
    a_terms: Vec<f64>,
    b_terms: Vec<f64>,
}

impl KorobovParams {
    pub fn new(omega: f64, a: SequenceFamily, b: SequenceFamily, s: usize) -> Result<Self> {
        if !(omega > 0.0 && omega < 1.0) {
            return Err(Error::OmegaOutOfRange(omega));
        }
        if s == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut a_terms = Vec::with_capacity(s);
        let mut b_terms = Vec::with_capacity(s);
        for j in 1..=s {
            let aj = a.term(j)?;
            let bj = b.term(j)?;
            if aj.is_nan() || aj < 1.0 {
                return Err(Error::ATermBelowOne { j, value: aj });
            }
            if bj.is_nan() || bj < 1.0 {
                return Err(Error::BTermBelowOne { j, value: bj });
            }
            if let Some(&prev) = a_terms.last() {
                if prev > aj {
                    return Err(Error::ANonmonotone {
                        j: j - 1,
                        prev,
                        next: aj,
                    });
                }
            }
            a_terms.push(aj);
            b_terms.push(bj);
        }
        Ok(KorobovParams {
            omega,
            s,
            a,
            b,
            a_terms,
            b_terms,
        })
    }

    /// Parameters from finite lists; the last entries repeat past `s`.
    pub fn from_terms(omega: f64, a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        Self::new(
            omega,
            SequenceFamily::explicit(a.to_vec()),
            SequenceFamily::explicit(b.to_vec()),
            a.len(),
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        from_json_str::<ParamsConfig>(text)?.validate()
    }

    pub fn to_config(&self) -> ParamsConfig {
        ParamsConfig {
            omega: self.omega,
            s: self.s,
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// Same families and `ω` in another dimension.
    pub fn with_dimension(&self, s: usize) -> Result<Self> {
        Self::new(self.omega, self.a.clone(), self.b.clone(), s)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `ln(1/ω) > 0`.
    pub fn ln_inv_omega(&self) -> f64 {
        -self.omega.ln()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn a_family(&self) -> &SequenceFamily {
        &self.a
    }

    pub fn b_family(&self) -> &SequenceFamily {
        &self.b
    }

    /// `a_1, …, a_s`.
    pub fn a_terms(&self) -> &[f64] {
        &self.a_terms
    }

    /// `b_1, …, b_s`.
    pub fn b_terms(&self) -> &[f64] {
        &self.b_terms
    }

    /// `a_j` for any `j ≥ 1`, also beyond `s`.
    pub fn a_term(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(Error::ZeroIndex);
        }
        match self.a_terms.get(j - 1) {
            Some(v) => Ok(*v),
            None => self.a.term(j),
        }
    }

    pub fn b_term(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(Error::ZeroIndex);
        }
        match self.b_terms.get(j - 1) {
            Some(v) => Ok(*v),
            None => self.b.term(j),
        }
    }

    /// `B(s) = Σ_{j ≤ s} 1/b_j`.
    pub fn b_sum(&self) -> f64 {
        self.b_terms.iter().map(|b| 1.0 / b).sum()
    }

    /// `ω^x` computed as `exp(−x ln(1/ω))`.
    pub fn weight_of_exponent(&self, x: f64) -> f64 {
        (-x * self.ln_inv_omega()).exp()
    }
}

impl Serialize for KorobovParams {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_config().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KorobovParams {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        ParamsConfig::deserialize(deserializer)?
            .validate()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_terms() {
        assert_eq!(SequenceFamily::geometric(1.0, 3.0).term(2).unwrap(), 9.0);
        assert_eq!(SequenceFamily::constant(1.0).term(10).unwrap(), 1.0);
        let e6 = SequenceFamily::exponential(1.0, 2.0).term(3).unwrap();
        assert!((e6 - 6f64.exp()).abs() < 1e-12 * e6);
        assert_eq!(SequenceFamily::power(2.0, 2.0).term(3).unwrap(), 18.0);
        assert_eq!(
            SequenceFamily::super_geometric(1.0, 2.0).term(3).unwrap(),
            512.0
        );
    }

    #[test]
    fn zero_index_rejected() {
        assert_eq!(SequenceFamily::constant(1.0).term(0), Err(Error::ZeroIndex));
        let p = KorobovParams::from_terms(0.5, &[1.0], &[1.0]).unwrap();
        assert_eq!(p.a_term(0), Err(Error::ZeroIndex));
    }

    #[test]
    fn explicit_tails() {
        let rep = SequenceFamily::explicit(vec![1.0, 3.0]);
        assert_eq!(rep.term(5).unwrap(), 3.0);
        let cont =
            SequenceFamily::explicit_then(vec![1.0, 3.0, 9.0], SequenceFamily::geometric(1.0, 3.0));
        assert_eq!(cont.term(4).unwrap(), 81.0);
        let fin = SequenceFamily::explicit_finite(vec![1.0]);
        assert_eq!(fin.term(2), Err(Error::UndefinedTerm { j: 2, len: 1 }));
    }

    #[test]
    fn validate_accepts_and_rejects() {
        let ok = KorobovParams::new(
            0.5,
            SequenceFamily::constant(1.0),
            SequenceFamily::constant(1.0),
            3,
        );
        assert!(ok.is_ok());
        let omega = KorobovParams::new(
            1.0,
            SequenceFamily::constant(1.0),
            SequenceFamily::constant(1.0),
            3,
        );
        assert_eq!(omega, Err(Error::OmegaOutOfRange(1.0)));
        let mono = KorobovParams::new(
            0.5,
            SequenceFamily::explicit(vec![2.0, 1.0]),
            SequenceFamily::constant(1.0),
            2,
        );
        assert!(matches!(mono, Err(Error::ANonmonotone { j: 1, .. })));
        let a_low = KorobovParams::new(
            0.5,
            SequenceFamily::constant(0.5),
            SequenceFamily::constant(1.0),
            1,
        );
        assert!(matches!(a_low, Err(Error::ATermBelowOne { j: 1, .. })));
        let b_low = KorobovParams::new(
            0.5,
            SequenceFamily::constant(1.0),
            SequenceFamily::power(1.0, -1.0),
            2,
        );
        assert!(matches!(b_low, Err(Error::BTermBelowOne { j: 2, .. })));
        assert_eq!(
            KorobovParams::new(
                0.5,
                SequenceFamily::constant(1.0),
                SequenceFamily::constant(1.0),
                0
            ),
            Err(Error::ZeroDimension)
        );
    }

    #[test]
    fn config_parses_and_reports_path() {
        let p = KorobovParams::from_json_str(
            r#"{"omega": 0.5, "s": 4, "a": {"family":"geometric","c":1,"r":3}, "b": {"family":"power","c":1,"k":2}}"#,
        )
        .unwrap();
        assert_eq!(p.a_terms(), &[3.0, 9.0, 27.0, 81.0]);
        assert_eq!(p.b_terms(), &[1.0, 4.0, 9.0, 16.0]);

        let err = KorobovParams::from_json_str(r#"{"omega": 0.5, "s": 2, "a": {"family":"geometric","c":1}, "b": {"family":"constant","c":1}}"#)
            .unwrap_err();
        match err {
            Error::Config { path, reason } => {
                assert_eq!(path, "a");
                assert!(reason.contains("missing field `r`"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = KorobovParams::from_json_str(r#"{"omega": "x"}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "omega"));
    }

    #[test]
    fn tail_rule_serialization() {
        let f = SequenceFamily::explicit_then(vec![1.0, 2.0], SequenceFamily::geometric(1.0, 2.0));
        let text = serde_json::to_string(&f).unwrap();
        assert!(
            text.contains("\"tail\":{\"family\":\"geometric\""),
            "{text}"
        );
        let g: SequenceFamily =
            serde_json::from_str(r#"{"family":"explicit","values":[1,2],"tail":"repeat"}"#)
                .unwrap();
        assert_eq!(g, SequenceFamily::explicit(vec![1.0, 2.0]));
    }

    #[test]
    fn infinite_checks() {
        assert!(SequenceFamily::geometric(1.0, 0.5)
            .check_infinite(Role::B)
            .is_err());
        assert!(SequenceFamily::geometric(0.5, 3.0)
            .check_infinite(Role::A)
            .is_ok());
        assert!(
            SequenceFamily::explicit_then(vec![100.0], SequenceFamily::geometric(1.0, 2.0))
                .check_infinite(Role::A)
                .is_err()
        );
        assert!(
            SequenceFamily::explicit_then(vec![100.0], SequenceFamily::geometric(1.0, 2.0))
                .check_infinite(Role::B)
                .is_ok()
        );
    }

    fn family_strategy() -> impl Strategy<Value = SequenceFamily> {
        let leaf = prop_oneof![
            (1.0..10.0f64).prop_map(SequenceFamily::constant),
            (1.0..10.0f64, 0.0..3.0f64).prop_map(|(c, k)| SequenceFamily::power(c, k)),
            (0.5..3.0f64, 1.0..2.0f64).prop_map(|(c, r)| SequenceFamily::geometric(c, r)),
            (0.5..3.0f64, 0.0..0.05f64).prop_map(|(c, a)| SequenceFamily::exponential(c, a)),
        ];
        prop_oneof![
            leaf.clone(),
            proptest::collection::vec(1.0..100.0f64, 1..5).prop_map(SequenceFamily::explicit),
            (proptest::collection::vec(1.0..100.0f64, 1..5), leaf)
                .prop_map(|(v, f)| SequenceFamily::explicit_then(v, f)),
        ]
    }

    proptest! {
        #[test]
        fn config_round_trip_preserves_terms(f in family_strategy()) {
            let text = serde_json::to_string(&f).unwrap();
            let g: SequenceFamily = serde_json::from_str(&text).unwrap();
            for j in 1..=10_000usize {
                prop_assert_eq!(f.term(j).unwrap().to_bits(), g.term(j).unwrap().to_bits());
            }
        }

        #[test]
        fn validated_terms_respect_invariants(
            a in proptest::collection::vec(1.0..20.0f64, 1..6),
            b in proptest::collection::vec(1.0..5.0f64, 6),
        ) {
            let mut a = a;
            a.sort_by(f64::total_cmp);
            let p = KorobovParams::from_terms(0.3, &a, &b[..a.len()]).unwrap();
            for j in 1..=p.s() {
                prop_assert!(p.a_term(j).unwrap() >= 1.0);
                prop_assert!(p.b_term(j).unwrap() >= 1.0);
                if j < p.s() {
                    prop_assert!(p.a_term(j).unwrap() <= p.a_term(j + 1).unwrap());
                }
            }
        }
    }
}
