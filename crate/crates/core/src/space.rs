//! Elements of the Korobov space: the reproducing kernel, finitely supported
//! Fourier polynomials, and the norm `‖f‖² = Σ_h |f̂(h)|² ω_h^{-1}`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::{raw_exponent, FrequencyIndex, IndexSet};
use crate::params::KorobovParams;
use crate::series::{geometric_cutoff, pow_b};

/// Reduces a point into `[0,1)^s`.
pub fn wrap_point(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.rem_euclid(1.0)).collect()
}

/// `exp(2πi h·x)`, with the phase reduced mod 1 before the trig call.
pub fn character(h: &[i64], x: &[f64]) -> Complex64 {
    let phase: f64 = h
        .iter()
        .zip(x)
        .map(|(&hj, &xj)| (hj as f64 * xj).rem_euclid(1.0))
        .sum();
    Complex64::from_polar(1.0, TAU * phase.rem_euclid(1.0))
}

/// `K(x,y) = Π_j (1 + 2 Σ_{h≥1} ω^{a_j h^{b_j}} cos(2πh(x_j − y_j)))`, truncated
/// so that the total truncation error is at most `tol`.
///
/// Per-factor cutoffs `H_j` come from `Σ_{h>H} ω^{a_j h^{b_j}} ≤ ω^{a_j(H+1)}/(1−ω^{a_j})`.
pub fn kernel_eval(params: &KorobovParams, x: &[f64], y: &[f64], tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, ∞)",
        });
    }
    let s = params.s();
    for p in [x, y] {
        if p.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: p.len(),
            });
        }
    }
    let (x, y) = (wrap_point(x), wrap_point(y));
    let ln_q = params.ln_inv_omega();
    // |factor_j| ≤ U_j = 1 + 2 q_j/(1−q_j); a relative slack r on every factor keeps the
    // product error below P·(e^{Σ r} − 1) ≤ tol.
    let uppers: Vec<f64> = params
        .a_terms()
        .iter()
        .map(|&a| {
            let q = (-a * ln_q).exp();
            1.0 + 2.0 * q / (1.0 - q)
        })
        .collect();
    let total: f64 = uppers.iter().product();
    let r = (tol / total).ln_1p() / s as f64;
    let mut value = 1.0;
    for j in 0..s {
        let (a, b) = (params.a_terms()[j], params.b_terms()[j]);
        let budget = uppers[j] * r / 2.0;
        let cutoff = geometric_cutoff(a * ln_q, budget);
        let d = x[j] - y[j];
        let mut factor = 1.0;
        for h in 1..=cutoff {
            let w = (-a * pow_b(h as f64, b) * ln_q).exp();
            if w == 0.0 {
                break;
            }
            factor += 2.0 * w * (TAU * (h as f64 * d).rem_euclid(1.0)).cos();
        }
        value *= factor;
    }
    Ok(Complex64::new(value, 0.0))
}

/// A finitely supported element `f = Σ_h f̂(h) exp(2πi h·x)` of the space.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPolynomial {
    params: KorobovParams,
    coefficients: BTreeMap<FrequencyIndex, Complex64>,
}

/// One `(h, re, im)` triple of the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub h: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl FourierPolynomial {
    pub fn zero(params: &KorobovParams) -> Self {
        FourierPolynomial {
            params: params.clone(),
            coefficients: BTreeMap::new(),
        }
    }

    /// Sums coefficients given for the same frequency.
    pub fn from_terms<I>(params: &KorobovParams, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FrequencyIndex, Complex64)>,
    {
        let mut f = Self::zero(params);
        for (h, c) in terms {
            f.add_term(h, c)?;
        }
        Ok(f)
    }

    /// `e_h = ω_h^{1/2} exp(2πi h·x)`, a unit vector.
    pub fn basis(params: &KorobovParams, h: FrequencyIndex) -> Result<Self> {
        let e = crate::index_set::exponent(params, &h)?;
        let c = Complex64::new(params.weight_of_exponent(0.5 * e), 0.0);
        Self::from_terms(params, [(h, c)])
    }

    pub fn constant(params: &KorobovParams, c: Complex64) -> Self {
        let mut f = Self::zero(params);
        f.coefficients.insert(FrequencyIndex::zero(params.s()), c);
        f
    }

    /// `k_x = K(·, x)` restricted to `support`: coefficients `ω_h exp(−2πi h·x)`.
    pub fn kernel_section<'a, I>(params: &KorobovParams, x: &[f64], support: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FrequencyIndex>,
    {
        let x = wrap_point(x);
        let mut f = Self::zero(params);
        for h in support {
            let w = params.weight_of_exponent(crate::index_set::exponent(params, h)?);
            f.add_term(h.clone(), character(h.components(), &x).conj() * w)?;
        }
        Ok(f)
    }

    pub fn add_term(&mut self, h: FrequencyIndex, c: Complex64) -> Result<()> {
        if h.len() != self.params.s() {
            return Err(Error::DimensionMismatch {
                expected: self.params.s(),
                got: h.len(),
            });
        }
        *self
            .coefficients
            .entry(h)
            .or_insert(Complex64::new(0.0, 0.0)) += c;
        Ok(())
    }

    pub fn params(&self) -> &KorobovParams {
        &self.params
    }

    pub fn coefficients(&self) -> &BTreeMap<FrequencyIndex, Complex64> {
        &self.coefficients
    }

    pub fn coefficient(&self, h: &FrequencyIndex) -> Complex64 {
        self.coefficients.get(h).copied().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &FrequencyIndex> {
        self.coefficients.keys()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `f(x)`; `x` is taken mod 1.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.params.s() {
            return Err(Error::DimensionMismatch {
                expected: self.params.s(),
                got: x.len(),
            });
        }
        let x = wrap_point(x);
        Ok(self
            .coefficients
            .iter()
            .map(|(h, c)| c * character(h.components(), &x))
            .sum())
    }

    fn inverse_weight(&self, h: &FrequencyIndex) -> f64 {
        let e = raw_exponent(self.params.a_terms(), self.params.b_terms(), h.components());
        (e * self.params.ln_inv_omega()).exp()
    }

    /// `⟨f,g⟩ = Σ_h f̂(h) conj(ĝ(h)) ω_h^{-1}`.
    pub fn inner(&self, other: &FourierPolynomial) -> Result<Complex64> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(self
            .coefficients
            .iter()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .filter_map(|(h, c)| {
                other
                    .coefficients
                    .get(h)
                    .map(|d| c * d.conj() * self.inverse_weight(h))
            })
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            // a zero coefficient contributes nothing even where ω_h^{-1} overflows
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(h, c)| c.norm_sqr() * self.inverse_weight(h))
            .sum::<f64>()
            .sqrt()
    }

    /// `‖f‖_{L_2} = (Σ |f̂(h)|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖f − g‖_{L_2}` by Parseval.
    pub fn l2_distance(&self, other: &FourierPolynomial) -> Result<f64> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        let mut sum = 0.0;
        for (h, c) in &self.coefficients {
            sum += (c - other.coefficient(h)).norm_sqr();
        }
        for (h, d) in &other.coefficients {
            if !self.coefficients.contains_key(h) {
                sum += d.norm_sqr();
            }
        }
        Ok(sum.sqrt())
    }

    /// Keeps the coefficients whose frequency satisfies `keep`.
    pub fn restrict<F: Fn(&FrequencyIndex) -> bool>(&self, keep: F) -> Self {
        FourierPolynomial {
            params: self.params.clone(),
            coefficients: self
                .coefficients
                .iter()
                .filter(|(h, _)| keep(h))
                .map(|(h, c)| (h.clone(), *c))
                .collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        FourierPolynomial {
            params: self.params.clone(),
            coefficients: self
                .coefficients
                .iter()
                .map(|(h, c)| (h.clone(), c * k))
                .collect(),
        }
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.coefficients
            .iter()
            .map(|(h, c)| TermRecord {
                h: h.components().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn from_records(params: &KorobovParams, records: &[TermRecord]) -> Result<Self> {
        Self::from_terms(
            params,
            records
                .iter()
                .map(|r| (FrequencyIndex::new(r.h.clone()), Complex64::new(r.re, r.im))),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }

    pub fn from_json(params: &KorobovParams, text: &str) -> Result<Self> {
        let records: Vec<TermRecord> = crate::params::from_json_str(text)?;
        Self::from_records(params, &records)
    }
}

/// A random element of norm 1 supported on `support`, deterministic in `seed`.
pub fn random_unit_ball(
    params: &KorobovParams,
    support: &IndexSet,
    seed: u64,
) -> Result<FourierPolynomial> {
    random_unit_on(params, support.members(), seed)
}

/// As [`random_unit_ball`] for an arbitrary list of frequencies.
pub fn random_unit_on(
    params: &KorobovParams,
    support: &[FrequencyIndex],
    seed: u64,
) -> Result<FourierPolynomial> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(support.len());
    for h in support {
        let w = params.weight_of_exponent(0.5 * crate::index_set::exponent(params, h)?);
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if w > 0.0 {
            draws.push((h.clone(), c, w));
        }
    }
    // ‖Σ c_h ω_h^{1/2} e_h‖ = (Σ |c_h|²)^{1/2}; computed directly, ω_h^{-1} may overflow
    let n = draws
        .iter()
        .map(|(_, c, _)| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if n == 0.0 {
        return Err(Error::EmptySupport);
    }
    FourierPolynomial::from_terms(params, draws.into_iter().map(|(h, c, w)| (h, c * (w / n))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::enumerate;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn params() -> KorobovParams {
        KorobovParams::from_terms(0.5, &[1.0, 1.5, 2.0], &[1.0, 2.0, 1.5]).unwrap()
    }

    #[test]
    fn kernel_diagonal_geometric_series() {
        let p = KorobovParams::from_terms(0.5, &[1.0], &[1.0]).unwrap();
        let k = kernel_eval(&p, &[0.3], &[0.3], 1e-14).unwrap();
        assert!((k.re - 3.0).abs() < 1e-13);
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn kernel_rejects_bad_tol() {
        let p = params();
        assert!(kernel_eval(&p, &[0.0; 3], &[0.0; 3], 0.0).is_err());
    }

    #[test]
    fn kernel_is_dominated_by_diagonal_and_periodic() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let kxy = kernel_eval(&p, &x, &y, 1e-13).unwrap();
            let kxx = kernel_eval(&p, &x, &x, 1e-13).unwrap();
            assert!(kxx.re >= 1.0);
            assert!(kxy.norm() <= kxx.re + 1e-12);
            let kyx = kernel_eval(&p, &y, &x, 1e-13).unwrap();
            assert!((kxy - kyx.conj()).norm() < 1e-12);
            let shifted: Vec<f64> = x
                .iter()
                .enumerate()
                .map(|(j, v)| if j == 1 { v + 1.0 } else { *v })
                .collect();
            let ks = kernel_eval(&p, &shifted, &y, 1e-13).unwrap();
            assert!((ks - kxy).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_matches_brute_force_sum() {
        let p = params();
        let (x, y) = ([0.1, 0.7, 0.25], [0.9, 0.05, 0.6]);
        let k = kernel_eval(&p, &x, &y, 1e-14).unwrap();
        // oracle: direct sum of ω_h e^{2πi h·(x−y)} over a large box
        let set = enumerate(&p, 60.0, 1_000_000).unwrap();
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let direct: Complex64 = set
            .iter()
            .map(|(h, e)| character(h.components(), &d) * p.weight_of_exponent(e))
            .sum();
        assert!((k - direct).norm() < 1e-12, "{k} vs {direct}");
    }

    #[test]
    fn gram_matrix_is_psd() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| rng.gen()).collect())
            .collect();
        let g = DMatrix::from_fn(5, 5, |i, j| {
            kernel_eval(&p, &pts[i], &pts[j], 1e-13).unwrap().re
        });
        let trace = g.trace();
        let eig = SymmetricEigen::new(g);
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-9 * trace));
    }

    #[test]
    fn basis_orthonormal() {
        let p = params();
        let e1 = FourierPolynomial::basis(&p, vec![1, -2, 0].into()).unwrap();
        let e2 = FourierPolynomial::basis(&p, vec![0, 1, 3].into()).unwrap();
        assert!((e1.norm() - 1.0).abs() < 1e-12);
        assert!((e1.inner(&e1).unwrap().re - 1.0).abs() < 1e-12);
        assert_eq!(e1.inner(&e2).unwrap(), Complex64::new(0.0, 0.0));
        let v = e1.evaluate(&[0.0; 3]).unwrap();
        let w = p.weight_of_exponent(
            0.5 * crate::index_set::exponent(&p, &vec![1, -2, 0].into()).unwrap(),
        );
        assert!((v.re - w).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn single_coefficient_norm() {
        let p = params();
        let h: FrequencyIndex = vec![2, 0, -1].into();
        let c = Complex64::new(0.3, -0.4);
        let f = FourierPolynomial::from_terms(&p, [(h.clone(), c)]).unwrap();
        let e = crate::index_set::exponent(&p, &h).unwrap();
        let expected = 0.5 * p.weight_of_exponent(-0.5 * e);
        assert!((f.norm() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn constant_evaluates_everywhere() {
        let p = params();
        let f = FourierPolynomial::constant(&p, Complex64::new(1.0, 0.0));
        assert_eq!(
            f.evaluate(&[0.3, 0.2, 0.9]).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn evaluate_matches_separable_products() {
        let p = params();
        let set = enumerate(&p, 6.0, 1000).unwrap();
        let f = random_unit_ball(&p, &set, 3).unwrap();
        let x = [0.123, 0.456, 0.789];
        // oracle: per-coordinate roots cos/sin, multiplied out
        let mut direct = Complex64::new(0.0, 0.0);
        for (h, c) in f.coefficients() {
            let mut term = *c;
            for j in 0..3 {
                let ang = TAU * x[j] * h[j] as f64;
                term *= Complex64::new(ang.cos(), ang.sin());
            }
            direct += term;
        }
        assert!((f.evaluate(&x).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn reproducing_property() {
        let p = params();
        let set = enumerate(&p, 7.0, 1000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..20 {
            let f = random_unit_ball(&p, &set, seed).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let kx = FourierPolynomial::kernel_section(&p, &x, f.support()).unwrap();
            let lhs = f.inner(&kx).unwrap();
            assert!((lhs - f.evaluate(&x).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn random_unit_ball_properties() {
        let p = params();
        let set = enumerate(&p, 5.0, 1000).unwrap();
        let f = random_unit_ball(&p, &set, 42).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        assert_eq!(f, random_unit_ball(&p, &set, 42).unwrap());
        let origin = enumerate(&p, 0.5, 10).unwrap();
        let g = random_unit_ball(&p, &origin, 1).unwrap();
        assert!((g.evaluate(&[0.4, 0.1, 0.8]).unwrap().norm() - 1.0).abs() < 1e-12);
        let empty = enumerate(&p, 0.0, 10).unwrap();
        assert_eq!(random_unit_ball(&p, &empty, 1), Err(Error::EmptySupport));
    }

    #[test]
    fn inner_rejects_mismatched_params() {
        let p = params();
        let q = KorobovParams::from_terms(0.25, &[1.0, 1.5, 2.0], &[1.0, 2.0, 1.5]).unwrap();
        let f = FourierPolynomial::constant(&p, Complex64::new(1.0, 0.0));
        let g = FourierPolynomial::constant(&q, Complex64::new(1.0, 0.0));
        assert_eq!(f.inner(&g), Err(Error::ParamsMismatch));
    }

    #[test]
    fn json_records() {
        let p = params();
        let f = FourierPolynomial::from_terms(
            &p,
            [(vec![1, 0, -1].into(), Complex64::new(0.5, -0.25))],
        )
        .unwrap();
        let text = f.to_json();
        assert_eq!(text, r#"[{"h":[1,0,-1],"re":0.5,"im":-0.25}]"#);
        assert_eq!(FourierPolynomial::from_json(&p, &text).unwrap(), f);
    }
}
