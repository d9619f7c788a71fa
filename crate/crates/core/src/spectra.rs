//! The ordered spectrum `λ_{s,1} ≥ λ_{s,2} ≥ …` of the embedding, i.e. the
//! multiset `{ω_h}`, and the quantities it determines for `Λ^all`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::index_set::{count, raw_exponent, x_of_eps, FrequencyIndex};
use crate::params::KorobovParams;
use crate::space::FourierPolynomial;

/// One eigenvalue `ω_h = ω^{exponent}` with its frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub eigenvalue: f64,
    pub exponent: f64,
    pub index: FrequencyIndex,
}

/// The `k` largest eigenvalues, nonincreasing, ties in lexicographic order of `h`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    params: KorobovParams,
    top: Vec<Eigenpair>,
}

impl Spectrum {
    pub fn params(&self) -> &KorobovParams {
        &self.params
    }

    pub fn pairs(&self) -> &[Eigenpair] {
        &self.top
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.top.iter().map(|p| p.eigenvalue).collect()
    }

    /// `e(n) = λ_{n+1}^{1/2}` for `n < len()`.
    pub fn minimal_error(&self, n: usize) -> Option<f64> {
        self.top.get(n).map(|p| p.eigenvalue.sqrt())
    }

    /// `ln(1/e(n)) = exponent_{n+1}·ln(1/ω)/2`; finite even where `e(n)` underflows.
    pub fn minimal_log_error(&self, n: usize) -> Option<f64> {
        self.top
            .get(n)
            .map(|p| 0.5 * p.exponent * self.params.ln_inv_omega())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Key(f64, Vec<i64>);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| self.1.cmp(&other.1))
    }
}

/// The `k` largest `ω_h` by best-first search from the origin.
///
/// Successors of `h` raise one `|h_j|` by one. Every `h ≠ 0` has a predecessor
/// with strictly smaller exponent, so popping in `(exponent, h)` order is exact.
pub fn top_eigenvalues(params: &KorobovParams, k: usize) -> Result<Spectrum> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "k ≥ 1",
        });
    }
    let (a, b) = (params.a_terms(), params.b_terms());
    let s = params.s();
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let origin = vec![0i64; s];
    seen.insert(origin.clone());
    heap.push(Reverse(Key(0.0, origin)));
    let mut top = Vec::with_capacity(k);
    while let Some(Reverse(Key(e, h))) = heap.pop() {
        for j in 0..s {
            let steps: &[i64] = match h[j].signum() {
                0 => &[-1, 1],
                1 => &[1],
                _ => &[-1],
            };
            for &d in steps {
                let mut g = h.clone();
                g[j] += d;
                if seen.insert(g.clone()) {
                    heap.push(Reverse(Key(raw_exponent(a, b, &g), g)));
                }
            }
        }
        top.push(Eigenpair {
            eigenvalue: params.weight_of_exponent(e),
            exponent: e,
            index: FrequencyIndex::new(h),
        });
        if top.len() == k {
            break;
        }
    }
    Ok(Spectrum {
        params: params.clone(),
        top,
    })
}

/// `e^{all}(n,s) = λ_{s,n+1}^{1/2}`; `n = 0` gives the initial error 1.
pub fn nth_minimal_error_all(params: &KorobovParams, n: usize) -> Result<f64> {
    let spectrum = top_eigenvalues(params, n + 1)?;
    Ok(spectrum
        .minimal_error(n)
        .expect("spectrum has n + 1 entries"))
}

/// `ln(1/e^{all}(n,s))`.
pub fn nth_minimal_log_error_all(params: &KorobovParams, n: usize) -> Result<f64> {
    let spectrum = top_eigenvalues(params, n + 1)?;
    Ok(spectrum
        .minimal_log_error(n)
        .expect("spectrum has n + 1 entries"))
}

/// `n^{all}(ε,s) = |A(s, ε^{-2})|`.
pub fn info_complexity_all(params: &KorobovParams, eps: f64) -> Result<u64> {
    Ok(count(params, x_of_eps(params.omega(), eps)?))
}

/// The truncated Fourier series: `f` restricted to `A(s, ε^{-2})`.
pub fn optimal_algorithm_all(
    params: &KorobovParams,
    eps: f64,
    f: &FourierPolynomial,
) -> Result<FourierPolynomial> {
    if f.params() != params {
        return Err(Error::ParamsMismatch);
    }
    let x = x_of_eps(params.omega(), eps)?;
    Ok(f.restrict(|h| raw_exponent(params.a_terms(), params.b_terms(), h.components()) < x))
}

/// `λ_{s,n} ≤ [Π_j (1 + 2ω^{ηa_j}/(1 − ω^{ηa_j}))]^{1/η} n^{-1/η}`.
pub fn eigenvalue_tail_bound(params: &KorobovParams, n: u64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "(0, 1)",
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: "n ≥ 1",
        });
    }
    let ln_q = params.ln_inv_omega();
    let ln_sum: f64 = params
        .a_terms()
        .iter()
        .map(|&a| {
            let q = (-eta * a * ln_q).exp();
            (2.0 * q / (1.0 - q)).ln_1p()
        })
        .sum();
    Ok(((ln_sum - (n as f64).ln()) / eta).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::enumerate;
    use crate::space::random_unit_on;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(omega: f64, a: &[f64], b: &[f64]) -> KorobovParams {
        KorobovParams::from_terms(omega, a, b).unwrap()
    }

    #[test]
    fn one_dimensional_top_five() {
        let sp = top_eigenvalues(&p(0.5, &[1.0], &[1.0]), 5).unwrap();
        assert_eq!(sp.eigenvalues(), vec![1.0, 0.5, 0.5, 0.25, 0.25]);
        let hs: Vec<i64> = sp.pairs().iter().map(|e| e.index[0]).collect();
        assert_eq!(hs, vec![0, -1, 1, -2, 2]);
    }

    #[test]
    fn two_dimensional_top_three() {
        let sp = top_eigenvalues(&p(0.5, &[1.0, 2.0], &[1.0, 1.0]), 3).unwrap();
        assert_eq!(sp.eigenvalues(), vec![1.0, 0.5, 0.5]);
        let hs: Vec<Vec<i64>> = sp
            .pairs()
            .iter()
            .map(|e| e.index.components().to_vec())
            .collect();
        assert_eq!(hs, vec![vec![0, 0], vec![-1, 0], vec![1, 0]]);
        assert!(top_eigenvalues(&p(0.5, &[1.0], &[1.0]), 0).is_err());
    }

    #[test]
    fn matches_sorted_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = rng.gen_range(1..=3);
            let mut a: Vec<f64> = (0..s).map(|_| rng.gen_range(1.0..3.0)).collect();
            a.sort_by(f64::total_cmp);
            let b: Vec<f64> = (0..s)
                .map(|_| [1.0, 1.5, 2.0][rng.gen_range(0..3)])
                .collect();
            let params = p(rng.gen_range(0.1..0.9), &a, &b);
            let k = 150;
            let sp = top_eigenvalues(&params, k).unwrap();
            let last = sp.pairs()[k - 1].exponent;
            let set = enumerate(&params, last + 1e-9, 1_000_000).unwrap();
            for (i, (h, e)) in set.iter().take(k).enumerate() {
                assert_eq!(&sp.pairs()[i].index, h);
                assert_eq!(sp.pairs()[i].exponent, e);
            }
        }
    }

    #[test]
    fn minimal_errors() {
        let params = p(0.5, &[1.0], &[1.0]);
        assert_eq!(nth_minimal_error_all(&params, 0).unwrap(), 1.0);
        assert!((nth_minimal_error_all(&params, 1).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let sp = top_eigenvalues(&params, 3000).unwrap();
        for n in 1..2999 {
            assert!(sp.minimal_error(n).unwrap() <= sp.minimal_error(n - 1).unwrap());
        }
        // far past f64 range the log form stays exact: λ_{2m+1} = 2^{-m}
        let l = nth_minimal_log_error_all(&params, 4000).unwrap();
        assert!((l - 1000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn complexity_examples_and_duality() {
        let params = p(0.5, &[1.0], &[1.0]);
        assert_eq!(info_complexity_all(&params, 0.3f64.sqrt()).unwrap(), 3);
        assert_eq!(info_complexity_all(&params, 0.999).unwrap(), 1);
        let sp = top_eigenvalues(&params, 200).unwrap();
        for eps in [0.9, 0.5, 0.3, 0.1, 0.05] {
            let n = info_complexity_all(&params, eps).unwrap() as usize;
            assert!(sp.minimal_error(n).unwrap() <= eps);
            assert!(sp.minimal_error(n - 1).unwrap() > eps);
        }
        assert!(info_complexity_all(&params, 1.0).is_err());
    }

    #[test]
    fn optimal_algorithm_truncates() {
        let params = p(0.5, &[1.0, 1.0], &[1.0, 2.0]);
        let eps = 0.2;
        let inside = enumerate(&params, x_of_eps(0.5, eps).unwrap(), 1000).unwrap();
        let f = random_unit_on(&params, inside.members(), 1).unwrap();
        assert_eq!(optimal_algorithm_all(&params, eps, &f).unwrap(), f);

        let g: FrequencyIndex = vec![5, 0].into();
        let e = FourierPolynomial::basis(&params, g.clone()).unwrap();
        let out = optimal_algorithm_all(&params, eps, &e).unwrap();
        assert!(out.is_empty());
        let err = e.l2_distance(&out).unwrap();
        assert!((err - 0.5f64.powf(2.5)).abs() < 1e-15 && err <= eps);

        let wide = enumerate(&params, 14.0, 10_000).unwrap();
        for seed in 0..20 {
            let f = random_unit_on(&params, wide.members(), seed).unwrap();
            let out = optimal_algorithm_all(&params, eps, &f).unwrap();
            assert!(f.l2_distance(&out).unwrap() <= eps * f.norm() + 1e-15);
        }
    }

    #[test]
    fn tail_bound_examples() {
        let params = p(0.5, &[1.0], &[1.0]);
        let q = 0.5f64.sqrt();
        for n in [1u64, 2, 7] {
            let expected = (1.0 + 2.0 * q / (1.0 - q)).powi(2) / (n * n) as f64;
            let got = eigenvalue_tail_bound(&params, n, 0.5).unwrap();
            assert!((got - expected).abs() < 1e-12 * expected);
        }
        assert!(eigenvalue_tail_bound(&params, 1, 0.9).unwrap() >= 1.0);
        assert!(eigenvalue_tail_bound(&params, 1, 1.0).is_err());
        let sp = top_eigenvalues(&params, 200).unwrap();
        for eta in [0.3, 0.5, 0.9] {
            for (i, pair) in sp.pairs().iter().enumerate() {
                assert!(
                    pair.eigenvalue <= eigenvalue_tail_bound(&params, i as u64 + 1, eta).unwrap()
                );
            }
        }
    }
}
