//! Integration on regular grids: the equal-weight rule, its exact worst-case
//! error, the rule induced by `A_{n,s,M}`, and the lower bound for `n < 2^s`.

use num_complex::Complex64;
use serde::Serialize;

use crate::approx_std::StdAlgorithm;
use crate::error::{Error, Result};
use crate::grid::RegularGrid;
use crate::index_set::{ExponentWeights, FrequencyIndex};
use crate::params::KorobovParams;
use crate::series::{positive_sum, pow_b};
use crate::space::FourierPolynomial;

/// `Q(f) = w Σ_k f(x_k)` over a regular grid, with one common weight `w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRule {
    grid: RegularGrid,
    weight: f64,
}

impl GridRule {
    /// Weights `1/n`.
    pub fn uniform(grid: RegularGrid) -> Self {
        let weight = 1.0 / grid.n() as f64;
        GridRule { grid, weight }
    }

    pub fn grid(&self) -> &RegularGrid {
        &self.grid
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight * self.grid.n() as f64
    }
}

pub fn integrate(rule: &GridRule, f: &FourierPolynomial, cap_n: u128) -> Result<Complex64> {
    let values = rule.grid.sample(f, cap_n)?;
    Ok(values.iter().sum::<Complex64>() * rule.weight)
}

/// `sup_{‖f‖≤1} |∫f − Q(f)|`, with the dual lattice truncated at `trunc_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntError {
    /// From dual-lattice points with exponent below `trunc_x`; a lower bound.
    pub value: f64,
    /// `value + slack` bounds the true error.
    pub slack: f64,
    /// From the product formula, certified from above.
    pub closed_form: f64,
    /// Number of dual-lattice points summed.
    pub terms: u64,
}

impl IntError {
    pub fn upper(&self) -> f64 {
        self.value + self.slack
    }
}

/// For weights `w`, with `c = w n`: the error functional is
/// `f ↦ (1 − c) f̂(0) − c Σ_{l∈G⊥∖0} f̂(l)`, whose norm is
/// `((1 − c)² + c² Σ_{l∈G⊥∖0} ω_l)^{1/2}`. The sum runs over `l = (m_j k_j)_j`,
/// i.e. `k ∈ Z^s` under the rescaled exponents `a_j m_j^{b_j} |k_j|^{b_j}`.
pub fn worst_case_int_error(
    params: &KorobovParams,
    rule: &GridRule,
    trunc_x: f64,
    cap_set: u64,
) -> Result<IntError> {
    if !(trunc_x > 0.0) {
        return Err(Error::OutOfRange {
            name: "trunc_x",
            value: trunc_x,
            range: "(0, ∞)",
        });
    }
    let grid = rule.grid();
    if grid.s() != params.s() {
        return Err(Error::DimensionMismatch {
            expected: params.s(),
            got: grid.s(),
        });
    }
    let (a, b) = rescaled(params, grid);
    let weights = ExponentWeights::new(a.clone(), b.clone());
    let terms = weights
        .count_within(trunc_x, cap_set)
        .ok_or(Error::CapExceeded {
            what: "dual lattice points",
            needed: cap_set as u128 + 1,
            cap: cap_set as u128,
        })?;
    let sum: f64 = weights
        .collect(trunc_x)
        .iter()
        .filter(|k| k.iter().any(|&v| v != 0))
        .map(|k| params.weight_of_exponent(weights.exponent(k)))
        .sum();
    let ln_q = params.ln_inv_omega();
    let rates: Vec<f64> = a.iter().map(|v| v * ln_q).collect();
    let mut ln_prod = 0.0;
    for (&r, &bj) in rates.iter().zip(&b) {
        ln_prod += (2.0 * positive_sum(r, bj, 1e-17).upper()).ln_1p();
    }
    let closed = ln_prod.exp_m1();
    // the neglected lattice points weigh at most the closed form minus the listed part
    let tail = (closed - sum).max(0.0) + 1e-15 * closed;
    let c = rule.weight_sum();
    let err = |dual: f64| ((1.0 - c).powi(2) + c * c * dual).sqrt();
    let value = err(sum);
    // √(u+t) − √u without cancellation, padded for rounding in the summation
    let denominator = err(sum + tail) + value;
    let slack = if denominator > 0.0 {
        c * c * tail / denominator
    } else {
        0.0
    } + 4.0 * f64::EPSILON * value;
    Ok(IntError {
        value,
        slack,
        closed_form: err(closed),
        terms: terms - 1,
    })
}

/// [`worst_case_int_error`] with `trunc_x` raised until `slack ≤ rel · value`
/// or the next step would pass `cap_set` dual points; returns the last result that fit.
pub fn worst_case_int_error_refined(
    params: &KorobovParams,
    rule: &GridRule,
    start_x: f64,
    rel: f64,
    cap_set: u64,
) -> Result<IntError> {
    let mut trunc = start_x;
    let mut best = worst_case_int_error(params, rule, trunc, cap_set)?;
    for _ in 0..40 {
        if best.slack <= rel * best.value {
            break;
        }
        trunc *= 1.5;
        match worst_case_int_error(params, rule, trunc, cap_set) {
            Ok(next) => best = next,
            Err(Error::CapExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

fn rescaled(params: &KorobovParams, grid: &RegularGrid) -> (Vec<f64>, Vec<f64>) {
    let a = params
        .a_terms()
        .iter()
        .zip(params.b_terms())
        .zip(grid.mesh())
        .map(|((&a, &b), &m)| a * pow_b(m as f64, b))
        .collect();
    (a, params.b_terms().to_vec())
}

/// The extremal function `f̂(l) = ω_l / (Σ ω_l)^{1/2}` on the truncated `G⊥∖{0}`.
pub fn extremal_function(
    params: &KorobovParams,
    grid: &RegularGrid,
    trunc_x: f64,
) -> Result<FourierPolynomial> {
    let (a, b) = rescaled(params, grid);
    let weights = ExponentWeights::new(a, b);
    let mut terms = Vec::new();
    let mut total = 0.0;
    for k in weights.collect(trunc_x) {
        if k.iter().all(|&v| v == 0) {
            continue;
        }
        let w = params.weight_of_exponent(weights.exponent(&k));
        total += w;
        let l: Vec<i64> = k
            .iter()
            .zip(grid.mesh())
            .map(|(&kj, &m)| kj * m as i64)
            .collect();
        terms.push((FrequencyIndex::new(l), w));
    }
    if terms.is_empty() {
        return Err(Error::EmptySupport);
    }
    let norm = total.sqrt();
    FourierPolynomial::from_terms(
        params,
        terms
            .into_iter()
            .map(|(l, w)| (l, Complex64::new(w / norm, 0.0))),
    )
}

/// `β_k = ∫ α_k = (1/n)[0 ∈ A(s,M)]`, since only `h = 0` has nonzero integral.
pub fn induced_int_rule(alg: &StdAlgorithm) -> GridRule {
    let grid = alg.grid().clone();
    let zero = FrequencyIndex::zero(grid.s());
    let weight = if alg.index_set().contains(&zero) {
        1.0 / grid.n() as f64
    } else {
        0.0
    };
    GridRule { grid, weight }
}

/// `2^{−s/2} ω^{Σ_j a_j / 2}`, a lower bound on `e^{int}(n,s)` valid for `n < 2^s`.
pub fn int_lower_bound(params: &KorobovParams, n: u128) -> Option<f64> {
    let s = params.s();
    let applies = s >= 128 || n < (1u128 << s);
    if !applies {
        return None;
    }
    let a_sum: f64 = params.a_terms().iter().sum();
    Some(
        (-(s as f64) * 0.5 * std::f64::consts::LN_2).exp() * params.weight_of_exponent(0.5 * a_sum),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx_std::exact_worst_case_error;
    use crate::index_set::enumerate;
    use crate::space::{kernel_eval, random_unit_on};

    fn grid(m: &[u64]) -> RegularGrid {
        RegularGrid::new(m.to_vec()).unwrap()
    }

    #[test]
    fn integrates_characters() {
        let p = KorobovParams::from_terms(0.5, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        let rule = GridRule::uniform(grid(&[2, 3]));
        assert!((rule.weight_sum() - 1.0).abs() < 1e-15);
        let c = FourierPolynomial::constant(&p, Complex64::new(0.3, 0.4));
        assert!((integrate(&rule, &c, 100).unwrap() - Complex64::new(0.3, 0.4)).norm() < 1e-15);
        let e = FourierPolynomial::basis(&p, vec![1, 1].into()).unwrap();
        assert!(integrate(&rule, &e, 100).unwrap().norm() < 1e-15);
        let wide = enumerate(&p, 9.0, 10_000).unwrap();
        let f = random_unit_on(&p, wide.members(), 4).unwrap();
        let dual: Complex64 = f
            .coefficients()
            .iter()
            .filter(|(h, _)| rule.grid().in_dual(h))
            .map(|(_, c)| *c)
            .sum();
        assert!((integrate(&rule, &f, 100).unwrap() - dual).norm() < 1e-13);
    }

    #[test]
    fn worst_case_examples() {
        let p = KorobovParams::from_terms(0.5, &[1.0], &[1.0]).unwrap();
        let e = worst_case_int_error(&p, &GridRule::uniform(grid(&[2])), 80.0, 1_000_000).unwrap();
        let expected = (2.0f64 / 3.0).sqrt();
        assert!((e.value - expected).abs() < 1e-10 && e.upper() >= expected);
        assert!((e.closed_form - expected).abs() < 1e-12);

        let p = KorobovParams::from_terms(0.4, &[1.0, 2.0], &[1.0, 2.0]).unwrap();
        let e =
            worst_case_int_error(&p, &GridRule::uniform(grid(&[1, 1])), 60.0, 1_000_000).unwrap();
        let k00 = kernel_eval(&p, &[0.0, 0.0], &[0.0, 0.0], 1e-15).unwrap().re;
        assert!((e.closed_form.powi(2) - (k00 - 1.0)).abs() < 1e-12);
        assert!((e.value.powi(2) - (k00 - 1.0)).abs() < 1e-9);

        let mut last = f64::INFINITY;
        for m in 1..10 {
            let v = worst_case_int_error(&p, &GridRule::uniform(grid(&[m, 2])), 40.0, 1_000_000)
                .unwrap()
                .closed_form;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn extremal_function_attains() {
        let p = KorobovParams::from_terms(0.5, &[1.0, 1.5], &[1.0, 2.0]).unwrap();
        let rule = GridRule::uniform(grid(&[3, 2]));
        let f = extremal_function(&p, rule.grid(), 30.0).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        let err =
            (f.coefficient(&FrequencyIndex::zero(2)) - integrate(&rule, &f, 100).unwrap()).norm();
        let wc = worst_case_int_error(&p, &rule, 30.0, 1_000_000).unwrap();
        assert!((err - wc.value).abs() < 1e-12);
    }

    #[test]
    fn induced_rule_and_ordering() {
        let p = KorobovParams::from_terms(0.5, &[1.0, 1.5], &[1.0, 2.0]).unwrap();
        let alg = StdAlgorithm::new(&p, 8.0, grid(&[5, 3]), 1000).unwrap();
        let rule = induced_int_rule(&alg);
        assert_eq!(rule, GridRule::uniform(grid(&[5, 3])));
        let wide = enumerate(&p, 10.0, 10_000).unwrap();
        for seed in 0..10 {
            let f = random_unit_on(&p, wide.members(), seed).unwrap();
            let int_err = (f.coefficient(&FrequencyIndex::zero(2))
                - integrate(&rule, &f, 100).unwrap())
            .norm();
            let app_err = f.l2_distance(&alg.apply(&f, 100).unwrap()).unwrap();
            assert!(int_err <= app_err + 1e-14);
        }
        let wc = worst_case_int_error(&p, &rule, 40.0, 1_000_000).unwrap();
        let app = exact_worst_case_error(&alg, None, 1_000_000, 2000).unwrap();
        assert!(wc.value <= app.upper() + 1e-12);
    }

    #[test]
    fn lower_bound() {
        let p = KorobovParams::from_terms(0.5, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((int_lower_bound(&p, 3).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(int_lower_bound(&p, 4), None);
        for mesh in [[1u64, 1], [1, 2], [3, 1]] {
            let wc =
                worst_case_int_error(&p, &GridRule::uniform(grid(&mesh)), 40.0, 1_000_000).unwrap();
            assert!(int_lower_bound(&p, wc_n(&mesh)).unwrap() <= wc.value);
        }
    }

    fn wc_n(mesh: &[u64]) -> u128 {
        mesh.iter().map(|&m| m as u128).product()
    }
}
