//! The sampling algorithm `A_{n,s,M}`: sampled Fourier coefficients on a regular
//! grid, kept on `A(s,M)`. Mesh rules, error bounds, and an exact worst-case
//! error oracle.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{f_n, RegularGrid};
use crate::index_set::{enumerate, max_abs, x_of_m, ExponentWeights, IndexSet};
use crate::params::KorobovParams;
use crate::series::{pow_b, progression_sum};
use crate::space::FourierPolynomial;

/// Default limit on the dimension of a single coset matrix in the oracle.
pub const DEFAULT_COSET_CAP: usize = 2000;

const REL_TOL: f64 = 1e-17;

/// `A_{n,s,M}(f) = Σ_{h ∈ A(s,M)} [(1/n) Σ_k f(x_k) e^{−2πi h·x_k}] e^{2πi h·x}`.
#[derive(Debug, Clone)]
pub struct StdAlgorithm {
    params: KorobovParams,
    m: f64,
    grid: RegularGrid,
    index_set: IndexSet,
}

impl StdAlgorithm {
    /// Builds the algorithm for the given `M > 1` and grid; `cap_set` limits `|A(s,M)|`.
    pub fn new(params: &KorobovParams, m: f64, grid: RegularGrid, cap_set: u64) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() {
            return Err(Error::OutOfRange {
                name: "M",
                value: m,
                range: "(1, ∞)",
            });
        }
        if grid.s() != params.s() {
            return Err(Error::DimensionMismatch {
                expected: params.s(),
                got: grid.s(),
            });
        }
        let index_set = enumerate(params, x_of_m(params.omega(), m), cap_set)?;
        Ok(StdAlgorithm {
            params: params.clone(),
            m,
            grid,
            index_set,
        })
    }

    /// The construction with odd mesh sizes from [`mesh_spt`].
    pub fn spt(params: &KorobovParams, m: f64, beta: f64, cap_set: u64) -> Result<Self> {
        let grid = mesh_spt(params, m, beta)?;
        let alg = Self::new(params, m, grid, cap_set)?;
        // every h ∈ A(s,M) satisfies |h_j| < (m_j + 1)/2, so A injects into the residues
        for h in alg.index_set.members() {
            for (hj, mj) in h.components().iter().zip(alg.grid.mesh()) {
                assert!(
                    2 * hj.unsigned_abs() < mj + 1,
                    "{h:?} escapes mesh {:?}",
                    alg.grid.mesh()
                );
            }
        }
        Ok(alg)
    }

    pub fn params(&self) -> &KorobovParams {
        &self.params
    }

    /// The parameter `M`.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn grid(&self) -> &RegularGrid {
        &self.grid
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    /// Streams the grid once, then projects onto every `h ∈ A(s,M)`.
    pub fn apply(&self, f: &FourierPolynomial, cap_n: u128) -> Result<FourierPolynomial> {
        if f.params() != &self.params {
            return Err(Error::ParamsMismatch);
        }
        let values = self.grid.sample(f, cap_n)?;
        let coefficients = self.grid.project_many(&values, self.index_set.members());
        FourierPolynomial::from_terms(
            &self.params,
            self.index_set.members().iter().cloned().zip(coefficients),
        )
    }
}

/// `D(s,ω,b) = 4^s Π_j (1 + ln^{−1/b_j}(1/ω))`.
pub fn d_constant(params: &KorobovParams) -> f64 {
    let l = params.ln_inv_omega();
    params
        .b_terms()
        .iter()
        .map(|&b| 4.0 * (1.0 + l.powf(-1.0 / b)))
        .product()
}

/// `(1/M + M^{B(s)+1} D(s,ω,b) F_n)^{1/2}`.
pub fn error_upper_bound(params: &KorobovParams, alg: &StdAlgorithm) -> Result<f64> {
    if params != alg.params() {
        return Err(Error::ParamsMismatch);
    }
    Ok(bound_chain(alg)?.upper_bound)
}

/// The successive upper bounds on the worst-case error of `A_{n,s,M}`, each
/// at least the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundChain {
    /// `(1/M + Σ_{h∈A} Σ_{l∈G⊥∖0} ω_{h+l})^{1/2}`.
    pub gen_approx: f64,
    /// `(1/M + M |A| F_n)^{1/2}`.
    pub set_size: f64,
    /// `(1/M + M Π_j (1 + 2 (x/a_j)^{1/b_j}) F_n)^{1/2}`.
    pub product_form: f64,
    /// `(1/M + M^{B(s)+1} D F_n)^{1/2}`.
    pub upper_bound: f64,
}

pub fn bound_chain(alg: &StdAlgorithm) -> Result<BoundChain> {
    let params = alg.params();
    let m = alg.m();
    let x = alg.index_set().threshold_x();
    let fnv = f_n(params, alg.grid())?;
    let inv_m = 1.0 / m;

    let ln_q = params.ln_inv_omega();
    let mut cache: HashMap<(usize, u64), f64> = HashMap::new();
    let mut aliased = 0.0;
    for (h, e) in alg.index_set().iter() {
        let mut prod = 1.0;
        for (j, &hj) in h.components().iter().enumerate() {
            let mj = alg.grid().mesh()[j];
            let r = hj.rem_euclid(mj as i64) as u64;
            let v = *cache.entry((j, r)).or_insert_with(|| {
                coordinate_coset_sum(params.a_terms()[j] * ln_q, params.b_terms()[j], r, mj)
            });
            prod *= v;
        }
        aliased += (prod - params.weight_of_exponent(e)).max(0.0);
    }
    let gen_approx = (inv_m + aliased).sqrt();
    let set_size = (inv_m + m * alg.index_set().count() as f64 * fnv).sqrt();
    let prod: f64 = params
        .a_terms()
        .iter()
        .zip(params.b_terms())
        .map(|(&a, &b)| 1.0 + 2.0 * (x / a).powf(1.0 / b))
        .product();
    let product_form = (inv_m + m * prod * fnv).sqrt();
    let upper_bound = (inv_m + m.powf(params.b_sum() + 1.0) * d_constant(params) * fnv).sqrt();
    Ok(BoundChain {
        gen_approx,
        set_size,
        product_form,
        upper_bound,
    })
}

/// Upper value of `Σ_{k∈Z} exp(−rate |r + m k|^b)` for `0 ≤ r < m`.
fn coordinate_coset_sum(rate: f64, b: f64, r: u64, m: u64) -> f64 {
    let step = m as f64;
    if r == 0 {
        1.0 + 2.0 * progression_sum(rate, b, step, step, REL_TOL).upper()
    } else {
        progression_sum(rate, b, r as f64, step, REL_TOL).upper()
            + progression_sum(rate, b, (m - r) as f64, step, REL_TOL).upper()
    }
}

/// Output of [`mesh_proposition`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionMesh {
    pub grid: RegularGrid,
    /// `M = 2/ε²`.
    pub big_m: f64,
    /// The scalar `m` before per-coordinate roots.
    pub m: f64,
    pub eta: f64,
    /// Set if some `m_j` floored to 0 and was raised to 1.
    pub clamped: bool,
    /// `(1/M + M^{B(s)+1} D η²)^{1/2}`, which is at most `ε`.
    pub guaranteed: f64,
}

/// Mesh sizes `m_j = ⌊m^{1/(B(s) b_j)}⌋` with
/// `m = max_j ⌈((4^{b_j}/a_j) ln(1 + 2s/ln(1+η²)) / ln(1/ω))^{B(s)}⌉`,
/// `η = (ε²/(2 D^{1/(B(s)+2)}))^{(B(s)+2)/2}`, and `M = 2/ε²`.
pub fn mesh_proposition(params: &KorobovParams, eps: f64, cap_n: u128) -> Result<PropositionMesh> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        });
    }
    let s = params.s() as f64;
    let bs = params.b_sum();
    let d = d_constant(params);
    let ln_eta = 0.5 * (bs + 2.0) * (2.0 * eps.ln() - std::f64::consts::LN_2 - d.ln() / (bs + 2.0));
    let eta = ln_eta.exp();
    // ln(1 + 2s/ln(1+η²)) without losing η² to underflow
    let ln_eta2 = 2.0 * ln_eta;
    let l = if ln_eta2 > -700.0 {
        ln_eta2.exp().ln_1p()
    } else {
        0.0
    };
    let ln_l = if ln_eta2 > -700.0 { l.ln() } else { ln_eta2 };
    let log_term = (2.0 * s).ln() - ln_l + (l / (2.0 * s)).ln_1p();
    let mut m = 0.0f64;
    for (&a, &b) in params.a_terms().iter().zip(params.b_terms()) {
        let arg = 4f64.powf(b) / a * log_term / params.ln_inv_omega();
        m = m.max(arg.powf(bs).ceil());
    }
    let mut clamped = false;
    let mut mesh = Vec::with_capacity(params.s());
    for &b in params.b_terms() {
        let mut mj = floor_root(m, bs * b);
        if mj < 1 {
            mj = 1;
            clamped = true;
        }
        mesh.push(mj);
    }
    let grid = RegularGrid::new(mesh)?;
    if grid.n() > cap_n {
        return Err(Error::CapExceeded {
            what: "grid points",
            needed: grid.n(),
            cap: cap_n,
        });
    }
    let big_m = 2.0 / (eps * eps);
    let guaranteed = (1.0 / big_m + (big_m.ln() * (bs + 1.0) + d.ln() + ln_eta2).exp()).sqrt();
    Ok(PropositionMesh {
        grid,
        big_m,
        m,
        eta,
        clamped,
        guaranteed,
    })
}

/// `⌊v^{1/p}⌋` for `v ≥ 0`, corrected against `pow_b` so integer `p` is exact.
fn floor_root(v: f64, p: f64) -> u64 {
    if v < 1.0 {
        return 0;
    }
    let mut r = v.powf(1.0 / p).floor().min(u64::MAX as f64 / 2.0) as u64;
    while r > 0 && pow_b(r as f64, p) > v {
        r -= 1;
    }
    while pow_b((r + 1) as f64, p) <= v {
        r += 1;
    }
    r
}

/// Odd mesh sizes `m_j = 2⌈(x / a_j^β)^{1/b_j}⌉ − 1` with `x = ln M / ln(1/ω)`.
///
/// The ceiling is taken as one plus the largest `h` with `a_j^β h^{b_j} < x`,
/// which is exact in the same arithmetic that defines `A(s,M)`.
pub fn mesh_spt(params: &KorobovParams, m: f64, beta: f64) -> Result<RegularGrid> {
    if !(m > 1.0) || !m.is_finite() {
        return Err(Error::OutOfRange {
            name: "M",
            value: m,
            range: "(1, ∞)",
        });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "(0, 1)",
        });
    }
    let x = x_of_m(params.omega(), m);
    let mesh = params
        .a_terms()
        .iter()
        .zip(params.b_terms())
        .map(|(&a, &b)| 2 * (max_abs(a.powf(beta), b, x) + 1) - 1)
        .collect();
    RegularGrid::new(mesh)
}

/// Worst-case error of `A_{n,s,M}` over the unit ball, from the truncated coset
/// decomposition. `value` is a lower bound; `value² + slack²` bounds the square
/// of the true error from above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactError {
    pub value: f64,
    pub slack: f64,
    pub trunc_x: f64,
    /// Frequencies with exponent below `trunc_x`.
    pub frequencies: usize,
    pub cosets: usize,
    /// Largest coset matrix that needed an eigen-solve.
    pub max_dim: usize,
}

impl ExactError {
    pub fn upper(&self) -> f64 {
        self.value.hypot(self.slack)
    }
}

/// `x + 3 ln(1/ε)/ln(1/ω)` with `ε = M^{−1/2}`.
pub fn default_trunc_x(alg: &StdAlgorithm) -> f64 {
    let x = alg.index_set().threshold_x();
    let ln_inv_eps = 0.5 * alg.m().ln();
    x + 3.0 * ln_inv_eps / alg.params().ln_inv_omega()
}

/// Exact worst-case error by cosets of `G⊥`.
///
/// Within a coset `C`, with `f̂(g) = ω_g^{1/2} c_g`, the error is `T c` where
/// `T = diag(w) − u wᵀ`, `w_g = ω_g^{1/2}`, `u` the indicator of `A ∩ C`. The
/// squared worst case is the largest eigenvalue of `TᵀT`, maximized over `C`.
/// Frequencies at or beyond `trunc_x` add at most `ω^{trunc_x} + |A ∩ C|·τ_C`
/// to the square for coset `C`, with `τ_C` the weight of its neglected part.
pub fn exact_worst_case_error(
    alg: &StdAlgorithm,
    trunc_x: Option<f64>,
    cap_set: u64,
    cap_coset: usize,
) -> Result<ExactError> {
    let trunc_x = trunc_x.unwrap_or_else(|| default_trunc_x(alg));
    let x = alg.index_set().threshold_x();
    if !(trunc_x > x) {
        return Err(Error::OutOfRange {
            name: "trunc_x",
            value: trunc_x,
            range: "above the threshold of A(s,M)",
        });
    }
    let params = alg.params();
    let weights = ExponentWeights::from_params(params);
    let total = weights
        .count_within(trunc_x, cap_set)
        .ok_or(Error::CapExceeded {
            what: "oracle frequencies",
            needed: cap_set as u128 + 1,
            cap: cap_set as u128,
        })?;
    let mesh = alg.grid().mesh();
    let mut cosets: BTreeMap<Vec<u64>, Vec<(f64, bool)>> = BTreeMap::new();
    for h in weights.collect(trunc_x) {
        let e = weights.exponent(&h);
        let residue: Vec<u64> = h
            .iter()
            .zip(mesh)
            .map(|(&hj, &m)| hj.rem_euclid(m as i64) as u64)
            .collect();
        cosets.entry(residue).or_default().push((e, e < x));
    }
    let ln_q = params.ln_inv_omega();
    let tail_weight = params.weight_of_exponent(trunc_x);
    let mut coordinate_sums: HashMap<(usize, u64), f64> = HashMap::new();
    let mut worst: f64 = 0.0;
    let mut worst_upper: f64 = tail_weight;
    let mut max_dim = 0;
    for (residue, members) in &cosets {
        let inside = members.iter().filter(|m| m.1).count();
        let lambda = if inside == 0 {
            members
                .iter()
                .map(|&(e, _)| params.weight_of_exponent(e))
                .fold(0.0, f64::max)
        } else if members.len() == 1 {
            0.0
        } else {
            if members.len() > cap_coset {
                return Err(Error::CapExceeded {
                    what: "coset matrix",
                    needed: members.len() as u128,
                    cap: cap_coset as u128,
                });
            }
            max_dim = max_dim.max(members.len());
            coset_eigenvalue(params, members)
        };
        worst = worst.max(lambda);
        // Weight of the coset beyond trunc_x: closed-form total minus the enumerated part.
        let tau = if inside == 0 {
            0.0
        } else {
            let mut total = 1.0;
            for (j, &r) in residue.iter().enumerate() {
                total *= *coordinate_sums.entry((j, r)).or_insert_with(|| {
                    coordinate_coset_sum(
                        params.a_terms()[j] * ln_q,
                        params.b_terms()[j],
                        r,
                        mesh[j],
                    )
                });
            }
            let listed: f64 = members
                .iter()
                .map(|&(e, _)| params.weight_of_exponent(e))
                .sum();
            (total - listed).max(0.0) + 1e-15 * total
        };
        worst_upper = worst_upper.max(lambda + inside as f64 * tau + tail_weight);
    }
    Ok(ExactError {
        value: worst.sqrt(),
        slack: (worst_upper - worst).max(0.0).sqrt(),
        trunc_x,
        frequencies: total as usize,
        cosets: cosets.len(),
        max_dim,
    })
}

/// [`exact_worst_case_error`] from the default truncation, raised until
/// `slack ≤ rel · value` or the next step would pass a cap; returns the last result that fit.
pub fn exact_worst_case_error_refined(
    alg: &StdAlgorithm,
    rel: f64,
    cap_set: u64,
    cap_coset: usize,
) -> Result<ExactError> {
    let x = alg.index_set().threshold_x();
    let mut trunc = default_trunc_x(alg);
    let mut best = exact_worst_case_error(alg, Some(trunc), cap_set, cap_coset)?;
    for _ in 0..40 {
        if best.slack <= rel * best.value {
            break;
        }
        trunc = x + 1.5 * (trunc - x);
        match exact_worst_case_error(alg, Some(trunc), cap_set, cap_coset) {
            Ok(next) => best = next,
            Err(Error::CapExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// `λ_max(TᵀT)` with `(TᵀT)_{gg'} = w_g² δ − (u_g + u_{g'}) w_g w_{g'} + |A∩C| w_g w_{g'}`.
fn coset_eigenvalue(params: &KorobovParams, members: &[(f64, bool)]) -> f64 {
    let d = members.len();
    let w: Vec<f64> = members
        .iter()
        .map(|&(e, _)| params.weight_of_exponent(0.5 * e))
        .collect();
    let u: Vec<f64> = members
        .iter()
        .map(|&(_, a)| if a { 1.0 } else { 0.0 })
        .collect();
    let k: f64 = u.iter().sum();
    let gram = DMatrix::from_fn(d, d, |i, j| {
        let diag = if i == j { w[i] * w[i] } else { 0.0 };
        diag + (k - u[i] - u[j]) * w[i] * w[j]
    });
    SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Summary of one algorithm instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub upper_bound: f64,
    pub exact: Option<f64>,
    pub exact_slack: Option<f64>,
    pub n_points: u128,
    pub set_size: usize,
}

/// Paper bound plus, when it fits the caps, the oracle value.
pub fn error_report(alg: &StdAlgorithm, cap_set: u64, cap_coset: usize) -> Result<ErrorReport> {
    let upper_bound = error_upper_bound(alg.params(), alg)?;
    let (exact, exact_slack) = match exact_worst_case_error(alg, None, cap_set, cap_coset) {
        Ok(e) => (Some(e.value), Some(e.slack)),
        Err(Error::CapExceeded { .. }) => (None, None),
        Err(other) => return Err(other),
    };
    Ok(ErrorReport {
        upper_bound,
        exact,
        exact_slack,
        n_points: alg.grid().n(),
        set_size: alg.index_set().count(),
    })
}

/// `‖f − A(f)‖²_{L_2}` expanded as `Σ_{h∉A} |f̂(h)|² + Σ_{h∈A} |f̂(h) − Σ_{l∈G⊥} f̂(h+l)|²`.
pub fn parseval_error_sq(alg: &StdAlgorithm, f: &FourierPolynomial) -> Result<f64> {
    let mut outside = 0.0;
    for (h, c) in f.coefficients() {
        if !alg.index_set().contains(h) {
            outside += c.norm_sqr();
        }
    }
    let mut inside = 0.0;
    for h in alg.index_set().members() {
        let aliased = alg.grid().dual_lattice_sum(f, h)?;
        inside += (f.coefficient(h) - aliased).norm_sqr();
    }
    Ok(outside + inside)
}
