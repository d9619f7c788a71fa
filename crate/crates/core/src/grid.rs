//! Regular grids `G_{n,s} = {(k_1/m_1, …, k_s/m_s)}`, their dual lattice
//! `G⊥ = {h : m_j | h_j}`, and aliasing of Fourier coefficients.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index_set::FrequencyIndex;
use crate::params::KorobovParams;
use crate::series::{positive_sum, pow_b, Bracketed};
use crate::space::FourierPolynomial;

/// Default limit on the number of grid points that may be streamed.
pub const DEFAULT_GRID_CAP: u128 = 1_000_000;

const REL_TOL: f64 = 1e-17;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RegularGrid {
    mesh: Vec<u64>,
    n: u128,
}

impl RegularGrid {
    pub fn new(mesh: Vec<u64>) -> Result<Self> {
        if mesh.is_empty() {
            return Err(Error::InvalidMesh("mesh is empty".into()));
        }
        if let Some(j) = mesh.iter().position(|&m| m == 0) {
            return Err(Error::InvalidMesh(format!("m_{} = 0", j + 1)));
        }
        let n = mesh
            .iter()
            .try_fold(1u128, |acc, &m| acc.checked_mul(m as u128))
            .ok_or_else(|| Error::InvalidMesh("point count overflows".into()))?;
        Ok(RegularGrid { mesh, n })
    }

    pub fn mesh(&self) -> &[u64] {
        &self.mesh
    }

    pub fn s(&self) -> usize {
        self.mesh.len()
    }

    pub fn n(&self) -> u128 {
        self.n
    }

    fn check_cap(&self, cap: u128) -> Result<()> {
        if self.n > cap {
            Err(Error::CapExceeded {
                what: "grid points",
                needed: self.n,
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// Integer coordinates `(k_1, …, k_s)` in row-major order.
    pub fn indices(&self, cap: u128) -> Result<GridIndices<'_>> {
        self.check_cap(cap)?;
        Ok(GridIndices {
            mesh: &self.mesh,
            next: Some(vec![0; self.mesh.len()]),
        })
    }

    /// The points `(k_1/m_1, …, k_s/m_s)` in row-major order.
    pub fn points(&self, cap: u128) -> Result<impl Iterator<Item = Vec<f64>> + '_> {
        Ok(self.indices(cap)?.map(move |k| {
            k.iter()
                .zip(&self.mesh)
                .map(|(&k, &m)| k as f64 / m as f64)
                .collect()
        }))
    }

    /// `h ∈ G⊥`, i.e. `h_j ≡ 0 (mod m_j)` for every `j`.
    pub fn in_dual(&self, h: &FrequencyIndex) -> bool {
        h.len() == self.s()
            && h.components()
                .iter()
                .zip(&self.mesh)
                .all(|(&hj, &m)| hj.rem_euclid(m as i64) == 0)
    }

    /// Canonical coset representative `(h_j mod m_j)_j`, each in `[0, m_j)`.
    pub fn residue(&self, h: &FrequencyIndex) -> Vec<u64> {
        h.components()
            .iter()
            .zip(&self.mesh)
            .map(|(&hj, &m)| hj.rem_euclid(m as i64) as u64)
            .collect()
    }

    fn check_dims(&self, s: usize) -> Result<()> {
        if s != self.s() {
            Err(Error::DimensionMismatch {
                expected: self.s(),
                got: s,
            })
        } else {
            Ok(())
        }
    }

    /// `f(x_k)` at every grid point, in row-major order.
    pub fn sample(&self, f: &FourierPolynomial, cap: u128) -> Result<Vec<Complex64>> {
        self.check_dims(f.params().s())?;
        let indices = self.indices(cap)?;
        let roots = RootTables::new(&self.mesh);
        let terms: Vec<(&FrequencyIndex, &Complex64)> = f.coefficients().iter().collect();
        Ok(indices
            .map(|k| {
                terms
                    .iter()
                    .map(|(h, c)| **c * roots.character(h.components(), &k))
                    .sum()
            })
            .collect())
    }

    /// `(1/n) Σ_k f(x_k) exp(−2πi h·x_k)`, computed from samples.
    pub fn aliased_coefficient(
        &self,
        f: &FourierPolynomial,
        h: &FrequencyIndex,
        cap: u128,
    ) -> Result<Complex64> {
        let values = self.sample(f, cap)?;
        self.check_dims(h.len())?;
        Ok(self.project(&values, h))
    }

    /// `(1/n) Σ_k v_k exp(−2πi h·x_k)` for samples `v` in row-major order.
    pub(crate) fn project(&self, values: &[Complex64], h: &FrequencyIndex) -> Complex64 {
        let roots = RootTables::new(&self.mesh);
        let sum: Complex64 = self
            .indices(u128::MAX)
            .expect("no cap")
            .zip(values)
            .map(|(k, v)| v * roots.character(h.components(), &k).conj())
            .sum();
        sum / self.n as f64
    }

    /// [`RegularGrid::project`] for several frequencies, sharing the root tables.
    pub(crate) fn project_many(
        &self,
        values: &[Complex64],
        hs: &[FrequencyIndex],
    ) -> Vec<Complex64> {
        let roots = RootTables::new(&self.mesh);
        let mut out = vec![Complex64::new(0.0, 0.0); hs.len()];
        for (k, v) in self.indices(u128::MAX).expect("no cap").zip(values) {
            for (acc, h) in out.iter_mut().zip(hs) {
                *acc += v * roots.character(h.components(), &k).conj();
            }
        }
        out.into_iter().map(|z| z / self.n as f64).collect()
    }

    /// `Σ_{l ∈ G⊥} f̂(h + l)`, read off the coefficients.
    pub fn dual_lattice_sum(&self, f: &FourierPolynomial, h: &FrequencyIndex) -> Result<Complex64> {
        self.check_dims(f.params().s())?;
        self.check_dims(h.len())?;
        let target = self.residue(h);
        Ok(f.coefficients()
            .iter()
            .filter(|(g, _)| self.residue(g) == target)
            .map(|(_, c)| *c)
            .sum())
    }

    /// `∫ f − (1/n) Σ_k f(x_k)`, from samples.
    pub fn quadrature_residual(&self, f: &FourierPolynomial, cap: u128) -> Result<Complex64> {
        let values = self.sample(f, cap)?;
        let mean: Complex64 = values.iter().sum::<Complex64>() / self.n as f64;
        Ok(f.coefficient(&FrequencyIndex::zero(self.s())) - mean)
    }

    /// `−Σ_{l ∈ G⊥∖{0}} f̂(l)`, read off the coefficients.
    pub fn dual_residual(&self, f: &FourierPolynomial) -> Result<Complex64> {
        self.check_dims(f.params().s())?;
        Ok(-f
            .coefficients()
            .iter()
            .filter(|(h, _)| !h.is_zero() && self.in_dual(h))
            .map(|(_, c)| *c)
            .sum::<Complex64>())
    }
}

/// Row-major odometer over `0 ≤ k_j < m_j`.
pub struct GridIndices<'a> {
    mesh: &'a [u64],
    next: Option<Vec<u64>>,
}

impl Iterator for GridIndices<'_> {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut k = current.clone();
        for j in (0..k.len()).rev() {
            k[j] += 1;
            if k[j] < self.mesh[j] {
                self.next = Some(k);
                break;
            }
            k[j] = 0;
        }
        Some(current)
    }
}

/// `exp(2πi r/m_j)` for every residue, so characters need no trig per point.
struct RootTables {
    mesh: Vec<u64>,
    roots: Vec<Vec<Complex64>>,
}

impl RootTables {
    fn new(mesh: &[u64]) -> Self {
        let roots = mesh
            .iter()
            .map(|&m| {
                (0..m)
                    .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / m as f64))
                    .collect()
            })
            .collect();
        RootTables {
            mesh: mesh.to_vec(),
            roots,
        }
    }

    /// `exp(2πi h·x_k)` with `x_k = (k_j/m_j)_j`.
    fn character(&self, h: &[i64], k: &[u64]) -> Complex64 {
        let mut z = Complex64::new(1.0, 0.0);
        for j in 0..h.len() {
            let m = self.mesh[j] as i128;
            let r = (h[j] as i128 * k[j] as i128).rem_euclid(m) as usize;
            z *= self.roots[j][r];
        }
        z
    }
}

/// `F_n = Σ_{l ∈ G⊥∖{0}} ω^{Σ_j 2^{-b_j} a_j |l_j|^{b_j}}`
/// `= −1 + Π_j (1 + 2 Σ_{h≥1} ω^{a_j 2^{-b_j} (m_j h)^{b_j}})`,
/// with the neglected series tails bounded geometrically.
pub fn f_n_bracket(params: &KorobovParams, grid: &RegularGrid) -> Result<Bracketed> {
    grid.check_dims(params.s())?;
    let ln_q = params.ln_inv_omega();
    let (mut lo, mut hi) = (0.0, 0.0);
    for j in 0..params.s() {
        let (a, b) = (params.a_terms()[j], params.b_terms()[j]);
        let rate = a * pow_b(0.5, b) * pow_b(grid.mesh()[j] as f64, b) * ln_q;
        let sum = positive_sum(rate, b, REL_TOL);
        lo += (2.0 * sum.lower()).ln_1p();
        hi += (2.0 * sum.upper()).ln_1p();
    }
    let (lower, upper) = (lo.exp_m1(), hi.exp_m1());
    Ok(Bracketed {
        partial: lower,
        tail: upper - lower,
    })
}

/// Certified upper value of `F_n`.
pub fn f_n(params: &KorobovParams, grid: &RegularGrid) -> Result<f64> {
    Ok(f_n_bracket(params, grid)?.upper())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::enumerate;
    use crate::space::random_unit_on;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(m: &[u64]) -> RegularGrid {
        RegularGrid::new(m.to_vec()).unwrap()
    }

    #[test]
    fn point_sets() {
        let g = grid(&[2]);
        assert_eq!(
            g.points(10).unwrap().collect::<Vec<_>>(),
            vec![vec![0.0], vec![0.5]]
        );
        let g = grid(&[2, 3]);
        let pts: Vec<_> = g.points(10).unwrap().collect();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vec![0.0, 1.0 / 3.0]);
        assert_eq!(
            grid(&[1, 1]).points(10).unwrap().collect::<Vec<_>>(),
            vec![vec![0.0, 0.0]]
        );
        assert!(matches!(
            g.points(5),
            Err(Error::CapExceeded { needed: 6, .. })
        ));
        assert!(RegularGrid::new(vec![2, 0]).is_err());
        assert!(RegularGrid::new(vec![]).is_err());
    }

    #[test]
    fn dual_membership() {
        let g = grid(&[2, 3]);
        assert!(g.in_dual(&vec![4, -3].into()));
        assert!(!g.in_dual(&vec![1, 0].into()));
        assert!(g.in_dual(&vec![0, 0].into()));
        assert_eq!(g.residue(&vec![-1, -4].into()), vec![1, 2]);
    }

    fn params2() -> KorobovParams {
        KorobovParams::from_terms(0.5, &[1.0, 1.0], &[1.0, 2.0]).unwrap()
    }

    #[test]
    fn aliasing_examples() {
        let p = params2();
        let g = grid(&[2, 3]);
        let e0 = FourierPolynomial::basis(&p, FrequencyIndex::zero(2)).unwrap();
        let v = g
            .aliased_coefficient(&e0, &FrequencyIndex::zero(2), 100)
            .unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let c = Complex64::new(0.7, -0.2);
        let f = FourierPolynomial::from_terms(&p, [(FrequencyIndex::new(vec![3, -2]), c)]).unwrap();
        let hit = g.aliased_coefficient(&f, &vec![1, 1].into(), 100).unwrap();
        assert!((hit - c).norm() < 1e-14);
        let miss = g.aliased_coefficient(&f, &vec![0, 1].into(), 100).unwrap();
        assert!(miss.norm() < 1e-14);
    }

    #[test]
    fn sampled_equals_dual_sum() {
        let p = params2();
        let support = enumerate(&p, 8.0, 10_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..30 {
            let f = random_unit_on(&p, support.members(), seed).unwrap();
            let g = grid(&[rng.gen_range(1..6), rng.gen_range(1..6)]);
            let h = FrequencyIndex::new(vec![rng.gen_range(-4..5), rng.gen_range(-4..5)]);
            let sampled = g.aliased_coefficient(&f, &h, 1000).unwrap();
            let direct = g.dual_lattice_sum(&f, &h).unwrap();
            assert!((sampled - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
            let r1 = g.quadrature_residual(&f, 1000).unwrap();
            let r2 = g.dual_residual(&f).unwrap();
            assert!((r1 - r2).norm() < 1e-12);
        }
    }

    #[test]
    fn residual_examples() {
        let p = params2();
        let g = grid(&[2, 3]);
        let one = FourierPolynomial::constant(&p, Complex64::new(2.5, 0.0));
        assert!(g.quadrature_residual(&one, 100).unwrap().norm() < 1e-15);
        let e = FourierPolynomial::basis(&p, vec![1, 0].into()).unwrap();
        assert!(g.quadrature_residual(&e, 100).unwrap().norm() < 1e-15);
        let h: FrequencyIndex = vec![2, 3].into();
        let e = FourierPolynomial::basis(&p, h.clone()).unwrap();
        let w = p.weight_of_exponent(0.5 * crate::index_set::exponent(&p, &h).unwrap());
        assert!((g.quadrature_residual(&e, 100).unwrap() + w).norm() < 1e-14);
    }

    #[test]
    fn f_n_values() {
        let p = KorobovParams::from_terms(0.5, &[1.0], &[1.0]).unwrap();
        let f = f_n_bracket(&p, &grid(&[2])).unwrap();
        assert!((f.lower() - 2.0).abs() < 1e-14 && f.upper() >= 2.0 - 1e-14);
        let p = params2();
        let mut last = f64::INFINITY;
        for m in 1..12 {
            let v = f_n(&p, &grid(&[m, 3])).unwrap();
            assert!(v >= 0.0 && v < last);
            last = v;
        }
        assert!(f_n(&p, &grid(&[2])).is_err());
    }

    #[test]
    fn f_n_matches_lattice_enumeration() {
        // oracle: direct sum over the rescaled lattice l = (m_j k_j)
        let p = params2();
        let g = grid(&[3, 2]);
        let mut direct = 0.0;
        for k1 in -200i64..=200 {
            for k2 in -30i64..=30 {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let e = 0.5 * (3 * k1).abs() as f64 + 0.25 * ((2 * k2) as f64).powi(2);
                direct += 0.5f64.powf(e);
            }
        }
        let f = f_n_bracket(&p, &g).unwrap();
        assert!(f.lower() <= direct * (1.0 + 1e-13) && direct <= f.upper() * (1.0 + 1e-13));
    }
}
