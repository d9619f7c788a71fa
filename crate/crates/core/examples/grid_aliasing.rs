//! Sampling on a regular grid folds every frequency onto its coset of the dual lattice.

use korobov::grid::{f_n, RegularGrid};
use korobov::space::random_unit_on;
use korobov::{FrequencyIndex, KorobovParams};

fn main() -> korobov::Result<()> {
    let p = KorobovParams::from_terms(0.6, &[1.0, 1.0], &[1.0, 1.0])?;
    let grid = RegularGrid::new(vec![4, 3])?;
    let support: Vec<FrequencyIndex> = [[0, 0], [1, 0], [5, 0], [-3, 3], [1, 6], [2, -1]]
        .iter()
        .map(|h| FrequencyIndex::new(h.to_vec()))
        .collect();
    let f = random_unit_on(&p, &support, 9)?;

    for h in [[1, 0], [0, 0], [2, 2]] {
        let h = FrequencyIndex::new(h.to_vec());
        let sampled = grid.aliased_coefficient(&f, &h, 1_000)?;
        let summed = grid.dual_lattice_sum(&f, &h)?;
        println!(
            "h = {:?}: residue {:?}, sampled {:.12}, coset sum {:.12}",
            h.components(),
            grid.residue(&h),
            sampled,
            summed
        );
    }
    println!(
        "quadrature residual: {:.3e}",
        grid.quadrature_residual(&f, 1_000)?.norm()
    );
    println!("F_n = {:.6e}", f_n(&p, &grid)?);
    Ok(())
}
