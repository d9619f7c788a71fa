//! The largest eigenvalues `ω_h`, the n-th minimal errors they imply, and the
//! optimal algorithm from arbitrary linear information.

use korobov::index_set::enumerate;
use korobov::space::random_unit_ball;
use korobov::spectra::{
    eigenvalue_tail_bound, info_complexity_all, optimal_algorithm_all, top_eigenvalues,
};
use korobov::KorobovParams;

fn main() -> korobov::Result<()> {
    let p = KorobovParams::from_terms(0.5, &[1.0, 1.0], &[1.0, 2.0])?;
    let spectrum = top_eigenvalues(&p, 40)?;
    for (n, pair) in spectrum.pairs().iter().enumerate().take(10) {
        let bound = eigenvalue_tail_bound(&p, n as u64 + 1, 0.5)?;
        println!(
            "λ_{:<3} = {:.6}  h = {:?}  tail bound {:.4}",
            n + 1,
            pair.eigenvalue,
            pair.index.components(),
            bound
        );
    }
    for n in [0, 5, 20, 39] {
        println!("e(n = {n}) = {:.3e}", spectrum.minimal_error(n).unwrap());
    }

    for eps in [0.5, 0.1, 0.01] {
        println!("n_all(ε = {eps}) = {}", info_complexity_all(&p, eps)?);
    }

    let f = random_unit_ball(&p, &enumerate(&p, 12.0, 10_000)?, 1)?;
    let approx = optimal_algorithm_all(&p, 0.1, &f)?;
    println!(
        "truncated series keeps {} of {} terms, L2 error {:.3e} (≤ 0.1)",
        approx.len(),
        f.len(),
        f.l2_distance(&approx)?
    );
    Ok(())
}
