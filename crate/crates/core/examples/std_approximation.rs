//! Approximation from function values: the grid algorithm, its mesh rule,
//! its bounds and the exact worst-case error.

use korobov::approx_std::{
    bound_chain, exact_worst_case_error_refined, mesh_proposition, parseval_error_sq, StdAlgorithm,
    DEFAULT_COSET_CAP,
};
use korobov::index_set::enumerate;
use korobov::space::random_unit_ball;
use korobov::KorobovParams;

fn main() -> korobov::Result<()> {
    let p = KorobovParams::from_terms(0.5, &[1.0, 2.0], &[1.0, 2.0])?;
    for eps in [0.5, 0.2, 0.1] {
        let mesh = mesh_proposition(&p, eps, u128::MAX)?;
        let alg = StdAlgorithm::new(&p, mesh.big_m, mesh.grid.clone(), 1_000_000)?;
        let chain = bound_chain(&alg)?;
        let exact = exact_worst_case_error_refined(&alg, 1e-6, 1_000_000, DEFAULT_COSET_CAP)?;
        println!(
            "ε = {eps}: mesh {:?}, n = {}, |A| = {}",
            mesh.grid.mesh(),
            mesh.grid.n(),
            alg.index_set().count()
        );
        println!(
            "   exact {:.4} (+{:.1e})  ≤ {:.4} ≤ {:.4} ≤ {:.4} ≤ {:.4} = guarantee {:.4}",
            exact.value,
            exact.slack,
            chain.gen_approx,
            chain.set_size,
            chain.product_form,
            chain.upper_bound,
            mesh.guaranteed
        );
    }

    // a cheaper mesh sized directly from M
    let alg = StdAlgorithm::spt(&p, 50.0, 0.5, 1_000_000)?;
    let f = random_unit_ball(&p, &enumerate(&p, 15.0, 100_000)?, 3)?;
    let af = alg.apply(&f, 1_000_000)?;
    println!(
        "\nmesh {:?}: ‖f − A f‖_L2 = {:.4e}, by Parseval {:.4e}",
        alg.grid().mesh(),
        f.l2_distance(&af)?,
        parseval_error_sq(&alg, &f)?.sqrt()
    );
    Ok(())
}
