//! Equal-weight grid quadrature: its worst-case error, the extremal integrand
//! and the lower bound for very small point sets.

use korobov::approx_std::{
    default_trunc_x, exact_worst_case_error, StdAlgorithm, DEFAULT_COSET_CAP,
};
use korobov::grid::RegularGrid;
use korobov::integrate::{
    extremal_function, induced_int_rule, int_lower_bound, integrate, worst_case_int_error,
};
use korobov::KorobovParams;

fn main() -> korobov::Result<()> {
    let p = KorobovParams::from_terms(0.5, &[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0])?;
    for mesh in [vec![1, 1, 1], vec![2, 1, 1], vec![4, 2, 1], vec![8, 4, 2]] {
        let alg = StdAlgorithm::new(&p, 20.0, RegularGrid::new(mesh.clone())?, 1_000_000)?;
        let rule = induced_int_rule(&alg);
        let trunc = default_trunc_x(&alg);
        let int = worst_case_int_error(&p, &rule, trunc, 1_000_000)?;
        let app = exact_worst_case_error(&alg, Some(trunc), 1_000_000, DEFAULT_COSET_CAP)?;
        let lower = int_lower_bound(&p, alg.grid().n());

        let worst = extremal_function(&p, alg.grid(), trunc)?;
        let q = integrate(&rule, &worst, 1_000_000)?;
        println!(
            "mesh {mesh:?}: e_int = {:.4e}, e_app = {:.4e}, lower {:?}, Q(worst) = {:.4e}",
            int.value,
            app.value,
            lower,
            q.norm()
        );
    }
    Ok(())
}
