//! Kernel values, the reproducing property and norms in the space.

use korobov::index_set::enumerate;
use korobov::space::{kernel_eval, random_unit_ball};
use korobov::{FourierPolynomial, FrequencyIndex, KorobovParams};

fn main() -> korobov::Result<()> {
    let p = KorobovParams::from_terms(0.5, &[1.0, 2.0], &[1.0, 1.0])?;
    let x = [0.1, 0.7];
    let y = [0.4, 0.25];
    println!("K(x,x) = {:.12}", kernel_eval(&p, &x, &x, 1e-14)?);
    println!("K(x,y) = {:.12}", kernel_eval(&p, &x, &y, 1e-14)?);

    let support = enumerate(&p, 20.0, 100_000)?;
    let f = random_unit_ball(&p, &support, 42)?;
    let kx = FourierPolynomial::kernel_section(&p, &x, support.members())?;
    println!("f(x)       = {:.12}", f.evaluate(&x)?);
    println!("<f, K(.,x)> = {:.12}", f.inner(&kx)?);
    println!("‖f‖ = {:.12}, ‖f‖_L2 = {:.6}", f.norm(), f.l2_norm());

    let e = FourierPolynomial::basis(&p, FrequencyIndex::new(vec![2, -1]))?;
    println!("‖e_(2,-1)‖ = {}", e.norm());
    println!("as JSON: {}", e.to_json());
    Ok(())
}
