//! Sizes of the sets `A(s,M) = {h : ω_h^{-1} < M}` and their product bounds.

use korobov::index_set::{count, enumerate, j_of_x, lemma1_bounds, x_of_m};
use korobov::KorobovParams;

fn main() -> korobov::Result<()> {
    let p = KorobovParams::from_terms(0.5, &[1.0, 2.0, 4.0], &[1.0, 1.0, 2.0])?;
    println!(
        "{:>8} {:>8} {:>10} {:>10} {:>10}",
        "M", "x", "n(x,s)", "lower", "upper"
    );
    for m in [2.0, 8.0, 64.0, 1024.0, 1e6] {
        let x = x_of_m(p.omega(), m);
        let n = count(&p, x);
        let (lo, hi) = match lemma1_bounds(&p, x, None) {
            Ok(b) => (b.lower, b.upper),
            // below a_1 only the origin qualifies
            Err(_) => (1.0, 1.0),
        };
        println!("{m:>8} {x:>8.3} {n:>10} {lo:>10} {hi:>10}");
    }

    let x = x_of_m(p.omega(), 16.0);
    println!("\nj(x) at x = {x}: {:?}", j_of_x(&p, x)?);
    let set = enumerate(&p, x, 10_000)?;
    for (h, e) in set.iter().take(12) {
        println!("  h = {:>12?}  exponent {e:.3}", h.components());
    }
    println!("  ... {} members", set.count());
    Ok(())
}
