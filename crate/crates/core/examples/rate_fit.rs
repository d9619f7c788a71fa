//! Fitting the exponential-convergence exponent `p` from the n-th minimal errors.

use korobov::spectra::top_eigenvalues;
use korobov::tractability::fit_exponential_rate_log;
use korobov::KorobovParams;

fn main() -> korobov::Result<()> {
    for b in [
        vec![1.0],
        vec![1.0, 1.0],
        vec![1.0, 2.0],
        vec![1.0, 2.0, 4.0],
    ] {
        let a = vec![1.0; b.len()];
        let p = KorobovParams::from_terms(0.5, &a, &b)?;
        let spectrum = top_eigenvalues(&p, 5001)?;
        let mut points: Vec<(f64, f64)> = Vec::new();
        for i in 0..40 {
            let n = (50.0f64 * 100f64.powf(i as f64 / 39.0)).round() as usize;
            // e(n) itself underflows for large n, its logarithm does not
            let l = spectrum.minimal_log_error(n).unwrap();
            if points.last().is_none_or(|&(_, last)| l > last) {
                points.push((n as f64, l));
            }
        }
        let fit = fit_exponential_rate_log(&points)?;
        let target = 1.0 / b.iter().map(|v| 1.0 / v).sum::<f64>();
        println!(
            "b = {b:?}: p = {:.4} (1/B(s) = {target:.4}), residual {:.2e}",
            fit.p, fit.residual
        );
    }
    Ok(())
}
