//! Certified sums of the one-dimensional series `Σ ω^{c·v^b}` that appear in
//! kernel values, eigenvalue sums and dual-lattice sums.
//!
//! Every truncation uses the domination `ω^{c·v^b} ≤ ω^{c·v}` for `v ≥ 1`
//! and `b ≥ 1`, so the neglected tail is bounded by a geometric series.

/// `v^b` with an exact integer power whenever `b` is a small integer.
pub(crate) fn pow_b(v: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && (1.0..=64.0).contains(&b) {
        v.powi(b as i32)
    } else {
        v.powf(b)
    }
}

/// `c · |h|^b`, with the convention that the term vanishes at `h = 0`
/// even when `c` is infinite.
pub(crate) fn weighted_power(c: f64, b: f64, h: u64) -> f64 {
    if h == 0 {
        0.0
    } else {
        c * pow_b(h as f64, b)
    }
}

/// A partial sum of a nonnegative series and an upper bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub partial: f64,
    pub tail: f64,
}

impl Bracketed {
    pub const ZERO: Bracketed = Bracketed {
        partial: 0.0,
        tail: 0.0,
    };

    pub fn lower(&self) -> f64 {
        self.partial
    }

    pub fn upper(&self) -> f64 {
        self.partial + self.tail
    }
}

const MAX_TERMS: u64 = 50_000_000;

/// `Σ_{t ≥ 0} exp(−rate · (start + step·t)^b)` for `start ≥ 1`, `step > 0`, `b ≥ 1`.
///
/// Terms are added until the geometric tail bound drops below `rel_tol` times the
/// partial sum (or below the smallest normal float).
pub(crate) fn progression_sum(rate: f64, b: f64, start: f64, step: f64, rel_tol: f64) -> Bracketed {
    debug_assert!(start >= 1.0 && step > 0.0 && b >= 1.0);
    if rate.is_infinite() {
        return Bracketed::ZERO;
    }
    let ratio_denominator = -(-rate * step).exp_m1();
    let mut partial = 0.0;
    let mut t = 0u64;
    loop {
        let v = start + step * t as f64;
        partial += (-rate * pow_b(v, b)).exp();
        let next = start + step * (t + 1) as f64;
        let tail = (-rate * next).exp() / ratio_denominator;
        t += 1;
        if tail <= rel_tol * partial || tail < f64::MIN_POSITIVE || t >= MAX_TERMS {
            return Bracketed { partial, tail };
        }
    }
}

/// `Σ_{h ≥ 1} ω^{c h^b}` written as `Σ exp(−rate·h^b)` with `rate = c·ln(1/ω)`.
pub(crate) fn positive_sum(rate: f64, b: f64, rel_tol: f64) -> Bracketed {
    progression_sum(rate, b, 1.0, 1.0, rel_tol)
}

/// Smallest `H ≥ 0` such that `Σ_{h > H} exp(−rate·h) ≤ budget`.
pub(crate) fn geometric_cutoff(rate: f64, budget: f64) -> u64 {
    if rate.is_infinite() {
        return 0;
    }
    let denom = -(-rate).exp_m1();
    // exp(−rate (H+1)) / denom ≤ budget  ⇔  H + 1 ≥ −ln(budget·denom)/rate
    let need = -(budget * denom).ln() / rate;
    if need <= 1.0 {
        0
    } else {
        let mut h = (need.ceil() as u64).saturating_sub(1);
        while h > 0 && (-rate * h as f64).exp() / denom <= budget {
            h -= 1;
        }
        while (-rate * (h + 1) as f64).exp() / denom > budget {
            h += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_matches_closed_form() {
        // Σ_{h≥1} 2^{-h} = 1
        let s = positive_sum(std::f64::consts::LN_2, 1.0, 1e-17);
        assert!((s.partial - 1.0).abs() < 1e-15);
        assert!(s.upper() >= 1.0 - 1e-15);
    }

    #[test]
    fn tail_brackets_true_value() {
        let rate = 0.3;
        let s = positive_sum(rate, 2.0, 1e-6);
        let exact: f64 = (1..200).map(|h| (-rate * (h * h) as f64).exp()).sum();
        assert!(s.lower() <= exact + 1e-15);
        assert!(s.upper() >= exact - 1e-15);
    }

    #[test]
    fn cutoff_is_minimal() {
        let rate = std::f64::consts::LN_2;
        let h = geometric_cutoff(rate, 1e-3);
        let tail = |h: u64| (-rate * (h + 1) as f64).exp() / (1.0 - (-rate).exp());
        assert!(tail(h) <= 1e-3);
        assert!(h == 0 || tail(h - 1) > 1e-3);
    }

    #[test]
    fn zero_power_vanishes_with_infinite_weight() {
        assert_eq!(weighted_power(f64::INFINITY, 2.0, 0), 0.0);
        assert_eq!(weighted_power(3.0, 2.0, 2), 12.0);
    }
}
