//! Convergence and tractability verdicts for a few sequence families.

use korobov::tractability::analyze;
use korobov::{KorobovParams, SequenceFamily};

fn main() -> korobov::Result<()> {
    let cases = [
        (
            "a_j = 3^j, b_j = 2^j",
            SequenceFamily::geometric(1.0, 3.0),
            SequenceFamily::geometric(1.0, 2.0),
        ),
        (
            "b_j = 1",
            SequenceFamily::geometric(1.0, 3.0),
            SequenceFamily::constant(1.0),
        ),
        (
            "a_j = 1",
            SequenceFamily::constant(1.0),
            SequenceFamily::geometric(1.0, 2.0),
        ),
        (
            "a_j = j^2",
            SequenceFamily::power(1.0, 2.0),
            SequenceFamily::geometric(1.0, 2.0),
        ),
    ];
    for (label, a, b) in cases {
        println!("== {label}");
        println!("{}", analyze(&a, &b, 4)?);
    }

    // the same pair, read from a config document
    let p = KorobovParams::from_json_str(
        r#"{"omega": 0.5, "s": 3,
            "a": {"family": "geometric", "c": 1, "r": 3},
            "b": {"family": "geometric", "c": 1, "r": 2}}"#,
    )?;
    println!("a = {:?}, b = {:?}", p.a_terms(), p.b_terms());
    Ok(())
}
