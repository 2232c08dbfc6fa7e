//! Brute-force Wick expansion against the closed formulas at small N.

use permfree::exact::{exact_expectation, wick_oracle_moment, PermMode};
use permfree::harness::{parse_monomial, GOLDEN_S, GOLDEN_SUITE};

fn main() -> permfree::Result<()> {
    for text in GOLDEN_SUITE {
        let m = parse_monomial(text, GOLDEN_S)?;
        for n in 1..=3 {
            let oracle = wick_oracle_moment(&m, n, Some(n))?;
            let formula = exact_expectation(&m.canonicalize(), n, n, PermMode::Exact)?.value;
            let ok = formula.rational() == Some(&oracle);
            println!("{text:<34} N={n}  oracle {oracle:<12} formula {formula:<12} {}", if ok { "ok" } else { "MISMATCH" });
        }
    }
    Ok(())
}
