//! Full-matrix Monte Carlo estimate next to the exact value.

use permfree::exact::{exact_expectation, PermMode};
use permfree::harness::parse_monomial;
use permfree::sim::mc_estimate;

fn main() -> permfree::Result<()> {
    let m = parse_monomial("W1 U[g1] W1 U[g1^-1]", 2)?;
    for n in [4, 8] {
        let r = mc_estimate(&m, n, n, 5000, 1)?;
        let exact = exact_expectation(&m.canonicalize(), n, n, PermMode::Exact)?.value;
        println!(
            "N = {n}: mc {:.5} ± {:.5} ({} samples), exact {:.5}",
            r.mean.re,
            r.stderr,
            r.samples,
            exact.to_f64()
        );
    }
    Ok(())
}
