//! Exact finite-N expectation of a Gaussian monomial with its per-pairing
//! breakdown written as CSV.

use permfree::exact::{exact_moment_gaussian, PermMode};
use permfree::harness::parse_monomial;

fn main() -> permfree::Result<()> {
    let m = parse_monomial("G1 U[g1] G1* U[g1^-1]", 2)?;
    for n in [2, 3, 4] {
        let moment = exact_moment_gaussian(&m, n, PermMode::Exact)?;
        println!("N = {n}: E tr = {}", moment.value);
    }
    let moment = exact_moment_gaussian(&m, 4, PermMode::Exact)?;
    println!("\nterms at N = 4:");
    moment.write_terms_csv(std::io::stdout().lock())?;
    Ok(())
}
