//! Limit moments predicted by asymptotic freeness, as exact rationals and as
//! functions of the ratio `c = M/N`.

use num_rational::BigRational;
use permfree::harness::parse_monomial;
use permfree::limit::freeness_prediction;

fn main() -> permfree::Result<()> {
    let monomials = [
        "G1 U[g1] G1* U[g1^-1]",
        "G1 U[g1] G1* U[g2]",
        "W1 U[g1] W1 U[g1^-1]",
        "W1 W1 W1",
        "H1* T[e] H1 U[e]",
        "U[g1.g2]",
    ];
    let half = BigRational::new(1.into(), 2.into());
    for text in monomials {
        let m = parse_monomial(text, 2)?;
        let lim = freeness_prediction(&m.canonicalize())?;
        println!(
            "{text:<28} numerator {:?} / (1+c)^{}   c=1: {}   c=1/2: {}",
            lim.numerator.terms().map(|(p, k)| format!("{k}c^{p}")).collect::<Vec<_>>(),
            lim.one_plus_c_power,
            lim.eval(1.0),
            lim.eval_exact(&half),
        );
    }
    Ok(())
}
