//! Limit, exact and Monte Carlo rows for a few monomials across N.

use permfree::harness::{emit_report, run_convergence_study, ExperimentConfig, Format};

fn main() -> permfree::Result<()> {
    let cfg = ExperimentConfig {
        monomials: vec!["G1 U[g1] G1* U[g1^-1]".into(), "W1 U[g1] W2 U[g2]".into()],
        sizes: vec![2, 4, 6],
        samples: 2000,
        with_mc: true,
        ..Default::default()
    };
    emit_report(&run_convergence_study(&cfg)?, Format::Csv, None)
}
