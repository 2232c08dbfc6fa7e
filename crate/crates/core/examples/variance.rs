//! Variance of normalized traces and its N² rescaling.

use permfree::harness::{emit_table, run_variance_study, ExperimentConfig, Format};

fn main() -> permfree::Result<()> {
    let cfg = ExperimentConfig {
        monomials: vec!["U[g1]".into(), "G1 U[g1] G1* U[g2]".into()],
        sizes: vec![2, 4, 16],
        samples: 2000,
        ..Default::default()
    };
    emit_table(&run_variance_study(&cfg)?, Format::Csv, None)
}
