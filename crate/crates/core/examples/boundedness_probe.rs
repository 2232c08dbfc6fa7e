//! Fixed-point statistics of permutation words across N.

use permfree::harness::{emit_table, run_boundedness_probe, Format, ProbeConfig};

fn main() -> permfree::Result<()> {
    let cfg = ProbeConfig {
        words: vec!["g1".into(), "g1.g2".into(), "g1^2".into()],
        sizes: vec![4, 8, 32],
        samples: 20_000,
        ..Default::default()
    };
    emit_table(&run_boundedness_probe(&cfg)?, Format::Json, None)
}
