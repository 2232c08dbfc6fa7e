//! The named demonstrations at reduced size. Pass a demo name to run only it.

use permfree::harness::{emit_report, run_demo, DemoConfig, Format, DEMOS};

fn main() -> permfree::Result<()> {
    let only = std::env::args().nth(1);
    let cfg = DemoConfig {
        n: Some(64),
        samples: Some(40),
        ..Default::default()
    };
    for name in DEMOS.iter().filter(|d| only.as_deref().is_none_or(|o| o == **d)) {
        println!("# {name}");
        emit_report(&run_demo(name, &cfg)?, Format::Csv, None)?;
    }
    Ok(())
}
