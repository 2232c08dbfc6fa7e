//! Writes one ensemble draw to a binary dump and reads it back.

use permfree::sim::dump::{read_ensemble, write_ensemble};
use permfree::sim::{build_ensemble, ModelTags};

fn main() -> permfree::Result<()> {
    let tags = ModelTags::PERM.union(ModelTags::GAUSS).union(ModelTags::WISHART);
    let e = build_ensemble(4, 6, 2, tags, 42, 0)?;
    let path = std::env::temp_dir().join("permfree-ensemble.bin");
    write_ensemble(&mut std::fs::File::create(&path)?, &e)?;
    let back = read_ensemble(&mut std::fs::File::open(&path)?)?;
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());
    println!("sigmas: {}", back.sigmas.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
    println!("G1[0][0] = {}", back.gauss[0].get(0, 0));
    Ok(())
}
