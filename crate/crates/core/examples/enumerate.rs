//! Counts of permutations, pairings and non-crossing partitions, and a few
//! Kreweras complements.

use permfree::perm::{enumerate_nc_pairings, enumerate_noncrossing, enumerate_pairings, enumerate_permutations};

fn main() -> permfree::Result<()> {
    println!("n  all  pairings  noncrossing  nc-pairings");
    for n in 1..=8 {
        println!(
            "{n}  {}  {}  {}  {}",
            enumerate_permutations(n)?.count(),
            enumerate_pairings(n)?.count(),
            enumerate_noncrossing(n)?.count(),
            enumerate_nc_pairings(n)?.count()
        );
    }
    for tau in enumerate_nc_pairings(6)? {
        println!("K({tau}) = {}", tau.kreweras()?);
    }
    Ok(())
}
