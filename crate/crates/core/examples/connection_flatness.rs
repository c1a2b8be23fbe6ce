//! The connection built from a solution of the vector Calapso system is
//! flat once the system's equations are imposed as rewrite rules. The
//! pattern with the sign errors is not, and its residue says where.

use std::error::Error;

use conformal_eds::calapso::{symbolic_flatness, Entry, Pattern};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for pattern in [Pattern::corrected(), Pattern::printed(), Pattern::corrected().flip(Entry::Tau1)] {
        let r = symbolic_flatness(&pattern)?;
        println!("{}: flat {}", r.pattern, r.flat);
        for e in &r.residues {
            println!("  [{}][{}] {}", e.row, e.col, e.residue);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
