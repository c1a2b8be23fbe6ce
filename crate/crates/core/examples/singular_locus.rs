//! Sampling the rank of the polar equations off and on the candidate
//! singular locus, with a symbolic certificate on the isothermic stratum.

use std::error::Error;

use conformal_eds::pfaffian::{cartan_report, singular_check};
use conformal_eds::systems::{build_system, coefficient_poly, singular_strata, SystemId, SINGULAR_CANDIDATE};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let samples = 100;
    let a = cartan_report(&build_system(SystemId::I2), 42)?;
    let candidate = coefficient_poly(SINGULAR_CANDIDATE)?;
    let rep = singular_check(&a.polar, &candidate, &singular_strata(), samples, 42)?;
    println!("candidate: {SINGULAR_CANDIDATE}");
    println!("off its zero set: rank counts {:?} (full rank {})", rep.sufficiency_ranks, rep.full_rank);
    for s in &rep.strata {
        let symbolic = s.symbolic.as_ref().map(|g| format!(", symbolic rank {}", g.rank)).unwrap_or_default();
        println!("  {}: sampled {:?}{symbolic}", s.constraint, s.ranks);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
