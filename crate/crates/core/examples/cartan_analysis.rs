//! Cartan's test for the three Pfaffian systems: reduced closure, polar
//! equations, characters and the involution verdict.

use std::error::Error;

use conformal_eds::pfaffian::cartan_report;
use conformal_eds::systems::{build_system, closure_text, compare_closure, linearity, SystemId};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for id in SystemId::ALL {
        let a = cartan_report(&build_system(id), 1)?;
        let r = &a.report;
        println!(
            "{}: c0 {} c1 {} c2 {}, dim V2 {} of {}, characters {:?}, involutive {}: {}",
            id.name(),
            r.c0,
            r.c1,
            r.c2,
            r.dim_v2,
            r.grass_dim,
            r.characters,
            r.involutive,
            r.generality
        );
        assert!(r.involutive);
    }

    let a = cartan_report(&build_system(SystemId::I2), 1)?;
    print!("reduced closure of I2:\n{}", closure_text(&a));
    let cf = &a.adapted.coframe;
    println!("polar equations of the general vector:");
    for row in &a.polar.rows {
        println!("  {}", cf.render(row));
    }
    let exact = compare_closure(&a)?.iter().filter(|c| c.sign == 1).count();
    println!("closure rows equal to the printed forms: {exact}/12");
    let strict: Vec<String> = linearity(&a).into_iter().filter(|(_, l)| !l).map(|(g, _)| g).collect();
    println!("generators whose derivative is not strictly linear: {}", strict.join(", "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
