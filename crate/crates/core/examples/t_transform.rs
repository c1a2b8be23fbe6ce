//! The spectral family of an isothermic surface: Maurer–Cartan entries
//! that a second order deformation preserves, and jet contact between the
//! displaced surface and its transform.

use std::error::Error;

use conformal_eds::calapso::{check_contact, check_deformation_order2, seed_exact, surface, t_transform, FrameOptions, Profile};
use conformal_eds::grid::Mesh;
use conformal_eds::liegroup::GroupElement;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let field = seed_exact(&Profile::default(), 1.0, Mesh::unit(65));
    for lambda in [0.1, 0.5, 1.0] {
        let t = t_transform(&field, lambda, &GroupElement::identity(), FrameOptions::default())?;
        let rep = check_deformation_order2(&t.base, &t.deformed, 1e-7)?;
        println!("lambda {lambda}: matched entries agree to {:.2e}", rep.max_matched_relative);
        for e in rep.entries.iter().filter(|e| !e.matched) {
            println!("  {} differs by {:.3}", e.entry, e.sup);
        }
        let (f, fhat) = (surface(&t.base), surface(&t.deformed));
        let p = (32, 32);
        let d = t.displacement.get(p.0, p.1);
        let second = check_contact(&f, &fhat, d, p, 2, 2)?;
        let third = check_contact(&f, &fhat, d, p, 3, 2)?;
        println!("  contact at the centre: order 2 {second:.2e}, order 3 {third:.2e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
