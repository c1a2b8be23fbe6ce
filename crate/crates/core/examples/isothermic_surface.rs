//! From an exact solution of the vector Calapso system to an isothermic
//! surface in the Lie quadric, exported as a text mesh.

use std::error::Error;

use conformal_eds::calapso::{connection_form, extract_second_fundamental, integrate_frame, seed_exact, surface, FrameOptions, Profile};
use conformal_eds::cli::lab::surface_obj;
use conformal_eds::grid::Mesh;
use conformal_eds::liegroup::GroupElement;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let field = seed_exact(&Profile::default(), 1.0, Mesh::unit(64));
    println!("field residuals {:?}", field.residuals);
    let frames = integrate_frame(&connection_form(&field, 0.0), &GroupElement::identity(), FrameOptions::default())?;
    println!("metric drift {:.2e}, path residual {:.2e}", frames.drift, frames.path_residual);
    let s = surface(&frames);
    println!("quadric defect {:.2e}, chart defect {:.2e}", s.quadric_defect, s.chart_defect);
    let h = extract_second_fundamental(&frames)?;
    println!("second fundamental form: symmetry {:.2e}, trace {:.2e}", h.symmetry_defect, h.trace_defect);

    let out = std::env::temp_dir().join("isothermic_surface.obj");
    std::fs::write(&out, surface_obj(&s, 0.0))?;
    println!("mesh written to {}", out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
