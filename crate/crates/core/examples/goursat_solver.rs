//! Reconstructs a known solution of the vector Calapso system from its
//! characteristic data and boundary values, on a sequence of grids.

use std::error::Error;

use conformal_eds::calapso::{seed_constant_psi, solve_goursat, GoursatData, GoursatOptions, Mode};
use conformal_eds::grid::Mesh;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let modes = [Mode { amplitude: 1.0, rate: 1.0 }, Mode { amplitude: 0.5, rate: -2.0 }];
    let mut previous: Option<f64> = None;
    for n in [17, 33, 65] {
        let exact = seed_constant_psi(1.0, &modes, Mesh::unit(n));
        let solved = solve_goursat(&GoursatData::from_field(&exact), GoursatOptions::default())?;
        let err = solved
            .k1
            .max_abs_diff(&exact.k1)
            .max(solved.k2.max_abs_diff(&exact.k2))
            .max(solved.psi.max_abs_diff(&exact.psi));
        let order = previous.map(|p| format!(", observed order {:.3}", (p / err).log2())).unwrap_or_default();
        println!("{n:>4} nodes: sup error {err:.3e}{order}");
        previous = Some(err);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
