//! Maurer–Cartan structure equations of O(4,2), the symmetry identities
//! they satisfy, and the semibasic forms of the three projections.

use std::error::Error;

use conformal_eds::liegroup::{build_mc_coframe, build_product_coframe, semibasic_basis, Metric, Projection};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mc = build_mc_coframe();
    let cf = mc.coframe();
    println!("Maurer–Cartan coframe: {} forms", cf.dim());
    for name in ["w10", "w31", "w43"] {
        let i = cf.index(name)?;
        println!("  d{name} = {}", cf.render(cf.d_basis(i)));
    }
    // d(w) read from the table agrees with -w∧w computed from the matrix.
    let direct = mc.structure_rhs(3, 1)?;
    assert_eq!(&direct, cf.d_basis(cf.index("w31")?));

    let failures = mc.map().symmetry_failures(&Metric::standard());
    println!("symmetry identities failing: {}", failures.len());
    assert!(failures.is_empty());

    let product = build_product_coframe();
    let bad = product.coframe().d_squared_failures()?;
    println!("product coframe: {} forms, d^2 != 0 for {}", product.coframe().dim(), bad.len());
    assert!(bad.is_empty());

    for p in [Projection::Q, Projection::P, Projection::D] {
        let sb = semibasic_basis(p);
        println!("semibasic forms of {p:?} ({}): {}", sb.forms.len(), sb.names().join(", "));
        assert!(sb.same_span(p.published())?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
