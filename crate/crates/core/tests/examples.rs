//! Every example runs to completion.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $module;

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(structure_equations, "../examples/structure_equations.rs");
example!(cartan_analysis, "../examples/cartan_analysis.rs");
example!(singular_locus, "../examples/singular_locus.rs");
example!(connection_flatness, "../examples/connection_flatness.rs");
example!(goursat_solver, "../examples/goursat_solver.rs");
example!(isothermic_surface, "../examples/isothermic_surface.rs");
example!(t_transform, "../examples/t_transform.rs");
example!(spectral_lab, "../examples/spectral_lab.rs");
