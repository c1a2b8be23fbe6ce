//! Surfaces in the Lie quadric from frame fields, spectral deformations,
//! and the checks that certify them.

use nalgebra::{Matrix6, Vector6};
use serde::Serialize;

use super::connection::connection_form;
use super::field::CalapsoField;
use super::frame::{integrate_frame, FrameField, FrameOptions};
use super::CalapsoError;
use crate::grid::{derivative, stencil, Dir, Grid, Mesh};
use crate::liegroup::{numeric_mc, GroupElement, Metric};

/// Relative size of `F^0` below which a node is left out of the chart.
pub const CHART_EPS: f64 = 1e-8;

/// `v^1^2 + v^2^2 + v^3^2 - v^4^2`.
pub fn lorentz(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// Chart coordinates `(F^1..F^4) / F^0`, or `None` near `F^0 = 0`.
pub fn chart(f: &Vector6<f64>) -> Option<[f64; 4]> {
    if f[0].abs() <= CHART_EPS * f.amax() {
        return None;
    }
    Some([f[1] / f[0], f[2] / f[0], f[3] / f[0], f[4] / f[0]])
}

/// The map `f = [A e_0]` sampled on the grid.
#[derive(Clone, Debug)]
pub struct SurfacePatch {
    pub mesh: Mesh,
    pub points: Grid<Vector6<f64>>,
    pub chart: Grid<Option<[f64; 4]>>,
    /// Largest `|<F, F>| / |F|^2`.
    pub quadric_defect: f64,
    /// Largest `|F^5 / F^0 - (v, v) / 2|` over charted nodes.
    pub chart_defect: f64,
    pub chart_singular: Vec<(usize, usize)>,
    /// Charted nodes whose induced metric is not positive definite.
    pub not_spacelike: Vec<(usize, usize)>,
}

pub fn surface(ff: &FrameField) -> SurfacePatch {
    let g = Metric::standard();
    let mesh = ff.mesh;
    let points = ff.frames.map(|a| a.column(0).into_owned());
    let chart_grid = points.map(chart);
    let mut quadric_defect: f64 = 0.0;
    let mut chart_defect: f64 = 0.0;
    let mut chart_singular = Vec::new();
    for (i, j, f) in points.nodes() {
        let n = g.inner(f.as_slice(), f.as_slice()).abs() / f.norm_squared().max(f64::MIN_POSITIVE);
        quadric_defect = quadric_defect.max(n);
        match chart_grid.get(i, j) {
            Some(v) => chart_defect = chart_defect.max((f[5] / f[0] - 0.5 * lorentz(v, v)).abs()),
            None => chart_singular.push((i, j)),
        }
    }
    let not_spacelike = if chart_singular.is_empty() {
        let v = chart_grid.map(|c| c.map(nalgebra::Vector4::from).unwrap_or_default());
        let vx = derivative(&v, Dir::X, mesh.hx(), 1, 2);
        let vy = derivative(&v, Dir::Y, mesh.hy(), 1, 2);
        let mut bad = Vec::new();
        for (i, j, a) in vx.nodes() {
            let (a, b): ([f64; 4], [f64; 4]) = ((*a).into(), (*vy.get(i, j)).into());
            let (e, f, gg) = (lorentz(&a, &a), lorentz(&a, &b), lorentz(&b, &b));
            if e <= 0.0 || e * gg - f * f <= 0.0 {
                bad.push((i, j));
            }
        }
        bad
    } else {
        Vec::new()
    };
    SurfacePatch {
        mesh,
        points,
        chart: chart_grid,
        quadric_defect,
        chart_defect,
        chart_singular,
        not_spacelike,
    }
}

/// A spectral deformation `A_lambda` of the frames `A` of a field and the
/// displacement `D_lambda = A_lambda A^{-1}`.
#[derive(Clone, Debug)]
pub struct TTransform {
    pub lambda: f64,
    pub base: FrameField,
    pub deformed: FrameField,
    pub displacement: Grid<Matrix6<f64>>,
}

impl TTransform {
    /// Largest `|D - I|` over the grid.
    pub fn identity_defect(&self) -> f64 {
        self.displacement
            .values()
            .iter()
            .map(|d| (d - Matrix6::identity()).amax())
            .fold(0.0, f64::max)
    }
}

pub fn t_transform(field: &CalapsoField, lambda: f64, a0: &GroupElement, opts: FrameOptions) -> Result<TTransform, CalapsoError> {
    let base = integrate_frame(&connection_form(field, 0.0), a0, opts)?;
    t_transform_from(field, &base, lambda, opts)
}

/// As [`t_transform`], reusing already integrated undeformed frames.
pub fn t_transform_from(field: &CalapsoField, base: &FrameField, lambda: f64, opts: FrameOptions) -> Result<TTransform, CalapsoError> {
    let deformed = integrate_frame(&connection_form(field, lambda), &base.base, opts)?;
    let mut displacement = Grid::filled(field.nx(), field.ny(), Matrix6::identity());
    for (i, j, a) in base.frames.nodes() {
        let inv = a
            .try_inverse()
            .ok_or_else(|| CalapsoError::Frame(crate::liegroup::FrameError::Singular(format!("({i}, {j})"))))?;
        displacement.set(i, j, deformed.get(i, j) * inv);
    }
    Ok(TTransform {
        lambda,
        base: base.clone(),
        deformed,
        displacement,
    })
}

/// Maurer–Cartan entries `(row, col)` that a second order deformation
/// must preserve.
pub const MATCHED: [(usize, usize); 8] = [(1, 0), (2, 0), (2, 1), (0, 0), (3, 1), (3, 2), (4, 1), (4, 2)];

/// The remaining independent entries.
pub const UNMATCHED: [(usize, usize); 7] = [(0, 1), (0, 2), (0, 3), (0, 4), (3, 0), (4, 0), (4, 3)];

/// Finite-difference order used for pulled-back Maurer–Cartan forms.
pub const MC_ACCURACY: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryDiff {
    pub entry: String,
    pub matched: bool,
    /// Sup of the `dx`- and `dy`-coefficient differences.
    pub sup: f64,
    /// `sup / max(1, sup |entry of A|)`.
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationReport {
    pub tol: f64,
    pub entries: Vec<EntryDiff>,
    pub matched_ok: bool,
    pub max_matched_relative: f64,
    pub max_unmatched: f64,
}

impl DeformationReport {
    pub fn entry(&self, name: &str) -> Option<&EntryDiff> {
        self.entries.iter().find(|e| e.entry == name)
    }
}

/// Compares the pulled-back Maurer–Cartan forms of two frame fields on the
/// same grid, entry by entry.
pub fn check_deformation_order2(a: &FrameField, ahat: &FrameField, tol: f64) -> Result<DeformationReport, CalapsoError> {
    if a.mesh != ahat.mesh {
        return Err(CalapsoError::Shape("frame fields live on different grids".into()));
    }
    let (hx, hy) = (a.mesh.hx(), a.mesh.hy());
    let (p, q) = numeric_mc(&a.frames, hx, hy, MC_ACCURACY)?;
    let (ph, qh) = numeric_mc(&ahat.frames, hx, hy, MC_ACCURACY)?;
    let mut entries = Vec::new();
    for (list, matched) in [(&MATCHED[..], true), (&UNMATCHED[..], false)] {
        for &(r, c) in list {
            let mut sup: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for k in 0..p.values().len() {
                let (x, y) = (p.values()[k][(r, c)], q.values()[k][(r, c)]);
                sup = sup.max((x - ph.values()[k][(r, c)]).abs()).max((y - qh.values()[k][(r, c)]).abs());
                scale = scale.max(x.abs()).max(y.abs());
            }
            entries.push(EntryDiff {
                entry: format!("w{r}{c}"),
                matched,
                sup,
                relative: sup / scale,
            });
        }
    }
    let max_matched_relative = entries.iter().filter(|e| e.matched).map(|e| e.relative).fold(0.0, f64::max);
    let max_unmatched = entries.iter().filter(|e| !e.matched).map(|e| e.sup).fold(0.0, f64::max);
    Ok(DeformationReport {
        tol,
        matched_ok: max_matched_relative <= tol,
        entries,
        max_matched_relative,
        max_unmatched,
    })
}

/// Largest gap between the jets, up to `order`, of the charts of `D f` and
/// `fhat` at node `p0`, by finite differences of formal order `accuracy`.
pub fn check_contact(
    f: &SurfacePatch,
    fhat: &SurfacePatch,
    d: &Matrix6<f64>,
    p0: (usize, usize),
    order: usize,
    accuracy: usize,
) -> Result<f64, CalapsoError> {
    let mesh = f.mesh;
    let (i0, j0) = p0;
    if i0 == 0 || j0 == 0 || i0 + 1 >= mesh.nx || j0 + 1 >= mesh.ny {
        return Err(CalapsoError::Shape(format!("contact point ({i0}, {j0}) is not interior")));
    }
    let diff = |i: usize, j: usize| -> Result<[f64; 4], CalapsoError> {
        let xi = chart(&(d * f.points.get(i, j))).ok_or(CalapsoError::ChartSingular { i, j })?;
        let zeta = chart(fhat.points.get(i, j)).ok_or(CalapsoError::ChartSingular { i, j })?;
        Ok(std::array::from_fn(|k| xi[k] - zeta[k]))
    };
    let mut worst: f64 = 0.0;
    for total in 0..=order {
        for a in 0..=total {
            let b = total - a;
            let (sx, wx) = stencil(i0, mesh.nx, mesh.hx(), a, accuracy);
            let (sy, wy) = stencil(j0, mesh.ny, mesh.hy(), b, accuracy);
            let mut jet = [0.0; 4];
            for (p, cx) in wx.iter().enumerate() {
                for (q, cy) in wy.iter().enumerate() {
                    let v = diff(sx + p, sy + q)?;
                    for k in 0..4 {
                        jet[k] += cx * cy * v[k];
                    }
                }
            }
            worst = jet.iter().fold(worst, |m, v| m.max(v.abs()));
        }
    }
    Ok(worst)
}

/// Coefficients `h^a_ij` of `theta^a_i = h^a_ij theta^j_0`, `a = 3, 4`.
#[derive(Clone, Debug)]
pub struct SecondFundamental {
    /// `h[a - 3][i - 1][j - 1]` at each node.
    pub h: Grid<[[[f64; 2]; 2]; 2]>,
    /// Largest `|h^a_12 - h^a_21|`.
    pub symmetry_defect: f64,
    /// Largest `|h^a_11 + h^a_22|`.
    pub trace_defect: f64,
    /// Nodes where `theta^1_0, theta^2_0` are nearly dependent.
    pub flagged: Vec<(usize, usize)>,
}

impl SecondFundamental {
    pub fn component(&self, a: usize, i: usize, j: usize) -> Grid<f64> {
        self.h.map(|h| h[a - 3][i - 1][j - 1])
    }
}

pub fn extract_second_fundamental(ff: &FrameField) -> Result<SecondFundamental, CalapsoError> {
    let (p, q) = numeric_mc(&ff.frames, ff.mesh.hx(), ff.mesh.hy(), MC_ACCURACY)?;
    let mut flagged = Vec::new();
    let mut symmetry_defect: f64 = 0.0;
    let mut trace_defect: f64 = 0.0;
    let h = Grid::from_fn(ff.mesh.nx, ff.mesh.ny, |i, j| {
        let (pm, qm) = (p.get(i, j), q.get(i, j));
        let m = nalgebra::Matrix2::new(pm[(1, 0)], pm[(2, 0)], qm[(1, 0)], qm[(2, 0)]);
        let mut out = [[[0.0; 2]; 2]; 2];
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let Some(inv) = m.try_inverse().filter(|_| m.determinant().abs() > 1e-10 * scale * scale) else {
            flagged.push((i, j));
            return out;
        };
        for a in 3..5 {
            for l in 1..3 {
                let sol = inv * nalgebra::Vector2::new(pm[(a, l)], qm[(a, l)]);
                out[a - 3][l - 1] = [sol[0], sol[1]];
            }
            let h = out[a - 3];
            symmetry_defect = symmetry_defect.max((h[0][1] - h[1][0]).abs());
            trace_defect = trace_defect.max((h[0][0] + h[1][1]).abs());
        }
        out
    });
    Ok(SecondFundamental {
        h,
        symmetry_defect,
        trace_defect,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calapso::field::{seed_exact, Profile};
    use crate::liegroup::random_group_element;

    fn seed(n: usize) -> CalapsoField {
        seed_exact(&Profile::default(), 1.0, Mesh::unit(n))
    }

    #[test]
    fn seed_surface_lies_on_the_quadric() {
        let f = seed(17);
        let ff = integrate_frame(&connection_form(&f, 0.0), &GroupElement::identity(), FrameOptions::default()).unwrap();
        let s = surface(&ff);
        assert!(s.quadric_defect < 1e-9);
        assert!(s.chart_defect < 1e-9);
        assert!(s.chart_singular.is_empty());
        assert!(s.not_spacelike.is_empty());
    }

    #[test]
    fn zero_shift_is_the_identity_displacement() {
        let t = t_transform(&seed(9), 0.0, &random_group_element(1), FrameOptions::default()).unwrap();
        assert!(t.identity_defect() < 1e-10);
    }

    #[test]
    fn spectral_shift_moves_only_chi() {
        let f = seed(33);
        let t = t_transform(&f, 1.0, &GroupElement::identity(), FrameOptions::default()).unwrap();
        let rep = check_deformation_order2(&t.base, &t.deformed, 1e-7).unwrap();
        assert!(rep.matched_ok, "{rep:?}");
        assert!((rep.entry("w01").unwrap().sup - 0.5).abs() < 1e-6);
        assert!((rep.entry("w02").unwrap().sup - 0.5).abs() < 1e-6);
        let same = check_deformation_order2(&t.base, &t.base, 0.0).unwrap();
        assert_eq!(same.max_unmatched, 0.0);
    }

    #[test]
    fn contact_with_itself_is_exact() {
        let f = seed(17);
        let ff = integrate_frame(&connection_form(&f, 0.0), &GroupElement::identity(), FrameOptions::default()).unwrap();
        let s = surface(&ff);
        let r = check_contact(&s, &s, &Matrix6::identity(), (8, 8), 3, 2).unwrap();
        assert_eq!(r, 0.0);
        assert!(check_contact(&s, &s, &Matrix6::identity(), (0, 8), 1, 2).is_err());
    }

    #[test]
    fn second_fundamental_form_of_the_seed() {
        let f = seed(33);
        let ff = integrate_frame(&connection_form(&f, 0.0), &GroupElement::identity(), FrameOptions::default()).unwrap();
        let sf = extract_second_fundamental(&ff).unwrap();
        assert!(sf.flagged.is_empty());
        let h311 = sf.component(3, 1, 1);
        let h411 = sf.component(4, 1, 1);
        for (i, j, v) in h311.nodes() {
            assert!((v - f.mesh.x(i)).abs() < 1e-6, "{i} {j} {v}");
            assert!((h411.get(i, j) - 1.0).abs() < 1e-6);
        }
        assert!(sf.symmetry_defect < 1e-6);
        assert!(sf.trace_defect < 1e-6);
        assert!(sf.component(3, 1, 2).max_abs() < 1e-6);
    }
}
