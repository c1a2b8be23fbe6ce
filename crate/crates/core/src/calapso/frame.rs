//! Integration of `dA = A alpha` over the grid.

use nalgebra::Matrix6;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::connection::ConnectionForm;
use super::CalapsoError;
use crate::grid::{fd_weights, Grid, Mesh};
use crate::liegroup::{metric_defect, reproject, GroupElement};

/// Step control for the frame integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameOptions {
    /// RK4 steps per grid cell.
    pub substeps: usize,
    /// Re-project onto the group after this many steps.
    pub reproject_every: usize,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            substeps: 4,
            reproject_every: 16,
        }
    }
}

/// Frames `A` at every node, integrated first along the bottom row and
/// then up each column.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub mesh: Mesh,
    pub frames: Grid<Matrix6<f64>>,
    pub base: GroupElement,
    /// Sup-norm gap to the frames integrated column first.
    pub path_residual: f64,
    /// Largest `|A^T g A - g|` seen at any node.
    pub drift: f64,
}

impl FrameField {
    pub fn get(&self, i: usize, j: usize) -> &Matrix6<f64> {
        self.frames.get(i, j)
    }
}

// Lagrange interpolation on the six nodes nearest to fractional position
// `s` (in units of the spacing) along a line of `n` values.
fn interpolate(line: &[Matrix6<f64>], s: f64) -> Matrix6<f64> {
    let n = line.len();
    let width = n.min(6);
    let start = ((s.floor() as isize) - (width as isize / 2 - 1)).clamp(0, (n - width) as isize) as usize;
    let xs: Vec<f64> = (start..start + width).map(|p| p as f64).collect();
    let w = fd_weights(s, &xs, 0);
    let mut out = Matrix6::zeros();
    for (k, wk) in w[0].iter().enumerate() {
        out += line[start + k] * *wk;
    }
    out
}

/// Solves `A' = A C(s)` along a line of nodal coefficients with spacing
/// `h`, starting from `start`. Returns the frame at every node and the
/// largest metric defect observed.
fn integrate_line(
    line: &[Matrix6<f64>],
    h: f64,
    start: Matrix6<f64>,
    opts: &FrameOptions,
) -> Result<(Vec<Matrix6<f64>>, f64), CalapsoError> {
    let m = opts.substeps.max(1);
    let dt = h / m as f64;
    let mut a = start;
    let mut out = Vec::with_capacity(line.len());
    out.push(a);
    let mut drift = metric_defect(&a);
    let mut steps = 0usize;
    for cell in 0..line.len().saturating_sub(1) {
        for sub in 0..m {
            let s0 = cell as f64 + sub as f64 / m as f64;
            let c0 = interpolate(line, s0);
            let c1 = interpolate(line, s0 + 0.5 / m as f64);
            let c2 = interpolate(line, s0 + 1.0 / m as f64);
            let k1 = a * c0;
            let k2 = (a + k1 * (dt / 2.0)) * c1;
            let k3 = (a + k2 * (dt / 2.0)) * c1;
            let k4 = (a + k3 * dt) * c2;
            a += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            steps += 1;
            drift = drift.max(metric_defect(&a));
            if opts.reproject_every > 0 && steps.is_multiple_of(opts.reproject_every) {
                a = reproject(&a)?;
            }
        }
        out.push(a);
    }
    Ok((out, drift))
}

fn column<T: Clone>(g: &Grid<T>, i: usize) -> Vec<T> {
    (0..g.ny()).map(|j| g.get(i, j).clone()).collect()
}

fn row<T: Clone>(g: &Grid<T>, j: usize) -> Vec<T> {
    (0..g.nx()).map(|i| g.get(i, j).clone()).collect()
}

type Sweep = (Grid<Matrix6<f64>>, f64);

fn row_then_column(cf: &ConnectionForm, a0: Matrix6<f64>, opts: &FrameOptions) -> Result<Sweep, CalapsoError> {
    let mesh = cf.mesh;
    let (bottom, d0) = integrate_line(&row(&cf.p, 0), mesh.hx(), a0, opts)?;
    let columns: Vec<(Vec<Matrix6<f64>>, f64)> = (0..mesh.nx)
        .into_par_iter()
        .map(|i| integrate_line(&column(&cf.q, i), mesh.hy(), bottom[i], opts))
        .collect::<Result<_, _>>()?;
    let drift = columns.iter().fold(d0, |m, c| m.max(c.1));
    Ok((Grid::from_fn(mesh.nx, mesh.ny, |i, j| columns[i].0[j]), drift))
}

fn column_then_row(cf: &ConnectionForm, a0: Matrix6<f64>, opts: &FrameOptions) -> Result<Sweep, CalapsoError> {
    let mesh = cf.mesh;
    let (left, d0) = integrate_line(&column(&cf.q, 0), mesh.hy(), a0, opts)?;
    let rows: Vec<(Vec<Matrix6<f64>>, f64)> = (0..mesh.ny)
        .into_par_iter()
        .map(|j| integrate_line(&row(&cf.p, j), mesh.hx(), left[j], opts))
        .collect::<Result<_, _>>()?;
    let drift = rows.iter().fold(d0, |m, r| m.max(r.1));
    Ok((Grid::from_fn(mesh.nx, mesh.ny, |i, j| rows[j].0[i]), drift))
}

/// Integrates the connection from `a0` at the origin along both path
/// orders; the row-first frames are kept and the gap is recorded.
pub fn integrate_frame(cf: &ConnectionForm, a0: &GroupElement, opts: FrameOptions) -> Result<FrameField, CalapsoError> {
    let (frames, d1) = row_then_column(cf, *a0.matrix(), &opts)?;
    let (other, d2) = column_then_row(cf, *a0.matrix(), &opts)?;
    let path_residual = frames
        .values()
        .iter()
        .zip(other.values())
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max);
    Ok(FrameField {
        mesh: cf.mesh,
        frames,
        base: *a0,
        path_residual,
        drift: d1.max(d2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calapso::connection::connection_form;
    use crate::calapso::field::{seed_exact, Profile};
    use crate::liegroup::{expm, random_group_element, IndexMap};

    #[test]
    fn zero_connection_keeps_the_base_frame() {
        let a0 = random_group_element(3);
        let ff = integrate_frame(&ConnectionForm::zero(Mesh::unit(9)), &a0, FrameOptions::default()).unwrap();
        for m in ff.frames.values() {
            assert!((m - a0.matrix()).amax() < 1e-12);
        }
        assert!(ff.path_residual < 1e-12);
    }

    #[test]
    fn constant_connection_gives_exponentials() {
        let x: Vec<f64> = (0..15).map(|k| 0.1 * (k as f64 - 7.0)).collect();
        let b = IndexMap::standard().algebra_element(&x);
        let mesh = Mesh::unit(17);
        let cf = ConnectionForm {
            mesh,
            p: Grid::filled(17, 17, b),
            q: Grid::filled(17, 17, Matrix6::zeros()),
            lambda: 0.0,
        };
        let ff = integrate_frame(&cf, &GroupElement::identity(), FrameOptions::default()).unwrap();
        let err = (ff.get(16, 5) - expm(&b)).amax();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn interpolation_is_exact_on_quintics() {
        let line: Vec<Matrix6<f64>> = (0..10).map(|k| Matrix6::from_element((k as f64).powi(5))).collect();
        let v = interpolate(&line, 8.5);
        assert!((v[(0, 0)] - 8.5f64.powi(5)).abs() < 1e-8);
    }

    #[test]
    fn seed_frames_stay_in_the_group() {
        let f = seed_exact(&Profile::default(), 1.0, Mesh::unit(33));
        let ff = integrate_frame(&connection_form(&f, 0.0), &GroupElement::identity(), FrameOptions::default()).unwrap();
        assert!(ff.drift < 1e-8, "{}", ff.drift);
        assert!(ff.path_residual < 1e-6, "{}", ff.path_residual);
    }
}
