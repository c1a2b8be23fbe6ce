//! Solutions of the vector Calapso system on a grid, and the primitive `u`.

use serde::{Deserialize, Serialize};

use super::CalapsoError;
use crate::grid::{derivative, Dir, Grid, Mesh};

/// A one-variable profile `p(x)` with its first two derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    /// `sum c_n x^n`.
    Polynomial { coefficients: Vec<f64> },
    /// `amplitude * sin(frequency * x + phase)`.
    Sine { amplitude: f64, frequency: f64, phase: f64 },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Polynomial {
            coefficients: vec![0.0, 1.0],
        }
    }
}

impl Profile {
    /// `(p, p', p'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Profile::Polynomial { coefficients } => {
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for c in coefficients.iter().rev() {
                    ddp = ddp * x + 2.0 * dp;
                    dp = dp * x + p;
                    p = p * x + c;
                }
                (p, dp, ddp)
            }
            Profile::Sine {
                amplitude,
                frequency,
                phase,
            } => {
                let t = frequency * x + phase;
                (
                    amplitude * t.sin(),
                    amplitude * frequency * t.cos(),
                    -amplitude * frequency * frequency * t.sin(),
                )
            }
        }
    }
}

/// Sup-norm residuals of the three Calapso equations at interior nodes,
/// by second-order central differences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub k1: f64,
    pub k2: f64,
    pub psi: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.k1.max(self.k2).max(self.psi)
    }
}

/// A grid solution `(k1, k2, psi)` of the vector Calapso system together
/// with the primitive `u` and the first partials of `k1`, `k2`.
#[derive(Clone, Debug)]
pub struct CalapsoField {
    pub mesh: Mesh,
    pub k1: Grid<f64>,
    pub k2: Grid<f64>,
    pub psi: Grid<f64>,
    pub u: Grid<f64>,
    pub k1x: Grid<f64>,
    pub k1y: Grid<f64>,
    pub k2x: Grid<f64>,
    pub k2y: Grid<f64>,
    /// Constant added to `u` before building the connection form.
    pub lambda: f64,
    pub residuals: Residuals,
    /// Bound the residuals are expected to stay under.
    pub tolerance: f64,
}

impl CalapsoField {
    pub fn nx(&self) -> usize {
        self.mesh.nx
    }

    pub fn ny(&self) -> usize {
        self.mesh.ny
    }

    pub fn hx(&self) -> f64 {
        self.mesh.hx()
    }

    pub fn hy(&self) -> f64 {
        self.mesh.hy()
    }

    /// `||k|| = k1^2 - k2^2` at a node.
    pub fn norm_k(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.k1.get(i, j), self.k2.get(i, j));
        a * a - b * b
    }

    pub fn within_tolerance(&self) -> bool {
        self.residuals.max() <= self.tolerance
    }

    /// Builds a field from `k1, k2, psi` grids: derivatives by central
    /// differences and `u` as the trapezoidal primitive of upsilon.
    pub fn from_grids(mesh: Mesh, k1: Grid<f64>, k2: Grid<f64>, psi: Grid<f64>, tolerance: f64) -> Self {
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let d = |g: &Grid<f64>, dir, h| derivative(g, dir, h, 1, 2);
        let (k1x, k1y) = (d(&k1, Dir::X, hx), d(&k1, Dir::Y, hy));
        let (k2x, k2y) = (d(&k2, Dir::X, hx), d(&k2, Dir::Y, hy));
        let norm = Grid::from_fn(mesh.nx, mesh.ny, |i, j| {
            k1.get(i, j).powi(2) - k2.get(i, j).powi(2)
        });
        let (px, py) = (d(&psi, Dir::X, hx), d(&psi, Dir::Y, hy));
        let (nxg, nyg) = (d(&norm, Dir::X, hx), d(&norm, Dir::Y, hy));
        let ux = Grid::from_fn(mesh.nx, mesh.ny, |i, j| -2.0 * (py.get(i, j) + nxg.get(i, j)));
        let uy = Grid::from_fn(mesh.nx, mesh.ny, |i, j| 2.0 * (px.get(i, j) + nyg.get(i, j)));
        let u = primitive(&mesh, &ux, &uy).0;
        let residuals = residuals(&mesh, &k1, &k2, &psi);
        CalapsoField {
            mesh,
            k1,
            k2,
            psi,
            u,
            k1x,
            k1y,
            k2x,
            k2y,
            lambda: 0.0,
            residuals,
            tolerance,
        }
    }

    /// Components `(u_x, u_y)` of upsilon by central differences.
    pub fn upsilon(&self) -> (Grid<f64>, Grid<f64>) {
        let (hx, hy) = (self.hx(), self.hy());
        let norm = Grid::from_fn(self.nx(), self.ny(), |i, j| self.norm_k(i, j));
        let d = |g: &Grid<f64>, dir, h| derivative(g, dir, h, 1, 2);
        let (px, py) = (d(&self.psi, Dir::X, hx), d(&self.psi, Dir::Y, hy));
        let (nx, ny) = (d(&norm, Dir::X, hx), d(&norm, Dir::Y, hy));
        (
            Grid::from_fn(self.nx(), self.ny(), |i, j| -2.0 * (py.get(i, j) + nx.get(i, j))),
            Grid::from_fn(self.nx(), self.ny(), |i, j| 2.0 * (px.get(i, j) + ny.get(i, j))),
        )
    }

    /// Sup of the cross-difference `(u_x)_y - (u_y)_x` over nodes at least
    /// `margin` nodes from every edge. Dirichlet data for `psi` need not be
    /// compatible with the equation at the corners, so solutions of the
    /// boundary problem can lose smoothness there.
    pub fn upsilon_closedness(&self, margin: usize) -> f64 {
        let (ux, uy) = self.upsilon();
        let (hx, hy) = (self.hx(), self.hy());
        let a = derivative(&ux, Dir::Y, hy, 1, 2);
        let b = derivative(&uy, Dir::X, hx, 1, 2);
        let m = margin.max(1);
        let mut worst: f64 = 0.0;
        for j in m..self.ny().saturating_sub(m) {
            for i in m..self.nx().saturating_sub(m) {
                worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
            }
        }
        worst
    }

    /// Largest gap between `u` integrated along the two edge paths of the
    /// rectangle `[0, x_i] x [0, y_j]`, over all nodes.
    pub fn u_loop_residual(&self) -> f64 {
        let (ux, uy) = self.upsilon();
        let (a, b) = primitive(&self.mesh, &ux, &uy);
        a.max_abs_diff(&b)
    }
}

fn interior_max<F: Fn(usize, usize) -> f64>(nx: usize, ny: usize, f: F) -> f64 {
    let mut m: f64 = 0.0;
    for j in 1..ny.saturating_sub(1) {
        for i in 1..nx.saturating_sub(1) {
            m = m.max(f(i, j));
        }
    }
    m
}

fn mixed(g: &Grid<f64>, i: usize, j: usize, hx: f64, hy: f64) -> f64 {
    (g.get(i + 1, j + 1) - g.get(i + 1, j - 1) - g.get(i - 1, j + 1) + g.get(i - 1, j - 1)) / (4.0 * hx * hy)
}

/// Central-difference residuals of the Calapso equations, with the
/// Laplacian taken as `psi_xx + psi_yy`.
pub fn residuals(mesh: &Mesh, k1: &Grid<f64>, k2: &Grid<f64>, psi: &Grid<f64>) -> Residuals {
    let (hx, hy) = (mesh.hx(), mesh.hy());
    let norm = Grid::from_fn(mesh.nx, mesh.ny, |i, j| k1.get(i, j).powi(2) - k2.get(i, j).powi(2));
    let lap = |i: usize, j: usize| {
        (psi.get(i + 1, j) - 2.0 * psi.get(i, j) + psi.get(i - 1, j)) / (hx * hx)
            + (psi.get(i, j + 1) - 2.0 * psi.get(i, j) + psi.get(i, j - 1)) / (hy * hy)
    };
    Residuals {
        k1: interior_max(mesh.nx, mesh.ny, |i, j| (mixed(k1, i, j, hx, hy) - psi.get(i, j) * k1.get(i, j)).abs()),
        k2: interior_max(mesh.nx, mesh.ny, |i, j| (mixed(k2, i, j, hx, hy) - psi.get(i, j) * k2.get(i, j)).abs()),
        psi: interior_max(mesh.nx, mesh.ny, |i, j| (lap(i, j) + 2.0 * mixed(&norm, i, j, hx, hy)).abs()),
    }
}

/// Trapezoidal primitives of the 1-form `a dx + b dy` vanishing at the
/// origin: first along the bottom edge then up each column, and first up
/// the left edge then along each row.
pub fn primitive(mesh: &Mesh, a: &Grid<f64>, b: &Grid<f64>) -> (Grid<f64>, Grid<f64>) {
    let (nx, ny, hx, hy) = (mesh.nx, mesh.ny, mesh.hx(), mesh.hy());
    let mut row_first = Grid::filled(nx, ny, 0.0);
    for i in 1..nx {
        let v = row_first.get(i - 1, 0) + 0.5 * hx * (a.get(i - 1, 0) + a.get(i, 0));
        row_first.set(i, 0, v);
    }
    for i in 0..nx {
        for j in 1..ny {
            let v = row_first.get(i, j - 1) + 0.5 * hy * (b.get(i, j - 1) + b.get(i, j));
            row_first.set(i, j, v);
        }
    }
    let mut col_first = Grid::filled(nx, ny, 0.0);
    for j in 1..ny {
        let v = col_first.get(0, j - 1) + 0.5 * hy * (b.get(0, j - 1) + b.get(0, j));
        col_first.set(0, j, v);
    }
    for j in 0..ny {
        for i in 1..nx {
            let v = col_first.get(i - 1, j) + 0.5 * hx * (a.get(i - 1, j) + a.get(i, j));
            col_first.set(i, j, v);
        }
    }
    (row_first, col_first)
}

/// The separable solution `psi = 0, k1 = p(x), k2 = c`, for which upsilon is
/// `-4 p p' dx` and `u = -2 (p(x)^2 - p(0)^2)`.
pub fn seed_exact(profile: &Profile, c: f64, mesh: Mesh) -> CalapsoField {
    let p0 = profile.eval(0.0).0;
    let k1 = mesh.sample(|x, _| profile.eval(x).0);
    let k2 = Grid::filled(mesh.nx, mesh.ny, c);
    let psi = Grid::filled(mesh.nx, mesh.ny, 0.0);
    let u = mesh.sample(|x, _| -2.0 * (profile.eval(x).0.powi(2) - p0 * p0));
    let residuals = residuals(&mesh, &k1, &k2, &psi);
    CalapsoField {
        k1x: mesh.sample(|x, _| profile.eval(x).1),
        k1y: Grid::filled(mesh.nx, mesh.ny, 0.0),
        k2x: Grid::filled(mesh.nx, mesh.ny, 0.0),
        k2y: Grid::filled(mesh.nx, mesh.ny, 0.0),
        mesh,
        k1,
        k2,
        psi,
        u,
        lambda: 0.0,
        residuals,
        tolerance: 1e-12,
    }
}

/// One exponential mode `amplitude * exp(rate x + (psi / rate) y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub amplitude: f64,
    pub rate: f64,
}

/// `psi = const`, `k1 = k2 = sum of exponential modes`. Each mode solves
/// `k_xy = psi k`, and `||k|| = 0` makes the Laplace equation and upsilon
/// trivial, so `u = 0`.
pub fn seed_constant_psi(psi: f64, modes: &[Mode], mesh: Mesh) -> CalapsoField {
    let k = |x: f64, y: f64| -> (f64, f64, f64) {
        modes.iter().fold((0.0, 0.0, 0.0), |(v, vx, vy), m| {
            let e = m.amplitude * (m.rate * x + psi / m.rate * y).exp();
            (v + e, vx + m.rate * e, vy + psi / m.rate * e)
        })
    };
    let kk = mesh.sample(|x, y| k(x, y).0);
    let kx = mesh.sample(|x, y| k(x, y).1);
    let ky = mesh.sample(|x, y| k(x, y).2);
    let psi_g = Grid::filled(mesh.nx, mesh.ny, psi);
    let residuals = residuals(&mesh, &kk, &kk, &psi_g);
    CalapsoField {
        mesh,
        k1: kk.clone(),
        k2: kk,
        psi: psi_g,
        u: Grid::filled(mesh.nx, mesh.ny, 0.0),
        k1x: kx.clone(),
        k1y: ky.clone(),
        k2x: kx,
        k2y: ky,
        lambda: 0.0,
        // Second-order consistency error of the central differences.
        tolerance: 1.0,
        residuals,
    }
}

/// Characteristic data for the Goursat problem: `k1`, `k2` on the two axes
/// and Dirichlet values of `psi` on the whole boundary.
#[derive(Clone, Debug)]
pub struct GoursatData {
    pub mesh: Mesh,
    /// Values on `y = 0`, length `nx`.
    pub k1_bottom: Vec<f64>,
    pub k2_bottom: Vec<f64>,
    /// Values on `x = 0`, length `ny`.
    pub k1_left: Vec<f64>,
    pub k2_left: Vec<f64>,
    /// Boundary values of `psi`; interior entries are ignored.
    pub psi_boundary: Grid<f64>,
}

impl GoursatData {
    /// Boundary data read off an existing field.
    pub fn from_field(f: &CalapsoField) -> Self {
        let (nx, ny) = (f.nx(), f.ny());
        GoursatData {
            mesh: f.mesh,
            k1_bottom: (0..nx).map(|i| *f.k1.get(i, 0)).collect(),
            k2_bottom: (0..nx).map(|i| *f.k2.get(i, 0)).collect(),
            k1_left: (0..ny).map(|j| *f.k1.get(0, j)).collect(),
            k2_left: (0..ny).map(|j| *f.k2.get(0, j)).collect(),
            psi_boundary: f.psi.clone(),
        }
    }

    /// Data sampled from functions on the boundary.
    pub fn sample<K1, K2, P>(mesh: Mesh, k1: K1, k2: K2, psi: P) -> Self
    where
        K1: Fn(f64, f64) -> f64,
        K2: Fn(f64, f64) -> f64,
        P: Fn(f64, f64) -> f64,
    {
        GoursatData {
            mesh,
            k1_bottom: (0..mesh.nx).map(|i| k1(mesh.x(i), 0.0)).collect(),
            k2_bottom: (0..mesh.nx).map(|i| k2(mesh.x(i), 0.0)).collect(),
            k1_left: (0..mesh.ny).map(|j| k1(0.0, mesh.y(j))).collect(),
            k2_left: (0..mesh.ny).map(|j| k2(0.0, mesh.y(j))).collect(),
            psi_boundary: mesh.sample(psi),
        }
    }

    fn validate(&self) -> Result<(), CalapsoError> {
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let sizes = [
            ("k1_bottom", self.k1_bottom.len(), nx),
            ("k2_bottom", self.k2_bottom.len(), nx),
            ("k1_left", self.k1_left.len(), ny),
            ("k2_left", self.k2_left.len(), ny),
            ("psi_boundary", self.psi_boundary.nx(), nx),
            ("psi_boundary", self.psi_boundary.ny(), ny),
        ];
        for (name, got, want) in sizes {
            if got != want {
                return Err(CalapsoError::Shape(format!("{name}: {got} values, grid needs {want}")));
            }
        }
        for (name, a, b) in [
            ("k1", self.k1_bottom[0], self.k1_left[0]),
            ("k2", self.k2_bottom[0], self.k2_left[0]),
        ] {
            if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                return Err(CalapsoError::InconsistentCorner { what: name.into(), a, b });
            }
        }
        Ok(())
    }
}

/// Stopping rule for the Goursat fixed-point iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoursatOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GoursatOptions {
    fn default() -> Self {
        GoursatOptions {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Solves the vector Calapso system from characteristic data by alternating
/// a marching solve of `k_xy = psi k` and a Dirichlet Poisson solve of
/// `psi_xx + psi_yy = -2 ||k||_xy` until the iterates settle.
pub fn solve_goursat(data: &GoursatData, opts: GoursatOptions) -> Result<CalapsoField, CalapsoError> {
    data.validate()?;
    let mesh = data.mesh;
    let poisson = Poisson::new(mesh);
    let zero = Grid::filled(mesh.nx, mesh.ny, 0.0);
    let mut psi = poisson.solve(&zero, &data.psi_boundary);
    let mut k1 = march(&mesh, &data.k1_bottom, &data.k1_left, &psi);
    let mut k2 = march(&mesh, &data.k2_bottom, &data.k2_left, &psi);
    let mut history = Vec::new();
    for _ in 0..opts.max_iter {
        let norm = Grid::from_fn(mesh.nx, mesh.ny, |i, j| k1.get(i, j).powi(2) - k2.get(i, j).powi(2));
        let rhs = Grid::from_fn(mesh.nx, mesh.ny, |i, j| {
            if i == 0 || j == 0 || i + 1 == mesh.nx || j + 1 == mesh.ny {
                0.0
            } else {
                -2.0 * mixed(&norm, i, j, mesh.hx(), mesh.hy())
            }
        });
        let psi_next = poisson.solve(&rhs, &data.psi_boundary);
        let k1_next = march(&mesh, &data.k1_bottom, &data.k1_left, &psi_next);
        let k2_next = march(&mesh, &data.k2_bottom, &data.k2_left, &psi_next);
        let change = psi_next
            .max_abs_diff(&psi)
            .max(k1_next.max_abs_diff(&k1))
            .max(k2_next.max_abs_diff(&k2));
        history.push(change);
        psi = psi_next;
        k1 = k1_next;
        k2 = k2_next;
        if !change.is_finite() {
            break;
        }
        if change < opts.tol {
            let tolerance = 1.0;
            return Ok(CalapsoField::from_grids(mesh, k1, k2, psi, tolerance));
        }
    }
    Err(CalapsoError::NonConvergence {
        iterations: history.len(),
        history,
    })
}

/// Trapezoidal double integration of `k_xy = psi k` from the axes, solved
/// cell by cell for the new corner.
fn march(mesh: &Mesh, bottom: &[f64], left: &[f64], psi: &Grid<f64>) -> Grid<f64> {
    let (nx, ny) = (mesh.nx, mesh.ny);
    let area = mesh.hx() * mesh.hy() / 4.0;
    let mut k = Grid::filled(nx, ny, 0.0);
    for (i, v) in bottom.iter().enumerate() {
        k.set(i, 0, *v);
    }
    for (j, v) in left.iter().enumerate() {
        k.set(0, j, *v);
    }
    for j in 1..ny {
        for i in 1..nx {
            let f = |a: usize, b: usize| psi.get(a, b) * k.get(a, b);
            let known = k.get(i - 1, j) + k.get(i, j - 1) - k.get(i - 1, j - 1)
                + area * (f(i - 1, j) + f(i, j - 1) + f(i - 1, j - 1));
            let v = known / (1.0 - area * psi.get(i, j));
            k.set(i, j, v);
        }
    }
    k
}

/// Five-point Dirichlet Laplacian on the interior nodes, factored once by
/// banded Cholesky of its negative.
struct Poisson {
    mesh: Mesh,
    band: usize,
    n: usize,
    /// Row `r` holds `L[r][r - band ..= r]`.
    factor: Vec<Vec<f64>>,
}

impl Poisson {
    fn new(mesh: Mesh) -> Self {
        let (mx, my) = (mesh.nx.saturating_sub(2), mesh.ny.saturating_sub(2));
        let n = mx * my;
        let band = mx;
        let (ax, ay) = (1.0 / mesh.hx().powi(2), 1.0 / mesh.hy().powi(2));
        // Lower triangle of the negative Laplacian in row-major interior order.
        let entry = |r: usize, c: usize| -> f64 {
            if r == c {
                2.0 * (ax + ay)
            } else if r == c + 1 && !r.is_multiple_of(mx) {
                -ax
            } else if r == c + mx {
                -ay
            } else {
                0.0
            }
        };
        let mut factor = vec![vec![0.0; band + 1]; n];
        for r in 0..n {
            let lo = r.saturating_sub(band);
            for c in lo..=r {
                let mut s = entry(r, c);
                for k in lo..c {
                    s -= factor[r][k + band - r] * factor[c][k + band - c];
                }
                if c == r {
                    factor[r][band] = s.sqrt();
                } else {
                    factor[r][c + band - r] = s / factor[c][band];
                }
            }
        }
        Poisson { mesh, band, n, factor }
    }

    /// `psi` with the boundary of `boundary` and `psi_xx + psi_yy = rhs`
    /// inside.
    fn solve(&self, rhs: &Grid<f64>, boundary: &Grid<f64>) -> Grid<f64> {
        let (nx, ny) = (self.mesh.nx, self.mesh.ny);
        let mx = nx.saturating_sub(2);
        let (ax, ay) = (1.0 / self.mesh.hx().powi(2), 1.0 / self.mesh.hy().powi(2));
        let mut out = Grid::from_fn(nx, ny, |i, j| {
            if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                *boundary.get(i, j)
            } else {
                0.0
            }
        });
        if self.n == 0 {
            return out;
        }
        let mut b = vec![0.0; self.n];
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let mut v = -rhs.get(i, j);
                if i == 1 {
                    v += ax * out.get(0, j);
                }
                if i + 2 == nx {
                    v += ax * out.get(nx - 1, j);
                }
                if j == 1 {
                    v += ay * out.get(i, 0);
                }
                if j + 2 == ny {
                    v += ay * out.get(i, ny - 1);
                }
                b[(j - 1) * mx + (i - 1)] = v;
            }
        }
        let band = self.band;
        for r in 0..self.n {
            let mut s = b[r];
            for k in r.saturating_sub(band)..r {
                s -= self.factor[r][k + band - r] * b[k];
            }
            b[r] = s / self.factor[r][band];
        }
        for r in (0..self.n).rev() {
            let mut s = b[r];
            for k in r + 1..(r + band + 1).min(self.n) {
                s -= self.factor[k][r + band - k] * b[k];
            }
            b[r] = s / self.factor[r][band];
        }
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                out.set(i, j, b[(j - 1) * mx + (i - 1)]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivatives() {
        let p = Profile::Polynomial {
            coefficients: vec![1.0, 2.0, 3.0],
        };
        assert_eq!(p.eval(2.0), (17.0, 14.0, 6.0));
        let s = Profile::Sine {
            amplitude: 2.0,
            frequency: 3.0,
            phase: 0.0,
        };
        assert!((s.eval(0.0).1 - 6.0).abs() < 1e-15);
    }

    #[test]
    fn linear_seed_has_zero_residuals() {
        let f = seed_exact(&Profile::default(), 1.0, Mesh::unit(33));
        assert!(f.residuals.max() <= 1e-12, "{:?}", f.residuals);
        // u = -2 x^2
        assert!((f.u.get(32, 7) + 2.0).abs() < 1e-14);
        assert!(f.within_tolerance());
    }

    #[test]
    fn degenerate_seed_is_zero() {
        let f = seed_exact(&Profile::Polynomial { coefficients: vec![] }, 0.0, Mesh::unit(9));
        assert_eq!(f.u.max_abs(), 0.0);
        assert_eq!(f.k1.max_abs(), 0.0);
    }

    #[test]
    fn upsilon_is_closed_to_second_order() {
        let sine = Profile::Sine {
            amplitude: 1.0,
            frequency: 2.0,
            phase: 0.3,
        };
        let coarse = seed_exact(&sine, 0.5, Mesh::unit(17)).upsilon_closedness(1);
        let fine = seed_exact(&sine, 0.5, Mesh::unit(33)).upsilon_closedness(1);
        // Functions of x alone: the cross difference cancels exactly.
        assert!(coarse < 1e-10 && fine < 1e-10);
        // A genuinely coupled solution: the discrete solve is second-order
        // accurate, so the cross difference shrinks like h^2.
        let solve = |n: usize| {
            let data = GoursatData::sample(
                Mesh::unit(n),
                |x, y| 1.0 + 0.5 * x + 0.3 * y,
                |x, y| 0.2 + 0.4 * x * x - 0.1 * y,
                |x, y| 0.3 * x * y,
            );
            solve_goursat(&data, GoursatOptions::default()).unwrap()
        };
        let (g, g2) = (solve(17), solve(33));
        let (c, d) = (g.upsilon_closedness(4), g2.upsilon_closedness(8));
        assert!(c > 0.0 && c / d > 3.5, "{c} {d}");
        let (lc, ld) = (g.u_loop_residual(), g2.u_loop_residual());
        assert!(lc / ld > 3.0, "{lc} {ld}");
    }

    #[test]
    fn poisson_is_exact_on_quadratics() {
        let mesh = Mesh::new(9, 7, 1.0, 0.5);
        let exact = mesh.sample(|x, y| x * x + 2.0 * y * y - x * y);
        let rhs = Grid::filled(9, 7, 6.0);
        let got = Poisson::new(mesh).solve(&rhs, &exact);
        assert!(got.max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn goursat_zero_data_converges_at_once() {
        let mesh = Mesh::unit(9);
        let data = GoursatData::sample(mesh, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0);
        let f = solve_goursat(&data, GoursatOptions::default()).unwrap();
        assert_eq!(f.k1.max_abs() + f.psi.max_abs(), 0.0);
    }

    #[test]
    fn goursat_reproduces_linear_seed() {
        let seed = seed_exact(&Profile::default(), 1.0, Mesh::unit(33));
        let f = solve_goursat(&GoursatData::from_field(&seed), GoursatOptions::default()).unwrap();
        assert!(f.k1.max_abs_diff(&seed.k1) < 1e-12);
        assert!(f.u.max_abs_diff(&seed.u) < 1e-3);
    }

    #[test]
    fn goursat_rejects_bad_corner() {
        let mesh = Mesh::unit(5);
        let mut data = GoursatData::sample(mesh, |x, _| x, |_, _| 1.0, |_, _| 0.0);
        data.k1_left[0] = 3.0;
        assert!(matches!(
            solve_goursat(&data, GoursatOptions::default()),
            Err(CalapsoError::InconsistentCorner { .. })
        ));
    }

    #[test]
    fn goursat_reports_non_convergence() {
        let mesh = Mesh::unit(9);
        let data = GoursatData::sample(mesh, |x, y| 1.0 + x + y, |_, _| 0.0, |x, _| x);
        let opts = GoursatOptions { tol: 1e-30, max_iter: 3 };
        match solve_goursat(&data, opts) {
            Err(CalapsoError::NonConvergence { iterations, history }) => {
                assert_eq!(iterations, 3);
                assert_eq!(history.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }
}
