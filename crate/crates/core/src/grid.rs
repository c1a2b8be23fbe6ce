//! Rectangular node grids and finite-difference derivatives on them.

use std::ops::{AddAssign, Mul};

/// Values at the nodes `(i, j)` of an `nx x ny` grid; `i` runs along x.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    nx: usize,
    ny: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_fn<F: FnMut(usize, usize) -> T>(nx: usize, ny: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j));
            }
        }
        Grid { nx, ny, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[j * self.nx + i]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.nx + i] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Grid<U> {
        Grid {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Nodes as `(i, j, value)` in row-major order (x fastest).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let nx = self.nx;
        self.data.iter().enumerate().map(move |(k, v)| (k % nx, k / nx, v))
    }
}

impl<T: Clone> Grid<T> {
    pub fn filled(nx: usize, ny: usize, v: T) -> Self {
        Grid {
            nx,
            ny,
            data: vec![v; nx * ny],
        }
    }
}

impl Grid<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Grid<f64>) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Finite-difference weights for derivatives of order `0..=m` at `z` from
/// samples at `xs` (Fornberg's recursion). Row `k` holds the weights for the
/// k-th derivative.
pub fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Stencil (first node, weights) for the `k`-th derivative at node `i` of
/// `n` uniformly spaced nodes with spacing `h`. Interior nodes use a centred
/// stencil of formal order `accuracy`; near the ends the same number of
/// nodes is shifted inwards.
pub fn stencil(i: usize, n: usize, h: f64, k: usize, accuracy: usize) -> (usize, Vec<f64>) {
    // The node itself is the exact stencil for the function value.
    let width = if k == 0 { 1 } else { (2 * k.div_ceil(2) - 1 + accuracy).min(n) };
    let half = width / 2;
    let start = i.saturating_sub(half).min(n - width);
    let xs: Vec<f64> = (start..start + width).map(|p| (p as f64 - i as f64) * h).collect();
    let w = fd_weights(0.0, &xs, k);
    (start, w[k].clone())
}

/// Which grid direction a derivative is taken along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    X,
    Y,
}

/// `k`-th partial derivative along `dir` with formal order `accuracy`.
pub fn derivative<T>(g: &Grid<T>, dir: Dir, h: f64, k: usize, accuracy: usize) -> Grid<T>
where
    T: Clone + AddAssign + Mul<f64, Output = T>,
{
    Grid::from_fn(g.nx(), g.ny(), |i, j| {
        let (n, pos) = match dir {
            Dir::X => (g.nx(), i),
            Dir::Y => (g.ny(), j),
        };
        let (start, w) = stencil(pos, n, h, k, accuracy);
        let at = |p: usize| match dir {
            Dir::X => g.get(p, j),
            Dir::Y => g.get(i, p),
        };
        let mut acc = at(start).clone() * w[0];
        for (q, wq) in w.iter().enumerate().skip(1) {
            acc += at(start + q).clone() * *wq;
        }
        acc
    })
}

/// Node coordinates of a uniform grid on `[0, lx] x [0, ly]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Mesh {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Mesh {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        assert!(nx >= 2 && ny >= 2, "grid needs at least two nodes per side");
        Mesh { nx, ny, lx, ly }
    }

    pub fn unit(n: usize) -> Self {
        Mesh::new(n, n, 1.0, 1.0)
    }

    pub fn hx(&self) -> f64 {
        self.lx / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.hy()
    }

    pub fn sample<T, F: FnMut(f64, f64) -> T>(&self, mut f: F) -> Grid<T> {
        Grid::from_fn(self.nx, self.ny, |i, j| f(self.x(i), self.y(j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_stencil_is_the_node() {
        for accuracy in [2, 4, 8] {
            assert_eq!(stencil(0, 9, 0.1, 0, accuracy), (0, vec![1.0]));
            assert_eq!(stencil(5, 9, 0.1, 0, accuracy), (5, vec![1.0]));
        }
    }

    #[test]
    fn classic_central_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn derivatives_of_cubic_are_exact_at_matching_order() {
        let m = Mesh::new(9, 5, 2.0, 1.0);
        let g = m.sample(|x, y| x * x * x + y);
        let d = derivative(&g, Dir::X, m.hx(), 1, 4);
        for (i, j, v) in d.nodes() {
            let x = m.x(i);
            assert!((v - 3.0 * x * x).abs() < 1e-10, "{i},{j}");
        }
        let d2 = derivative(&g, Dir::X, m.hx(), 2, 2);
        assert!((d2.get(4, 0) - 6.0 * m.x(4)).abs() < 1e-9);
    }
}
