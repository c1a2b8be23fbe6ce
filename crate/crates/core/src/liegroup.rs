//! The identity component of O(4,2): its metric, the Maurer–Cartan coframe
//! and structure equations, isotropy subgroups, semibasic forms, and numeric
//! frame utilities.

use nalgebra::{Matrix2, Matrix4, Matrix6};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::rational::rat;
use crate::exterior::{Coframe, Error, ExteriorForm, FrameTag, Rational};
use crate::grid::{derivative, Dir, Grid};
use crate::linalg::RatMatrix;

/// Matrix size of the group.
pub const DIM: usize = 6;

/// The independent Maurer–Cartan entries `(row, column)`, in slot order.
pub const SLOTS: [(usize, usize); 15] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 0),
    (2, 0),
    (3, 0),
    (4, 0),
    (2, 1),
    (3, 1),
    (4, 1),
    (3, 2),
    (4, 2),
    (4, 3),
];

// Entry [I][J] of the Maurer–Cartan matrix as a signed slot label.
const PATTERN: [[&str; 6]; 6] = [
    ["00", "01", "02", "03", "04", "0"],
    ["10", "0", "-21", "-31", "41", "01"],
    ["20", "21", "0", "-32", "42", "02"],
    ["30", "31", "32", "0", "43", "03"],
    ["40", "41", "42", "43", "0", "-04"],
    ["0", "10", "20", "30", "-40", "-00"],
];

/// The bilinear form of signature (4,2) on R^6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    g: [[i64; 6]; 6],
}

impl Metric {
    pub fn standard() -> Self {
        let mut g = [[0; 6]; 6];
        g[0][5] = -1;
        g[5][0] = -1;
        g[1][1] = 1;
        g[2][2] = 1;
        g[3][3] = 1;
        g[4][4] = -1;
        Metric { g }
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.g[i][j]
    }

    pub fn to_f64(&self) -> Matrix6<f64> {
        Matrix6::from_fn(|i, j| self.g[i][j] as f64)
    }

    /// Numbers of positive and negative eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        let e = self.to_f64().symmetric_eigen().eigenvalues;
        (e.iter().filter(|&&v| v > 0.0).count(), e.iter().filter(|&&v| v < 0.0).count())
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                if self.g[i][j] != 0 {
                    s += self.g[i][j] as f64 * a[i] * b[j];
                }
            }
        }
        s
    }
}

/// Realisation of each matrix entry by a signed independent slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMap {
    entries: [[Option<(usize, i64)>; 6]; 6],
}

impl IndexMap {
    pub fn standard() -> Self {
        let mut entries = [[None; 6]; 6];
        for (i, row) in PATTERN.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if *cell == "0" {
                    continue;
                }
                let (sign, label) = match cell.strip_prefix('-') {
                    Some(rest) => (-1, rest),
                    None => (1, *cell),
                };
                let b = label.as_bytes();
                let ij = ((b[0] - b'0') as usize, (b[1] - b'0') as usize);
                let slot = SLOTS.iter().position(|&s| s == ij).expect("pattern label is a slot");
                entries[i][j] = Some((slot, sign));
            }
        }
        IndexMap { entries }
    }

    /// `(slot, sign)` of entry `[i][j]`, or `None` for a structural zero.
    pub fn get(&self, i: usize, j: usize) -> Option<(usize, i64)> {
        self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Option<(usize, i64)>) {
        self.entries[i][j] = v;
    }

    /// Entry `[i][j]` as a vector of slot coefficients.
    pub fn coefficients(&self, i: usize, j: usize) -> [i64; 15] {
        let mut c = [0; 15];
        if let Some((s, sign)) = self.entries[i][j] {
            c[s] = sign;
        }
        c
    }

    /// Index pairs `(I, J)` for which the symmetry identity
    /// `w^K_I g_KJ + w^K_J g_KI = 0` fails formally, with the residual.
    pub fn symmetry_failures(&self, g: &Metric) -> Vec<((usize, usize), [i64; 15])> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in i..DIM {
                let mut r = [0i64; 15];
                for k in 0..DIM {
                    let a = self.coefficients(k, i);
                    let b = self.coefficients(k, j);
                    for s in 0..15 {
                        r[s] += a[s] * g.entry(k, j) + b[s] * g.entry(k, i);
                    }
                }
                if r.iter().any(|&x| x != 0) {
                    out.push(((i, j), r));
                }
            }
        }
        out
    }

    /// The Lie algebra element with slot coordinates `x`.
    pub fn algebra_element(&self, x: &[f64]) -> Matrix6<f64> {
        Matrix6::from_fn(|i, j| self.entries[i][j].map_or(0.0, |(s, sign)| sign as f64 * x[s]))
    }

    /// Slot coordinates of a Lie algebra element.
    pub fn coordinates(&self, b: &Matrix6<f64>) -> [f64; 15] {
        let mut x = [0.0; 15];
        for (s, &(i, j)) in SLOTS.iter().enumerate() {
            x[s] = b[(i, j)];
        }
        x
    }
}

fn slot_name(prefix: &str, s: usize) -> String {
    let (i, j) = SLOTS[s];
    format!("{prefix}{i}{j}")
}

/// Entry `[i][j]` as a 1-form, with slot `s` living at basis index `offset + s`.
fn entry_form(map: &IndexMap, tag: FrameTag, offset: usize, i: usize, j: usize) -> ExteriorForm {
    match map.get(i, j) {
        None => ExteriorForm::zero(tag, 1),
        Some((s, sign)) => ExteriorForm::basis(tag, offset + s).scale_rat(&rat(sign)),
    }
}

/// `-sum_K w^I_K ∧ w^K_J` for the copy of the group at `offset`.
fn structure_d(map: &IndexMap, tag: FrameTag, offset: usize, i: usize, j: usize) -> Result<ExteriorForm, Error> {
    let mut acc = ExteriorForm::zero(tag, 2);
    for k in 0..DIM {
        let a = entry_form(map, tag, offset, i, k);
        let b = entry_form(map, tag, offset, k, j);
        acc = acc.sub(&a.wedge(&b)?)?;
    }
    Ok(acc)
}

fn build_coframe(map: &IndexMap, prefixes: &[&str]) -> Result<Coframe, Error> {
    let names: Vec<String> = prefixes
        .iter()
        .flat_map(|p| (0..15).map(move |s| slot_name(p, s)))
        .collect();
    let mut b = Coframe::builder(&names)?;
    let tag = b.tag();
    for (copy, p) in prefixes.iter().enumerate() {
        for (s, &(i, j)) in SLOTS.iter().enumerate() {
            b.set_d(&slot_name(p, s), structure_d(map, tag, 15 * copy, i, j)?)?;
        }
    }
    Ok(b.build())
}

/// Maurer–Cartan coframe of the group; basis forms are named `wIJ`.
#[derive(Clone, Debug)]
pub struct McCoframe {
    map: IndexMap,
    coframe: Coframe,
}

impl McCoframe {
    pub fn with_map(map: IndexMap) -> Result<Self, Error> {
        let coframe = build_coframe(&map, &["w"])?;
        Ok(McCoframe { map, coframe })
    }

    pub fn map(&self) -> &IndexMap {
        &self.map
    }

    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    /// Matrix entry `[i][j]` as a 1-form.
    pub fn entry(&self, i: usize, j: usize) -> ExteriorForm {
        entry_form(&self.map, self.coframe.tag(), 0, i, j)
    }

    /// `-sum_K w^I_K ∧ w^K_J`, computed independently of the structure table.
    pub fn structure_rhs(&self, i: usize, j: usize) -> Result<ExteriorForm, Error> {
        structure_d(&self.map, self.coframe.tag(), 0, i, j)
    }
}

pub fn build_mc_coframe() -> McCoframe {
    McCoframe::with_map(IndexMap::standard()).expect("standard pattern is well formed")
}

/// Maurer–Cartan coframe of the product group: `aIJ` on the first factor and
/// `bIJ` on the second.
#[derive(Clone, Debug)]
pub struct ProductCoframe {
    map: IndexMap,
    coframe: Coframe,
}

impl ProductCoframe {
    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    pub fn alpha(&self, i: usize, j: usize) -> ExteriorForm {
        entry_form(&self.map, self.coframe.tag(), 0, i, j)
    }

    pub fn beta(&self, i: usize, j: usize) -> ExteriorForm {
        entry_form(&self.map, self.coframe.tag(), 15, i, j)
    }
}

pub fn build_product_coframe() -> ProductCoframe {
    let map = IndexMap::standard();
    let coframe = build_coframe(&map, &["a", "b"]).expect("standard pattern is well formed");
    ProductCoframe { map, coframe }
}

/// Homogeneous spaces whose projections are classified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// The quadric: isotropy of the null line `[e0]`.
    Q,
    /// Degenerate 3-planes: isotropy of `[e0∧e1∧e2]`.
    P,
    /// Configuration space of deformations, a quotient of the product group
    /// by the diagonal copy of the isotropy of `P`.
    D,
}

/// Basis of the isotropy subalgebra fixing the given entries at zero, as
/// slot-coordinate vectors.
fn isotropy_algebra(map: &IndexMap, zero_entries: &[(usize, usize)]) -> Vec<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> = zero_entries
        .iter()
        .filter_map(|&(i, j)| map.get(i, j))
        .map(|(s, _)| {
            let mut r = vec![Rational::zero(); 15];
            r[s] = rat(1);
            r
        })
        .collect();
    if rows.is_empty() {
        return (0..15)
            .map(|s| {
                let mut v = vec![Rational::zero(); 15];
                v[s] = rat(1);
                v
            })
            .collect();
    }
    let m = RatMatrix::from_rows(rows);
    let zeros = vec![Rational::zero(); m.rows()];
    m.solve(&zeros).expect("homogeneous").1
}

/// Semibasic 1-forms of a projection: the annihilator of the vertical
/// (isotropy) directions, returned in reduced echelon form.
#[derive(Clone, Debug)]
pub struct SemibasicForms {
    pub coframe: Coframe,
    pub forms: Vec<ExteriorForm>,
}

impl SemibasicForms {
    pub fn names(&self) -> Vec<String> {
        self.forms.iter().map(|f| self.coframe.render(f)).collect()
    }
}

pub fn semibasic_basis(p: Projection) -> SemibasicForms {
    let map = IndexMap::standard();
    let q_zero: Vec<(usize, usize)> = (1..DIM).map(|i| (i, 0)).collect();
    let p_zero: Vec<(usize, usize)> = [3, 4, 5]
        .iter()
        .flat_map(|&i| [0, 1, 2].into_iter().map(move |j| (i, j)))
        .collect();
    let (coframe, vertical): (Coframe, Vec<Vec<Rational>>) = match p {
        Projection::Q => (build_mc_coframe().coframe, isotropy_algebra(&map, &q_zero)),
        Projection::P => (build_mc_coframe().coframe, isotropy_algebra(&map, &p_zero)),
        Projection::D => {
            let diag = isotropy_algebra(&map, &p_zero)
                .into_iter()
                .map(|v| v.iter().chain(v.iter()).cloned().collect())
                .collect();
            (build_product_coframe().coframe, diag)
        }
    };
    let n = coframe.dim();
    let annihilator = if vertical.is_empty() {
        (0..n)
            .map(|s| (0..n).map(|k| if k == s { rat(1) } else { rat(0) }).collect())
            .collect()
    } else {
        let v = RatMatrix::from_rows(vertical);
        let zeros = vec![Rational::zero(); v.rows()];
        v.solve(&zeros).expect("homogeneous").1
    };
    let (r, piv) = RatMatrix::from_rows(annihilator).rref();
    let tag = coframe.tag();
    let forms = (0..piv.len())
        .map(|row| {
            let mut f = ExteriorForm::zero(tag, 1);
            for k in 0..n {
                let c = r.get(row, k);
                if !c.is_zero() {
                    f = f.add(&ExteriorForm::basis(tag, k).scale_rat(c)).expect("same frame");
                }
            }
            f
        })
        .collect();
    SemibasicForms { coframe, forms }
}

/// Published semibasic bases of the three projections.
pub const PUBLISHED_SEMIBASIC_Q: [&str; 4] = ["w10", "w20", "w30", "w40"];

pub const PUBLISHED_SEMIBASIC_P: [&str; 8] = ["w10", "w20", "w30", "w40", "w31", "w32", "w41", "w42"];

pub const PUBLISHED_SEMIBASIC_D: [&str; 23] = [
    "a00 - b00",
    "a01 - b01",
    "a02 - b02",
    "a03 - b03",
    "a04 - b04",
    "a21 - b21",
    "a43 - b43",
    "a31",
    "a32",
    "a41",
    "a42",
    "b31",
    "b32",
    "b41",
    "b42",
    "a10",
    "a20",
    "a30",
    "a40",
    "b10",
    "b20",
    "b30",
    "b40",
];

impl Projection {
    pub fn published(self) -> &'static [&'static str] {
        match self {
            Projection::Q => &PUBLISHED_SEMIBASIC_Q,
            Projection::P => &PUBLISHED_SEMIBASIC_P,
            Projection::D => &PUBLISHED_SEMIBASIC_D,
        }
    }
}

fn constant_rows(cf: &Coframe, forms: &[ExteriorForm]) -> Result<Vec<Vec<Rational>>, Error> {
    forms
        .iter()
        .map(|f| {
            (0..cf.dim())
                .map(|k| {
                    f.coefficient(&[k])
                        .constant_value()
                        .ok_or_else(|| Error::NotLinear(cf.render(f)))
                })
                .collect()
        })
        .collect()
}

impl SemibasicForms {
    /// Whether `texts` are linearly independent and span the same space.
    pub fn same_span(&self, texts: &[&str]) -> Result<bool, Error> {
        let other: Vec<ExteriorForm> = texts.iter().map(|t| self.coframe.parse(t)).collect::<Result<_, _>>()?;
        let mine = constant_rows(&self.coframe, &self.forms)?;
        let theirs = constant_rows(&self.coframe, &other)?;
        let r1 = RatMatrix::from_rows(mine.clone()).rank();
        let r2 = RatMatrix::from_rows(theirs.clone()).rank();
        let both = RatMatrix::from_rows(mine.into_iter().chain(theirs).collect()).rank();
        Ok(r1 == texts.len() && r2 == texts.len() && both == r1)
    }
}

/// Errors from numeric frame computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("frame at {0} is not invertible")]
    Singular(String),
    #[error("degenerate Gram–Schmidt pivot at column {column} (norm {norm:e})")]
    Degenerate { column: usize, norm: f64 },
    #[error("matrix leaves the group: metric defect {defect:e}, det {det}")]
    NotInGroup { defect: f64, det: f64 },
}

/// `max |B^T g + g B|` for the standard metric.
pub fn algebra_defect(b: &Matrix6<f64>) -> f64 {
    let g = Metric::standard().to_f64();
    (b.transpose() * g + g * b).amax()
}

pub fn lie_algebra_check(b: &Matrix6<f64>, tol: f64) -> bool {
    algebra_defect(b) <= tol
}

/// `max |M^T g M - g|`.
pub fn metric_defect(m: &Matrix6<f64>) -> f64 {
    let g = Metric::standard().to_f64();
    (m.transpose() * g * m - g).amax()
}

/// A 6x6 matrix preserving the metric, with determinant one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement(Matrix6<f64>);

impl GroupElement {
    pub fn new(m: Matrix6<f64>, tol: f64) -> Result<Self, FrameError> {
        let defect = metric_defect(&m);
        let det = m.determinant();
        if defect > tol || (det - 1.0).abs() > tol.max(1e-12) * 10.0 {
            return Err(FrameError::NotInGroup { defect, det });
        }
        Ok(GroupElement(m))
    }

    pub fn identity() -> Self {
        GroupElement(Matrix6::identity())
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(b: &Matrix6<f64>) -> Matrix6<f64> {
    let norm = b.abs().row_sum().amax();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = b * scale;
    let mut term = Matrix6::identity();
    let mut sum = Matrix6::identity();
    for k in 1..=14 {
        term = term * a / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Restores `M^T g M = g` by Gram–Schmidt in the metric, pivoting in the
/// fixed order (A0+A5, A0-A5, A1, A2, A3, A4) so the result stays close to
/// `M` when `M` is nearly in the group.
pub fn reproject(m: &Matrix6<f64>) -> Result<Matrix6<f64>, FrameError> {
    let g = Metric::standard();
    let r2 = std::f64::consts::SQRT_2;
    let col = |k: usize| -> [f64; 6] { std::array::from_fn(|i| m[(i, k)]) };
    let (a0, a5) = (col(0), col(5));
    let t: [f64; 6] = std::array::from_fn(|i| (a0[i] + a5[i]) / r2);
    let s: [f64; 6] = std::array::from_fn(|i| (a0[i] - a5[i]) / r2);
    let order: [([f64; 6], f64); 6] = [(t, -1.0), (s, 1.0), (col(1), 1.0), (col(2), 1.0), (col(3), 1.0), (col(4), -1.0)];
    let mut basis: Vec<([f64; 6], f64)> = Vec::with_capacity(6);
    for (k, (v, expected)) in order.into_iter().enumerate() {
        let mut w = v;
        for (e, ne) in &basis {
            let c = g.inner(&w, e) / ne;
            for i in 0..DIM {
                w[i] -= c * e[i];
            }
        }
        let n = g.inner(&w, &w);
        if n * expected <= 1e-12 {
            return Err(FrameError::Degenerate { column: k, norm: n });
        }
        let f = n.abs().sqrt();
        for x in &mut w {
            *x /= f;
        }
        basis.push((w, expected));
    }
    let (t, s) = (basis[0].0, basis[1].0);
    let mut out = Matrix6::zeros();
    for i in 0..DIM {
        out[(i, 0)] = (t[i] + s[i]) / r2;
        out[(i, 5)] = (t[i] - s[i]) / r2;
        for k in 1..5 {
            out[(i, k)] = basis[k + 1].0[i];
        }
    }
    Ok(out)
}

/// Random Lie algebra element with slot coordinates uniform in `[-1, 1]`.
pub fn random_algebra_element<R: Rng>(rng: &mut R) -> Matrix6<f64> {
    let x: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..=1.0)).collect();
    IndexMap::standard().algebra_element(&x)
}

pub fn random_group_element(seed: u64) -> GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = random_algebra_element(&mut rng);
    let m = reproject(&expm(&b)).expect("exponential is close to the group");
    GroupElement::new(m, 1e-9).expect("re-projected exponential is in the group")
}

/// Isotropy subgroups with a block description.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// Stabiliser of the null line `[e0]`.
    KQ,
    /// Stabiliser of the degenerate 3-plane `[e0∧e1∧e2]`.
    HP,
    /// Structure group of second-order frames.
    G2,
}

fn block_is_zero(m: &Matrix6<f64>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, tol: f64) -> bool {
    rows.clone().all(|i| cols.clone().all(|j| m[(i, j)].abs() <= tol))
}

/// Whether `m` lies in the given subgroup of the identity component.
pub fn isotropy_member(m: &Matrix6<f64>, sub: Subgroup, tol: f64) -> bool {
    if GroupElement::new(*m, tol).is_err() {
        return false;
    }
    let r = m[(0, 0)];
    if r <= tol || (m[(5, 5)] - 1.0 / r).abs() > tol {
        return false;
    }
    if !block_is_zero(m, 1..6, 0..1, tol) || !block_is_zero(m, 5..6, 1..5, tol) {
        return false;
    }
    let lorentz = |v: &[f64], w: &[f64]| v[0] * w[0] + v[1] * w[1] + v[2] * w[2] - v[3] * w[3];
    match sub {
        Subgroup::KQ => {
            let b = Matrix4::from_fn(|i, j| m[(i + 1, j + 1)]);
            let y: Vec<f64> = (1..5).map(|i| r * m[(i, 5)]).collect();
            b.determinant() > 0.0 && b[(3, 3)] > 0.0 && (m[(0, 5)] - lorentz(&y, &y) / (2.0 * r)).abs() <= tol
        }
        Subgroup::HP | Subgroup::G2 => {
            if !block_is_zero(m, 1..3, 3..5, tol) || !block_is_zero(m, 3..5, 1..3, tol) {
                return false;
            }
            let a = Matrix2::from_fn(|i, j| m[(i + 1, j + 1)]);
            let b = Matrix2::from_fn(|i, j| m[(i + 3, j + 3)]);
            let i11 = Matrix2::new(1.0, 0.0, 0.0, -1.0);
            let rot = (a.transpose() * a - Matrix2::identity()).amax() <= tol && a.determinant() > 0.0;
            let boost = (b.transpose() * i11 * b - i11).amax() <= tol && b.determinant() > 0.0 && b[(0, 0)] > 0.0;
            if !rot || !boost {
                return false;
            }
            let x = [r * m[(1, 5)], r * m[(2, 5)]];
            let y = [r * m[(3, 5)], r * m[(4, 5)]];
            if sub == Subgroup::G2 {
                y[0].abs() <= tol && y[1].abs() <= tol && block_is_zero(m, 0..1, 3..5, tol) && (m[(0, 5)] - (x[0] * x[0] + x[1] * x[1]) / (2.0 * r)).abs() <= tol
            } else {
                let top = (x[0] * x[0] + x[1] * x[1] + y[0] * y[0] - y[1] * y[1]) / (2.0 * r);
                (m[(0, 5)] - top).abs() <= tol
            }
        }
    }
}

/// The matrix `A(r, x, y, a, b)` of the stabiliser of `[e0∧e1∧e2]`, with
/// `a` a rotation by `theta` and `b` a boost with rapidity `phi`.
pub fn hp_element(r: f64, x: [f64; 2], y: [f64; 2], theta: f64, phi: f64) -> Matrix6<f64> {
    let a = Matrix2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos());
    let b = Matrix2::new(phi.cosh(), phi.sinh(), phi.sinh(), phi.cosh());
    let i11 = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let xv = nalgebra::Vector2::new(x[0], x[1]);
    let yv = nalgebra::Vector2::new(y[0], y[1]);
    let xa = xv.transpose() * a;
    let yb = yv.transpose() * i11 * b;
    let mut m = Matrix6::zeros();
    m[(0, 0)] = r;
    m[(0, 1)] = xa[0];
    m[(0, 2)] = xa[1];
    m[(0, 3)] = yb[0];
    m[(0, 4)] = yb[1];
    m[(0, 5)] = (xv.dot(&xv) + (yv.transpose() * i11 * yv)[0]) / (2.0 * r);
    for i in 0..2 {
        for j in 0..2 {
            m[(1 + i, 1 + j)] = a[(i, j)];
            m[(3 + i, 3 + j)] = b[(i, j)];
        }
        m[(1 + i, 5)] = x[i] / r;
        m[(3 + i, 5)] = y[i] / r;
    }
    m[(5, 5)] = 1.0 / r;
    m
}

/// Pulled-back Maurer–Cartan coefficients `A^{-1} A_x` and `A^{-1} A_y` of a
/// frame grid, with finite differences of formal order `accuracy`.
pub fn numeric_mc(
    frames: &Grid<Matrix6<f64>>,
    hx: f64,
    hy: f64,
    accuracy: usize,
) -> Result<(Grid<Matrix6<f64>>, Grid<Matrix6<f64>>), FrameError> {
    let dx = derivative(frames, Dir::X, hx, 1, accuracy);
    let dy = derivative(frames, Dir::Y, hy, 1, accuracy);
    let mut inv = Vec::with_capacity(frames.nx() * frames.ny());
    for (i, j, a) in frames.nodes() {
        inv.push(a.try_inverse().ok_or_else(|| FrameError::Singular(format!("({i}, {j})")))?);
    }
    let nx = frames.nx();
    let p = Grid::from_fn(nx, frames.ny(), |i, j| inv[j * nx + i] * dx.get(i, j));
    let q = Grid::from_fn(nx, frames.ny(), |i, j| inv[j * nx + i] * dy.get(i, j));
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_has_signature_four_two() {
        assert_eq!(Metric::standard().signature(), (4, 2));
    }

    #[test]
    fn pattern_entry_one_three_is_minus_w31() {
        let map = IndexMap::standard();
        let (slot, sign) = map.get(1, 3).unwrap();
        assert_eq!(SLOTS[slot], (3, 1));
        assert_eq!(sign, -1);
        assert_eq!(map.get(0, 5), None);
        assert_eq!(map.get(5, 0), None);
    }

    #[test]
    fn symmetry_identities_hold_formally() {
        assert!(IndexMap::standard().symmetry_failures(&Metric::standard()).is_empty());
        let mut bad = IndexMap::standard();
        bad.set(1, 3, bad.get(1, 3).map(|(s, _)| (s, 1)));
        assert!(!bad.symmetry_failures(&Metric::standard()).is_empty());
    }

    #[test]
    fn structure_equations_close() {
        let mc = build_mc_coframe();
        assert_eq!(mc.coframe().dim(), 15);
        mc.coframe().validate().unwrap();
        let pc = build_product_coframe();
        assert_eq!(pc.coframe().dim(), 30);
        pc.coframe().validate().unwrap();
    }

    #[test]
    fn d_w43_by_brute_force() {
        // Expand -w^4_K ∧ w^K_3 term by term from the printed matrix.
        let mc = build_mc_coframe();
        let cf = mc.coframe();
        let expected = cf.parse("-w40∧w03 - w41∧(-w31) - w42∧(-w32) - w43∧0 - 0∧w43 - (-w04)∧w30").unwrap();
        let got = cf.d(&cf.form("w43").unwrap()).unwrap();
        assert_eq!(got, expected);
        assert_eq!(cf.render(&got), "w03∧w40 + w04∧w30 - w31∧w41 - w32∧w42");
    }

    #[test]
    fn dependent_entries_obey_structure_equations() {
        let mc = build_mc_coframe();
        let cf = mc.coframe();
        for i in 0..DIM {
            for j in 0..DIM {
                let lhs = cf.d(&mc.entry(i, j)).unwrap();
                assert_eq!(lhs, mc.structure_rhs(i, j).unwrap(), "entry [{i}][{j}]");
            }
        }
    }

    #[test]
    fn algebra_membership() {
        assert!(lie_algebra_check(&Matrix6::zeros(), 0.0));
        let mut b = Matrix6::zeros();
        b[(1, 0)] = 1.0;
        b[(5, 1)] = 1.0;
        assert!(lie_algebra_check(&b, 0.0));
        assert!(!lie_algebra_check(&Matrix6::identity(), 0.5));
    }

    #[test]
    fn random_elements_are_in_the_group() {
        for seed in 0..20 {
            let a = random_group_element(seed);
            assert!(metric_defect(a.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn reprojection_is_a_fixed_point_on_the_group() {
        let a = random_group_element(3);
        let b = reproject(a.matrix()).unwrap();
        assert!((b - a.matrix()).amax() < 1e-10);
    }

    #[test]
    fn stabiliser_matrices() {
        for sub in [Subgroup::KQ, Subgroup::HP, Subgroup::G2] {
            assert!(isotropy_member(&Matrix6::identity(), sub, 1e-12));
        }
        let m = hp_element(2.0, [0.0, 0.0], [0.0, 0.0], 0.0, 0.0);
        assert!(isotropy_member(&m, Subgroup::HP, 1e-12));
        let mut bad = m;
        bad[(0, 5)] += 0.1;
        assert!(!isotropy_member(&bad, Subgroup::HP, 1e-9));
        let general = hp_element(1.7, [0.3, -0.8], [0.5, 0.2], 0.9, -0.4);
        assert!(metric_defect(&general) < 1e-12);
        assert!(isotropy_member(&general, Subgroup::HP, 1e-9));
        assert!(isotropy_member(&general, Subgroup::KQ, 1e-9));
        assert!(!isotropy_member(&general, Subgroup::G2, 1e-9));
        let g2 = hp_element(0.6, [1.1, 0.4], [0.0, 0.0], -2.0, 1.3);
        assert!(isotropy_member(&g2, Subgroup::G2, 1e-9));
    }

    #[test]
    fn semibasic_forms_of_the_quadric_and_planes() {
        let q = semibasic_basis(Projection::Q);
        assert_eq!(q.names(), ["w10", "w20", "w30", "w40"]);
        let mut p = semibasic_basis(Projection::P).names();
        p.sort();
        assert_eq!(p, ["w10", "w20", "w30", "w31", "w32", "w40", "w41", "w42"]);
    }

    #[test]
    fn semibasic_spans_match_published_lists() {
        for p in [Projection::Q, Projection::P, Projection::D] {
            let sb = semibasic_basis(p);
            assert_eq!(sb.forms.len(), p.published().len(), "{p:?}");
            assert!(sb.same_span(p.published()).unwrap(), "{p:?}");
        }
        assert_eq!(semibasic_basis(Projection::D).forms.len(), 23);
        let sb = semibasic_basis(Projection::P);
        assert!(!sb.same_span(&PUBLISHED_SEMIBASIC_Q).unwrap());
    }

    #[test]
    fn numeric_mc_of_one_parameter_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = random_algebra_element(&mut rng) * 0.5;
        let err = |n: usize, acc: usize| {
            let m = crate::grid::Mesh::unit(n);
            let frames = m.sample(|x, _| expm(&(b * x)));
            let (p, q) = numeric_mc(&frames, m.hx(), m.hy(), acc).unwrap();
            assert!(q.values().iter().all(|v| v.amax() < 1e-12));
            p.values().iter().map(|v| (v - b).amax()).fold(0.0, f64::max)
        };
        let ratio = err(21, 2) / err(41, 2);
        assert!(ratio > 3.5, "second-order ratio {ratio}");
        assert!(err(21, 8) < 1e-9);
    }
}
