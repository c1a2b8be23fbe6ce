//! Exact linear algebra over the rationals and over polynomial entries.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::exterior::{Error, Poly, Rational, Var};

/// Dense matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = RatMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = Rational::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let x = m.get(r, j) * &inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let x = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &piv;
                for j in c..n {
                    let x = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, x);
                }
            }
        }
        det
    }

    /// Solves `self * x = b`. Returns a particular solution (free variables
    /// zero) and a basis of the null space, or `None` when inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
        assert_eq!(b.len(), self.rows);
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (k, &c) in piv.iter().enumerate() {
            x[c] = r.get(k, self.cols).clone();
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let null = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (k, &c) in piv.iter().enumerate() {
                    v[c] = -r.get(k, f).clone();
                }
                v
            })
            .collect();
        Some((x, null))
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }
}

/// Matrix with polynomial entries.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = PolyMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Poly) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut s = std::collections::BTreeSet::new();
        for p in &self.data {
            s.extend(p.vars());
        }
        s.into_iter().collect()
    }

    pub fn map<F: Fn(&Poly) -> Poly>(&self, f: F) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<RatMatrix, Error> {
        let mut m = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).eval(values)?);
            }
        }
        Ok(m)
    }

    /// Determinant of the square minor on `rows` x `cols`, by Laplace
    /// expansion memoised on the set of used columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Poly {
        assert_eq!(rows.len(), cols.len());
        assert!(cols.len() <= 63);
        let mut memo: HashMap<u64, Poly> = HashMap::new();
        self.minor_rec(rows, cols, 0, &mut memo)
    }

    fn minor_rec(&self, rows: &[usize], cols: &[usize], used: u64, memo: &mut HashMap<u64, Poly>) -> Poly {
        let depth = used.count_ones() as usize;
        if depth == rows.len() {
            return Poly::one();
        }
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let mut acc = Poly::zero();
        let mut position = 0;
        for (k, &c) in cols.iter().enumerate() {
            if used & (1 << k) != 0 {
                continue;
            }
            let entry = self.get(rows[depth], c);
            if !entry.is_zero() {
                let sub = self.minor_rec(rows, cols, used | (1 << k), memo);
                if !sub.is_zero() {
                    let t = entry * &sub;
                    if position % 2 == 0 {
                        acc += &t;
                    } else {
                        acc -= &t;
                    }
                }
            }
            position += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
}

/// A square minor and its symbolic determinant.
#[derive(Clone, Debug, Serialize)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub determinant: String,
}

/// Rank over the field of rational functions in the matrix variables.
#[derive(Clone, Debug, Serialize)]
pub struct GenericRank {
    pub rank: usize,
    /// Exact ranks at each random rational specialisation.
    pub sample_ranks: Vec<usize>,
    /// Nonzero symbolic `rank x rank` minor (certifies the lower bound).
    pub witness: Option<Minor>,
    /// `Some(true)` when every `(rank+1)`-minor was expanded and is the zero
    /// polynomial; `None` when there were too many to enumerate.
    pub upper_certified: Option<bool>,
    /// Set when the samples disagreed.
    pub diagnostic: Option<String>,
}

/// Uniform random rational with nonzero numerator in [-30, 30] and
/// denominator in [1, 9].
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let mut n = 0i64;
    while n == 0 {
        n = rng.random_range(-30..=30);
    }
    let d: i64 = rng.random_range(1..=9);
    crate::exterior::rational::ratio(n, d)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Nonsingular `r x r` submatrix position of a rational matrix of rank `r`.
pub fn independent_minor(m: &RatMatrix) -> (Vec<usize>, Vec<usize>) {
    let (_, rows) = m.transpose().rref();
    let sub = m.select(&rows, &(0..m.cols()).collect::<Vec<_>>());
    let (_, cols) = sub.rref();
    (rows, cols)
}

/// Rank of a polynomial matrix over its fraction field.
///
/// The candidate rank is the majority exact rank over `samples` random
/// rational specialisations drawn by `sample`. It is then certified from
/// below by a symbolic nonzero minor and, when the count is at most
/// `max_minors`, from above by expanding every larger minor.
pub fn generic_rank<R, F>(m: &PolyMatrix, samples: usize, rng: &mut R, mut sample: F, max_minors: usize) -> Result<GenericRank, Error>
where
    R: Rng,
    F: FnMut(&mut R) -> BTreeMap<Var, Rational>,
{
    let mut ranks = Vec::with_capacity(samples);
    let mut evals = Vec::with_capacity(samples);
    for _ in 0..samples.max(1) {
        let vals = sample(rng);
        let e = m.eval(&vals)?;
        ranks.push(e.rank());
        evals.push(e);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &ranks {
        *counts.entry(r).or_default() += 1;
    }
    let (&rank, _) = counts.iter().max_by_key(|(r, c)| (**c, **r)).expect("nonempty");
    let diagnostic = (counts.len() > 1).then(|| format!("sample ranks disagree: {counts:?}"));
    let witness = if rank == 0 {
        None
    } else {
        let pos = ranks.iter().position(|&r| r == rank).expect("majority rank observed");
        let (rows, cols) = independent_minor(&evals[pos]);
        let det = m.minor(&rows, &cols);
        if det.is_zero() {
            return Err(Error::Degree("numeric witness minor vanished symbolically".into()));
        }
        Some(Minor {
            rows,
            cols,
            determinant: det.to_string(),
        })
    };
    let k = rank + 1;
    let upper_certified = if k > m.rows() || k > m.cols() {
        Some(true)
    } else {
        let rs = combinations(m.rows(), k);
        let cs = combinations(m.cols(), k);
        if rs.len().saturating_mul(cs.len()) > max_minors {
            None
        } else {
            Some(rs.iter().all(|r| cs.iter().all(|c| m.minor(r, c).is_zero())))
        }
    };
    Ok(GenericRank {
        rank,
        sample_ranks: ranks,
        witness,
        upper_certified,
        diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::rational::rat;
    use crate::exterior::text::parse_poly;

    fn rm(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn rank_and_inverse() {
        let m = rm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert!(m.inverse().is_none());
        let a = rm(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, rm(&[&[1, -1], &[-1, 2]]));
        assert_eq!(a.determinant(), rat(1));
    }

    #[test]
    fn solve_with_null_space() {
        let m = rm(&[&[1, 1, 0], &[0, 0, 1]]);
        let (x, null) = m.solve(&[rat(2), rat(3)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(2), rat(3)]);
        assert_eq!(null.len(), 1);
        assert!(m.mul_vec(&null[0]).iter().all(Zero::is_zero));
        assert!(rm(&[&[1, 1], &[1, 1]]).solve(&[rat(0), rat(1)]).is_none());
    }

    #[test]
    fn symbolic_minor_matches_hand_expansion() {
        let m = PolyMatrix::from_rows(vec![
            vec![parse_poly("a").unwrap(), parse_poly("b").unwrap()],
            vec![parse_poly("c").unwrap(), parse_poly("d").unwrap()],
        ]);
        assert_eq!(m.minor(&[0, 1], &[0, 1]), parse_poly("a*d - b*c").unwrap());
    }

    #[test]
    fn generic_rank_of_rank_one_family() {
        use rand::SeedableRng;
        // rank 1 for every value of t, certified by the single 2x2 minor
        let m = PolyMatrix::from_rows(vec![
            vec![parse_poly("t").unwrap(), parse_poly("1").unwrap()],
            vec![parse_poly("t^2").unwrap(), parse_poly("t").unwrap()],
        ]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = generic_rank(
            &m,
            5,
            &mut rng,
            |g| BTreeMap::from([(Var::new("t"), random_rational(g))]),
            100,
        )
        .unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.upper_certified, Some(true));
        assert!(PolyMatrix::zeros(3, 3).is_zero());
    }
}
