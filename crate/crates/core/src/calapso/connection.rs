//! The flat connection form built from a Calapso solution, numerically on
//! a grid and symbolically over jet variables.

use std::collections::BTreeMap;

use nalgebra::Matrix6;
use serde::Serialize;

use super::field::CalapsoField;
use crate::exterior::text::parse_poly;
use crate::exterior::{Coframe, Error, ExteriorForm, JetSpace, Poly, RewriteRules, Var};
use crate::grid::{Grid, Mesh};

/// The 1-forms that appear as entries of the connection matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Entry {
    Dx,
    Dy,
    K1Dx,
    K1Dy,
    K2Dx,
    K2Dy,
    Chi1,
    Chi2,
    Tau1,
    Tau2,
}

/// Pointwise values of the jets the connection form depends on.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub k1: f64,
    pub k2: f64,
    pub k1x: f64,
    pub k1y: f64,
    pub k2x: f64,
    pub k2y: f64,
    pub psi: f64,
    /// `u` already shifted by the spectral parameter.
    pub u: f64,
}

impl Entry {
    /// `(dx, dy)` coefficients at a point.
    pub fn coefficients(self, j: &Jet) -> (f64, f64) {
        let norm = j.k1 * j.k1 - j.k2 * j.k2;
        match self {
            Entry::Dx => (1.0, 0.0),
            Entry::Dy => (0.0, 1.0),
            Entry::K1Dx => (j.k1, 0.0),
            Entry::K1Dy => (0.0, j.k1),
            Entry::K2Dx => (j.k2, 0.0),
            Entry::K2Dy => (0.0, j.k2),
            Entry::Chi1 => (0.5 * (j.u - norm), j.psi),
            Entry::Chi2 => (j.psi, -0.5 * (j.u + norm)),
            Entry::Tau1 => (j.k1x, -j.k1y),
            Entry::Tau2 => (-j.k2x, j.k2y),
        }
    }

    /// The same coefficients as jet polynomials.
    fn symbolic(self) -> (&'static str, &'static str) {
        match self {
            Entry::Dx => ("1", "0"),
            Entry::Dy => ("0", "1"),
            Entry::K1Dx => ("k1", "0"),
            Entry::K1Dy => ("0", "k1"),
            Entry::K2Dx => ("k2", "0"),
            Entry::K2Dy => ("0", "k2"),
            Entry::Chi1 => ("1/2*u - 1/2*k1^2 + 1/2*k2^2", "psi"),
            Entry::Chi2 => ("psi", "-1/2*u - 1/2*k1^2 + 1/2*k2^2"),
            Entry::Tau1 => ("k1_x", "-k1_y"),
            Entry::Tau2 => ("-k2_x", "k2_y"),
        }
    }
}

/// A 6x6 arrangement of signed entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pattern {
    pub name: String,
    pub cells: [[Option<(Entry, i8)>; 6]; 6],
}

impl Pattern {
    fn from_rows(name: &str, rows: [[&str; 6]; 6]) -> Self {
        let cell = |s: &str| -> Option<(Entry, i8)> {
            let (sign, body) = match s.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, s),
            };
            let e = match body {
                "0" => return None,
                "dx" => Entry::Dx,
                "dy" => Entry::Dy,
                "k1dx" => Entry::K1Dx,
                "k1dy" => Entry::K1Dy,
                "k2dx" => Entry::K2Dx,
                "k2dy" => Entry::K2Dy,
                "chi1" => Entry::Chi1,
                "chi2" => Entry::Chi2,
                "tau1" => Entry::Tau1,
                "tau2" => Entry::Tau2,
                other => unreachable!("pattern cell {other}"),
            };
            Some((e, sign))
        };
        Pattern {
            name: name.into(),
            cells: rows.map(|r| r.map(cell)),
        }
    }

    /// Entries placed consistently with the structure equations: the
    /// second fundamental form is diagonal with `k1 dx, -k1 dy` and
    /// `k2 dx, -k2 dy`, and the upper rows are the metric duals.
    pub fn corrected() -> Self {
        Pattern::from_rows(
            "corrected",
            [
                ["0", "chi1", "chi2", "tau1", "tau2", "0"],
                ["dx", "0", "0", "-k1dx", "k2dx", "chi1"],
                ["dy", "0", "0", "k1dy", "-k2dy", "chi2"],
                ["0", "k1dx", "-k1dy", "0", "0", "tau1"],
                ["0", "k2dx", "-k2dy", "0", "0", "-tau2"],
                ["0", "dx", "dy", "0", "0", "0"],
            ],
        )
    }

    /// The matrix exactly as printed in the source of the construction.
    pub fn printed() -> Self {
        Pattern::from_rows(
            "printed",
            [
                ["0", "chi1", "chi2", "tau1", "tau2", "0"],
                ["dx", "0", "0", "-k1dx", "k2dx", "chi1"],
                ["dy", "0", "0", "k1dx", "-k2dx", "chi2"],
                ["0", "k1dx", "-k1dx", "0", "0", "tau1"],
                ["0", "k2dx", "-k2dy", "0", "0", "tau2"],
                ["0", "dx", "dy", "0", "0", "0"],
            ],
        )
    }

    /// Copy with every occurrence of `e` negated.
    pub fn flip(&self, e: Entry) -> Self {
        let mut out = self.clone();
        out.name = format!("{} with {e:?} negated", self.name);
        for row in out.cells.iter_mut() {
            for c in row.iter_mut().flatten() {
                if c.0 == e {
                    c.1 = -c.1;
                }
            }
        }
        out
    }

    /// `(P, Q)`: the `dx` and `dy` coefficient matrices at a point.
    pub fn evaluate(&self, jet: &Jet) -> (Matrix6<f64>, Matrix6<f64>) {
        let mut p = Matrix6::zeros();
        let mut q = Matrix6::zeros();
        for (r, row) in self.cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Some((e, s)) = cell {
                    let (a, b) = e.coefficients(jet);
                    p[(r, c)] = *s as f64 * a;
                    q[(r, c)] = *s as f64 * b;
                }
            }
        }
        (p, q)
    }
}

/// `dx` and `dy` coefficients of `alpha = A^{-1} dA` at every node.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    pub mesh: Mesh,
    pub p: Grid<Matrix6<f64>>,
    pub q: Grid<Matrix6<f64>>,
    /// Total shift added to `u`.
    pub lambda: f64,
}

impl ConnectionForm {
    /// Largest `|B^T g + g B|` over both coefficient grids.
    pub fn algebra_defect(&self) -> f64 {
        self.p
            .values()
            .iter()
            .chain(self.q.values())
            .map(crate::liegroup::algebra_defect)
            .fold(0.0, f64::max)
    }

    /// The zero connection on a mesh.
    pub fn zero(mesh: Mesh) -> Self {
        let z = Grid::filled(mesh.nx, mesh.ny, Matrix6::zeros());
        ConnectionForm {
            mesh,
            p: z.clone(),
            q: z,
            lambda: 0.0,
        }
    }
}

/// The jets of a field at a node, with `u` shifted by `field.lambda + lambda`.
pub fn jet_at(field: &CalapsoField, lambda: f64, i: usize, j: usize) -> Jet {
    Jet {
        k1: *field.k1.get(i, j),
        k2: *field.k2.get(i, j),
        k1x: *field.k1x.get(i, j),
        k1y: *field.k1y.get(i, j),
        k2x: *field.k2x.get(i, j),
        k2y: *field.k2y.get(i, j),
        psi: *field.psi.get(i, j),
        u: field.u.get(i, j) + field.lambda + lambda,
    }
}

/// The corrected connection form of `field` with `u` replaced by `u + lambda`.
pub fn connection_form(field: &CalapsoField, lambda: f64) -> ConnectionForm {
    connection_form_with(field, lambda, &Pattern::corrected())
}

pub fn connection_form_with(field: &CalapsoField, lambda: f64, pattern: &Pattern) -> ConnectionForm {
    let pq = Grid::from_fn(field.nx(), field.ny(), |i, j| pattern.evaluate(&jet_at(field, lambda, i, j)));
    ConnectionForm {
        mesh: field.mesh,
        p: pq.map(|m| m.0),
        q: pq.map(|m| m.1),
        lambda: field.lambda + lambda,
    }
}

/// One nonzero entry of the curvature `d alpha + alpha ∧ alpha`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryResidue {
    pub row: usize,
    pub col: usize,
    /// Coefficient of `dx∧dy` after rewriting.
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub pattern: String,
    pub flat: bool,
    pub residues: Vec<EntryResidue>,
}

/// The compatibility conditions of the Calapso system as rewrite rules on
/// jet variables: `(k_i)_xy`, `u_x`, `u_y` and `psi_yy` are eliminated.
pub fn calapso_rules() -> RewriteRules {
    let rules = [
        ("k1_xy", "psi*k1"),
        ("k2_xy", "psi*k2"),
        ("u_x", "-2*psi_y - 4*k1*k1_x + 4*k2*k2_x"),
        ("u_y", "2*psi_x + 4*k1*k1_y - 4*k2*k2_y"),
        ("psi_yy", "-psi_xx - 4*k1_x*k1_y - 4*k1*k1_xy + 4*k2_x*k2_y + 4*k2*k2_xy"),
    ];
    let map: BTreeMap<Var, Poly> = rules
        .iter()
        .map(|(v, p)| (Var::new(v), parse_poly(p).expect("static rule")))
        .collect();
    RewriteRules::new(map).expect("rules are acyclic")
}

/// The coordinate coframe `dx, dy` with jet calculus for `k1, k2, psi, u`.
pub fn jet_coframe() -> Coframe {
    let mut b = Coframe::builder(&["dx", "dy"]).expect("distinct names");
    b.jets(JetSpace::new(vec![('x', 0), ('y', 1)], &["k1", "k2", "psi", "u"]));
    b.build()
}

/// The connection matrix of `pattern` as 1-forms on [`jet_coframe`].
pub fn symbolic_alpha(cf: &Coframe, pattern: &Pattern) -> Result<Vec<Vec<ExteriorForm>>, Error> {
    let (dx, dy) = (cf.basis(0), cf.basis(1));
    let mut out = vec![vec![ExteriorForm::zero(cf.tag(), 1); 6]; 6];
    for (r, row) in pattern.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if let Some((e, s)) = cell {
                let (a, b) = e.symbolic();
                let form = dx.scale(&parse_poly(a)?).add(&dy.scale(&parse_poly(b)?))?;
                out[r][c] = if *s < 0 { form.neg() } else { form };
            }
        }
    }
    Ok(out)
}

/// Reduces `d alpha + alpha ∧ alpha` to normal form under
/// [`calapso_rules`] and lists the entries that do not vanish.
pub fn symbolic_flatness(pattern: &Pattern) -> Result<FlatnessReport, Error> {
    let cf = jet_coframe();
    let rules = calapso_rules();
    let alpha = symbolic_alpha(&cf, pattern)?;
    let mut residues = Vec::new();
    for r in 0..6 {
        for c in 0..6 {
            let mut curv = cf.d(&alpha[r][c])?;
            for (k, row_k) in alpha.iter().enumerate() {
                curv = curv.add(&alpha[r][k].wedge(&row_k[c])?)?;
            }
            let reduced = curv.substitute(&rules);
            if !reduced.is_zero() {
                residues.push(EntryResidue {
                    row: r,
                    col: c,
                    residue: reduced.coefficient(&[0, 1]).to_string(),
                });
            }
        }
    }
    Ok(FlatnessReport {
        pattern: pattern.name.clone(),
        flat: residues.is_empty(),
        residues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calapso::field::{seed_exact, Profile};

    #[test]
    fn corrected_pattern_is_flat() {
        let rep = symbolic_flatness(&Pattern::corrected()).unwrap();
        assert!(rep.flat, "{:?}", rep.residues);
    }

    #[test]
    fn flipping_tau1_breaks_flatness() {
        let rep = symbolic_flatness(&Pattern::corrected().flip(Entry::Tau1)).unwrap();
        assert!(!rep.flat);
        assert!(rep.residues.iter().any(|e| (e.row, e.col) == (3, 1)));
    }

    #[test]
    fn printed_pattern_leaves_a_residue() {
        let rep = symbolic_flatness(&Pattern::printed()).unwrap();
        assert!(!rep.flat);
    }

    #[test]
    fn entry_three_one_cancels_alone() {
        // d(k1 dx) + tau1-type terms: the dy∧dx part of d(k1 dx) is cancelled
        // by alpha^3_0 ∧ alpha^0_1 + alpha^3_5 ∧ alpha^5_1 = tau1 ∧ dx.
        let cf = jet_coframe();
        let alpha = symbolic_alpha(&cf, &Pattern::corrected()).unwrap();
        let mut curv = cf.d(&alpha[3][1]).unwrap();
        for k in 0..6 {
            curv = curv.add(&alpha[3][k].wedge(&alpha[k][1]).unwrap()).unwrap();
        }
        assert!(curv.substitute(&calapso_rules()).is_zero());
    }

    #[test]
    fn seed_connection_values() {
        let f = seed_exact(&Profile::default(), 1.0, Mesh::unit(9));
        let cf = connection_form(&f, 0.0);
        assert_eq!(cf.p.get(3, 3)[(5, 1)], 1.0);
        assert!(cf.algebra_defect() < 1e-12);
        // chi1 dx-coefficient is (u + lambda - ||k||) / 2.
        let shifted = connection_form(&f, 1.0);
        let (i, j) = (6, 2);
        let x = f.mesh.x(i);
        let expected = 0.5 * (-2.0 * x * x + 1.0 - (x * x - 1.0));
        assert!((shifted.p.get(i, j)[(0, 1)] - expected).abs() < 1e-14);
    }

    #[test]
    fn printed_pattern_is_not_in_the_algebra() {
        let jet = Jet {
            k2x: 1.0,
            ..Jet::default()
        };
        let (p, _) = Pattern::printed().evaluate(&jet);
        assert!(crate::liegroup::algebra_defect(&p) > 0.5);
        let (p, _) = Pattern::corrected().evaluate(&jet);
        assert_eq!(crate::liegroup::algebra_defect(&p), 0.0);
    }
}
