//! Pfaffian systems with independence condition: closure, polar equations,
//! integral elements, Cartan characters and singular strata.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exterior::{BasisChange, Coframe, Error, ExteriorForm, Poly, Rational, Var};
use crate::linalg::{generic_rank, random_rational, GenericRank, PolyMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PfaffError {
    #[error(transparent)]
    Exterior(#[from] Error),
    #[error("d{generator} does not descend to the quotient: residue {residue}")]
    Descent { generator: String, residue: String },
    #[error("no admissible extension: {0}")]
    NoAdmissibleExtension(String),
}

/// Random stream number `index` of the family determined by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// A named 1-form on the ambient coframe.
pub type Named = (String, ExteriorForm);

/// Generators and independence pair on an ambient coframe, together with a
/// completion to a basis: `complement` spans the remaining directions of the
/// quotient and `vertical` the fibre directions that must drop out.
#[derive(Clone, Debug)]
pub struct PfaffSystem {
    pub name: String,
    pub ambient: Coframe,
    pub independence: [Named; 2],
    pub generators: Vec<Named>,
    pub complement: Vec<Named>,
    pub vertical: Vec<Named>,
}

/// A system re-expressed on the adapted coframe
/// `(independence, generators, complement, vertical)`.
#[derive(Clone, Debug)]
pub struct Adapted {
    pub coframe: Coframe,
    pub change: BasisChange,
    pub n_gen: usize,
    pub n_comp: usize,
    pub n_vert: usize,
}

impl Adapted {
    pub fn generator_indices(&self) -> std::ops::Range<usize> {
        2..2 + self.n_gen
    }

    pub fn complement_indices(&self) -> std::ops::Range<usize> {
        2 + self.n_gen..2 + self.n_gen + self.n_comp
    }

    pub fn vertical_indices(&self) -> std::ops::Range<usize> {
        let s = 2 + self.n_gen + self.n_comp;
        s..s + self.n_vert
    }

    /// Dimension of the quotient on which the system lives.
    pub fn quotient_dim(&self) -> usize {
        2 + self.n_gen + self.n_comp
    }

    /// Names of the non-generator quotient directions: independence pair
    /// first, then the complement.
    pub fn column_names(&self) -> Vec<String> {
        let mut v = vec![self.coframe.name(0).to_string(), self.coframe.name(1).to_string()];
        v.extend(self.complement_indices().map(|i| self.coframe.name(i).to_string()));
        v
    }

    fn column_indices(&self) -> Vec<usize> {
        let mut v = vec![0, 1];
        v.extend(self.complement_indices());
        v
    }
}

impl PfaffSystem {
    pub fn adapt(&self) -> Result<Adapted, Error> {
        let basis: Vec<Named> = self
            .independence
            .iter()
            .chain(&self.generators)
            .chain(&self.complement)
            .chain(&self.vertical)
            .cloned()
            .collect();
        let (coframe, change) = self.ambient.change_basis(&basis)?;
        Ok(Adapted {
            coframe,
            change,
            n_gen: self.generators.len(),
            n_comp: self.complement.len(),
            n_vert: self.vertical.len(),
        })
    }
}

/// `d(generator)` modulo the generators, on the adapted coframe.
#[derive(Clone, Debug)]
pub struct ClosureTerm {
    pub generator: String,
    pub form: ExteriorForm,
    /// Every term carries a factor from the independence pair.
    pub linear: bool,
}

/// Reduces `d` of every generator modulo the algebraic ideal of the
/// generators and checks that the result involves no vertical direction.
pub fn closure(ad: &Adapted) -> Result<Vec<ClosureTerm>, PfaffError> {
    let cf = &ad.coframe;
    let ideal: BTreeSet<u16> = ad.generator_indices().map(|i| i as u16).collect();
    let vertical: BTreeSet<u16> = ad.vertical_indices().map(|i| i as u16).collect();
    ad.generator_indices()
        .map(|i| {
            let reduced = cf.d(&cf.basis(i))?.drop_indices(&ideal);
            if !reduced.support().is_disjoint(&vertical) {
                return Err(PfaffError::Descent {
                    generator: cf.name(i).to_string(),
                    residue: cf.render(&reduced),
                });
            }
            let linear = reduced.terms().all(|(k, _)| k.iter().any(|&x| x < 2));
            Ok(ClosureTerm {
                generator: cf.name(i).to_string(),
                form: reduced,
                linear,
            })
        })
        .collect()
}

/// Distinct nonzero closure forms up to sign, in order of first appearance.
pub fn two_form_generators(terms: &[ClosureTerm]) -> Vec<ExteriorForm> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in terms {
        if t.form.is_zero() {
            continue;
        }
        let (_, n) = t.form.sign_normalized();
        let key: Vec<(Vec<u16>, String)> = n.terms().map(|(k, p)| (k.clone(), p.to_string())).collect();
        if seen.insert(key) {
            out.push(t.form.clone());
        }
    }
    out
}

/// Free coefficients of the general vector annihilating the generators:
/// `a1, a2` along the independence pair and `b1..bm` along the complement.
pub fn coefficient_vars(ad: &Adapted) -> Vec<Var> {
    let mut v = vec![Var::new("a1"), Var::new("a2")];
    v.extend((1..=ad.n_comp).map(|k| Var::new(&format!("b{k}"))));
    v
}

/// The general vector `a_i d/d(indep_i) + b_j d/d(complement_j)`.
pub fn general_vector(ad: &Adapted) -> Vec<Poly> {
    let mut v = vec![Poly::zero(); ad.coframe.dim()];
    for (slot, var) in ad.column_indices().into_iter().zip(coefficient_vars(ad)) {
        v[slot] = Poly::var(var.name());
    }
    v
}

/// Polar equations `i_V Omega = 0` of a vector `V` as a matrix over the
/// non-generator quotient directions.
#[derive(Clone, Debug)]
pub struct PolarSystem {
    pub columns: Vec<String>,
    pub rows: Vec<ExteriorForm>,
    pub matrix: PolyMatrix,
}

pub fn polar_matrix(ad: &Adapted, two_forms: &[ExteriorForm], v: &[Poly]) -> Result<PolarSystem, Error> {
    let cols = ad.column_indices();
    let mut rows = Vec::with_capacity(two_forms.len());
    let mut m = PolyMatrix::zeros(two_forms.len(), cols.len());
    for (r, omega) in two_forms.iter().enumerate() {
        let row = omega.interior(v)?;
        for (c, &k) in cols.iter().enumerate() {
            m.set(r, c, row.coefficient(&[k]));
        }
        rows.push(row);
    }
    Ok(PolarSystem {
        columns: ad.column_names(),
        rows,
        matrix: m,
    })
}

fn random_point<R: rand::Rng>(vars: &[Var], rng: &mut R) -> BTreeMap<Var, Rational> {
    vars.iter().map(|v| (v.clone(), random_rational(rng))).collect()
}

/// Rank of a polar matrix over the field of rational functions in its
/// coefficients, with a symbolic certificate.
pub fn polar_rank(ps: &PolarSystem, samples: usize, seed: u64, max_minors: usize) -> Result<GenericRank, Error> {
    let vars = ps.matrix.vars();
    let mut rng = stream(seed, 0);
    generic_rank(&ps.matrix, samples, &mut rng, |g| random_point(&vars, g), max_minors)
}

/// Bilinear equations `Omega(X1, X2) = 0` for
/// `X1 = d/d(indep_1) + sum p_j w_j`, `X2 = d/d(indep_2) + sum q_j w_j`.
pub struct V2Equations {
    pub p: Vec<Var>,
    pub q: Vec<Var>,
    pub equations: Vec<Poly>,
}

fn element_vectors(ad: &Adapted, p: &[Poly], q: &[Poly]) -> (Vec<Poly>, Vec<Poly>) {
    let n = ad.coframe.dim();
    let mut x1 = vec![Poly::zero(); n];
    let mut x2 = vec![Poly::zero(); n];
    x1[0] = Poly::one();
    x2[1] = Poly::one();
    for (k, slot) in ad.complement_indices().enumerate() {
        x1[slot] = p[k].clone();
        x2[slot] = q[k].clone();
    }
    (x1, x2)
}

pub fn v2_equations(ad: &Adapted, two_forms: &[ExteriorForm]) -> Result<V2Equations, Error> {
    let m = ad.n_comp;
    let p: Vec<Var> = (1..=m).map(|k| Var::new(&format!("p{k}"))).collect();
    let q: Vec<Var> = (1..=m).map(|k| Var::new(&format!("q{k}"))).collect();
    let pp: Vec<Poly> = p.iter().map(|v| Poly::var(v.name())).collect();
    let qq: Vec<Poly> = q.iter().map(|v| Poly::var(v.name())).collect();
    let (x1, x2) = element_vectors(ad, &pp, &qq);
    let equations = two_forms
        .iter()
        .map(|f| f.evaluate(&[x1.clone(), x2.clone()]))
        .collect::<Result<_, _>>()?;
    Ok(V2Equations { p, q, equations })
}

/// A sampled 2-dimensional integral element `(p, q)`.
#[derive(Clone, Debug)]
pub struct IntegralElement2 {
    pub p: Vec<Rational>,
    pub q: Vec<Rational>,
}

impl IntegralElement2 {
    /// The spanning vectors `X1, X2` as components in the adapted coframe.
    pub fn vectors(&self, ad: &Adapted) -> (Vec<Rational>, Vec<Rational>) {
        let n = ad.coframe.dim();
        let mut x1 = vec![Rational::zero(); n];
        let mut x2 = vec![Rational::zero(); n];
        x1[0] = Rational::one();
        x2[1] = Rational::one();
        for (k, slot) in ad.complement_indices().enumerate() {
            x1[slot] = self.p[k].clone();
            x2[slot] = self.q[k].clone();
        }
        (x1, x2)
    }
}

/// One random 2-dimensional integral element through a random choice of
/// `X1`, or `None` when the equations for `X2` turn out inconsistent.
pub fn sample_integral_element(ad: &Adapted, two_forms: &[ExteriorForm], seed: u64) -> Result<Option<IntegralElement2>, Error> {
    let eqs = v2_equations(ad, two_forms)?;
    Ok(solve_for_q(&eqs, &mut stream(seed, 0))?.element)
}

struct QSolve {
    rank_q: usize,
    element: Option<IntegralElement2>,
}

fn solve_for_q<R: rand::Rng>(eqs: &V2Equations, rng: &mut R) -> Result<QSolve, Error> {
    let pv: Vec<Rational> = eqs.p.iter().map(|_| random_rational(rng)).collect();
    let rules: BTreeMap<Var, Poly> = eqs.p.iter().cloned().zip(pv.iter().map(|c| Poly::constant(c.clone()))).collect();
    let m = eqs.q.len();
    let mut rows = Vec::with_capacity(eqs.equations.len());
    let mut rhs = Vec::with_capacity(eqs.equations.len());
    for e in &eqs.equations {
        let (coeffs, rest) = e.substitute(&rules).linear_parts(&eqs.q)?;
        let row = coeffs
            .iter()
            .map(|c| c.constant_value().ok_or_else(|| Error::NotLinear(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
        rhs.push(-rest.constant_value().ok_or_else(|| Error::NotLinear(e.to_string()))?);
    }
    if rows.is_empty() {
        let q = (0..m).map(|_| random_rational(rng)).collect();
        return Ok(QSolve {
            rank_q: 0,
            element: Some(IntegralElement2 { p: pv, q }),
        });
    }
    let a = RatMatrix::from_rows(rows);
    let rank_q = a.rank();
    let element = a.solve(&rhs).map(|(mut x, null)| {
        for v in null {
            let c = random_rational(rng);
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += &c * vi;
            }
        }
        IntegralElement2 { p: pv.clone(), q: x }
    });
    Ok(QSolve { rank_q, element })
}

/// Dimension of the variety of 2-dimensional integral elements over a point.
#[derive(Clone, Debug, Serialize)]
pub struct V2Report {
    pub dim: usize,
    pub rank_q_samples: Vec<usize>,
    pub inconsistent_samples: usize,
    /// `2m - rank` of the Jacobian of the equations at a sampled solution.
    pub jacobian_dim: Option<usize>,
    pub diagnostic: Option<String>,
}

fn majority(xs: &[usize]) -> (usize, Option<String>) {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in xs {
        *counts.entry(x).or_default() += 1;
    }
    let (&best, _) = counts.iter().max_by_key(|(v, c)| (**c, **v)).expect("nonempty sample");
    let diag = (counts.len() > 1).then(|| format!("samples disagree: {counts:?}"));
    (best, diag)
}

pub fn dim_v2(ad: &Adapted, two_forms: &[ExteriorForm], samples: usize, seed: u64) -> Result<V2Report, PfaffError> {
    let eqs = v2_equations(ad, two_forms)?;
    let m = ad.n_comp;
    let results: Vec<QSolve> = (0..samples.max(1))
        .into_par_iter()
        .map(|k| solve_for_q(&eqs, &mut stream(seed, k as u64)))
        .collect::<Result<_, _>>()?;
    let consistent: Vec<&QSolve> = results.iter().filter(|r| r.element.is_some()).collect();
    if consistent.is_empty() {
        return Err(PfaffError::NoAdmissibleExtension(format!(
            "the equations in q were inconsistent for all {} samples",
            results.len()
        )));
    }
    let ranks: Vec<usize> = consistent.iter().map(|r| r.rank_q).collect();
    let (rank_q, mut diagnostic) = majority(&ranks);
    let dim = m + (m - rank_q);
    let jacobian_dim = consistent
        .iter()
        .find(|r| r.rank_q == rank_q)
        .and_then(|r| r.element.as_ref())
        .map(|e| jacobian_corank(&eqs, e))
        .transpose()?;
    if let Some(j) = jacobian_dim {
        if j != dim && diagnostic.is_none() {
            diagnostic = Some(format!("Jacobian corank {j} differs from {dim}"));
        }
    }
    Ok(V2Report {
        dim,
        rank_q_samples: ranks,
        inconsistent_samples: results.len() - consistent.len(),
        jacobian_dim,
        diagnostic,
    })
}

fn jacobian_corank(eqs: &V2Equations, e: &IntegralElement2) -> Result<usize, Error> {
    let at: BTreeMap<Var, Rational> = eqs
        .p
        .iter()
        .cloned()
        .zip(e.p.iter().cloned())
        .chain(eqs.q.iter().cloned().zip(e.q.iter().cloned()))
        .collect();
    let vars: Vec<&Var> = eqs.p.iter().chain(&eqs.q).collect();
    let rows = eqs
        .equations
        .iter()
        .map(|f| {
            debug_assert!(f.eval(&at).map(|v| v.is_zero()).unwrap_or(false));
            vars.iter().map(|v| f.derivative(v).eval(&at)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let r = if rows.is_empty() { 0 } else { RatMatrix::from_rows(rows).rank() };
    Ok(vars.len() - r)
}

/// Rank of the combined polar equations `i_X1 Omega, i_X2 Omega` of a
/// sampled integral element.
fn e2_polar_rank(ad: &Adapted, two_forms: &[ExteriorForm], e: &IntegralElement2) -> Result<usize, Error> {
    let pp: Vec<Poly> = e.p.iter().map(|c| Poly::constant(c.clone())).collect();
    let qq: Vec<Poly> = e.q.iter().map(|c| Poly::constant(c.clone())).collect();
    let (x1, x2) = element_vectors(ad, &pp, &qq);
    let cols = ad.column_indices();
    let mut rows = Vec::new();
    for f in two_forms {
        for x in [&x1, &x2] {
            let r = f.interior(x)?;
            rows.push(
                cols.iter()
                    .map(|&k| r.coefficient(&[k]).constant_value().expect("numeric element"))
                    .collect::<Vec<_>>(),
            );
        }
    }
    Ok(if rows.is_empty() { 0 } else { RatMatrix::from_rows(rows).rank() })
}

/// Cartan characters and involution verdict.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CartanReport {
    pub system: String,
    pub c0: usize,
    pub c1: usize,
    pub c2: usize,
    #[serde(rename = "dimV2")]
    pub dim_v2: usize,
    #[serde(rename = "grassDim")]
    pub grass_dim: usize,
    pub characters: [usize; 3],
    pub involutive: bool,
    pub generality: String,
}

/// Full analysis output: the report plus the data it was derived from.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: CartanReport,
    pub adapted: Adapted,
    pub closure: Vec<ClosureTerm>,
    pub two_forms: Vec<ExteriorForm>,
    pub polar: PolarSystem,
    pub polar_rank: GenericRank,
    pub v2: V2Report,
    /// Polar ranks, beyond the generators, of sampled 2-dimensional integral
    /// elements.
    pub e2_polar_ranks: Vec<usize>,
    pub diagnostics: Vec<String>,
}

fn number_word(n: usize) -> String {
    const WORDS: [&str; 13] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    ];
    WORDS.get(n).map_or_else(|| n.to_string(), |w| w.to_string())
}

/// Generality of solutions in words, from the last nonzero character.
pub fn generality(s: [usize; 3]) -> String {
    let (n, vars) = if s[2] > 0 {
        (s[2], "two variables")
    } else if s[1] > 0 {
        (s[1], "one variable")
    } else {
        return "finitely many constants".into();
    };
    let noun = if n == 1 { "function" } else { "functions" };
    format!("{} {noun} of {vars}", number_word(n))
}

/// Number of samples used for every probabilistic rank.
pub const RANK_SAMPLES: usize = 5;

pub fn cartan_report(sys: &PfaffSystem, seed: u64) -> Result<Analysis, PfaffError> {
    let ad = sys.adapt()?;
    let closure = closure(&ad)?;
    let two_forms = two_form_generators(&closure);
    let polar = polar_matrix(&ad, &two_forms, &general_vector(&ad))?;
    let rank = polar_rank(&polar, RANK_SAMPLES, seed, 20_000)?;
    let v2 = dim_v2(&ad, &two_forms, RANK_SAMPLES, seed)?;
    let eqs = v2_equations(&ad, &two_forms)?;
    let e2_polar_ranks: Vec<usize> = (0..RANK_SAMPLES)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed ^ 0x5eed, k as u64);
            loop {
                if let Some(e) = solve_for_q(&eqs, &mut rng)?.element {
                    return e2_polar_rank(&ad, &two_forms, &e);
                }
            }
        })
        .collect::<Result<_, Error>>()?;
    let (r2, c2_diag) = majority(&e2_polar_ranks);
    let c0 = sys.generators.len();
    let c1 = c0 + rank.rank;
    // The top character closes the count: s0 + s1 + s2 = dim - 2.
    let c2 = ad.quotient_dim() - 2;
    let grass_dim = 2 * c2;
    let characters = [c0, c1 - c0, c2 - c1];
    let mut diagnostics = Vec::new();
    diagnostics.extend(rank.diagnostic.clone());
    diagnostics.extend(v2.diagnostic.clone());
    diagnostics.extend(c2_diag);
    if c0 + r2 < c2 {
        diagnostics.push(format!(
            "polar space of a generic 2-dimensional integral element has dimension {}",
            c2 + 2 - c0 - r2
        ));
    }
    let report = CartanReport {
        system: sys.name.clone(),
        c0,
        c1,
        c2,
        dim_v2: v2.dim,
        grass_dim,
        characters,
        involutive: v2.dim + c0 + c1 == grass_dim,
        generality: generality(characters),
    };
    Ok(Analysis {
        report,
        adapted: ad,
        closure,
        two_forms,
        polar,
        polar_rank: rank,
        v2,
        e2_polar_ranks,
        diagnostics,
    })
}

/// How a stratum of coefficient space is sampled.
#[derive(Clone, Debug)]
pub enum StratumRule {
    /// Substitute the given polynomials (in the remaining variables).
    Fix(BTreeMap<Var, Poly>),
    /// Solve the equation, linear in `var`, for `var`.
    Solve { var: Var, equation: Poly },
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub label: String,
    pub rule: StratumRule,
    /// Also certify the rank symbolically (only for `Fix` rules).
    pub certify: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumProfile {
    pub constraint: String,
    /// rank -> number of samples
    pub ranks: BTreeMap<usize, usize>,
    /// Samples where the rule could not be applied (vanishing pivot).
    pub skipped: usize,
    pub symbolic: Option<GenericRank>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularReport {
    #[serde(rename = "sufficiencySamples")]
    pub sufficiency_samples: usize,
    /// rank -> count over samples where the candidate does not vanish
    pub sufficiency_ranks: BTreeMap<usize, usize>,
    pub full_rank: usize,
    pub strata: Vec<StratumProfile>,
}

fn sample_on<R: rand::Rng>(vars: &[Var], rule: &StratumRule, rng: &mut R) -> Result<Option<BTreeMap<Var, Rational>>, Error> {
    let mut pt = random_point(vars, rng);
    match rule {
        StratumRule::Fix(map) => {
            for (v, p) in map {
                let val = p.eval(&pt)?;
                pt.insert(v.clone(), val);
            }
        }
        StratumRule::Solve { var, equation } => {
            let (c, rest) = equation.linear_parts(std::slice::from_ref(var))?;
            let c = c[0].eval(&pt)?;
            if c.is_zero() {
                return Ok(None);
            }
            let val = -rest.eval(&pt)? / c;
            pt.insert(var.clone(), val);
        }
    }
    Ok(Some(pt))
}

/// Samples polar ranks off and on the zero set of a candidate polynomial.
pub fn singular_check(
    ps: &PolarSystem,
    candidate: &Poly,
    strata: &[Stratum],
    samples: usize,
    seed: u64,
) -> Result<SingularReport, Error> {
    let vars = coefficient_vars_of(ps);
    let suff: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            loop {
                let pt = random_point(&vars, &mut rng);
                if !candidate.eval(&pt)?.is_zero() {
                    return Ok(ps.matrix.eval(&pt)?.rank());
                }
            }
        })
        .collect::<Result<_, Error>>()?;
    let mut sufficiency_ranks = BTreeMap::new();
    for r in suff {
        *sufficiency_ranks.entry(r).or_default() += 1;
    }
    let full_rank = ps.matrix.rows().min(ps.matrix.cols());
    let mut profiles = Vec::new();
    for (si, st) in strata.iter().enumerate() {
        let draws: Vec<Option<usize>> = (0..samples)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(seed.wrapping_add(1 + si as u64), k as u64);
                Ok(match sample_on(&vars, &st.rule, &mut rng)? {
                    Some(pt) => Some(ps.matrix.eval(&pt)?.rank()),
                    None => None,
                })
            })
            .collect::<Result<_, Error>>()?;
        let mut ranks = BTreeMap::new();
        for r in draws.iter().flatten() {
            *ranks.entry(*r).or_default() += 1;
        }
        let symbolic = match (&st.rule, st.certify) {
            (StratumRule::Fix(map), true) => {
                let spec = PolarSystem {
                    columns: ps.columns.clone(),
                    rows: ps.rows.clone(),
                    matrix: ps.matrix.map(|p| p.substitute(map)),
                };
                Some(polar_rank(&spec, RANK_SAMPLES, seed, 20_000)?)
            }
            _ => None,
        };
        profiles.push(StratumProfile {
            constraint: st.label.clone(),
            ranks,
            skipped: draws.iter().filter(|d| d.is_none()).count(),
            symbolic,
        });
    }
    Ok(SingularReport {
        sufficiency_samples: samples,
        sufficiency_ranks,
        full_rank,
        strata: profiles,
    })
}

fn coefficient_vars_of(ps: &PolarSystem) -> Vec<Var> {
    let mut v = vec![Var::new("a1"), Var::new("a2")];
    v.extend((1..=ps.columns.len() - 2).map(|k| Var::new(&format!("b{k}"))));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Contact-type toy: on (x, y, u, p, q) with du = p dx + q dy, the ideal
    /// generated by du - p dx - q dy is involutive with one function of two
    /// variables.
    fn toy() -> PfaffSystem {
        // th is the contact form; its derivative is dx∧dp + dy∧dq.
        let mut b = Coframe::builder(&["dx", "dy", "th", "dp", "dq"]).unwrap();
        let d = b.parse("dx∧dp + dy∧dq").unwrap();
        b.set_d("th", d).unwrap();
        let ambient = b.build();
        let f = |s: &str| ambient.parse(s).unwrap();
        PfaffSystem {
            name: "toy".into(),
            independence: [("X".into(), f("dx")), ("Y".into(), f("dy"))],
            generators: vec![("T".into(), f("th"))],
            complement: vec![("P".into(), f("dp")), ("Q".into(), f("dq"))],
            vertical: vec![],
            ambient,
        }
    }

    #[test]
    fn toy_system_characters() {
        let a = cartan_report(&toy(), 1).unwrap();
        let r = &a.report;
        assert_eq!((r.c0, r.c1, r.c2, r.dim_v2, r.grass_dim), (1, 2, 3, 3, 6));
        assert_eq!(r.characters, [1, 1, 1]);
        assert!(r.involutive);
        assert_eq!(r.generality, "one function of two variables");
        assert!(a.closure[0].linear);
    }

    #[test]
    fn trivial_system_has_empty_closure_and_free_v2() {
        let cf = Coframe::closed(&["x", "y", "w1", "w2"]).unwrap();
        let f = |s: &str| cf.parse(s).unwrap();
        let sys = PfaffSystem {
            name: "free".into(),
            independence: [("X".into(), f("x")), ("Y".into(), f("y"))],
            generators: vec![],
            complement: vec![("W1".into(), f("w1")), ("W2".into(), f("w2"))],
            vertical: vec![],
            ambient: cf.clone(),
        };
        let ad = sys.adapt().unwrap();
        assert!(closure(&ad).unwrap().is_empty());
        assert_eq!(dim_v2(&ad, &[], 5, 0).unwrap().dim, 4);
    }

    #[test]
    fn zero_vector_gives_zero_polar_matrix() {
        let sys = toy();
        let ad = sys.adapt().unwrap();
        let tf = two_form_generators(&closure(&ad).unwrap());
        let ps = polar_matrix(&ad, &tf, &vec![Poly::zero(); ad.coframe.dim()]).unwrap();
        assert!(ps.matrix.is_zero());
        assert_eq!(polar_rank(&ps, 5, 0, 10).unwrap().rank, 0);
    }

    #[test]
    fn number_words() {
        assert_eq!(generality([12, 8, 1]), "one function of two variables");
        assert_eq!(generality([15, 6, 0]), "six functions of one variable");
        assert_eq!(generality([3, 0, 0]), "finitely many constants");
    }
}
