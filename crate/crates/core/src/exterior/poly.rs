//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Poly`] is a map from [`Monomial`] to a nonzero [`Rational`]. Monomials
//! are ordered graded-lexicographically, which fixes the canonical text form
//! (highest term first).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, to_f64, Rational};
use super::Error;

/// A named polynomial variable. Ordering is by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// Power product of variables; entries sorted by variable, exponents > 0.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes one power of `v`; `None` when `v` does not divide.
    fn without(&self, v: &Var) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|(w, _)| w == v)?;
        let e = self.0[pos].1;
        let mut rest = self.0.clone();
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        Some((e, Monomial(rest)))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// smallest variable where the two differ (higher exponent is larger).
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(super::rational::rat(n))
    }

    pub fn var(name: &str) -> Self {
        Poly::monomial(Monomial::var(Var::new(name)), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.get(&Monomial::one()).cloned();
        }
        None
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Leading (grlex-largest) term.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.without(v) {
                out.add_term(rest, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// One simultaneous pass of `v -> rules[v]`.
    pub fn substitute(&self, rules: &BTreeMap<Var, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = Poly::constant(c.clone());
            for (v, e) in &m.0 {
                match rules.get(v) {
                    Some(r) => factor = &factor * &r.pow(*e),
                    None => kept = kept.mul(&Monomial(vec![(v.clone(), *e)])),
                }
            }
            for (fm, fc) in factor.terms {
                out.add_term(fm.mul(&kept), fc);
            }
        }
        out
    }

    /// Exact evaluation; every variable must be assigned.
    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational, Error> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = values
                    .get(v)
                    .ok_or_else(|| Error::UnassignedVariable(v.to_string()))?;
                for _ in 0..*e {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, values: &BTreeMap<Var, f64>) -> Result<f64, Error> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = to_f64(c);
            for (v, e) in &m.0 {
                let x = values
                    .get(v)
                    .ok_or_else(|| Error::UnassignedVariable(v.to_string()))?;
                t *= x.powi(*e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Splits a polynomial of degree <= 1 in `vars` into the coefficient of
    /// each variable and the remainder (free of `vars`).
    pub fn linear_parts(&self, vars: &[Var]) -> Result<(Vec<Poly>, Poly), Error> {
        let mut coeffs = vec![Poly::zero(); vars.len()];
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            let hits: Vec<(usize, u32)> = vars
                .iter()
                .enumerate()
                .filter_map(|(k, v)| {
                    let e = m.exponent(v);
                    (e > 0).then_some((k, e))
                })
                .collect();
            match hits.as_slice() {
                [] => rest.add_term(m.clone(), c.clone()),
                [(k, 1)] => {
                    let (_, r) = m.without(&vars[*k]).expect("variable divides");
                    coeffs[*k].add_term(r, c.clone());
                }
                _ => return Err(Error::NotLinear(self.to_string())),
            }
        }
        Ok((coeffs, rest))
    }

    /// Sign that makes the leading coefficient positive.
    pub fn leading_sign(&self) -> i32 {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -1,
            Some(_) => 1,
            None => 0,
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::int(n)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

/// Acyclic rewrite system `var -> Poly`, applied exhaustively.
#[derive(Clone, Debug, Default)]
pub struct RewriteRules {
    rules: BTreeMap<Var, Poly>,
}

impl RewriteRules {
    pub fn new(rules: BTreeMap<Var, Poly>) -> Result<Self, Error> {
        // Depth-first search for a cycle in the "lhs appears in rhs" graph.
        fn visit(
            v: &Var,
            rules: &BTreeMap<Var, Poly>,
            state: &mut BTreeMap<Var, u8>,
            path: &mut Vec<Var>,
        ) -> Result<(), Error> {
            match state.get(v) {
                Some(2) => return Ok(()),
                Some(1) => {
                    path.push(v.clone());
                    let names: Vec<String> = path.iter().map(|x| x.to_string()).collect();
                    return Err(Error::CyclicRules(names.join(" -> ")));
                }
                _ => {}
            }
            let Some(rhs) = rules.get(v) else {
                return Ok(());
            };
            state.insert(v.clone(), 1);
            path.push(v.clone());
            for w in rhs.vars() {
                visit(&w, rules, state, path)?;
            }
            path.pop();
            state.insert(v.clone(), 2);
            Ok(())
        }
        let mut state = BTreeMap::new();
        for v in rules.keys() {
            visit(v, &rules, &mut state, &mut Vec::new())?;
        }
        Ok(RewriteRules { rules })
    }

    pub fn get(&self, v: &Var) -> Option<&Poly> {
        self.rules.get(v)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rewrites until no left-hand side variable remains.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut cur = p.clone();
        // Acyclic, so the number of passes is bounded by the rule count.
        for _ in 0..=self.rules.len() {
            if !cur.vars().iter().any(|v| self.rules.contains_key(v)) {
                break;
            }
            cur = cur.substitute(&self.rules);
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::rational::ratio;

    fn p(s: &str) -> Poly {
        crate::exterior::text::parse_poly(s).unwrap()
    }

    #[test]
    fn canonical_text_is_grlex_descending() {
        let q = &(&Poly::var("b") + &Poly::int(3)) * &(&Poly::var("a") - &Poly::var("b"));
        assert_eq!(q.to_string(), "a*b - b^2 + 3*a - 3*b");
        assert_eq!(Poly::constant(ratio(-1, 2)).to_string(), "-1/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn no_zero_coefficients_are_stored() {
        let x = Poly::var("x");
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn derivative_of_power() {
        assert_eq!(p("x^3*y + 2*x").derivative(&Var::new("x")), p("3*x^2*y + 2"));
    }

    #[test]
    fn substitution_is_exhaustive_and_idempotent() {
        let mut m = BTreeMap::new();
        m.insert(Var::new("k1_xy"), p("psi*k1"));
        let rules = RewriteRules::new(m).unwrap();
        let r = rules.apply(&p("k1_xy - psi*k1"));
        assert!(r.is_zero());
        let five = rules.apply(&Poly::int(5));
        assert_eq!(five, Poly::int(5));
        let q = rules.apply(&p("k1_xy^2 + k1"));
        assert_eq!(rules.apply(&q), q);
    }

    #[test]
    fn cyclic_rules_are_rejected() {
        let mut m = BTreeMap::new();
        m.insert(Var::new("a"), p("b + 1"));
        m.insert(Var::new("b"), p("2*a"));
        assert!(matches!(RewriteRules::new(m), Err(Error::CyclicRules(_))));
    }

    #[test]
    fn linear_parts_split() {
        let (c, r) = p("a1*b3 - 2*b4 + a2").linear_parts(&[Var::new("b3"), Var::new("b4")]).unwrap();
        assert_eq!(c[0], p("a1"));
        assert_eq!(c[1], Poly::int(-2));
        assert_eq!(r, p("a2"));
        assert!(p("b3^2").linear_parts(&[Var::new("b3")]).is_err());
    }
}
