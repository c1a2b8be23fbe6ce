//! Exterior forms over an abstract coframe.

use std::collections::{BTreeMap, BTreeSet};

use super::poly::{Poly, RewriteRules};
use super::rational::Rational;
use super::Error;

/// Identifies the coframe a form lives on (hash of the ordered basis names).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FrameTag(pub u64);

impl FrameTag {
    pub fn of_names<S: AsRef<str>>(names: &[S]) -> Self {
        // FNV-1a, stable across runs and platforms.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for n in names {
            for b in n.as_ref().bytes().chain(std::iter::once(0u8)) {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        FrameTag(h)
    }
}

/// Basis multi-index: strictly increasing positions into the coframe.
pub type Index = Vec<u16>;

/// Homogeneous exterior form `sum f_I theta^I` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExteriorForm {
    frame: FrameTag,
    degree: usize,
    terms: BTreeMap<Index, Poly>,
}

/// Sorts `idx` in place and returns the permutation sign, or 0 on a repeat.
pub(crate) fn sort_with_sign(idx: &mut [u16]) -> i32 {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

impl ExteriorForm {
    pub fn zero(frame: FrameTag, degree: usize) -> Self {
        ExteriorForm {
            frame,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(frame: FrameTag, p: Poly) -> Self {
        let mut f = ExteriorForm::zero(frame, 0);
        f.add_term(Vec::new(), p);
        f
    }

    pub fn basis(frame: FrameTag, i: usize) -> Self {
        let mut f = ExteriorForm::zero(frame, 1);
        f.add_term(vec![i as u16], Poly::one());
        f
    }

    /// Builds `coeff * theta^{idx[0]} ^ ... ^ theta^{idx[k-1]}` for an
    /// arbitrary (unsorted) index list.
    pub fn monomial(frame: FrameTag, idx: &[usize], coeff: Poly) -> Self {
        let mut key: Index = idx.iter().map(|&i| i as u16).collect();
        let mut f = ExteriorForm::zero(frame, idx.len());
        match sort_with_sign(&mut key) {
            0 => {}
            1 => f.add_term(key, coeff),
            _ => f.add_term(key, -coeff),
        }
        f
    }

    pub fn frame(&self) -> FrameTag {
        self.frame
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Index, &Poly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `theta^{idx}`, with the sign of the sorting permutation.
    pub fn coefficient(&self, idx: &[usize]) -> Poly {
        let mut key: Index = idx.iter().map(|&i| i as u16).collect();
        match sort_with_sign(&mut key) {
            0 => Poly::zero(),
            s => {
                let c = self.terms.get(&key).cloned().unwrap_or_default();
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// The scalar value of a 0-form.
    pub fn as_scalar(&self) -> Result<Poly, Error> {
        if self.degree != 0 {
            return Err(Error::Degree(format!("expected a 0-form, got degree {}", self.degree)));
        }
        Ok(self.terms.get(&Vec::new()).cloned().unwrap_or_default())
    }

    pub(crate) fn add_term(&mut self, key: Index, p: Poly) {
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(p);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &p;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_frame(&self, other: &ExteriorForm) -> Result<(), Error> {
        if self.frame != other.frame {
            return Err(Error::CoframeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &ExteriorForm) -> Result<ExteriorForm, Error> {
        self.check_frame(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::Degree(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut out = ExteriorForm {
            frame: self.frame,
            degree,
            terms: self.terms.clone(),
        };
        for (k, p) in &other.terms {
            out.add_term(k.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ExteriorForm) -> Result<ExteriorForm, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExteriorForm {
        self.map_coeffs(|p| -p)
    }

    pub fn scale(&self, c: &Poly) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.frame, self.degree);
        for (k, p) in &self.terms {
            out.add_term(k.clone(), p * c);
        }
        out
    }

    pub fn scale_rat(&self, c: &Rational) -> ExteriorForm {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn map_coeffs<F: Fn(&Poly) -> Poly>(&self, f: F) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.frame, self.degree);
        for (k, p) in &self.terms {
            out.add_term(k.clone(), f(p));
        }
        out
    }

    /// Exterior product; `a ^ b = (-1)^{deg a deg b} b ^ a`.
    pub fn wedge(&self, other: &ExteriorForm) -> Result<ExteriorForm, Error> {
        self.check_frame(other)?;
        let mut out = ExteriorForm::zero(self.frame, self.degree + other.degree);
        for (ka, pa) in &self.terms {
            for (kb, pb) in &other.terms {
                let mut key: Index = ka.iter().chain(kb.iter()).copied().collect();
                match sort_with_sign(&mut key) {
                    0 => {}
                    1 => out.add_term(key, pa * pb),
                    _ => out.add_term(key, -(pa * pb)),
                }
            }
        }
        Ok(out)
    }

    /// Interior product with the vector whose component along the dual of
    /// basis form `j` is `v[j]`.
    pub fn interior(&self, v: &[Poly]) -> Result<ExteriorForm, Error> {
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut out = ExteriorForm::zero(self.frame, self.degree - 1);
        for (k, p) in &self.terms {
            for (pos, &i) in k.iter().enumerate() {
                let comp = v
                    .get(i as usize)
                    .ok_or_else(|| Error::Degree(format!("vector has no component {i}")))?;
                if comp.is_zero() {
                    continue;
                }
                let mut rest = k.clone();
                rest.remove(pos);
                let c = p * comp;
                out.add_term(rest, if pos % 2 == 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// Evaluates a k-form on k vectors: `phi(v1, ..., vk)`.
    pub fn evaluate(&self, vectors: &[Vec<Poly>]) -> Result<Poly, Error> {
        if vectors.len() != self.degree {
            return Err(Error::Degree(format!(
                "a {}-form needs {} vectors",
                self.degree, self.degree
            )));
        }
        let mut cur = self.clone();
        for v in vectors {
            cur = cur.interior(v)?;
        }
        cur.as_scalar()
    }

    /// Deletes every term containing one of the `ideal` basis indices.
    pub fn drop_indices(&self, ideal: &BTreeSet<u16>) -> ExteriorForm {
        ExteriorForm {
            frame: self.frame,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| !k.iter().any(|i| ideal.contains(i)))
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
        }
    }

    /// Indices appearing in some term.
    pub fn support(&self) -> BTreeSet<u16> {
        self.terms.keys().flat_map(|k| k.iter().copied()).collect()
    }

    pub fn substitute(&self, rules: &RewriteRules) -> ExteriorForm {
        self.map_coeffs(|p| rules.apply(p))
    }

    /// `self` or `-self`, whichever has a positive leading coefficient on its
    /// first term. Used for comparisons up to overall sign.
    pub fn sign_normalized(&self) -> (i32, ExteriorForm) {
        match self.terms.iter().next() {
            Some((_, p)) if p.leading_sign() < 0 => (-1, self.neg()),
            Some(_) => (1, self.clone()),
            None => (0, self.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: FrameTag = FrameTag(7);

    fn th(i: usize) -> ExteriorForm {
        ExteriorForm::basis(T, i)
    }

    #[test]
    fn repeated_factor_vanishes() {
        assert!(th(0).wedge(&th(0)).unwrap().is_zero());
    }

    #[test]
    fn wedge_antisymmetry() {
        let a = th(0).wedge(&th(1)).unwrap();
        let b = th(1).wedge(&th(0)).unwrap();
        assert_eq!(a, b.neg());
    }

    #[test]
    fn wedge_bilinear_expansion() {
        // (2 theta1 + theta2) ^ theta2 = 2 theta1 ^ theta2
        let lhs = th(0).scale(&Poly::int(2)).add(&th(1)).unwrap().wedge(&th(1)).unwrap();
        let expected = ExteriorForm::monomial(T, &[0, 1], Poly::int(2));
        assert_eq!(lhs, expected);
        assert_eq!(lhs.coefficient(&[0, 1]), Poly::int(2));
        assert_eq!(lhs.coefficient(&[1, 0]), Poly::int(-2));
    }

    #[test]
    fn mismatched_frames_rejected() {
        let other = ExteriorForm::basis(FrameTag(8), 0);
        assert!(matches!(th(0).wedge(&other), Err(Error::CoframeMismatch)));
    }

    #[test]
    fn interior_examples() {
        let w = th(0).wedge(&th(1)).unwrap();
        let v = vec![Poly::one(), Poly::zero()];
        assert_eq!(w.interior(&v).unwrap(), th(1));
        let v = vec![Poly::var("a1"), Poly::var("a2")];
        let expected = th(1)
            .scale(&Poly::var("a1"))
            .sub(&th(0).scale(&Poly::var("a2")))
            .unwrap();
        assert_eq!(w.interior(&v).unwrap(), expected);
    }

    #[test]
    fn evaluate_on_pair() {
        let w = th(0).wedge(&th(1)).unwrap();
        let x = vec![Poly::one(), Poly::zero()];
        let y = vec![Poly::zero(), Poly::one()];
        assert_eq!(w.evaluate(&[x.clone(), y.clone()]).unwrap(), Poly::one());
        assert_eq!(w.evaluate(&[y, x]).unwrap(), Poly::int(-1));
    }
}
