//! Coframes: ordered named basis 1-forms together with the rule for `d`.

use std::collections::{BTreeMap, BTreeSet};

use super::form::{ExteriorForm, FrameTag};
use super::poly::{Poly, Var};
use super::rational::Rational;
use super::Error;
use crate::linalg::RatMatrix;

/// Jet-variable calculus on a coframe containing coordinate differentials.
///
/// A variable named `base` or `base_<suffix>` with `base` registered and the
/// suffix made of coordinate letters is a partial derivative of `base`;
/// `d(k1_x) = k1_xx dx + k1_xy dy`. Suffixes are kept sorted in coordinate
/// order so mixed partials have one name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSpace {
    coords: Vec<(char, usize)>,
    bases: BTreeSet<String>,
}

impl JetSpace {
    pub fn new(coords: Vec<(char, usize)>, bases: &[&str]) -> Self {
        JetSpace {
            coords,
            bases: bases.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn split<'a>(&self, name: &'a str) -> Option<(&'a str, &'a str)> {
        if self.bases.contains(name) {
            return Some((name, ""));
        }
        let (base, suffix) = name.rsplit_once('_')?;
        let ok = self.bases.contains(base)
            && !suffix.is_empty()
            && suffix.chars().all(|c| self.coords.iter().any(|(k, _)| *k == c));
        ok.then_some((base, suffix))
    }

    /// Canonical name of `base` differentiated by the letters in `suffix`.
    pub fn jet_name(&self, base: &str, suffix: &str) -> String {
        if suffix.is_empty() {
            return base.to_string();
        }
        let mut letters: Vec<char> = suffix.chars().collect();
        letters.sort_by_key(|c| self.coords.iter().position(|(k, _)| k == c).unwrap_or(usize::MAX));
        format!("{base}_{}", letters.into_iter().collect::<String>())
    }

    fn d_var(&self, v: &Var, tag: FrameTag) -> Option<ExteriorForm> {
        let (base, suffix) = self.split(v.name())?;
        let mut out = ExteriorForm::zero(tag, 1);
        for (c, idx) in &self.coords {
            let name = self.jet_name(base, &format!("{suffix}{c}"));
            let term = ExteriorForm::monomial(tag, &[*idx], Poly::var(&name));
            out = out.add(&term).expect("same frame");
        }
        Some(out)
    }
}

/// Ordered basis of 1-forms with an exterior-derivative table.
#[derive(Clone, Debug)]
pub struct Coframe {
    names: Vec<String>,
    lookup: BTreeMap<String, usize>,
    tag: FrameTag,
    dtable: Vec<ExteriorForm>,
    varrules: BTreeMap<Var, ExteriorForm>,
    jets: Option<JetSpace>,
}

/// Incremental construction of a [`Coframe`].
pub struct CoframeBuilder {
    inner: Coframe,
}

impl CoframeBuilder {
    pub fn tag(&self) -> FrameTag {
        self.inner.tag
    }

    pub fn basis(&self, name: &str) -> Result<ExteriorForm, Error> {
        self.inner.form(name)
    }

    pub fn index(&self, name: &str) -> Result<usize, Error> {
        self.inner.index(name)
    }

    pub fn set_d(&mut self, name: &str, d: ExteriorForm) -> Result<&mut Self, Error> {
        let i = self.inner.index(name)?;
        if d.frame() != self.inner.tag {
            return Err(Error::CoframeMismatch);
        }
        if d.degree() != 2 && !d.is_zero() {
            return Err(Error::Degree(format!("d({name}) must be a 2-form")));
        }
        self.inner.dtable[i] = if d.is_zero() { ExteriorForm::zero(self.inner.tag, 2) } else { d };
        Ok(self)
    }

    pub fn var_rule(&mut self, var: &str, d: ExteriorForm) -> Result<&mut Self, Error> {
        if d.frame() != self.inner.tag {
            return Err(Error::CoframeMismatch);
        }
        self.inner.varrules.insert(Var::new(var), d);
        Ok(self)
    }

    pub fn jets(&mut self, jets: JetSpace) -> &mut Self {
        self.inner.jets = Some(jets);
        self
    }

    pub fn parse(&self, text: &str) -> Result<ExteriorForm, Error> {
        super::text::parse_form(text, &self.inner)
    }

    pub fn build(self) -> Coframe {
        self.inner
    }
}

impl Coframe {
    pub fn builder<S: AsRef<str>>(names: &[S]) -> Result<CoframeBuilder, Error> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut lookup = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if lookup.insert(n.clone(), i).is_some() {
                return Err(Error::UnknownBasis(format!("duplicate basis name {n}")));
            }
        }
        let tag = FrameTag::of_names(&names);
        let dtable = vec![ExteriorForm::zero(tag, 2); names.len()];
        Ok(CoframeBuilder {
            inner: Coframe {
                names,
                lookup,
                tag,
                dtable,
                varrules: BTreeMap::new(),
                jets: None,
            },
        })
    }

    /// Coframe whose basis forms are all closed.
    pub fn closed<S: AsRef<str>>(names: &[S]) -> Result<Coframe, Error> {
        Ok(Coframe::builder(names)?.build())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn tag(&self) -> FrameTag {
        self.tag
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Result<usize, Error> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownBasis(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup.contains_key(name)
    }

    pub fn form(&self, name: &str) -> Result<ExteriorForm, Error> {
        Ok(ExteriorForm::basis(self.tag, self.index(name)?))
    }

    pub fn basis(&self, i: usize) -> ExteriorForm {
        ExteriorForm::basis(self.tag, i)
    }

    pub fn scalar(&self, p: Poly) -> ExteriorForm {
        ExteriorForm::scalar(self.tag, p)
    }

    /// `d(theta^i)` as stored in the structure table.
    pub fn d_basis(&self, i: usize) -> &ExteriorForm {
        &self.dtable[i]
    }

    pub fn jets(&self) -> Option<&JetSpace> {
        self.jets.as_ref()
    }

    pub fn parse(&self, text: &str) -> Result<ExteriorForm, Error> {
        super::text::parse_form(text, self)
    }

    pub fn render(&self, form: &ExteriorForm) -> String {
        super::text::render_form(form, self)
    }

    /// Copy of this coframe with one structure-table entry replaced.
    pub fn with_d(&self, name: &str, d: ExteriorForm) -> Result<Coframe, Error> {
        let i = self.index(name)?;
        if d.frame() != self.tag {
            return Err(Error::CoframeMismatch);
        }
        let mut out = self.clone();
        out.dtable[i] = d;
        Ok(out)
    }

    /// `d` of a polynomial function, through the variable rules.
    pub fn d_scalar(&self, f: &Poly) -> Result<ExteriorForm, Error> {
        let mut out = ExteriorForm::zero(self.tag, 1);
        for v in f.vars() {
            let dv = match self.varrules.get(&v) {
                Some(r) => r.clone(),
                None => self
                    .jets
                    .as_ref()
                    .and_then(|j| j.d_var(&v, self.tag))
                    .ok_or_else(|| Error::NonDifferentiable(v.to_string()))?,
            };
            out = out.add(&dv.scale(&f.derivative(&v)))?;
        }
        Ok(out)
    }

    /// Exterior derivative, by the Leibniz rule over coefficients and basis.
    pub fn d(&self, a: &ExteriorForm) -> Result<ExteriorForm, Error> {
        if a.frame() != self.tag {
            return Err(Error::CoframeMismatch);
        }
        let mut out = ExteriorForm::zero(self.tag, a.degree() + 1);
        for (key, f) in a.terms() {
            let idx: Vec<usize> = key.iter().map(|&i| i as usize).collect();
            if !f.is_constant() {
                let df = self.d_scalar(f)?;
                let basis = ExteriorForm::monomial(self.tag, &idx, Poly::one());
                out = out.add(&df.wedge(&basis)?)?;
            }
            for (pos, &i) in idx.iter().enumerate() {
                let dt = &self.dtable[i];
                if dt.is_zero() {
                    continue;
                }
                let left = ExteriorForm::monomial(self.tag, &idx[..pos], Poly::one());
                let right = ExteriorForm::monomial(self.tag, &idx[pos + 1..], Poly::one());
                let piece = left.wedge(dt)?.wedge(&right)?.scale(f);
                out = if pos % 2 == 0 { out.add(&piece)? } else { out.sub(&piece)? };
            }
        }
        Ok(out)
    }

    /// Basis forms whose `d(d theta)` fails to vanish, with the residue.
    pub fn d_squared_failures(&self) -> Result<Vec<(String, ExteriorForm)>, Error> {
        let mut bad = Vec::new();
        for i in 0..self.dim() {
            let dd = self.d(&self.dtable[i])?;
            if !dd.is_zero() {
                bad.push((self.names[i].clone(), dd));
            }
        }
        Ok(bad)
    }

    /// Checks the structure table: entries are 2-forms and `d^2 = 0` on
    /// every basis form.
    pub fn validate(&self) -> Result<(), Error> {
        for (i, d) in self.dtable.iter().enumerate() {
            if !d.is_zero() && d.degree() != 2 {
                return Err(Error::Degree(format!("d({}) is not a 2-form", self.names[i])));
            }
        }
        let bad = self.d_squared_failures()?;
        if let Some((name, res)) = bad.first() {
            return Err(Error::Integrability {
                form: name.clone(),
                residue: self.render(res),
            });
        }
        Ok(())
    }

    /// Deletes all terms containing a factor from `ideal` (basis names).
    pub fn reduce_mod<S: AsRef<str>>(&self, a: &ExteriorForm, ideal: &[S]) -> Result<ExteriorForm, Error> {
        if a.frame() != self.tag {
            return Err(Error::CoframeMismatch);
        }
        let idx = ideal
            .iter()
            .map(|n| {
                self.index(n.as_ref())
                    .map(|i| i as u16)
                    .map_err(|_| Error::BasisChange(format!("{} is not a basis form; adapt the coframe first", n.as_ref())))
            })
            .collect::<Result<BTreeSet<u16>, Error>>()?;
        Ok(a.drop_indices(&idx))
    }

    /// Terms keyed by the lexicographically sorted basis names. Two forms on
    /// coframes that differ only in basis order compare equal this way.
    pub fn named_terms(&self, a: &ExteriorForm) -> BTreeMap<Vec<String>, Poly> {
        let mut out = BTreeMap::new();
        for (key, p) in a.terms() {
            let mut pairs: Vec<(String, usize)> =
                key.iter().map(|&i| (self.names[i as usize].clone(), i as usize)).collect();
            // Sign of the permutation taking index order to name order.
            let mut sign = 1;
            for i in 1..pairs.len() {
                let mut j = i;
                while j > 0 && pairs[j - 1].0 > pairs[j].0 {
                    pairs.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            let names: Vec<String> = pairs.into_iter().map(|(n, _)| n).collect();
            out.insert(names, if sign < 0 { -p } else { p.clone() });
        }
        out
    }

    /// Linear change of basis. Each new basis form is given as a constant
    /// linear combination of the current ones; the structure table is carried
    /// over. Returns the new coframe and the transition data.
    pub fn change_basis(&self, new: &[(String, ExteriorForm)]) -> Result<(Coframe, BasisChange), Error> {
        let n = self.dim();
        if new.len() != n {
            return Err(Error::BasisChange(format!("need {n} forms, got {}", new.len())));
        }
        if self.jets.is_some() || !self.varrules.is_empty() {
            return Err(Error::BasisChange("coframes with variable rules cannot be re-based".into()));
        }
        let mut c = RatMatrix::zeros(n, n);
        for (row, (name, f)) in new.iter().enumerate() {
            if f.frame() != self.tag {
                return Err(Error::CoframeMismatch);
            }
            if f.degree() != 1 && !f.is_zero() {
                return Err(Error::BasisChange(format!("{name} is not a 1-form")));
            }
            for (key, p) in f.terms() {
                let v = p
                    .constant_value()
                    .ok_or_else(|| Error::BasisChange(format!("{name} has a non-constant coefficient")))?;
                c.set(row, key[0] as usize, v);
            }
        }
        let inv = c
            .inverse()
            .ok_or_else(|| Error::BasisChange("new forms are linearly dependent".into()))?;
        let names: Vec<&str> = new.iter().map(|(s, _)| s.as_str()).collect();
        let mut builder = Coframe::builder(&names)?;
        let new_tag = builder.tag();
        // Old basis forms expressed in the new basis.
        let old_in_new: Vec<ExteriorForm> = (0..n)
            .map(|j| {
                let mut f = ExteriorForm::zero(new_tag, 1);
                for k in 0..n {
                    let x = inv.get(j, k);
                    if !num_traits::Zero::is_zero(x) {
                        f.add_term(vec![k as u16], Poly::constant(x.clone()));
                    }
                }
                f
            })
            .collect();
        let change = BasisChange {
            old_tag: self.tag,
            new_tag,
            forward: c,
            inverse: inv,
            old_in_new,
            new_in_old: new.iter().map(|(_, f)| f.clone()).collect(),
        };
        for (name, f) in new {
            let mut d_old = ExteriorForm::zero(self.tag, 2);
            for (key, p) in f.terms() {
                d_old = d_old.add(&self.dtable[key[0] as usize].scale(p))?;
            }
            builder.set_d(name, change.to_new(&d_old)?)?;
        }
        Ok((builder.build(), change))
    }
}

/// Transition data between two bases of the same space of 1-forms:
/// `new^i = sum_j forward[i][j] old^j`.
#[derive(Clone, Debug)]
pub struct BasisChange {
    old_tag: FrameTag,
    new_tag: FrameTag,
    forward: RatMatrix,
    inverse: RatMatrix,
    old_in_new: Vec<ExteriorForm>,
    new_in_old: Vec<ExteriorForm>,
}

impl BasisChange {
    fn transport(form: &ExteriorForm, images: &[ExteriorForm], tag: FrameTag) -> Result<ExteriorForm, Error> {
        let mut out = ExteriorForm::zero(tag, form.degree());
        for (key, p) in form.terms() {
            let mut t = ExteriorForm::scalar(tag, p.clone());
            for &i in key {
                t = t.wedge(&images[i as usize])?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    pub fn to_new(&self, form: &ExteriorForm) -> Result<ExteriorForm, Error> {
        if form.frame() != self.old_tag {
            return Err(Error::CoframeMismatch);
        }
        Self::transport(form, &self.old_in_new, self.new_tag)
    }

    pub fn to_old(&self, form: &ExteriorForm) -> Result<ExteriorForm, Error> {
        if form.frame() != self.new_tag {
            return Err(Error::CoframeMismatch);
        }
        Self::transport(form, &self.new_in_old, self.old_tag)
    }

    /// Components of a tangent vector in the new dual basis.
    pub fn vector_to_new(&self, v: &[Rational]) -> Vec<Rational> {
        self.forward.mul_vec(v)
    }

    pub fn vector_to_old(&self, v: &[Rational]) -> Vec<Rational> {
        self.inverse.mul_vec(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Coframe {
        let mut b = Coframe::builder(&["dx", "dy"]).unwrap();
        b.jets(JetSpace::new(vec![('x', 0), ('y', 1)], &["k", "u"]));
        b.build()
    }

    #[test]
    fn d_of_constant_multiple_of_closed_form() {
        let cf = Coframe::closed(&["t1", "t2"]).unwrap();
        let f = cf.basis(0).scale(&Poly::int(3));
        assert!(cf.d(&f).unwrap().is_zero());
    }

    #[test]
    fn jet_rules_and_mixed_partials() {
        let cf = plane();
        let dk = cf.d(&cf.scalar(Poly::var("k"))).unwrap();
        assert_eq!(cf.render(&dk), "k_x*dx + k_y*dy");
        let ddk = cf.d(&dk).unwrap();
        assert!(ddk.is_zero(), "{}", cf.render(&ddk));
        let d_ky = cf.d_scalar(&Poly::var("k_y")).unwrap();
        assert_eq!(cf.render(&d_ky), "k_xy*dx + k_yy*dy");
    }

    #[test]
    fn undeclared_variable_is_not_differentiable() {
        let cf = plane();
        let err = cf.d(&cf.scalar(Poly::var("zeta"))).unwrap_err();
        assert!(matches!(err, Error::NonDifferentiable(v) if v == "zeta"));
        // constants are fine
        assert!(cf.d(&cf.scalar(Poly::int(4))).unwrap().is_zero());
    }

    #[test]
    fn reduce_mod_is_projection() {
        let cf = Coframe::closed(&["e1", "a1", "a2"]).unwrap();
        let f = cf.parse("e1∧a1 + a1∧a2").unwrap();
        let r = cf.reduce_mod(&f, &["e1"]).unwrap();
        assert_eq!(cf.render(&r), "a1∧a2");
        assert_eq!(cf.reduce_mod(&r, &["e1"]).unwrap(), r);
        assert!(cf.reduce_mod(&f, &["nope"]).is_err());
    }

    #[test]
    fn basis_change_round_trip() {
        // Heisenberg-type coframe: d t3 = t1 ^ t2.
        let mut b = Coframe::builder(&["t1", "t2", "t3"]).unwrap();
        let d3 = b.parse("t1∧t2").unwrap();
        b.set_d("t3", d3).unwrap();
        let cf = b.build();
        let new = vec![
            ("s1".to_string(), cf.parse("t1 + t2").unwrap()),
            ("s2".to_string(), cf.parse("t2").unwrap()),
            ("s3".to_string(), cf.parse("2*t3 - t1").unwrap()),
        ];
        let (ncf, ch) = cf.change_basis(&new).unwrap();
        ncf.validate().unwrap();
        // d s3 = 2 t1^t2 = 2 (s1 - s2)^s2 = 2 s1^s2
        assert_eq!(ncf.render(ncf.d_basis(2)), "2*s1∧s2");
        let f = cf.parse("t1∧t3").unwrap();
        assert_eq!(ch.to_old(&ch.to_new(&f).unwrap()).unwrap(), f);
    }
}
