//! Polynomials over `K` in the entries `z_ij` and, as independent symbols, `zbar_ij`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::cmfield::{int, FieldElement, QuadField};
use crate::matrix::Matrix;

/// A coordinate on `n x n` matrices; indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Z(u8, u8),
    Zbar(u8, u8),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(i, j) => write!(f, "z{}{}", i + 1, j + 1),
            Var::Zbar(i, j) => write!(f, "zb{}{}", i + 1, j + 1),
        }
    }
}

/// Sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut acc: BTreeMap<Var, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().collect())
    }

    /// `d/dv`: the lowered monomial and the exponent that falls out.
    fn differentiate(&self, v: Var) -> Option<(Monomial, u32)> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(self.0.len());
        for &(w, k) in &self.0 {
            if w == v {
                if k > 1 {
                    out.push((w, k - 1));
                }
            } else {
                out.push((w, k));
            }
        }
        Some((Monomial(out), e))
    }
}

/// A polynomial with `K` coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    field: QuadField,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl Poly {
    pub fn zero(field: QuadField) -> Self {
        Poly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElement) -> Self {
        let mut p = Poly::zero(c.field());
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Var, field: QuadField) -> Self {
        let mut p = Poly::zero(field);
        p.add_term(Monomial::var(v), field.one());
        p
    }

    pub fn z(i: usize, j: usize, field: QuadField) -> Self {
        Poly::var(Var::Z(i as u8, j as u8), field)
    }

    pub fn zbar(i: usize, j: usize, field: QuadField) -> Self {
        Poly::var(Var::Zbar(i as u8, j as u8), field)
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &FieldElement) -> Poly {
        let mut out = Poly::zero(self.field);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero(self.field);
        for (m, c) in &self.terms {
            if let Some((m2, e)) = m.differentiate(v) {
                out.add_term(m2, c.scale(&int(e as i64)));
            }
        }
        out
    }

    /// Value at `z`, with `zbar_ij` read as the conjugate of `z_ij`.
    pub fn eval(&self, z: &Matrix) -> FieldElement {
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = match v {
                    Var::Z(i, j) => z.get(i as usize, j as usize).clone(),
                    Var::Zbar(i, j) => z.get(i as usize, j as usize).conj(),
                };
                t *= &x.pow(e);
            }
            acc += &t;
        }
        acc
    }

    /// A random polynomial with small Gaussian-integer coefficients.
    pub fn random<R: Rng>(n: usize, field: QuadField, terms: usize, max_degree: u32, with_conj: bool, rng: &mut R) -> Poly {
        let mut out = Poly::zero(field);
        for _ in 0..terms {
            let mut m = Monomial::one();
            for _ in 0..rng.gen_range(0..=max_degree) {
                let (i, j) = (rng.gen_range(0..n) as u8, rng.gen_range(0..n) as u8);
                let v = if with_conj && rng.gen_bool(0.3) { Var::Zbar(i, j) } else { Var::Z(i, j) };
                m = m.mul(&Monomial::var(v));
            }
            out.add_term(m, field.gaussian(rng.gen_range(-4..=4), rng.gen_range(-4..=4)));
        }
        out
    }

    /// Largest variable index appearing, plus one.
    pub fn dimension_hint(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter())
            .map(|(v, _)| match v {
                Var::Z(i, j) | Var::Zbar(i, j) => (*i.max(j)) as usize + 1,
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .factors()
                    .iter()
                    .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                    .collect();
                if vars.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_a_sample() {
        let k = QuadField::new(2).unwrap();
        let x = Poly::z(0, 0, k);
        let y = Poly::z(0, 1, k);
        let f = x.mul(&x).add(&y.scale(&k.gaussian(1, 3)));
        let g = x.mul(&y).add(&Poly::constant(k.int(5)));
        let v = Var::Z(0, 0);
        let lhs = f.mul(&g).derivative(v);
        let rhs = f.derivative(v).mul(&g).add(&f.mul(&g.derivative(v)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugate_variable_is_independent() {
        let k = QuadField::new(1).unwrap();
        let p = Poly::z(0, 0, k).mul(&Poly::zbar(0, 0, k));
        assert_eq!(p.derivative(Var::Z(0, 0)), Poly::zbar(0, 0, k));
        let z = Matrix::scalar(1, &k.gaussian(1, 2));
        assert_eq!(p.eval(&z), k.int(5));
    }
}
