//! Truncated vector-valued q-expansions `sum_h c(h) q^h` over the nonnegative
//! cone of the dual lattice.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::cmfield::{padic_valuation, ElementRepr, FieldElement, QuadField, Rational, SplitPrimeData, Valuation};
use crate::error::{Error, Result};
use crate::hermidx::{dual_membership, is_psd, trace_pair, HermitianIndex};
use crate::matrix::Matrix;
use crate::weights::{TensorCoefficient, TermRepr};

/// A q-expansion truncated at `tr(h) <= trace_bound`, homogeneous of tensor degree `(d-, d+)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    n: usize,
    field: QuadField,
    trace_bound: u32,
    degree: (usize, usize),
    commutative: bool,
    coefficients: BTreeMap<HermitianIndex, TensorCoefficient>,
}

impl QExpansion {
    pub fn zero(n: usize, field: QuadField, trace_bound: u32, degree: (usize, usize)) -> Self {
        QExpansion {
            n,
            field,
            trace_bound,
            degree,
            commutative: false,
            coefficients: BTreeMap::new(),
        }
    }

    /// The scalar series `c`.
    pub fn constant(n: usize, c: FieldElement, trace_bound: u32) -> Self {
        let field = c.field();
        let mut f = Self::zero(n, field, trace_bound, (0, 0));
        f.accumulate(HermitianIndex::zero(n, field), TensorCoefficient::scalar(c));
        f
    }

    /// The scalar series `c q^h`.
    pub fn monomial(h: HermitianIndex, c: FieldElement, trace_bound: u32) -> Result<Self> {
        let mut f = Self::zero(h.n(), h.field(), trace_bound, (0, 0));
        f.insert(h, TensorCoefficient::scalar(c))?;
        Ok(f)
    }

    /// Builds an `n = 1` scalar series from integer coefficients of `q^0, q^1, ...`.
    pub fn from_integers(field: QuadField, coeffs: &[i64], trace_bound: u32) -> Result<Self> {
        let mut f = Self::zero(1, field, trace_bound, (0, 0));
        for (m, &c) in coeffs.iter().enumerate() {
            if c != 0 && m as u32 <= trace_bound {
                f.insert(HermitianIndex::diagonal(&[m as i64], field), TensorCoefficient::scalar(field.int(c)))?;
            }
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn d(&self) -> i64 {
        self.field.d()
    }

    pub fn trace_bound(&self) -> u32 {
        self.trace_bound
    }

    pub fn degree(&self) -> (usize, usize) {
        self.degree
    }

    /// Whether coefficients are read in the commutative polynomial quotient.
    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn into_commutative(mut self) -> Self {
        self.commutative = true;
        let coeffs = std::mem::take(&mut self.coefficients);
        for (h, c) in coeffs {
            let c = c.commutative_image();
            if !c.is_zero() {
                self.coefficients.insert(h, c);
            }
        }
        self
    }

    pub fn is_scalar(&self) -> bool {
        self.degree == (0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &BTreeMap<HermitianIndex, TensorCoefficient> {
        &self.coefficients
    }

    pub fn coefficient(&self, h: &HermitianIndex) -> Option<&TensorCoefficient> {
        self.coefficients.get(h)
    }

    /// The scalar coefficient at `h` (zero when absent); only meaningful for degree `(0, 0)`.
    pub fn scalar_coefficient(&self, h: &HermitianIndex) -> FieldElement {
        self.coefficients
            .get(h)
            .and_then(|c| c.scalar_part().cloned())
            .unwrap_or_else(|| self.field.zero())
    }

    fn check_index(&self, h: &HermitianIndex) -> Result<()> {
        if h.n() != self.n || h.field() != self.field {
            return Err(Error::Validation(format!(
                "index of size {} over d={} in a series with n={} d={}",
                h.n(),
                h.field().d(),
                self.n,
                self.d()
            )));
        }
        if !dual_membership(h) {
            return Err(Error::Validation(format!("index {h} is not in the dual lattice")));
        }
        if !is_psd(h) {
            return Err(Error::Validation(format!("index {h} is not nonnegative definite")));
        }
        Ok(())
    }

    fn within_bound(&self, h: &HermitianIndex) -> bool {
        h.trace() <= Rational::from_integer(self.trace_bound.into())
    }

    /// Adds `c` to the coefficient at `h`; terms beyond the trace bound are dropped.
    pub fn insert(&mut self, h: HermitianIndex, c: TensorCoefficient) -> Result<()> {
        self.check_index(&h)?;
        if !c.is_homogeneous_of(self.degree) {
            return Err(Error::Validation(format!(
                "coefficient at {h} does not have word lengths {:?}",
                self.degree
            )));
        }
        if !self.within_bound(&h) {
            return Ok(());
        }
        let c = if self.commutative { c.commutative_image() } else { c };
        self.accumulate(h, c);
        Ok(())
    }

    fn accumulate(&mut self, h: HermitianIndex, c: TensorCoefficient) {
        if c.is_zero() {
            return;
        }
        let slot = self.coefficients.entry(h.clone()).or_default();
        slot.add_assign(&c);
        if slot.is_zero() {
            self.coefficients.remove(&h);
        }
    }

    /// Checks every stored invariant.
    pub fn validate(&self) -> Result<()> {
        for (h, c) in &self.coefficients {
            self.check_index(h)?;
            if !self.within_bound(h) {
                return Err(Error::Validation(format!("index {h} exceeds trace bound {}", self.trace_bound)));
            }
            if c.is_zero() {
                return Err(Error::Validation(format!("zero coefficient stored at {h}")));
            }
            if !c.is_homogeneous_of(self.degree) {
                return Err(Error::Validation(format!(
                    "coefficient at {h} does not have word lengths {:?}",
                    self.degree
                )));
            }
            if self.commutative && !c.is_commutative_normal() {
                return Err(Error::Validation(format!("unsorted word at {h} in a commutative series")));
            }
        }
        Ok(())
    }

    /// Same data under a smaller trace bound.
    pub fn truncate(&self, bound: u32) -> QExpansion {
        let mut out = self.clone();
        out.trace_bound = bound.min(self.trace_bound);
        let b = Rational::from_integer(out.trace_bound.into());
        out.coefficients.retain(|h, _| h.trace() <= b);
        out
    }

    /// Applies `f` to every coefficient, keeping the index; the new degree must be supplied.
    pub fn map_coefficients(
        &self,
        degree: (usize, usize),
        mut f: impl FnMut(&HermitianIndex, &TensorCoefficient) -> TensorCoefficient,
    ) -> QExpansion {
        let mut out = QExpansion::zero(self.n, self.field, self.trace_bound, degree);
        out.commutative = self.commutative;
        for (h, c) in &self.coefficients {
            let v = f(h, c);
            let v = if out.commutative { v.commutative_image() } else { v };
            debug_assert!(v.is_homogeneous_of(degree));
            out.accumulate(h.clone(), v);
        }
        out
    }

    fn same_shape(&self, other: &QExpansion) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::Shape(format!(
                "series over (n={}, d={}) and (n={}, d={})",
                self.n,
                self.d(),
                other.n,
                other.d()
            )));
        }
        Ok(())
    }
}

/// `f + a g`, truncated at the smaller bound.
pub fn add_scale(f: &QExpansion, g: &QExpansion, a: &FieldElement) -> Result<QExpansion> {
    f.same_shape(g)?;
    if f.degree != g.degree {
        return Err(Error::Shape(format!("degrees {:?} and {:?} differ", f.degree, g.degree)));
    }
    let mut out = f.truncate(f.trace_bound.min(g.trace_bound));
    out.commutative = f.commutative || g.commutative;
    for (h, c) in &g.coefficients {
        if out.within_bound(h) {
            let c = c.scale(a);
            let c = if out.commutative { c.commutative_image() } else { c };
            out.accumulate(h.clone(), c);
        }
    }
    Ok(out)
}

/// Cauchy product; tensor coefficients multiply in the commutative quotient.
pub fn multiply(f: &QExpansion, g: &QExpansion) -> Result<QExpansion> {
    f.same_shape(g)?;
    let allowed = |s: &QExpansion| s.is_scalar() || s.commutative;
    if !allowed(f) || !allowed(g) {
        return Err(Error::Unsupported(
            "products are only defined in the commutative quotient; mark the series commutative".into(),
        ));
    }
    let degree = (f.degree.0 + g.degree.0, f.degree.1 + g.degree.1);
    let mut out = QExpansion::zero(f.n, f.field, f.trace_bound.min(g.trace_bound), degree);
    out.commutative = f.commutative || g.commutative;
    for (h1, c1) in &f.coefficients {
        if !out.within_bound(h1) {
            continue;
        }
        for (h2, c2) in &g.coefficients {
            let h = h1.add(h2);
            if out.within_bound(&h) {
                out.accumulate(h, c1.commutative_mul(c2));
            }
        }
    }
    Ok(out)
}

/// `D(gamma)`: multiplies the coefficient at `h` by `tr(h gamma)`.
pub fn derivation_d(gamma: &Matrix, f: &QExpansion) -> Result<QExpansion> {
    if gamma.rows() != f.n || gamma.cols() != f.n {
        return Err(Error::Shape(format!(
            "gamma is {}x{} for a series with n={}",
            gamma.rows(),
            gamma.cols(),
            f.n
        )));
    }
    if gamma.field() != f.field {
        return Err(Error::Parameter("gamma and series live over different fields".into()));
    }
    Ok(f.map_coefficients(f.degree, |h, c| c.scale(&trace_pair(h, gamma))))
}

/// `f(q) -> f(q^p)`; the output bound defaults to `p` times the input bound.
pub fn frobenius(f: &QExpansion, p: u64, new_bound: Option<u32>) -> Result<QExpansion> {
    if p == 0 {
        return Err(Error::Parameter("frobenius needs p >= 1".into()));
    }
    let p32 = u32::try_from(p).map_err(|_| Error::Parameter(format!("p={p} too large")))?;
    let bound = match new_bound {
        Some(b) => b,
        None => f
            .trace_bound
            .checked_mul(p32)
            .ok_or_else(|| Error::Parameter("trace bound overflow".into()))?,
    };
    let mut out = QExpansion::zero(f.n, f.field, bound, f.degree);
    out.commutative = f.commutative;
    for (h, c) in &f.coefficients {
        let ph = h.scale_int(p as i64);
        if out.within_bound(&ph) {
            out.coefficients.insert(ph, c.clone());
        }
    }
    Ok(out)
}

/// True iff every coefficient entry has nonnegative valuation at `v`.
pub fn padic_integral(f: &QExpansion, v: &SplitPrimeData) -> Result<bool> {
    for c in f.coefficients.values() {
        for (_, _, a) in c.iter() {
            if let Valuation::Finite(k) = padic_valuation(a, v)? {
                if k < 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Largest `|tr h|` index present; used by callers sizing enumerations.
pub fn max_trace(f: &QExpansion) -> Rational {
    f.coefficients
        .keys()
        .map(|h| h.trace().abs())
        .max()
        .unwrap_or_else(|| Rational::from_integer(0.into()))
}

/// JSON wire form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QExpansionRepr {
    pub n: usize,
    pub d: i64,
    pub trace_bound: u32,
    pub degree: [usize; 2],
    #[serde(default, skip_serializing_if = "is_false")]
    pub commutative: bool,
    pub coefficients: Vec<CoefficientRepr>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRepr {
    pub h: Vec<Vec<ElementRepr>>,
    pub c: Vec<TermRepr>,
}

impl QExpansion {
    pub fn to_repr(&self) -> QExpansionRepr {
        QExpansionRepr {
            n: self.n,
            d: self.d(),
            trace_bound: self.trace_bound,
            degree: [self.degree.0, self.degree.1],
            commutative: self.commutative,
            coefficients: self
                .coefficients
                .iter()
                .map(|(h, c)| CoefficientRepr {
                    h: h.to_repr(),
                    c: c.to_repr(),
                })
                .collect(),
        }
    }

    /// Parses and validates; rejects indices outside the cone, wrong word lengths,
    /// repeated indices and terms beyond the trace bound.
    pub fn from_repr(r: QExpansionRepr) -> Result<QExpansion> {
        let field = QuadField::new(r.d)?;
        if r.n == 0 {
            return Err(Error::Validation("n must be positive".into()));
        }
        let mut out = QExpansion::zero(r.n, field, r.trace_bound, (r.degree[0], r.degree[1]));
        out.commutative = r.commutative;
        for entry in r.coefficients {
            if entry.h.len() != r.n || entry.h.iter().any(|row| row.len() != r.n) {
                return Err(Error::Validation(format!("index is not {}x{}", r.n, r.n)));
            }
            let h = HermitianIndex::from_repr(entry.h, field)?;
            out.check_index(&h)?;
            if !out.within_bound(&h) {
                return Err(Error::Validation(format!("index {h} exceeds trace bound {}", r.trace_bound)));
            }
            if out.coefficients.contains_key(&h) {
                return Err(Error::Validation(format!("index {h} listed twice")));
            }
            for t in &entry.c {
                if !t.wm.in_range(r.n) || !t.wp.in_range(r.n) {
                    return Err(Error::Validation(format!("letter out of range 1..{} at {h}", r.n)));
                }
                if (t.wm.len(), t.wp.len()) != out.degree {
                    return Err(Error::Validation(format!(
                        "word lengths ({}, {}) at {h}, expected {:?}",
                        t.wm.len(),
                        t.wp.len(),
                        out.degree
                    )));
                }
            }
            let c = TensorCoefficient::from_repr(entry.c, field);
            let c = if out.commutative { c.commutative_image() } else { c };
            if !c.is_zero() {
                out.coefficients.insert(h, c);
            }
        }
        Ok(out)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_repr()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<QExpansion> {
        let r: QExpansionRepr =
            serde_json::from_str(s).map_err(|e| Error::Validation(format!("malformed q-expansion: {e}")))?;
        QExpansion::from_repr(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmfield::{rat, split_prime_data};
    use crate::weights::TensorWord;

    fn k1() -> QuadField {
        QuadField::new(1).unwrap()
    }

    #[test]
    fn add_scale_examples() {
        let k = k1();
        let f = QExpansion::from_integers(k, &[1, 2, 3], 4).unwrap();
        let g = QExpansion::from_integers(k, &[0, 5], 4).unwrap();
        assert_eq!(add_scale(&f, &g, &k.zero()).unwrap(), f);
        assert!(add_scale(&f, &f, &k.int(-1)).unwrap().is_zero());
        let h = HermitianIndex::diagonal(&[2], k);
        let m = QExpansion::monomial(h.clone(), k.one(), 4).unwrap();
        let s = add_scale(&m, &m, &k.one()).unwrap();
        assert_eq!(s.scalar_coefficient(&h), k.int(2));
    }

    #[test]
    fn add_scale_rejects_degree_mismatch() {
        let k = k1();
        let f = QExpansion::from_integers(k, &[1], 2).unwrap();
        let mut g = QExpansion::zero(1, k, 2, (1, 1));
        g.insert(
            HermitianIndex::diagonal(&[1], k),
            TensorCoefficient::term(TensorWord(vec![1]), TensorWord(vec![1]), k.one()),
        )
        .unwrap();
        assert!(matches!(add_scale(&f, &g, &k.one()), Err(Error::Shape(_))));
    }

    #[test]
    fn multiply_examples() {
        let k = k1();
        let one_plus_q = QExpansion::from_integers(k, &[1, 1], 5).unwrap();
        let sq = multiply(&one_plus_q, &one_plus_q).unwrap();
        assert_eq!(sq, QExpansion::from_integers(k, &[1, 2, 1], 5).unwrap());
        let one = QExpansion::constant(1, k.one(), 5);
        assert_eq!(multiply(&one_plus_q, &one).unwrap(), one_plus_q);

        let h1 = HermitianIndex::new(Matrix::from_gaussian(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]], k)).unwrap();
        let h2 = HermitianIndex::new(Matrix::from_rows(vec![
            vec![k.int(1), k.elem(rat(1, 2), rat(1, 2))],
            vec![k.elem(rat(1, 2), rat(-1, 2)), k.int(1)],
        ]).unwrap())
        .unwrap();
        let a = QExpansion::monomial(h1.clone(), k.one(), 4).unwrap();
        let b = QExpansion::monomial(h2.clone(), k.one(), 4).unwrap();
        let ab = multiply(&a, &b).unwrap();
        assert_eq!(ab.coefficients().len(), 1);
        assert_eq!(ab.scalar_coefficient(&h1.add(&h2)), k.one());
    }

    #[test]
    fn multiply_refuses_free_algebra() {
        let k = k1();
        let mut g = QExpansion::zero(1, k, 2, (1, 1));
        g.insert(
            HermitianIndex::diagonal(&[1], k),
            TensorCoefficient::term(TensorWord(vec![1]), TensorWord(vec![1]), k.one()),
        )
        .unwrap();
        assert!(matches!(multiply(&g, &g), Err(Error::Unsupported(_))));
        let gc = g.into_commutative();
        let sq = multiply(&gc, &gc).unwrap();
        assert_eq!(sq.degree(), (2, 2));
    }

    #[test]
    fn derivation_examples() {
        let k = k1();
        let f = QExpansion::from_integers(k, &[7, 1, 3, 2], 3).unwrap();
        assert!(derivation_d(&Matrix::zeros(1, 1, k), &f).unwrap().is_zero());
        let df = derivation_d(&Matrix::identity(1, k), &f).unwrap();
        assert_eq!(df, QExpansion::from_integers(k, &[0, 1, 6, 6], 3).unwrap());
        let h = HermitianIndex::diagonal(&[2, 1], k);
        let m = QExpansion::monomial(h.clone(), k.one(), 5).unwrap();
        let dm = derivation_d(&Matrix::unit(2, 0, 0, k), &m).unwrap();
        assert_eq!(dm.scalar_coefficient(&h), k.int(2));
    }

    #[test]
    fn frobenius_examples() {
        let k = k1();
        let one = QExpansion::constant(1, k.one(), 3);
        assert_eq!(frobenius(&one, 3, None).unwrap().coefficients(), one.coefficients());
        let f = QExpansion::from_integers(k, &[1, 1], 3).unwrap();
        let ff = frobenius(&f, 3, None).unwrap();
        assert_eq!(ff, QExpansion::from_integers(k, &[1, 0, 0, 1], 9).unwrap());
        let m = QExpansion::monomial(HermitianIndex::diagonal(&[1, 0], k), k.one(), 2).unwrap();
        let fm = frobenius(&m, 2, None).unwrap();
        assert_eq!(fm.scalar_coefficient(&HermitianIndex::diagonal(&[2, 0], k)), k.one());
        assert_eq!(fm.coefficients().len(), 1);
    }

    #[test]
    fn integrality_examples() {
        let k = k1();
        let v = split_prime_data(5, 1, 4).unwrap();
        let f = QExpansion::from_integers(k, &[1, -3, 8], 2).unwrap();
        assert!(padic_integral(&f, &v).unwrap());
        let g = QExpansion::monomial(HermitianIndex::diagonal(&[1], k), k.rational(rat(1, 5)), 2).unwrap();
        assert!(!padic_integral(&g, &v).unwrap());
        let c = k.elem(rat(2, 5), rat(-1, 5));
        let g = QExpansion::monomial(HermitianIndex::diagonal(&[1], k), c, 2).unwrap();
        assert!(padic_integral(&g, &v).unwrap());
        assert!(!padic_integral(&g, &v.conjugate()).unwrap());
    }

    #[test]
    fn validator_rejects_bad_input() {
        let bad_hermitian = r#"{"n":2,"d":1,"trace_bound":4,"degree":[0,0],"coefficients":[
            {"h":[[["1","0"],["1","0"]],[["0","0"],["1","0"]]],"c":[{"wm":[],"wp":[],"c":["1","0"]}]}]}"#;
        assert!(QExpansion::from_json_str(bad_hermitian).is_err());
        let not_dual = r#"{"n":1,"d":1,"trace_bound":4,"degree":[0,0],"coefficients":[
            {"h":[[["1/2","0"]]],"c":[{"wm":[],"wp":[],"c":["1","0"]}]}]}"#;
        assert!(QExpansion::from_json_str(not_dual).is_err());
        let not_psd = r#"{"n":1,"d":1,"trace_bound":4,"degree":[0,0],"coefficients":[
            {"h":[[["-1","0"]]],"c":[{"wm":[],"wp":[],"c":["1","0"]}]}]}"#;
        assert!(QExpansion::from_json_str(not_psd).is_err());
        let wrong_len = r#"{"n":1,"d":1,"trace_bound":4,"degree":[1,1],"coefficients":[
            {"h":[[["1","0"]]],"c":[{"wm":[1],"wp":[],"c":["1","0"]}]}]}"#;
        assert!(QExpansion::from_json_str(wrong_len).is_err());
        let fine = r#"{"n":1,"d":1,"trace_bound":4,"degree":[1,1],"coefficients":[
            {"h":[[["1","0"]]],"c":[{"wm":[1],"wp":[1],"c":["1","0"]}]}]}"#;
        assert!(QExpansion::from_json_str(fine).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let k = QuadField::new(3).unwrap();
        let mut f = QExpansion::zero(2, k, 3, (1, 0));
        let h = HermitianIndex::new(Matrix::from_rows(vec![
            vec![k.int(1), k.elem(rat(1, 2), rat(1, 6))],
            vec![k.elem(rat(1, 2), rat(-1, 6)), k.int(2)],
        ]).unwrap())
        .unwrap();
        f.insert(h, TensorCoefficient::term(TensorWord(vec![2]), TensorWord::empty(), k.elem(rat(3, 7), rat(-1, 1))))
            .unwrap();
        let text = serde_json::to_string(&f.to_repr()).unwrap();
        let back = QExpansion::from_json_str(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back.to_repr()).unwrap(), text);
    }
}
