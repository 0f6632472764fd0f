//! Maass-Shimura operators.
//!
//! For `n = 1` a nearly holomorphic form is a polynomial in
//! `Y = (2 pi i (z - zbar))^{-1}` with q-expansion coefficients, and the operator
//! (divided by `2 pi i`) is `delta_k = q d/dq + k Y - Y^2 d/dY`.
//! For general `n` the closed formulas for the standard, symmetric and
//! determinant weights are evaluated exactly at points of `H_n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cmfield::{int, rat, ElementRepr, FieldElement, QuadField};
use crate::error::{Error, Result};
use crate::gmks::{DuForm, DuVector, PointOfHn};
use crate::hermidx::{integral_trace, HermitianIndex};
use crate::matrix::Matrix;
use crate::poly::{Poly, Var};
use crate::qexp::QExpansion;
use crate::weights::{permutation_sign, permutations};

/// `sum c(a, m) Y^a q^m` of weight `k`, truncated at `m <= trace_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearlyHoloForm {
    k: i64,
    field: QuadField,
    trace_bound: u32,
    coeffs: BTreeMap<(u32, u32), FieldElement>,
}

impl NearlyHoloForm {
    pub fn zero(k: i64, field: QuadField, trace_bound: u32) -> Self {
        NearlyHoloForm {
            k,
            field,
            trace_bound,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn weight(&self) -> i64 {
        self.k
    }

    pub fn with_weight(mut self, k: i64) -> Self {
        self.k = k;
        self
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn trace_bound(&self) -> u32 {
        self.trace_bound
    }

    pub fn y_degree(&self) -> u32 {
        self.coeffs.keys().map(|(a, _)| *a).max().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), FieldElement> {
        &self.coeffs
    }

    pub fn coeff(&self, y: u32, m: u32) -> FieldElement {
        self.coeffs.get(&(y, m)).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `c Y^y q^m`; terms with `m` beyond the bound are dropped.
    pub fn add_term(&mut self, y: u32, m: u32, c: FieldElement) {
        if c.is_zero() || m > self.trace_bound {
            return;
        }
        match self.coeffs.get_mut(&(y, m)) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.coeffs.remove(&(y, m));
                }
            }
            None => {
                self.coeffs.insert((y, m), c);
            }
        }
    }

    /// The `Y`-free form attached to an `n = 1` scalar q-expansion.
    pub fn from_qexp(f: &QExpansion, k: i64) -> Result<Self> {
        if f.n() != 1 || !f.is_scalar() {
            return Err(Error::Shape("nearly holomorphic forms need an n=1 scalar q-expansion".into()));
        }
        let mut out = NearlyHoloForm::zero(k, f.field(), f.trace_bound());
        for (h, c) in f.coefficients() {
            let m = integral_trace(h).ok_or_else(|| Error::Validation(format!("index {h} is not integral")))?;
            if let Some(v) = c.scalar_part() {
                out.add_term(0, m as u32, v.clone());
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &NearlyHoloForm) -> Result<NearlyHoloForm> {
        if self.k != other.k || self.field != other.field {
            return Err(Error::Shape(format!("weights {} and {} differ", self.k, other.k)));
        }
        let mut out = NearlyHoloForm::zero(self.k, self.field, self.trace_bound.min(other.trace_bound));
        for ((y, m), c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(*y, *m, c.clone());
        }
        Ok(out)
    }

    /// Product; weights add.
    pub fn mul(&self, other: &NearlyHoloForm) -> Result<NearlyHoloForm> {
        if self.field != other.field {
            return Err(Error::Parameter("forms over different fields".into()));
        }
        let bound = self.trace_bound.min(other.trace_bound);
        let mut out = NearlyHoloForm::zero(self.k + other.k, self.field, bound);
        for ((y1, m1), c1) in &self.coeffs {
            for ((y2, m2), c2) in &other.coeffs {
                if m1 + m2 <= bound {
                    out.add_term(y1 + y2, m1 + m2, c1 * c2);
                }
            }
        }
        Ok(out)
    }
}

/// `delta_k f = q df/dq + k Y f - Y^2 df/dY`, of weight `k + 2`.
pub fn delta(f: &NearlyHoloForm) -> NearlyHoloForm {
    let mut out = NearlyHoloForm::zero(f.k + 2, f.field, f.trace_bound);
    for (&(a, m), c) in &f.coeffs {
        out.add_term(a, m, c.scale(&int(m as i64)));
        out.add_term(a + 1, m, c.scale(&int(f.k - a as i64)));
    }
    out
}

pub fn delta_iterate(f: &NearlyHoloForm, e: usize) -> Result<NearlyHoloForm> {
    if e == 0 {
        return Err(Error::Parameter("iterate count must be positive".into()));
    }
    let mut g = delta(f);
    for _ in 1..e {
        g = delta(&g);
    }
    Ok(g)
}

/// The `Y^0` slice as an `n = 1` scalar q-expansion.
pub fn holomorphic_part(f: &NearlyHoloForm) -> QExpansion {
    let mut out = QExpansion::zero(1, f.field, f.trace_bound, (0, 0));
    for (&(a, m), c) in &f.coeffs {
        if a == 0 {
            out.insert(
                HermitianIndex::diagonal(&[m as i64], f.field),
                crate::weights::TensorCoefficient::scalar(c.clone()),
            )
            .expect("diagonal nonnegative integer index");
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NearlyHoloTermRepr {
    pub y: u32,
    pub m: u32,
    pub c: ElementRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NearlyHoloFormRepr {
    pub k: i64,
    pub d: i64,
    pub trace_bound: u32,
    pub coeffs: Vec<NearlyHoloTermRepr>,
}

impl NearlyHoloForm {
    pub fn to_repr(&self) -> NearlyHoloFormRepr {
        NearlyHoloFormRepr {
            k: self.k,
            d: self.field.d(),
            trace_bound: self.trace_bound,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(y, m), c)| NearlyHoloTermRepr {
                    y,
                    m,
                    c: ElementRepr::of(c),
                })
                .collect(),
        }
    }

    pub fn from_repr(r: NearlyHoloFormRepr) -> Result<Self> {
        let field = QuadField::new(r.d)?;
        let mut out = NearlyHoloForm::zero(r.k, field, r.trace_bound);
        for t in r.coeffs {
            if t.m > r.trace_bound {
                return Err(Error::Validation(format!("q-exponent {} exceeds trace bound {}", t.m, r.trace_bound)));
            }
            if out.coeffs.contains_key(&(t.y, t.m)) {
                return Err(Error::Validation(format!("term Y^{} q^{} listed twice", t.y, t.m)));
            }
            out.add_term(t.y, t.m, t.c.into_element(r.d));
        }
        Ok(out)
    }
}

/// Weight tags for the general-`n` closed formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShimuraInput {
    /// `sum f_ab du_a (x) du_{n+b}`, keys `(a, b)` 1-based.
    StSt(BTreeMap<(u8, u8), Poly>),
    /// `sum f du^lm (x) du^lp` with multisets of letters `1..n` of sizes `m-` and `m+`.
    Sym {
        m_minus: usize,
        m_plus: usize,
        f: BTreeMap<(Vec<u8>, Vec<u8>), Poly>,
    },
    /// `f (du_1 ^ ... ^ du_n)^m- (x) (du_{n+1} ^ ... ^ du_2n)^m+`.
    Det { m_minus: usize, m_plus: usize, f: Poly },
}

/// `sum over orderings` of a multiset, repeated orderings accumulating.
fn syminc_words(letters: &[u8]) -> BTreeMap<Vec<u8>, i64> {
    let mut out = BTreeMap::new();
    for p in permutations(letters.len()) {
        let w: Vec<u8> = p.iter().map(|&i| letters[i]).collect();
        *out.entry(w).or_insert(0) += 1;
    }
    out
}

/// `(e_1 ^ ... ^ e_n)^m` expanded in the tensor power, letters shifted by `offset`.
fn wedge_power_words(n: usize, m: usize, offset: u8) -> BTreeMap<Vec<u8>, i64> {
    let mut single = BTreeMap::new();
    for p in permutations(n) {
        let w: Vec<u8> = p.iter().map(|&i| i as u8 + 1 + offset).collect();
        single.insert(w, permutation_sign(&p));
    }
    let mut acc: BTreeMap<Vec<u8>, i64> = BTreeMap::from([(Vec::new(), 1)]);
    for _ in 0..m {
        let mut next = BTreeMap::new();
        for (w1, c1) in &acc {
            for (w2, c2) in &single {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                *next.entry(w).or_insert(0) += c1 * c2;
            }
        }
        acc = next;
    }
    acc
}

fn shift(w: &[u8], by: u8) -> Vec<u8> {
    w.iter().map(|l| l + by).collect()
}

fn concat(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    w
}

impl ShimuraInput {
    /// The form in `du` words: symmetric monomials through the unnormalized
    /// permutation sum, determinants through the alternating sum.
    pub fn to_du_form(&self, n: usize, field: QuadField) -> DuForm {
        let nn = n as u8;
        let mut out = DuForm::new(n, field);
        match self {
            ShimuraInput::StSt(f) => {
                for (&(a, b), p) in f {
                    out.add(vec![a, nn + b], p.clone());
                }
            }
            ShimuraInput::Sym { f, .. } => {
                for ((lm, lp), p) in f {
                    for (wm, cm) in syminc_words(lm) {
                        for (wp, cp) in syminc_words(lp) {
                            out.add(concat(&wm, &shift(&wp, nn)), p.scale(&field.int(cm * cp)));
                        }
                    }
                }
            }
            ShimuraInput::Det { m_minus, m_plus, f } => {
                for (wm, cm) in wedge_power_words(n, *m_minus, 0) {
                    for (wp, cp) in wedge_power_words(n, *m_plus, nn) {
                        out.add(concat(&wm, &wp), f.scale(&field.int(cm * cp)));
                    }
                }
            }
        }
        out
    }
}

/// The `du` pair attached to `dz_ij` (0-based) by the Kodaira-Spencer isomorphism.
fn dz_suffix(n: usize, i: usize, j: usize) -> [u8; 2] {
    [(n + j + 1) as u8, (i + 1) as u8]
}

struct ClosedFormContext {
    n: usize,
    z: Matrix,
    /// `(z - z*)^{-1}`
    xm_inv: Matrix,
    /// `(z^t - zbar)^{-1}`
    xp_inv: Matrix,
}

impl ClosedFormContext {
    fn new(point: &PointOfHn) -> Result<Self> {
        let z = point.matrix().clone();
        let xm = &z - &z.adjoint();
        let xp = &z.transpose() - &z.conj();
        let singular = |_| Error::Invariant("z - z* is singular at a point of H_n".into());
        Ok(ClosedFormContext {
            n: z.rows(),
            xm_inv: xm.inverse().map_err(singular)?,
            xp_inv: xp.inverse().map_err(singular)?,
            z,
        })
    }

    /// `df` at the point, keyed by 0-based `dz` label.
    fn df(&self, f: &Poly) -> Vec<((usize, usize), FieldElement)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = f.derivative(Var::Z(i as u8, j as u8)).eval(&self.z);
                if !v.is_zero() {
                    out.push(((i, j), v));
                }
            }
        }
        out
    }
}

/// The closed-form value of the operator at `point`, in `du` words of length `r + 2`.
pub fn shimura_closed_formula(input: &ShimuraInput, point: &PointOfHn) -> Result<DuVector> {
    let ctx = ClosedFormContext::new(point)?;
    let n = ctx.n;
    let nn = n as u8;
    let field = point.field();
    let half = field.rational(rat(1, 2));
    let mut out = DuVector::new();
    match input {
        ShimuraInput::StSt(f) => {
            for (&(a, b), p) in f {
                let (a0, b0) = (a as usize - 1, b as usize - 1);
                let fv = p.eval(&ctx.z);
                let df = ctx.df(p);
                let base = [a, nn + b];
                // row M^{lambda+} applied to du^-
                for ((i, j), v) in &df {
                    out.add(concat(&base, &dz_suffix(n, *i, *j)), &half * v);
                }
                for j in 0..n {
                    for m in 0..n {
                        let c = &fv * ctx.xm_inv.get(j, m);
                        out.add(concat(&[m as u8 + 1, nn + b], &dz_suffix(n, a0, j)), c);
                    }
                }
                // row M^{lambda-} applied to du^+
                for ((i, j), v) in &df {
                    out.add(concat(&base, &dz_suffix(n, *i, *j)), &half * v);
                }
                for j in 0..n {
                    for m in 0..n {
                        let c = &fv * ctx.xp_inv.get(j, m);
                        out.add(concat(&[a, nn + m as u8 + 1], &dz_suffix(n, j, b0)), c);
                    }
                }
            }
        }
        ShimuraInput::Sym { f, .. } => {
            let embed = |lm: &[u8], lp: &[u8], c: &FieldElement, suffix: &[u8], out: &mut DuVector| {
                for (wm, cm) in syminc_words(lm) {
                    for (wp, cp) in syminc_words(lp) {
                        let w = concat(&concat(&wm, &shift(&wp, nn)), suffix);
                        out.add(w, c.scale(&int(cm * cp)));
                    }
                }
            };
            for ((lm, lp), p) in f {
                let fv = p.eval(&ctx.z);
                let df = ctx.df(p);
                for _ in 0..2 {
                    for ((i, j), v) in &df {
                        embed(lm, lp, &(&half * v), &dz_suffix(n, *i, *j), &mut out);
                    }
                }
                for (letter, mult) in multiplicities(lm) {
                    let l0 = letter as usize - 1;
                    for j in 0..n {
                        for m in 0..n {
                            let c = (&fv * ctx.xm_inv.get(j, m)).scale(&int(mult));
                            let lm2 = replace_one(lm, letter, m as u8 + 1);
                            embed(&lm2, lp, &c, &dz_suffix(n, l0, j), &mut out);
                        }
                    }
                }
                for (letter, mult) in multiplicities(lp) {
                    let l0 = letter as usize - 1;
                    for j in 0..n {
                        for m in 0..n {
                            let c = (&fv * ctx.xp_inv.get(j, m)).scale(&int(mult));
                            let lp2 = replace_one(lp, letter, m as u8 + 1);
                            embed(lm, &lp2, &c, &dz_suffix(n, j, l0), &mut out);
                        }
                    }
                }
            }
        }
        ShimuraInput::Det { m_minus, m_plus, f } => {
            let fv = f.eval(&ctx.z);
            let mut one_form: BTreeMap<(usize, usize), FieldElement> = BTreeMap::new();
            for (label, v) in ctx.df(f) {
                one_form.insert(label, v);
            }
            let mm = field.int(*m_minus as i64);
            let mp = field.int(*m_plus as i64);
            for a in 0..n {
                for b in 0..n {
                    // m- tr(dz X-^{-1}) + m+ tr(dz^t X+^{-1})
                    let c = &(&(&mm * ctx.xm_inv.get(b, a)) + &(&mp * ctx.xp_inv.get(a, b))) * &fv;
                    let e = one_form.entry((a, b)).or_insert_with(|| field.zero());
                    *e += &c;
                }
            }
            let words: Vec<(Vec<u8>, i64)> = wedge_power_words(n, *m_minus, 0)
                .into_iter()
                .flat_map(|(wm, cm)| {
                    wedge_power_words(n, *m_plus, nn)
                        .into_iter()
                        .map(move |(wp, cp)| (concat(&wm, &wp), cm * cp))
                })
                .collect();
            for ((a, b), c) in one_form {
                for (w, s) in &words {
                    out.add(concat(w, &dz_suffix(n, a, b)), c.scale(&int(*s)));
                }
            }
        }
    }
    Ok(out)
}

fn multiplicities(letters: &[u8]) -> BTreeMap<u8, i64> {
    let mut out = BTreeMap::new();
    for &l in letters {
        *out.entry(l).or_insert(0) += 1;
    }
    out
}

fn replace_one(letters: &[u8], old: u8, new: u8) -> Vec<u8> {
    let mut v = letters.to_vec();
    let pos = v.iter().position(|&l| l == old).expect("letter present");
    v[pos] = new;
    v.sort_unstable();
    v
}

/// For `n = 1` and determinant weight: `df/dz + (m- + m+) (z - zbar)^{-1} f`.
pub fn det_weight_n1(f: &Poly, m_minus: usize, m_plus: usize, point: &PointOfHn) -> Result<FieldElement> {
    if point.n() != 1 {
        return Err(Error::Shape("the scalar reduction is for n = 1".into()));
    }
    let z = point.matrix().get(0, 0).clone();
    let x = &z - &z.conj();
    let df = f.derivative(Var::Z(0, 0)).eval(point.matrix());
    let m = point.field().int((m_minus + m_plus) as i64);
    Ok(&df + &(&(&m * &x.inv()?) * &f.eval(point.matrix())))
}
