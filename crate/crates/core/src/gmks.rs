//! Symbolic Gauss-Manin connection and Kodaira-Spencer map over `H_n`.
//!
//! Sections of the tensor algebra on `H^1_DR` are written in the horizontal basis
//! `alpha_i, beta_i, alpha'_i, beta'_i` with polynomial coefficients in `z_ij`
//! (and `zbar_ij` as independent symbols). The embedding `K -> C` sends `w` to
//! `i sqrt(d)`, and the CM parameter `alpha` is `w`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use rand::Rng;

use crate::cmfield::{rat, FieldElement, QuadField};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::{Poly, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Alpha,
    Beta,
    AlphaPrime,
    BetaPrime,
}

/// One of the `4n` horizontal sections; `index` is 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HorizontalSymbol {
    pub kind: Kind,
    pub index: u8,
}

impl HorizontalSymbol {
    pub fn new(kind: Kind, index: usize) -> Self {
        HorizontalSymbol {
            kind,
            index: index as u8,
        }
    }

    /// Position in the coordinate vector `(alpha, beta, alpha', beta')`.
    pub fn flat(&self, n: usize) -> usize {
        let k = match self.kind {
            Kind::Alpha => 0,
            Kind::Beta => 1,
            Kind::AlphaPrime => 2,
            Kind::BetaPrime => 3,
        };
        k * n + self.index as usize
    }

    pub fn all(n: usize) -> Vec<HorizontalSymbol> {
        [Kind::Alpha, Kind::Beta, Kind::AlphaPrime, Kind::BetaPrime]
            .into_iter()
            .flat_map(|k| (0..n).map(move |i| HorizontalSymbol::new(k, i)))
            .collect()
    }
}

impl fmt::Display for HorizontalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            Kind::Alpha => "a",
            Kind::Beta => "b",
            Kind::AlphaPrime => "a'",
            Kind::BetaPrime => "b'",
        };
        write!(f, "{name}{}", self.index + 1)
    }
}

pub type HWord = Vec<HorizontalSymbol>;

/// A homogeneous element of `T^r(H^1_DR)` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    n: usize,
    field: QuadField,
    degree: usize,
    terms: BTreeMap<HWord, Poly>,
}

impl Section {
    pub fn zero(n: usize, field: QuadField, degree: usize) -> Self {
        Section {
            n,
            field,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The degree-zero section `f`.
    pub fn function(n: usize, f: Poly) -> Self {
        let mut s = Section::zero(n, f.field(), 0);
        s.add_term(Vec::new(), f);
        s
    }

    pub fn symbol(n: usize, field: QuadField, sym: HorizontalSymbol) -> Self {
        let mut s = Section::zero(n, field, 1);
        s.add_term(vec![sym], Poly::constant(field.one()));
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<HWord, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `f * word`; panics on a word of the wrong length.
    pub fn add_term(&mut self, word: HWord, f: Poly) {
        assert_eq!(word.len(), self.degree, "mixed tensor degrees in one section");
        if f.is_zero() {
            return;
        }
        let slot = self.terms.entry(word.clone()).or_insert_with(|| Poly::zero(self.field));
        *slot = slot.add(&f);
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn try_add(&self, other: &Section) -> Result<Section> {
        if self.degree != other.degree || self.n != other.n {
            return Err(Error::Shape(format!(
                "cannot add sections of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.add_term(w.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &Section) -> Section {
        self.try_add(other).expect("matching degrees")
    }

    pub fn scale(&self, c: &FieldElement) -> Section {
        self.mul_poly(&Poly::constant(c.clone()))
    }

    pub fn mul_poly(&self, f: &Poly) -> Section {
        let mut out = Section::zero(self.n, self.field, self.degree);
        for (w, g) in &self.terms {
            out.add_term(w.clone(), g.mul(f));
        }
        out
    }

    /// `self (x) other`.
    pub fn tensor(&self, other: &Section) -> Section {
        let mut out = Section::zero(self.n, self.field, self.degree + other.degree);
        for (w1, f1) in &self.terms {
            for (w2, f2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, f1.mul(f2));
            }
        }
        out
    }

    /// Coefficients evaluated at `z`.
    pub fn evaluate(&self, z: &PointOfHn) -> BTreeMap<HWord, FieldElement> {
        self.terms
            .iter()
            .map(|(w, f)| (w.clone(), f.eval(z.matrix())))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    /// The coordinate vector of a degree-one section at `z`.
    pub fn vector_at(&self, z: &PointOfHn) -> Vec<FieldElement> {
        assert_eq!(self.degree, 1, "vector_at needs a degree-one section");
        let mut v = vec![self.field.zero(); 4 * self.n];
        for (w, c) in self.evaluate(z) {
            v[w[0].flat(self.n)] = c;
        }
        v
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, p)| {
                let ws: Vec<String> = w.iter().map(|s| s.to_string()).collect();
                format!("[{p}] {}", ws.join("(x)"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A point `z` of `H_n` with entries in `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOfHn {
    z: Matrix,
}

/// `w (z* - z)`, the Hermitian matrix whose positivity defines `H_n` (it is `sqrt(d) i(z* - z)`).
pub fn imaginary_part_form(z: &Matrix) -> Matrix {
    let w = z.field().omega();
    (&z.adjoint() - z).scale(&w)
}

/// Positive definiteness of a Hermitian matrix via leading principal minors.
pub fn is_positive_definite(h: &Matrix) -> bool {
    (1..=h.rows()).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        let m = h.principal_minor(&idx);
        m.is_rational() && m.x().is_positive()
    })
}

impl PointOfHn {
    pub fn new(z: Matrix) -> Result<Self> {
        if !z.is_square() {
            return Err(Error::Shape("a point of H_n is a square matrix".into()));
        }
        if !is_positive_definite(&imaginary_part_form(&z)) {
            return Err(Error::MathDomain("i(z* - z) is not positive definite".into()));
        }
        Ok(PointOfHn { z })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.rows()
    }

    pub fn field(&self) -> QuadField {
        self.z.field()
    }

    /// A random point with small rational coordinates.
    pub fn random<R: Rng>(n: usize, field: QuadField, rng: &mut R) -> Self {
        loop {
            let mut z = Matrix::zeros(n, n, field);
            for i in 0..n {
                for j in 0..n {
                    let x = rat(rng.gen_range(-6..=6), rng.gen_range(1..=3));
                    let y = rat(rng.gen_range(-3..=3), rng.gen_range(1..=3));
                    let y = if i == j { y + rat(rng.gen_range(1..=4), 1) } else { y };
                    z.set(i, j, field.elem(x, y));
                }
            }
            if let Ok(p) = PointOfHn::new(z) {
                return p;
            }
        }
    }
}

fn alpha(field: QuadField) -> FieldElement {
    field.omega()
}

fn alpha_bar(field: QuadField) -> FieldElement {
    -field.omega()
}

fn hsym(n: usize, field: QuadField, kind: Kind, i: usize, coeff: Poly) -> Section {
    Section::symbol(n, field, HorizontalSymbol::new(kind, i)).mul_poly(&coeff)
}

/// Shared shape of `du` and `dubar`: `alpha_a + sum_j x_j beta_j + c alpha'_a + c sum_j x_j beta'_j`.
fn differential(n: usize, field: QuadField, a: usize, c: &FieldElement, x: impl Fn(usize) -> Poly) -> Section {
    let one = Poly::constant(field.one());
    let cp = Poly::constant(c.clone());
    let mut s = hsym(n, field, Kind::Alpha, a, one);
    s = s.add(&hsym(n, field, Kind::AlphaPrime, a, cp.clone()));
    for j in 0..n {
        let xj = x(j);
        s = s.add(&hsym(n, field, Kind::Beta, j, xj.clone()));
        s = s.add(&hsym(n, field, Kind::BetaPrime, j, xj.mul(&cp)));
    }
    s
}

/// `du_i` for `i in 1..=2n`.
pub fn du(i: usize, n: usize, field: QuadField) -> Section {
    assert!((1..=2 * n).contains(&i), "du index {i} out of range 1..={}", 2 * n);
    if i <= n {
        let a = i - 1;
        differential(n, field, a, &alpha_bar(field), |j| Poly::z(a, j, field))
    } else {
        let a = i - n - 1;
        differential(n, field, a, &alpha(field), |j| Poly::z(j, a, field))
    }
}

/// `dubar_i` for `i in 1..=2n`.
pub fn du_bar(i: usize, n: usize, field: QuadField) -> Section {
    assert!((1..=2 * n).contains(&i), "du index {i} out of range 1..={}", 2 * n);
    if i <= n {
        let a = i - 1;
        differential(n, field, a, &alpha(field), |j| Poly::zbar(a, j, field))
    } else {
        let a = i - n - 1;
        differential(n, field, a, &alpha_bar(field), |j| Poly::zbar(j, a, field))
    }
}

/// A one-form label `dz_ij`, 0-based.
pub type DzLabel = (u8, u8);

/// `nabla(s) = sum over labels of (section) (x) dz_ij`.
pub type ConnectionValue = BTreeMap<DzLabel, Section>;

/// Gauss-Manin: horizontal symbols are flat, so only the coefficients are differentiated.
pub fn gauss_manin(s: &Section) -> ConnectionValue {
    let n = s.n;
    let mut out: ConnectionValue = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let v = Var::Z(i as u8, j as u8);
            let mut part = Section::zero(n, s.field, s.degree);
            for (w, f) in &s.terms {
                part.add_term(w.clone(), f.derivative(v));
            }
            if !part.is_zero() {
                out.insert((i as u8, j as u8), part);
            }
        }
    }
    out
}

/// `nabla(v (x) w) = sigma(nabla(v) (x) w) + v (x) nabla(w)`, the one-form kept last.
pub fn gauss_manin_product(v: &Section, w: &Section) -> ConnectionValue {
    let mut out: ConnectionValue = BTreeMap::new();
    let mut push = |label: DzLabel, s: Section| {
        let slot = out
            .entry(label)
            .or_insert_with(|| Section::zero(s.n, s.field, s.degree));
        *slot = slot.add(&s);
    };
    for (label, dv) in gauss_manin(v) {
        push(label, dv.tensor(w));
    }
    for (label, dw) in gauss_manin(w) {
        push(label, v.tensor(&dw));
    }
    out.retain(|_, s| !s.is_zero());
    out
}

/// Exact change of basis between the horizontal frame and `{du, dubar}` at a point.
#[derive(Clone, Debug)]
pub struct HodgeFrame {
    n: usize,
    point: PointOfHn,
    /// `to_du[k]` = coordinates of horizontal symbol `k` in `(du_1..du_2n, dubar_1..dubar_2n)`.
    to_du: Matrix,
    /// Inverse of the `dubar`-coordinates of `beta_k + alpha beta'_k` and `beta_k + alphabar beta'_k`.
    ks_dual: Matrix,
}

impl HodgeFrame {
    pub fn new(point: &PointOfHn) -> Result<Self> {
        let n = point.n();
        let field = point.field();
        let m = 4 * n;
        let mut basis = Matrix::zeros(m, m, field);
        for i in 1..=2 * n {
            for (r, c) in du(i, n, field).vector_at(point).into_iter().enumerate() {
                basis.set(r, i - 1, c);
            }
            for (r, c) in du_bar(i, n, field).vector_at(point).into_iter().enumerate() {
                basis.set(r, 2 * n + i - 1, c);
            }
        }
        let to_du = basis
            .inverse()
            .map_err(|_| Error::MathDomain("du and dubar do not span H^1 at this point".into()))?;
        let mut frame = HodgeFrame {
            n,
            point: point.clone(),
            to_du,
            ks_dual: Matrix::zeros(2 * n, 2 * n, field),
        };
        let mut b = Matrix::zeros(2 * n, 2 * n, field);
        for k in 0..2 * n {
            let (c, j) = if k < n { (alpha(field), k) } else { (alpha_bar(field), k - n) };
            let mut v = vec![field.zero(); m];
            v[HorizontalSymbol::new(Kind::Beta, j).flat(n)] = field.one();
            v[HorizontalSymbol::new(Kind::BetaPrime, j).flat(n)] = c;
            for (r, x) in frame.mod_omega(&v).into_iter().enumerate() {
                b.set(r, k, x);
            }
        }
        frame.ks_dual = b
            .inverse()
            .map_err(|_| Error::MathDomain("Kodaira-Spencer dual frame is singular".into()))?;
        Ok(frame)
    }

    pub fn point(&self) -> &PointOfHn {
        &self.point
    }

    fn coordinates(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.to_du.apply(v)
    }

    /// Image in `H^1 / omega`: the `dubar` coordinates.
    pub fn mod_omega(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.coordinates(v).split_off(2 * self.n)
    }

    /// Projection onto `omega` along the Hodge splitting: the `du` coordinates.
    pub fn mod_split(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let mut c = self.coordinates(v);
        c.truncate(2 * self.n);
        c
    }

    /// The functional in `(omega^vee)^vee` attached to `v`, as its values on `dw_1..dw_2n`.
    pub fn ks_functional(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.ks_dual.apply(&self.mod_omega(v))
    }

    /// `du`-coordinates of a single horizontal symbol after `mod_split`.
    fn symbol_mod_split(&self, s: HorizontalSymbol) -> Vec<FieldElement> {
        let field = self.point.field();
        let mut v = vec![field.zero(); 4 * self.n];
        v[s.flat(self.n)] = field.one();
        self.mod_split(&v)
    }

    /// Applies `mod_split` slot by slot to a horizontal tensor, giving a tensor in `du` words.
    pub fn tensor_mod_split(&self, t: &BTreeMap<HWord, FieldElement>) -> DuVector {
        let mut cache: BTreeMap<HorizontalSymbol, Vec<FieldElement>> = BTreeMap::new();
        let mut out = DuVector::new();
        for (word, c) in t {
            let mut partial: Vec<(Vec<u8>, FieldElement)> = vec![(Vec::new(), c.clone())];
            for s in word {
                let coords = cache.entry(*s).or_insert_with(|| self.symbol_mod_split(*s)).clone();
                let mut next = Vec::new();
                for (w, x) in &partial {
                    for (k, y) in coords.iter().enumerate() {
                        if !y.is_zero() {
                            let mut w2 = w.clone();
                            w2.push(k as u8 + 1);
                            next.push((w2, x * y));
                        }
                    }
                }
                partial = next;
            }
            for (w, x) in partial {
                out.add(w, x);
            }
        }
        out
    }
}

/// `KS(du_i (x) dw_j)` at a point, as coefficients of `dz` labels.
pub fn ks_form(i: usize, j: usize, frame: &HodgeFrame) -> BTreeMap<DzLabel, FieldElement> {
    let n = frame.n;
    let field = frame.point.field();
    let mut out = BTreeMap::new();
    for (label, part) in gauss_manin(&du(i, n, field)) {
        let y = frame.ks_functional(&part.vector_at(&frame.point));
        let c = y[j - 1].clone();
        if !c.is_zero() {
            out.insert(label, c);
        }
    }
    out
}

/// `KS(du_i (x) dw_j)` as a single 1-based label `(a, b)` for `dz_ab`, or `None` for zero.
pub fn ks_pair(i: usize, j: usize, point: &PointOfHn) -> Result<Option<(usize, usize)>> {
    let frame = HodgeFrame::new(point)?;
    ks_pair_in(i, j, &frame)
}

pub fn ks_pair_in(i: usize, j: usize, frame: &HodgeFrame) -> Result<Option<(usize, usize)>> {
    let n = frame.n;
    if !(1..=2 * n).contains(&i) || !(1..=2 * n).contains(&j) {
        return Err(Error::Parameter(format!("indices ({i}, {j}) out of range 1..={}", 2 * n)));
    }
    let form = ks_form(i, j, frame);
    match form.len() {
        0 => Ok(None),
        1 => {
            let (&(a, b), c) = form.iter().next().expect("one entry");
            if c.is_one() {
                Ok(Some((a as usize + 1, b as usize + 1)))
            } else {
                Err(Error::Invariant(format!("KS(du_{i} (x) dw_{j}) = ({c}) dz_{}{}", a + 1, b + 1)))
            }
        }
        _ => Err(Error::Invariant(format!("KS(du_{i} (x) dw_{j}) is not a single label"))),
    }
}

/// The table entry predicted by the coordinate formula.
pub fn expected_ks(i: usize, j: usize, n: usize) -> Option<(usize, usize)> {
    if i <= n && j > n {
        Some((i, j - n))
    } else if i > n && j <= n {
        Some((j, i - n))
    } else {
        None
    }
}

/// An element `sum c_ij du_i (x) dw_j`, 1-based indices.
pub type KsElement = Vec<((usize, usize), FieldElement)>;

/// The displayed spanning set of the kernel of `KS`.
pub fn ks_kernel_generators(n: usize, field: QuadField) -> Vec<KsElement> {
    let mut out = Vec::new();
    for i in 1..=2 * n {
        for j in 1..=2 * n {
            if i < j {
                out.push(vec![((i, j), field.one()), ((j, i), field.int(-1))]);
            }
            if (i <= n) == (j <= n) {
                out.push(vec![((i, j), field.one())]);
            }
        }
    }
    out
}

pub fn ks_apply(element: &KsElement, frame: &HodgeFrame) -> BTreeMap<DzLabel, FieldElement> {
    let mut out: BTreeMap<DzLabel, FieldElement> = BTreeMap::new();
    for ((i, j), c) in element {
        for (label, v) in ks_form(*i, *j, frame) {
            let e = out.entry(label).or_insert_with(|| c.zero_like());
            *e += &(&v * c);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// True iff every kernel generator maps to zero at `point`.
pub fn ks_kernel_check(n: usize, point: &PointOfHn) -> Result<bool> {
    let frame = HodgeFrame::new(point)?;
    Ok(ks_kernel_generators(n, point.field())
        .iter()
        .all(|e| ks_apply(e, &frame).is_empty()))
}

/// The injection `dz_ab -> du_p (x) du_q` read off the KS table: for each 0-based label,
/// the 1-based pair `(p, q)` with `p > n` and `KS(du_p (x) dw_q) = dz_ab`.
pub fn ks_injection(frame: &HodgeFrame) -> Result<BTreeMap<DzLabel, (usize, usize)>> {
    let n = frame.n;
    let mut out = BTreeMap::new();
    for p in n + 1..=2 * n {
        for q in 1..=n {
            if let Some((a, b)) = ks_pair_in(p, q, frame)? {
                out.insert(((a - 1) as u8, (b - 1) as u8), (p, q));
            }
        }
    }
    if out.len() != n * n {
        return Err(Error::Invariant("KS table does not hit every dz label".into()));
    }
    Ok(out)
}

/// `P_i = du_i` and `Q_j = du_{j+n}` for `1 <= i, j <= n`.
pub fn p_form(i: usize, n: usize, field: QuadField) -> Section {
    du(i, n, field)
}

pub fn q_form(j: usize, n: usize, field: QuadField) -> Section {
    du(j + n, n, field)
}

/// `D(m f) = m sum_ij (df/dz_ij) Q_j (x) P_i` for a section with a single horizontal word.
pub fn d_thexpl(s: &Section) -> Result<Section> {
    let n = s.n;
    let field = s.field;
    if s.terms.len() > 1 {
        return Err(Error::Shape("horizontal part is not a single monomial; split by linearity first".into()));
    }
    let mut out = Section::zero(n, field, s.degree + 2);
    for (w, f) in &s.terms {
        let m = word_section(n, field, w);
        for i in 0..n {
            for j in 0..n {
                let df = f.derivative(Var::Z(i as u8, j as u8));
                if df.is_zero() {
                    continue;
                }
                let tail = q_form(j + 1, n, field).tensor(&p_form(i + 1, n, field));
                out = out.add(&m.tensor(&tail).mul_poly(&df));
            }
        }
    }
    Ok(out)
}

/// `D` on an arbitrary section, by linearity over its horizontal words.
pub fn d_thexpl_linear(s: &Section) -> Section {
    let mut out = Section::zero(s.n, s.field, s.degree + 2);
    for (w, f) in &s.terms {
        let mut single = Section::zero(s.n, s.field, s.degree);
        single.add_term(w.clone(), f.clone());
        out = out.add(&d_thexpl(&single).expect("single word"));
    }
    out
}

fn word_section(n: usize, field: QuadField, w: &[HorizontalSymbol]) -> Section {
    let mut s = Section::zero(n, field, w.len());
    s.add_term(w.to_vec(), Poly::constant(field.one()));
    s
}

/// `D` as the composite: `nabla`, then replace each `dz_ab` by its KS preimage `du_p (x) du_q`.
pub fn d_composite(s: &Section, frame: &HodgeFrame) -> Result<Section> {
    let inj = ks_injection(frame)?;
    let n = s.n;
    let field = s.field;
    let mut out = Section::zero(n, field, s.degree + 2);
    for (label, part) in gauss_manin(s) {
        let (p, q) = inj[&label];
        out = out.add(&part.tensor(&du(p, n, field).tensor(&du(q, n, field))));
    }
    Ok(out)
}

/// A tensor in the `du_1..du_2n` basis; words are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DuVector {
    terms: BTreeMap<Vec<u8>, FieldElement>,
}

impl DuVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, w: Vec<u8>, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_all(&mut self, other: &DuVector) {
        for (w, c) in &other.terms {
            self.add(w.clone(), c.clone());
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u8>, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, w: &[u8]) -> Option<&FieldElement> {
        self.terms.get(w)
    }
}

/// A form `sum_w f_w du_w` with polynomial coefficients; words are 1-based `du` indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuForm {
    pub n: usize,
    pub field: QuadField,
    pub terms: BTreeMap<Vec<u8>, Poly>,
}

impl DuForm {
    pub fn new(n: usize, field: QuadField) -> Self {
        DuForm {
            n,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, w: Vec<u8>, f: Poly) {
        if f.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_insert_with(|| Poly::zero(self.field));
        *slot = slot.add(&f);
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    /// The same form written in the horizontal basis.
    pub fn to_section(&self) -> Result<Section> {
        let degree = self.terms.keys().next().map_or(0, Vec::len);
        if self.terms.keys().any(|w| w.len() != degree) {
            return Err(Error::Shape("mixed tensor degrees in one form".into()));
        }
        let mut out = Section::zero(self.n, self.field, degree);
        for (w, f) in &self.terms {
            let mut s = Section::function(self.n, f.clone());
            for &i in w {
                s = s.tensor(&du(i as usize, self.n, self.field));
            }
            out = out.add(&s);
        }
        Ok(out)
    }
}

/// The C-infinity operator as the composite `nabla`, KS-injection, then projection
/// along the Hodge splitting, evaluated at the frame's point.
///
/// `nabla(f du_w)` is expanded slot by slot: `df (x) du_w` plus `f` times the
/// words with one letter replaced by the projected derivative of that `du`.
pub fn shimura_composite(f: &DuForm, frame: &HodgeFrame) -> Result<DuVector> {
    let inj = ks_injection(frame)?;
    let n = f.n;
    let field = f.field;
    let z = frame.point.matrix();
    let degree = f.terms.keys().next().map_or(0, Vec::len);
    if f.terms.keys().any(|w| w.len() != degree) {
        return Err(Error::Shape("mixed tensor degrees in one form".into()));
    }
    // projected derivative of each du, per label
    let mut ddu: BTreeMap<(u8, DzLabel), Vec<FieldElement>> = BTreeMap::new();
    for i in 1..=2 * n {
        for (label, part) in gauss_manin(&du(i, n, field)) {
            ddu.insert((i as u8, label), frame.mod_split(&part.vector_at(&frame.point)));
        }
    }
    let mut out = DuVector::new();
    for (w, poly) in &f.terms {
        let fv = poly.eval(z);
        for (label, &(p, q)) in &inj {
            let suffix = [p as u8, q as u8];
            let df = poly.derivative(Var::Z(label.0, label.1)).eval(z);
            let mut base = w.clone();
            base.extend_from_slice(&suffix);
            out.add(base, df);
            if fv.is_zero() {
                continue;
            }
            for (k, &letter) in w.iter().enumerate() {
                if let Some(coords) = ddu.get(&(letter, *label)) {
                    for (r, c) in coords.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut w2 = w.clone();
                        w2[k] = r as u8 + 1;
                        w2.extend_from_slice(&suffix);
                        out.add(w2, &fv * c);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The composite computed fully symbolically through the horizontal basis; slow, for small inputs.
pub fn shimura_composite_symbolic(f: &DuForm, frame: &HodgeFrame) -> Result<DuVector> {
    let inj = ks_injection(frame)?;
    let s = f.to_section()?;
    let mut out = DuVector::new();
    for (label, part) in gauss_manin(&s) {
        let (p, q) = inj[&label];
        let projected = frame.tensor_mod_split(&part.evaluate(&frame.point));
        for (w, c) in projected.terms() {
            let mut w2 = w.clone();
            w2.push(p as u8);
            w2.push(q as u8);
            out.add(w2, c.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k(d: i64) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn horizontal_sections_are_flat() {
        let f = k(1);
        let s = Section::symbol(2, f, HorizontalSymbol::new(Kind::Alpha, 0));
        assert!(gauss_manin(&s).is_empty());
    }

    #[test]
    fn du_shapes() {
        let f = k(1);
        let d1 = du(1, 1, f);
        let b = HorizontalSymbol::new(Kind::Beta, 0);
        assert_eq!(d1.terms()[&vec![b]], Poly::z(0, 0, f));
        let d3 = du(3, 2, f);
        // du_3 pairs beta_j with z_{j,1}
        let b2 = HorizontalSymbol::new(Kind::Beta, 1);
        assert_eq!(d3.terms()[&vec![b2]], Poly::z(1, 0, f));
    }

    #[test]
    fn point_validation() {
        let f = k(1);
        assert!(PointOfHn::new(Matrix::scalar(1, &f.omega())).is_ok());
        assert!(matches!(
            PointOfHn::new(Matrix::scalar(1, &-f.omega())),
            Err(Error::MathDomain(_))
        ));
        assert!(PointOfHn::new(Matrix::scalar(1, &f.int(3))).is_err());
    }

    #[test]
    fn ks_examples() {
        let f = k(1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = PointOfHn::random(2, f, &mut rng);
        assert_eq!(ks_pair(1, 3, &p).unwrap(), Some((1, 1)));
        assert_eq!(ks_pair(3, 1, &p).unwrap(), Some((1, 1)));
        assert_eq!(ks_pair(1, 2, &p).unwrap(), None);
        assert!(ks_kernel_check(2, &p).unwrap());
        let frame = HodgeFrame::new(&p).unwrap();
        let outside = vec![((1, 3), f.one())];
        assert_eq!(ks_apply(&outside, &frame).len(), 1);
    }

    #[test]
    fn thexpl_on_z11() {
        let f = k(1);
        let s = Section::function(1, Poly::z(0, 0, f));
        let d = d_thexpl(&s).unwrap();
        assert_eq!(d, q_form(1, 1, f).tensor(&p_form(1, 1, f)));
        let c = Section::function(1, Poly::constant(f.int(3)));
        assert!(d_thexpl(&c).unwrap().is_zero());
    }
}
