//! `GL_n x GL_n` weight machinery.
//!
//! Vector-valued coefficients live in the free tensor algebra on letters
//! `T_1..T_n`, one copy per side. Highest-weight representations are realized
//! as `Sym^(l1-l2)(std) (x) Sym^(l2-l3)(wedge^2) (x) ... (x) det^(ln)` in the
//! monomial basis, ordered lexicographically.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cmfield::{ElementRepr, FieldElement, QuadField};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A monomial `T_{i1} (x) ... (x) T_{ir}`; letters are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TensorWord(pub Vec<u8>);

impl TensorWord {
    pub fn empty() -> Self {
        TensorWord(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn in_range(&self, n: usize) -> bool {
        self.0.iter().all(|&l| l >= 1 && (l as usize) <= n)
    }

    pub fn push(&self, letter: u8) -> Self {
        let mut w = self.0.clone();
        w.push(letter);
        TensorWord(w)
    }

    pub fn concat(&self, other: &TensorWord) -> Self {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        TensorWord(w)
    }

    /// Representative in the commutative quotient.
    pub fn sorted(&self) -> Self {
        let mut w = self.0.clone();
        w.sort_unstable();
        TensorWord(w)
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.0.iter().map(|l| format!("T{l}")).collect();
        write!(f, "{}", s.join("."))
    }
}

/// `K`-linear combination of word pairs `(w-, w+)`; zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorCoefficient {
    terms: BTreeMap<(TensorWord, TensorWord), FieldElement>,
}

impl TensorCoefficient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(wm: TensorWord, wp: TensorWord, c: FieldElement) -> Self {
        let mut t = Self::new();
        t.add_term(wm, wp, c);
        t
    }

    /// The scalar `c` on the pair of empty words.
    pub fn scalar(c: FieldElement) -> Self {
        Self::term(TensorWord::empty(), TensorWord::empty(), c)
    }

    pub fn add_term(&mut self, wm: TensorWord, wp: TensorWord, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let key = (wm, wp);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TensorWord, &TensorWord, &FieldElement)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn get(&self, wm: &TensorWord, wp: &TensorWord) -> Option<&FieldElement> {
        self.terms.get(&(wm.clone(), wp.clone()))
    }

    /// Common word lengths of all terms, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys();
        let (a, b) = it.next()?;
        let deg = (a.len(), b.len());
        it.all(|(a, b)| (a.len(), b.len()) == deg).then_some(deg)
    }

    pub fn is_homogeneous_of(&self, deg: (usize, usize)) -> bool {
        self.terms.keys().all(|(a, b)| (a.len(), b.len()) == deg)
    }

    pub fn add(&self, other: &TensorCoefficient) -> TensorCoefficient {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &TensorCoefficient) {
        for (a, b, c) in other.iter() {
            self.add_term(a.clone(), b.clone(), c.clone());
        }
    }

    pub fn scale(&self, s: &FieldElement) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for (a, b, c) in self.iter() {
            out.add_term(a.clone(), b.clone(), c * s);
        }
        out
    }

    pub fn neg(&self) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for (a, b, c) in self.iter() {
            out.add_term(a.clone(), b.clone(), -c);
        }
        out
    }

    /// Multiplies on the right by `T_m (x) T_p`.
    pub fn append(&self, m: u8, p: u8) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for (a, b, c) in self.iter() {
            out.add_term(a.push(m), b.push(p), c.clone());
        }
        out
    }

    /// Maps every word pair through `f`, summing coincident images.
    pub fn map_words(&self, mut f: impl FnMut(&TensorWord, &TensorWord) -> (TensorWord, TensorWord)) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for (a, b, c) in self.iter() {
            let (x, y) = f(a, b);
            out.add_term(x, y, c.clone());
        }
        out
    }

    /// Image in the commutative quotient (letters sorted on each side).
    pub fn commutative_image(&self) -> TensorCoefficient {
        self.map_words(|a, b| (a.sorted(), b.sorted()))
    }

    pub fn is_commutative_normal(&self) -> bool {
        self.terms.keys().all(|(a, b)| a.is_sorted() && b.is_sorted())
    }

    /// Product in the commutative quotient: concatenate and sort.
    pub fn commutative_mul(&self, other: &TensorCoefficient) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for (a1, b1, c1) in self.iter() {
            for (a2, b2, c2) in other.iter() {
                out.add_term(a1.concat(a2).sorted(), b1.concat(b2).sorted(), c1 * c2);
            }
        }
        out
    }

    /// Product in the free algebra (concatenation).
    pub fn free_mul(&self, other: &TensorCoefficient) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for (a1, b1, c1) in self.iter() {
            for (a2, b2, c2) in other.iter() {
                out.add_term(a1.concat(a2), b1.concat(b2), c1 * c2);
            }
        }
        out
    }

    /// The coefficient of the empty word pair.
    pub fn scalar_part(&self) -> Option<&FieldElement> {
        self.get(&TensorWord::empty(), &TensorWord::empty())
    }

    pub fn to_repr(&self) -> Vec<TermRepr> {
        self.iter()
            .map(|(a, b, c)| TermRepr {
                wm: a.clone(),
                wp: b.clone(),
                c: ElementRepr::of(c),
            })
            .collect()
    }

    pub fn from_repr(terms: Vec<TermRepr>, field: QuadField) -> TensorCoefficient {
        let mut out = TensorCoefficient::new();
        for t in terms {
            out.add_term(t.wm, t.wp, t.c.into_element(field.d()));
        }
        out
    }
}

impl fmt::Display for TensorCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(a, b, c)| format!("({c})*{a}(x){b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Wire form of one tensor term: `{"wm": [...], "wp": [...], "c": ["x", "y"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRepr {
    pub wm: TensorWord,
    pub wp: TensorWord,
    pub c: ElementRepr,
}

/// A weakly decreasing integer tuple `l_1 >= ... >= l_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HighestWeight {
    lambda: Vec<i64>,
}

impl HighestWeight {
    pub fn new(lambda: Vec<i64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Validation("highest weight needs n >= 1 entries".into()));
        }
        if lambda.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::Validation(format!("weight {lambda:?} is not weakly decreasing")));
        }
        Ok(HighestWeight { lambda })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }

    /// Exponent of `Sym` applied to `wedge^k`, for `k = 1..n-1`.
    fn sym_exponents(&self) -> Vec<usize> {
        self.lambda.windows(2).map(|p| (p[0] - p[1]) as usize).collect()
    }

    pub fn det_power(&self) -> i64 {
        *self.lambda.last().expect("nonempty")
    }

    /// The monomial basis of the realization.
    pub fn basis(&self) -> Vec<WeightBasisVector> {
        let n = self.n();
        let factors: Vec<Vec<Vec<usize>>> = self
            .sym_exponents()
            .iter()
            .enumerate()
            .map(|(k, &m)| multisets(binomial(n, k + 1), m))
            .collect();
        let mut out = vec![WeightBasisVector(Vec::new())];
        for factor in &factors {
            let mut next = Vec::with_capacity(out.len() * factor.len());
            for prefix in &out {
                for ms in factor {
                    let mut v = prefix.0.clone();
                    v.push(ms.clone());
                    next.push(WeightBasisVector(v));
                }
            }
            out = next;
        }
        out
    }

    pub fn dim(&self) -> usize {
        let n = self.n();
        self.sym_exponents()
            .iter()
            .enumerate()
            .map(|(k, &m)| binomial(binomial(n, k + 1) + m - 1, m))
            .product()
    }

    /// Position of `e_1^(l1-l2) (x) (e_1 ^ e_2)^(l2-l3) (x) ...` in [`HighestWeight::basis`].
    pub fn highest_weight_index(&self) -> usize {
        // subset {1..k} is the first k-subset in lex order, index 0; the multiset of
        // m copies of index 0 is the first multiset. So the vector is basis[0].
        0
    }
}

/// One monomial basis vector: for each `k`, a sorted multiset of `k`-subset indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightBasisVector(pub Vec<Vec<usize>>);

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorted multisets of size `m` drawn from `0..size`, in lex order.
fn multisets(size: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, size: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..size {
            cur.push(i);
            rec(i, size, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, size, m, &mut Vec::new(), &mut out);
    out
}

/// `k`-subsets of `0..n` in lex order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The `k`-th compound matrix: the action of `g` on `wedge^k` in the lex subset basis.
pub fn compound_matrix(g: &Matrix, k: usize) -> Matrix {
    let subs = subsets_of_size(g.rows(), k);
    Matrix::from_fn(subs.len(), subs.len(), g.field(), |i, j| {
        let rows = &subs[i];
        let cols = &subs[j];
        Matrix::from_fn(k, k, g.field(), |a, b| g.get(rows[a], cols[b]).clone()).det()
    })
}

/// The action of `m` on `Sym^e` of its space, in the sorted-monomial basis.
pub fn symmetric_power_matrix(m: &Matrix, e: usize) -> Matrix {
    let field = m.field();
    let basis = multisets(m.rows(), e);
    let index: BTreeMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut out = Matrix::zeros(basis.len(), basis.len(), field);
    for (col, mono) in basis.iter().enumerate() {
        let mut poly: BTreeMap<Vec<usize>, FieldElement> = BTreeMap::new();
        poly.insert(Vec::new(), field.one());
        for &letter in mono {
            let mut next: BTreeMap<Vec<usize>, FieldElement> = BTreeMap::new();
            for (key, c) in &poly {
                for i in 0..m.rows() {
                    let a = m.get(i, letter);
                    if a.is_zero() {
                        continue;
                    }
                    let mut k2 = key.clone();
                    let pos = k2.partition_point(|&x| x <= i);
                    k2.insert(pos, i);
                    let v = c * a;
                    next.entry(k2)
                        .and_modify(|acc| *acc += &v)
                        .or_insert(v);
                }
            }
            poly = next;
        }
        for (key, c) in poly {
            if !c.is_zero() {
                out.set(index[&key], col, c);
            }
        }
    }
    out
}

/// Matrix of `rho_Lambda(g)` in the basis of [`HighestWeight::basis`].
pub fn rho_matrix(weight: &HighestWeight, g: &Matrix) -> Result<Matrix> {
    let n = weight.n();
    if !g.is_square() || g.rows() != n {
        return Err(Error::Shape(format!(
            "weight has n={n} but matrix is {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let field = g.field();
    let mut acc = Matrix::identity(1, field);
    for (k, m) in weight.sym_exponents().into_iter().enumerate() {
        let factor = symmetric_power_matrix(&compound_matrix(g, k + 1), m);
        acc = acc.kronecker(&factor);
    }
    let det = g.det();
    let scale = det
        .powi(weight.det_power())
        .map_err(|_| Error::MathDomain("singular matrix with negative determinant power".into()))?;
    Ok(acc.scale(&scale))
}

/// Image of the symmetric monomial `x_{l1} ... x_{le}` in the tensor power:
/// the sum over all `e!` slot permutations, repeated summands accumulating.
/// Returned on the minus side, with empty plus words.
pub fn symmetrize_embed(letters: &[u8], field: QuadField) -> TensorCoefficient {
    let mut out = TensorCoefficient::new();
    for perm in permutations(letters.len()) {
        let word: Vec<u8> = perm.iter().map(|&i| letters[i]).collect();
        out.add_term(TensorWord(word), TensorWord::empty(), field.one());
    }
    out
}

/// All permutations of `0..e` in lex order, paired with their signs by [`permutation_sign`].
pub fn permutations(e: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; e], &mut out);
    out
}

pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// A pair `(alpha-, alpha+)` acting on the two tensor sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramePair {
    pub minus: Matrix,
    pub plus: Matrix,
}

impl FramePair {
    pub fn new(minus: Matrix, plus: Matrix) -> Self {
        FramePair { minus, plus }
    }

    /// Componentwise product `(a- b-, a+ b+)`.
    pub fn compose(&self, other: &FramePair) -> FramePair {
        FramePair {
            minus: &self.minus * &other.minus,
            plus: &self.plus * &other.plus,
        }
    }
}

/// Applies the matrix `m` to every letter of `w` (letter `i -> sum_j m[j][i] T_j`).
fn act_on_word(m: &Matrix, w: &TensorWord) -> Vec<(TensorWord, FieldElement)> {
    let mut acc = vec![(TensorWord::empty(), m.field().one())];
    for &l in w.letters() {
        let col = l as usize - 1;
        let mut next = Vec::new();
        for (word, c) in &acc {
            for j in 0..m.rows() {
                let a = m.get(j, col);
                if !a.is_zero() {
                    next.push((word.push(j as u8 + 1), c * a));
                }
            }
        }
        acc = next;
    }
    acc
}

/// The frame-change law `v -> rho(alpha^t)^{-1} v` on free-tensor coefficients,
/// applied letter by letter on each side.
pub fn transform_frame(alpha: &FramePair, v: &TensorCoefficient) -> Result<TensorCoefficient> {
    let minus = alpha
        .minus
        .transpose()
        .inverse()
        .map_err(|_| Error::MathDomain("singular frame change on the minus side".into()))?;
    let plus = alpha
        .plus
        .transpose()
        .inverse()
        .map_err(|_| Error::MathDomain("singular frame change on the plus side".into()))?;
    let mut out = TensorCoefficient::new();
    for (wm, wp, c) in v.iter() {
        let left = act_on_word(&minus, wm);
        let right = act_on_word(&plus, wp);
        for (a, ca) in &left {
            for (b, cb) in &right {
                out.add_term(a.clone(), b.clone(), &(c * ca) * cb);
            }
        }
    }
    Ok(out)
}

/// The frame-change law on `V_{Lambda-} (x) V_{Lambda+}`, coordinates in the Kronecker basis.
pub fn transform_frame_highest(
    minus: &HighestWeight,
    plus: &HighestWeight,
    alpha: &FramePair,
    v: &[FieldElement],
) -> Result<Vec<FieldElement>> {
    let rm = rho_matrix(minus, &alpha.minus.transpose())?.inverse()?;
    let rp = rho_matrix(plus, &alpha.plus.transpose())?.inverse()?;
    let full = rm.kronecker(&rp);
    if v.len() != full.cols() {
        return Err(Error::Shape(format!(
            "vector of length {} for representation of dimension {}",
            v.len(),
            full.cols()
        )));
    }
    Ok(full.apply(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmfield::rat;

    fn k1() -> QuadField {
        QuadField::new(1).unwrap()
    }

    fn hw(l: &[i64]) -> HighestWeight {
        HighestWeight::new(l.to_vec()).unwrap()
    }

    #[test]
    fn weight_must_decrease() {
        assert!(HighestWeight::new(vec![1, 2]).is_err());
        assert!(HighestWeight::new(vec![2, 2, -1]).is_ok());
    }

    #[test]
    fn standard_and_top_wedge() {
        let k = k1();
        let g = Matrix::from_gaussian(&[&[(1, 1), (2, 0), (0, 0)], &[(0, 3), (1, 0), (1, 1)], &[(2, 0), (0, 0), (5, -1)]], k);
        assert_eq!(rho_matrix(&hw(&[1, 0, 0]), &g).unwrap(), g);
        assert_eq!(rho_matrix(&hw(&[1, 1, 1]), &g).unwrap(), Matrix::scalar(1, &g.det()));
    }

    #[test]
    fn highest_weight_vector_eigenvalue() {
        let k = k1();
        let t1 = k.int(3);
        let t2 = k.rational(rat(-1, 2));
        let g = Matrix::from_rows(vec![vec![t1.clone(), k.zero()], vec![k.zero(), t2.clone()]]).unwrap();
        let w = hw(&[2, 1]);
        let rho = rho_matrix(&w, &g).unwrap();
        let i = w.highest_weight_index();
        let expected = &(&t1 * &t1) * &t2;
        assert_eq!(rho.get(i, i), &expected);
        for r in 0..rho.rows() {
            if r != i {
                assert!(rho.get(r, i).is_zero());
            }
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(hw(&[2, 0]).dim(), 3);
        assert_eq!(hw(&[1, 1]).dim(), 1);
        assert_eq!(hw(&[2, 1, 0]).dim(), 3 * 3);
        for w in [hw(&[2, 0]), hw(&[1, 1]), hw(&[3, 1, -2]), hw(&[2, 1, 0])] {
            assert_eq!(w.basis().len(), w.dim());
        }
    }

    #[test]
    fn negative_det_power_needs_invertible() {
        let k = k1();
        let g = Matrix::from_gaussian(&[&[(1, 0), (2, 0)], &[(2, 0), (4, 0)]], k);
        assert!(matches!(rho_matrix(&hw(&[1, -1]), &g), Err(Error::MathDomain(_))));
        assert!(rho_matrix(&hw(&[2, 0]), &g).is_ok());
    }

    #[test]
    fn symmetrize_examples() {
        let k = k1();
        let one = |w: &[u8]| (TensorWord(w.to_vec()), TensorWord::empty());
        let s = symmetrize_embed(&[1], k);
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&one(&[1]).0, &one(&[1]).1), Some(&k.one()));
        let s = symmetrize_embed(&[1, 2], k);
        assert_eq!(s.get(&TensorWord(vec![1, 2]), &TensorWord::empty()), Some(&k.one()));
        assert_eq!(s.get(&TensorWord(vec![2, 1]), &TensorWord::empty()), Some(&k.one()));
        assert_eq!(s.len(), 2);
        let s = symmetrize_embed(&[1, 1], k);
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&TensorWord(vec![1, 1]), &TensorWord::empty()), Some(&k.int(2)));
    }

    #[test]
    fn frame_examples() {
        let k = k1();
        let v = TensorCoefficient::term(TensorWord(vec![1]), TensorWord::empty(), k.int(5));
        let id = FramePair::new(Matrix::identity(1, k), Matrix::identity(1, k));
        assert_eq!(transform_frame(&id, &v).unwrap(), v);
        let c = k.gaussian(2, 1);
        let alpha = FramePair::new(Matrix::scalar(1, &c), Matrix::identity(1, k));
        let out = transform_frame(&alpha, &v).unwrap();
        assert_eq!(out, v.scale(&c.inv().unwrap()));
        let singular = FramePair::new(Matrix::zeros(1, 1, k), Matrix::identity(1, k));
        assert!(matches!(transform_frame(&singular, &v), Err(Error::MathDomain(_))));
    }

    #[test]
    fn commutative_product_sorts() {
        let k = k1();
        let a = TensorCoefficient::term(TensorWord(vec![2]), TensorWord(vec![1]), k.one());
        let b = TensorCoefficient::term(TensorWord(vec![1]), TensorWord(vec![1]), k.int(3));
        let ab = a.commutative_mul(&b);
        assert_eq!(ab, TensorCoefficient::term(TensorWord(vec![1, 2]), TensorWord(vec![1, 1]), k.int(3)));
        assert_eq!(ab, b.commutative_mul(&a));
    }
}
