//! The theta operator on vector-valued q-expansions, its iterates, and
//! projections of the iterates onto sub-blocks of the tensor power.

use std::collections::BTreeMap;

use crate::cmfield::{rat, FieldElement, QuadField};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::qexp::QExpansion;
use crate::weights::{permutation_sign, permutations, TensorCoefficient, TensorWord};

/// `theta(f)`: the coefficient at `h` becomes `sum_{i,j} h_ij c(h) (T_j (x) T_i)`,
/// new letters appended on the right of each word.
pub fn theta(f: &QExpansion) -> QExpansion {
    let n = f.n();
    let (a, b) = f.degree();
    f.map_coefficients((a + 1, b + 1), |h, c| {
        let mut out = TensorCoefficient::new();
        for i in 0..n {
            for j in 0..n {
                let hij = h.entry(i, j);
                if hij.is_zero() {
                    continue;
                }
                out.add_assign(&c.scale(hij).append(j as u8 + 1, i as u8 + 1));
            }
        }
        out
    })
}

/// `theta` applied `e` times.
pub fn theta_power(f: &QExpansion, e: usize) -> Result<QExpansion> {
    if e == 0 {
        return Err(Error::Parameter("theta power needs e >= 1".into()));
    }
    let mut g = theta(f);
    for _ in 1..e {
        g = theta(&g);
    }
    Ok(g)
}

/// The linear map applied to the last `e` letters of each word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    Identity,
    /// Average over simultaneous slot permutations of both blocks.
    SymmetrizeTau,
    /// Alternating average on each block independently.
    DetAntisymmetrize,
    /// Explicit matrix on the `n^(2e)` block basis, ordered lexicographically in `(w-, w+)`.
    Matrix(Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    kind: ProjectorKind,
    n: usize,
    block: usize,
    field: QuadField,
}

impl Projector {
    /// Builds the projector and checks idempotence on the block basis.
    pub fn new(kind: ProjectorKind, n: usize, block: usize, field: QuadField) -> Result<Self> {
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::Parameter(format!("n={n} out of range")));
        }
        if let ProjectorKind::Matrix(m) = &kind {
            let dim = block_dim(n, block)?;
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Shape(format!(
                    "projector matrix is {}x{}, block basis has dimension {dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.field() != field {
                return Err(Error::Parameter("projector matrix over a different field".into()));
            }
            if &(m * m) != m {
                return Err(Error::Validation("projector matrix is not idempotent".into()));
            }
        }
        let p = Projector { kind, n, block, field };
        if !matches!(p.kind, ProjectorKind::Matrix(_)) {
            p.check_idempotent()?;
        }
        Ok(p)
    }

    pub fn kind(&self) -> &ProjectorKind {
        &self.kind
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_idempotent(&self) -> Result<()> {
        for (wm, wp) in block_basis(self.n, self.block) {
            let v = TensorCoefficient::term(wm, wp, self.field.one());
            let once = self.apply(&v)?;
            if self.apply(&once)? != once {
                return Err(Error::Invariant("projector is not idempotent".into()));
            }
        }
        Ok(())
    }

    /// Applies the projector to the trailing block of every term.
    pub fn apply(&self, v: &TensorCoefficient) -> Result<TensorCoefficient> {
        let e = self.block;
        let mut out = TensorCoefficient::new();
        for (wm, wp, c) in v.iter() {
            if wm.len() < e || wp.len() < e {
                return Err(Error::Shape(format!(
                    "projector block of length {e} does not fit words of lengths ({}, {})",
                    wm.len(),
                    wp.len()
                )));
            }
            if !wm.in_range(self.n) || !wp.in_range(self.n) {
                return Err(Error::Shape(format!("word letters exceed n={}", self.n)));
            }
            let (pm, bm) = wm.letters().split_at(wm.len() - e);
            let (pp, bp) = wp.letters().split_at(wp.len() - e);
            for (xm, xp, s) in self.apply_block(bm, bp) {
                let mut a = pm.to_vec();
                a.extend(xm);
                let mut b = pp.to_vec();
                b.extend(xp);
                out.add_term(TensorWord(a), TensorWord(b), c * &s);
            }
        }
        Ok(out)
    }

    fn apply_block(&self, bm: &[u8], bp: &[u8]) -> Vec<(Vec<u8>, Vec<u8>, FieldElement)> {
        let e = self.block;
        let field = self.field;
        match &self.kind {
            ProjectorKind::Identity => vec![(bm.to_vec(), bp.to_vec(), field.one())],
            ProjectorKind::SymmetrizeTau => {
                let perms = permutations(e);
                let w = field.rational(rat(1, perms.len() as i64));
                perms
                    .iter()
                    .map(|s| (permute(bm, s), permute(bp, s), w.clone()))
                    .collect()
            }
            ProjectorKind::DetAntisymmetrize => {
                let perms = permutations(e);
                let count = perms.len() as i64;
                let w = rat(1, count * count);
                let mut acc: BTreeMap<(Vec<u8>, Vec<u8>), FieldElement> = BTreeMap::new();
                for s in &perms {
                    for t in &perms {
                        let sign = permutation_sign(s) * permutation_sign(t);
                        let key = (permute(bm, s), permute(bp, t));
                        let v = field.rational(&w * rat(sign, 1));
                        acc.entry(key).and_modify(|x| *x += &v).or_insert(v);
                    }
                }
                acc.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|((a, b), v)| (a, b, v))
                    .collect()
            }
            ProjectorKind::Matrix(m) => {
                let col = block_index(self.n, bm, bp);
                (0..m.rows())
                    .filter(|&r| !m.get(r, col).is_zero())
                    .map(|r| {
                        let (a, b) = block_word(self.n, e, r);
                        (a, b, m.get(r, col).clone())
                    })
                    .collect()
            }
        }
    }
}

fn permute(w: &[u8], s: &[usize]) -> Vec<u8> {
    s.iter().map(|&i| w[i]).collect()
}

fn block_dim(n: usize, e: usize) -> Result<usize> {
    u32::try_from(2 * e)
        .ok()
        .and_then(|k| n.checked_pow(k))
        .ok_or_else(|| Error::Parameter(format!("block basis n^(2e) overflows for n={n}, e={e}")))
}

/// Lexicographic position of `(w-, w+)` among all pairs of length-`e` words on `1..n`.
fn block_index(n: usize, bm: &[u8], bp: &[u8]) -> usize {
    bm.iter().chain(bp).fold(0, |acc, &l| acc * n + (l as usize - 1))
}

fn block_word(n: usize, e: usize, mut idx: usize) -> (Vec<u8>, Vec<u8>) {
    let mut letters = vec![0u8; 2 * e];
    for slot in (0..2 * e).rev() {
        letters[slot] = (idx % n) as u8 + 1;
        idx /= n;
    }
    let b = letters.split_off(e);
    (letters, b)
}

/// All `(w-, w+)` block pairs in lexicographic order.
pub fn block_basis(n: usize, e: usize) -> Vec<(TensorWord, TensorWord)> {
    let dim = n.pow(2 * e as u32);
    (0..dim)
        .map(|i| {
            let (a, b) = block_word(n, e, i);
            (TensorWord(a), TensorWord(b))
        })
        .collect()
}

/// `phi_Z` applied coefficient-wise to `theta^e(f)`.
pub fn theta_z(f: &QExpansion, e: usize, z: &Projector) -> Result<QExpansion> {
    if z.block != e {
        return Err(Error::Shape(format!("projector acts on {} slots, theta power is {e}", z.block)));
    }
    if z.n != f.n() {
        return Err(Error::Shape(format!("projector built for n={}, series has n={}", z.n, f.n())));
    }
    if z.field != f.field() {
        return Err(Error::Parameter("projector and series over different fields".into()));
    }
    let g = theta_power(f, e)?;
    let mut err = None;
    let out = g.map_coefficients(g.degree(), |_, c| match z.apply(c) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            TensorCoefficient::new()
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermidx::HermitianIndex;

    fn k1() -> QuadField {
        QuadField::new(1).unwrap()
    }

    fn w(l: &[u8]) -> TensorWord {
        TensorWord(l.to_vec())
    }

    #[test]
    fn theta_of_constant_vanishes() {
        let k = k1();
        let f = QExpansion::constant(2, k.int(5), 3);
        let t = theta(&f);
        assert!(t.is_zero());
        assert_eq!(t.degree(), (1, 1));
    }

    #[test]
    fn theta_examples() {
        let k = k1();
        let q = QExpansion::from_integers(k, &[0, 1], 3).unwrap();
        let t = theta(&q);
        let h1 = HermitianIndex::diagonal(&[1], k);
        assert_eq!(t.coefficient(&h1).unwrap(), &TensorCoefficient::term(w(&[1]), w(&[1]), k.one()));

        let h = HermitianIndex::diagonal(&[1, 2], k);
        let m = QExpansion::monomial(h.clone(), k.one(), 3).unwrap();
        let t = theta(&m);
        let mut expected = TensorCoefficient::term(w(&[1]), w(&[1]), k.one());
        expected.add_term(w(&[2]), w(&[2]), k.int(2));
        assert_eq!(t.coefficient(&h).unwrap(), &expected);
    }

    #[test]
    fn theta_power_examples() {
        let k = k1();
        let q = QExpansion::from_integers(k, &[0, 1], 3).unwrap();
        assert_eq!(theta_power(&q, 1).unwrap(), theta(&q));
        let t2 = theta_power(&q, 2).unwrap();
        let h1 = HermitianIndex::diagonal(&[1], k);
        assert_eq!(t2.coefficient(&h1).unwrap(), &TensorCoefficient::term(w(&[1, 1]), w(&[1, 1]), k.one()));
        let q2 = QExpansion::from_integers(k, &[0, 0, 1], 3).unwrap();
        let t2 = theta_power(&q2, 2).unwrap();
        let h2 = HermitianIndex::diagonal(&[2], k);
        assert_eq!(t2.coefficient(&h2).unwrap(), &TensorCoefficient::term(w(&[1, 1]), w(&[1, 1]), k.int(4)));
    }

    #[test]
    fn projector_examples() {
        let k = k1();
        let sym = Projector::new(ProjectorKind::SymmetrizeTau, 2, 2, k).unwrap();
        let v = TensorCoefficient::term(w(&[1, 2]), w(&[1, 2]), k.one());
        let mut expected = TensorCoefficient::term(w(&[1, 2]), w(&[1, 2]), k.rational(rat(1, 2)));
        expected.add_term(w(&[2, 1]), w(&[2, 1]), k.rational(rat(1, 2)));
        assert_eq!(sym.apply(&v).unwrap(), expected);

        let det = Projector::new(ProjectorKind::DetAntisymmetrize, 2, 2, k).unwrap();
        let v = TensorCoefficient::term(w(&[1, 1]), w(&[1, 2]), k.one());
        assert!(det.apply(&v).unwrap().is_zero());

        let id = Projector::new(ProjectorKind::Identity, 2, 2, k).unwrap();
        let h = HermitianIndex::diagonal(&[1, 2], k);
        let f = QExpansion::monomial(h, k.one(), 3).unwrap();
        assert_eq!(theta_z(&f, 2, &id).unwrap(), theta_power(&f, 2).unwrap());
        assert!(matches!(theta_z(&f, 1, &id), Err(Error::Shape(_))));
    }

    #[test]
    fn matrix_projector_checks_idempotence() {
        let k = k1();
        let mut m = Matrix::zeros(4, 4, k);
        m.set(0, 0, k.one());
        m.set(0, 3, k.one());
        assert!(Projector::new(ProjectorKind::Matrix(m.clone()), 2, 1, k).is_ok());
        m.set(3, 3, k.one());
        assert!(matches!(
            Projector::new(ProjectorKind::Matrix(m), 2, 1, k),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Projector::new(ProjectorKind::Matrix(Matrix::identity(3, k)), 2, 1, k),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn matrix_projector_matches_builtin() {
        let k = k1();
        let n = 2;
        let e = 2;
        let sym = Projector::new(ProjectorKind::SymmetrizeTau, n, e, k).unwrap();
        let basis = block_basis(n, e);
        let dim = basis.len();
        let mut m = Matrix::zeros(dim, dim, k);
        for (col, (a, b)) in basis.iter().enumerate() {
            let img = sym.apply(&TensorCoefficient::term(a.clone(), b.clone(), k.one())).unwrap();
            for (x, y, c) in img.iter() {
                m.set(block_index(n, x.letters(), y.letters()), col, c.clone());
            }
        }
        let user = Projector::new(ProjectorKind::Matrix(m), n, e, k).unwrap();
        let v = TensorCoefficient::term(w(&[2, 1, 2]), w(&[1, 1, 2]), k.gaussian(3, -1));
        assert_eq!(user.apply(&v).unwrap(), sym.apply(&v).unwrap());
    }
}
