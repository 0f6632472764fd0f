//! Exponents of q-expansions: Hermitian matrices over `K`, the dual lattice of
//! `M = Her_n(Z[w])`, and bounded-trace enumeration of the nonnegative cone.

use std::fmt;

use num_integer::Roots;
use num_traits::{Signed, ToPrimitive};

use crate::cmfield::{rat, ElementRepr, FieldElement, QuadField, Rational};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest dimension supported by [`enumerate_indices`].
pub const MAX_ENUM_DIM: usize = 3;

/// A Hermitian `n x n` matrix over `K`.
///
/// Ordered lexicographically on the flattened `(x, y)` coordinates of its entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HermitianIndex {
    entries: Matrix,
}

impl HermitianIndex {
    pub fn new(entries: Matrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Validation("Hermitian index must be square".into()));
        }
        let n = entries.rows();
        for i in 0..n {
            if !entries.get(i, i).is_rational() {
                return Err(Error::Validation(format!("diagonal entry ({i},{i}) is not rational")));
            }
            for j in i + 1..n {
                if *entries.get(j, i) != entries.get(i, j).conj() {
                    return Err(Error::Validation(format!(
                        "index is not Hermitian: entry ({j},{i}) != conj of ({i},{j})"
                    )));
                }
            }
        }
        Ok(HermitianIndex { entries })
    }

    pub fn zero(n: usize, field: QuadField) -> Self {
        HermitianIndex {
            entries: Matrix::zeros(n, n, field),
        }
    }

    /// `diag(values)`.
    pub fn diagonal(values: &[i64], field: QuadField) -> Self {
        let n = values.len();
        HermitianIndex {
            entries: Matrix::from_fn(n, n, field, |i, j| {
                if i == j {
                    field.int(values[i])
                } else {
                    field.zero()
                }
            }),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn field(&self) -> QuadField {
        self.entries.field()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        self.entries.get(i, j)
    }

    /// `tr(h)`, a rational number.
    pub fn trace(&self) -> Rational {
        self.entries.trace().x().clone()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    pub fn add(&self, other: &HermitianIndex) -> HermitianIndex {
        HermitianIndex {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &HermitianIndex) -> HermitianIndex {
        HermitianIndex {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale_int(&self, k: i64) -> HermitianIndex {
        HermitianIndex {
            entries: self.entries.scale(&self.field().int(k)),
        }
    }

    /// Entrywise conjugate, which for a Hermitian matrix equals its transpose.
    pub fn conj(&self) -> HermitianIndex {
        HermitianIndex {
            entries: self.entries.conj(),
        }
    }

    /// `P h P^t` for the permutation matrix `P` sending basis vector `i` to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> HermitianIndex {
        let n = self.n();
        let mut m = Matrix::zeros(n, n, self.field());
        for i in 0..n {
            for j in 0..n {
                m.set(perm[i], perm[j], self.entry(i, j).clone());
            }
        }
        HermitianIndex { entries: m }
    }

    pub fn to_repr(&self) -> Vec<Vec<ElementRepr>> {
        self.entries.to_repr()
    }

    pub fn from_repr(rows: Vec<Vec<ElementRepr>>, field: QuadField) -> Result<Self> {
        HermitianIndex::new(Matrix::from_repr(rows, field)?)
    }
}

impl fmt::Display for HermitianIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n())
            .map(|i| {
                let r: Vec<String> = self.entries.row(i).iter().map(|e| e.to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Nonnegative definiteness via all `2^n - 1` principal minors.
pub fn is_psd(h: &HermitianIndex) -> bool {
    subsets(h.n()).all(|s| {
        let minor = h.entries.principal_minor(&s);
        debug_assert!(minor.is_rational());
        !minor.x().is_negative()
    })
}

/// Generators of `M = Her_n(Z[w])`: `e_ii`, `e_ij + e_ji`, `w e_ij - w e_ji` for `i < j`.
pub fn lattice_generators(n: usize, field: QuadField) -> Vec<Matrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        gens.push(Matrix::unit(n, i, i, field));
    }
    let w = field.omega();
    for i in 0..n {
        for j in i + 1..n {
            let mut sym = Matrix::zeros(n, n, field);
            sym.set(i, j, field.one());
            sym.set(j, i, field.one());
            gens.push(sym);
            let mut skew = Matrix::zeros(n, n, field);
            skew.set(i, j, w.clone());
            skew.set(j, i, -&w);
            gens.push(skew);
        }
    }
    gens
}

fn is_integer_element(e: &FieldElement) -> bool {
    e.is_rational() && e.x().is_integer()
}

/// `tr(h m) in Z` for every generator `m` of `M`.
pub fn dual_membership(h: &HermitianIndex) -> bool {
    lattice_generators(h.n(), h.field())
        .iter()
        .all(|m| is_integer_element(&trace_pair(h, m)))
}

/// Closed form of [`dual_membership`]: integral diagonal and `Tr(h_ij u) in Z` for `u in {1, w}`.
pub fn dual_membership_closed_form(h: &HermitianIndex) -> bool {
    let n = h.n();
    let w = h.field().omega();
    (0..n).all(|i| h.entry(i, i).x().is_integer())
        && (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let e = h.entry(i, j);
                e.trace().is_integer() && (e * &w).trace().is_integer()
            })
        })
}

/// `tr(h g)` for any `n x n` matrix `g` over `K`.
pub fn trace_pair(h: &HermitianIndex, g: &Matrix) -> FieldElement {
    let n = h.n();
    assert_eq!((g.rows(), g.cols()), (n, n), "trace pairing needs matching sizes");
    let mut acc = h.field().zero();
    for i in 0..n {
        for k in 0..n {
            let a = h.entry(i, k);
            let b = g.get(k, i);
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
    }
    acc
}

/// Off-diagonal candidates `x + y w` with `x in Z/2`, `y in Z/(2d)` and norm at most `bound`.
fn offdiagonal_candidates(bound: i64, field: QuadField) -> Vec<FieldElement> {
    let d = field.d();
    let mut out = Vec::new();
    // x = a/2 with a^2 <= 4*bound
    let amax = (4 * bound).sqrt();
    for a in -amax..=amax {
        // d*y^2 <= bound - a^2/4 with y = b/(2d)  <=>  b^2 <= d*(4*bound - a^2)
        let rest = 4 * bound - a * a;
        if rest < 0 {
            continue;
        }
        let bmax = (d * rest).sqrt();
        for b in -bmax..=bmax {
            out.push(field.elem(rat(a, 2), rat(b, 2 * d)));
        }
    }
    out
}

/// All `h` in the dual lattice that are nonnegative definite with `tr(h) <= trace_bound`,
/// sorted in the canonical index order.
pub fn enumerate_indices(n: usize, field: QuadField, trace_bound: u32) -> Result<Vec<HermitianIndex>> {
    if n == 0 || n > MAX_ENUM_DIM {
        return Err(Error::Unsupported(format!(
            "index enumeration supports 1 <= n <= {MAX_ENUM_DIM}, got n={n}"
        )));
    }
    let mut out = Vec::new();
    let mut diag = vec![0i64; n];
    enumerate_diagonals(&mut diag, 0, trace_bound as i64, &mut |diag| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let options: Vec<Vec<FieldElement>> = pairs
            .iter()
            .map(|&(i, j)| offdiagonal_candidates(diag[i] * diag[j], field))
            .collect();
        let mut choice = vec![0usize; pairs.len()];
        loop {
            let mut m = Matrix::from_fn(n, n, field, |i, j| if i == j { field.int(diag[i]) } else { field.zero() });
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let e = options[k][choice[k]].clone();
                m.set(j, i, e.conj());
                m.set(i, j, e);
            }
            let h = HermitianIndex { entries: m };
            if is_psd(&h) {
                debug_assert!(dual_membership_closed_form(&h));
                out.push(h);
            }
            // odometer over the off-diagonal choices
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return;
                }
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    });
    out.sort();
    Ok(out)
}

fn enumerate_diagonals(diag: &mut Vec<i64>, pos: usize, remaining: i64, visit: &mut dyn FnMut(&[i64])) {
    if pos == diag.len() {
        visit(diag);
        return;
    }
    for v in 0..=remaining {
        diag[pos] = v;
        enumerate_diagonals(diag, pos + 1, remaining - v, visit);
    }
    diag[pos] = 0;
}

/// The trace of `h` as a machine integer, when it is one.
pub fn integral_trace(h: &HermitianIndex) -> Option<i64> {
    let t = h.trace();
    if t.is_integer() {
        t.numer().to_i64()
    } else {
        None
    }
}
