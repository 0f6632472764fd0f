//! The similitude group `GU(eta_n)`, its action on `H_n` and the automorphy factors.

use rand::Rng;

use crate::cmfield::{FieldElement, QuadField};
use crate::error::{Error, Result};
use crate::gmks::PointOfHn;
use crate::matrix::Matrix;

/// A `2n x 2n` matrix with its `n x n` blocks `A, B, C, D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    g: Matrix,
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
}

impl GroupElement {
    pub fn new(g: Matrix) -> Result<Self> {
        if !g.is_square() || !g.rows().is_multiple_of(2) || g.rows() == 0 {
            return Err(Error::Shape(format!("expected a 2n x 2n matrix, got {}x{}", g.rows(), g.cols())));
        }
        let n = g.rows() / 2;
        Ok(GroupElement {
            a: g.block(0, 0, n, n),
            b: g.block(0, n, n, n),
            c: g.block(n, 0, n, n),
            d: g.block(n, n, n, n),
            g,
        })
    }

    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Self> {
        let n = a.rows();
        if [a, b, c, d].iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Shape("blocks must all be n x n".into()));
        }
        GroupElement::new(Matrix::from_blocks(a, b, c, d))
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn field(&self) -> QuadField {
        self.g.field()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn blocks(&self) -> (&Matrix, &Matrix, &Matrix, &Matrix) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn identity(n: usize, field: QuadField) -> Self {
        GroupElement::new(Matrix::identity(2 * n, field)).expect("even size")
    }

    /// `eta_n = (0, -1; 1, 0)`.
    pub fn eta(n: usize, field: QuadField) -> Self {
        let i = Matrix::identity(n, field);
        let o = Matrix::zeros(n, n, field);
        GroupElement::from_blocks(&o, &-&i, &i, &o).expect("square blocks")
    }

    /// `(1, sigma; 0, 1)` for Hermitian `sigma`.
    pub fn unipotent(sigma: &Matrix) -> Result<Self> {
        if !sigma.is_square() || sigma.adjoint() != *sigma {
            return Err(Error::Validation("unipotent translation must be Hermitian".into()));
        }
        let n = sigma.rows();
        let field = sigma.field();
        let i = Matrix::identity(n, field);
        GroupElement::from_blocks(&i, sigma, &Matrix::zeros(n, n, field), &i)
    }

    /// `diag(a, (a*)^{-1})`.
    pub fn levi(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        let inv = a
            .adjoint()
            .inverse()
            .map_err(|_| Error::MathDomain("Levi block is singular".into()))?;
        let o = Matrix::zeros(n, n, a.field());
        GroupElement::from_blocks(a, &o, &o, &inv)
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        GroupElement::new(self.g.checked_mul(&other.g)?)
    }
}

/// `nu` with `g eta g* = nu eta`, or `None` when `g` is not a similitude.
pub fn gu_check(g: &GroupElement) -> Option<FieldElement> {
    let n = g.n();
    let field = g.field();
    let eta = GroupElement::eta(n, field);
    let p = &(&g.g * &eta.g) * &g.g.adjoint();
    // eta has 1 at (n, 0)
    let nu = p.get(n, 0).clone();
    if nu.is_zero() || p != eta.g.scale(&nu) {
        return None;
    }
    Some(nu)
}

fn check_group(g: &GroupElement, z: &PointOfHn) -> Result<()> {
    if g.n() != z.n() {
        return Err(Error::Shape(format!("group element of size {} acting on H_{}", 2 * g.n(), z.n())));
    }
    if gu_check(g).is_none() {
        return Err(Error::Validation("matrix is not in GU(eta_n)".into()));
    }
    Ok(())
}

/// `gz = (Az + B)(Cz + D)^{-1}`, re-validated to lie in `H_n`.
pub fn moebius(g: &GroupElement, z: &PointOfHn) -> Result<PointOfHn> {
    check_group(g, z)?;
    let zm = z.matrix();
    let denom = &(&g.c * zm) + &g.d;
    let inv = denom
        .inverse()
        .map_err(|_| Error::MathDomain("Cz + D is singular".into()))?;
    let w = &(&(&g.a * zm) + &g.b) * &inv;
    PointOfHn::new(w).map_err(|_| Error::Invariant("image of the action left H_n".into()))
}

/// `(mu, lambda) = (Cz + D, Cbar z^t + Dbar)`.
pub fn automorphy_factor(g: &GroupElement, z: &PointOfHn) -> Result<(Matrix, Matrix)> {
    check_group(g, z)?;
    let zm = z.matrix();
    let mu = &(&g.c * zm) + &g.d;
    if mu.det().is_zero() {
        return Err(Error::MathDomain("Cz + D is singular".into()));
    }
    let lambda = &(&g.c.conj() * &zm.transpose()) + &g.d.conj();
    Ok((mu, lambda))
}

/// A random Hermitian matrix over `Z[omega]` with small entries.
pub fn random_hermitian<R: Rng>(n: usize, field: QuadField, rng: &mut R) -> Matrix {
    let mut s = Matrix::zeros(n, n, field);
    for i in 0..n {
        s.set(i, i, field.int(rng.gen_range(-3..=3)));
        for j in i + 1..n {
            let x = field.gaussian(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            s.set(j, i, x.conj());
            s.set(i, j, x);
        }
    }
    s
}

/// A random invertible matrix over `Z[omega]` with small entries.
pub fn random_invertible<R: Rng>(n: usize, field: QuadField, rng: &mut R) -> Matrix {
    loop {
        let mut a = Matrix::zeros(n, n, field);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, field.gaussian(rng.gen_range(-2..=2), rng.gen_range(-1..=1)));
            }
        }
        if !a.det().is_zero() {
            return a;
        }
    }
}

/// A product of one to three generators: unipotents, `eta_n` and Levi elements.
pub fn random_element<R: Rng>(n: usize, field: QuadField, rng: &mut R) -> GroupElement {
    let mut g = GroupElement::identity(n, field);
    for _ in 0..rng.gen_range(1..=3) {
        let h = match rng.gen_range(0..3) {
            0 => GroupElement::unipotent(&random_hermitian(n, field, rng)).expect("Hermitian"),
            1 => GroupElement::eta(n, field),
            _ => GroupElement::levi(&random_invertible(n, field, rng)).expect("invertible"),
        };
        g = g.mul(&h).expect("same size");
    }
    g
}
