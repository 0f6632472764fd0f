//! Input builders shared by the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use theta_lab::hermidx::enumerate_indices;
use theta_lab::maass::ShimuraInput;
use theta_lab::matrix::Matrix;
use theta_lab::{PointOfHn, Poly, QExpansion, QuadField, TensorCoefficient};

pub fn gaussian() -> QuadField {
    QuadField::new(1).expect("d = 1")
}

/// `E_4` to the given bound.
pub fn eisenstein4(bound: u32) -> QExpansion {
    let coeffs: Vec<i64> = (0..=bound as i64)
        .map(|m| if m == 0 { 1 } else { 240 * (1..=m).filter(|d| m % d == 0).map(|d| d.pow(3)).sum::<i64>() })
        .collect();
    QExpansion::from_integers(gaussian(), &coeffs, bound).expect("valid bound")
}

/// A scalar series on every index of trace at most `bound`, coefficient `1 + tr h`.
pub fn dense(n: usize, bound: u32) -> QExpansion {
    let k = gaussian();
    let mut f = QExpansion::zero(n, k, bound, (0, 0));
    for h in enumerate_indices(n, k, bound).expect("valid bound") {
        let t = (0..n).map(|i| h.entry(i, i).clone()).fold(k.one(), |a, b| &a + &b);
        f.insert(h, TensorCoefficient::scalar(t)).expect("enumerated index");
    }
    f
}

/// `diag(i, 2i, ...)`.
pub fn diagonal_point(n: usize) -> PointOfHn {
    let k = gaussian();
    let mut z = Matrix::zeros(n, n, k);
    for i in 0..n {
        z.set(i, i, k.gaussian(0, i as i64 + 1));
    }
    PointOfHn::new(z).expect("positive imaginary part")
}

pub fn det_input(n: usize, seed: u64) -> ShimuraInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ShimuraInput::Det { m_minus: 1, m_plus: 1, f: Poly::random(n, gaussian(), 4, 3, false, &mut rng) }
}
