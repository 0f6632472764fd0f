#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use theta_lab::cmfield::rat;
use theta_lab::gmks::{HorizontalSymbol, Kind, Section};
use theta_lab::hermidx::enumerate_indices;
use theta_lab::{FieldElement, HermitianIndex, Poly, QExpansion, QuadField, TensorCoefficient, TensorWord};

pub fn small_element<R: Rng>(field: QuadField, rng: &mut R) -> FieldElement {
    field.elem(
        rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
    )
}

pub fn random_word<R: Rng>(n: usize, len: usize, rng: &mut R) -> TensorWord {
    TensorWord((0..len).map(|_| rng.gen_range(1..=n as u8)).collect())
}

pub struct IndexCache(BTreeMap<(usize, i64, u32), Vec<HermitianIndex>>);

impl IndexCache {
    pub fn new() -> Self {
        IndexCache(BTreeMap::new())
    }

    pub fn get(&mut self, n: usize, field: QuadField, bound: u32) -> &[HermitianIndex] {
        self.0
            .entry((n, field.d(), bound))
            .or_insert_with(|| enumerate_indices(n, field, bound).unwrap())
    }
}

/// A random series with up to six nonzero coefficients.
pub fn random_series<R: Rng>(
    cache: &mut IndexCache,
    n: usize,
    field: QuadField,
    bound: u32,
    degree: (usize, usize),
    rng: &mut R,
) -> QExpansion {
    let indices = cache.get(n, field, bound);
    let mut f = QExpansion::zero(n, field, bound, degree);
    for _ in 0..rng.gen_range(0..=6) {
        let h = indices[rng.gen_range(0..indices.len())].clone();
        let mut c = TensorCoefficient::new();
        for _ in 0..rng.gen_range(1..=3) {
            c.add_term(
                random_word(n, degree.0, rng),
                random_word(n, degree.1, rng),
                small_element(field, rng),
            );
        }
        if let Some(old) = f.coefficient(&h) {
            c.add_assign(old);
        }
        f.insert(h, c).unwrap();
    }
    f
}

pub fn random_symbol<R: Rng>(n: usize, rng: &mut R) -> HorizontalSymbol {
    let kind = match rng.gen_range(0..4) {
        0 => Kind::Alpha,
        1 => Kind::Beta,
        2 => Kind::AlphaPrime,
        _ => Kind::BetaPrime,
    };
    HorizontalSymbol::new(kind, rng.gen_range(0..n))
}

/// Up to three horizontal words of a common length, with random polynomial coefficients.
pub fn random_section<R: Rng>(n: usize, field: QuadField, rng: &mut R) -> Section {
    let degree = rng.gen_range(0..=2);
    let mut s = Section::zero(n, field, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let word = (0..degree).map(|_| random_symbol(n, rng)).collect();
        s.add_term(word, Poly::random(n, field, 3, 3, true, rng));
    }
    s
}
