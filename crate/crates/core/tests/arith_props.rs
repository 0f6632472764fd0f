mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use theta_lab::cmfield::{padic_valuation, rat, rational_valuation, split_prime_data, FieldElement};
use theta_lab::hermidx::{dual_membership, enumerate_indices, lattice_generators, trace_pair};
use theta_lab::unitary::random_invertible;
use theta_lab::weights::{rho_matrix, symmetrize_embed, transform_frame, FramePair};
use theta_lab::{HighestWeight, QuadField, TensorCoefficient, TensorWord};

fn element(d: i64, x: (i64, i64), y: (i64, i64)) -> FieldElement {
    QuadField::new(d).unwrap().elem(rat(x.0, x.1), rat(y.0, y.1))
}

fn coords() -> impl Strategy<Value = (i64, i64)> {
    (-400i64..400, prop_oneof![Just(1i64), Just(2), Just(3), Just(5), Just(7), Just(25), Just(13)])
}

const SPLIT: [(u64, i64); 3] = [(5, 1), (13, 1), (11, 2)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn valuation_is_additive(ax in coords(), ay in coords(), bx in coords(), by in coords()) {
        for (p, d) in SPLIT {
            let v = split_prime_data(p, d, 6).unwrap();
            let a = element(d, ax, ay);
            let b = element(d, bx, by);
            let lhs = padic_valuation(&(&a * &b), &v).unwrap();
            let rhs = padic_valuation(&a, &v).unwrap() + padic_valuation(&b, &v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn conjugate_primes_sum_to_norm(ax in coords(), ay in coords()) {
        for (p, d) in SPLIT {
            let v = split_prime_data(p, d, 6).unwrap();
            let a = element(d, ax, ay);
            let sum = padic_valuation(&a, &v).unwrap() + padic_valuation(&a, &v.conjugate()).unwrap();
            prop_assert_eq!(sum, rational_valuation(&a.norm(), p));
        }
    }

    #[test]
    fn trace_and_norm_from_coordinates(ax in coords(), ay in coords(), d in prop_oneof![Just(1i64), Just(2), Just(3), Just(7)]) {
        let a = element(d, ax, ay);
        let x = rat(ax.0, ax.1);
        let y = rat(ay.0, ay.1);
        prop_assert_eq!(a.trace(), &x * rat(2, 1));
        prop_assert_eq!(a.norm(), &x * &x + &y * &y * rat(d, 1));
        let n = &a * &a.conj();
        prop_assert!(n.is_rational());
        prop_assert_eq!(n.x().clone(), a.norm());
    }
}

#[test]
fn enumeration_is_closed_under_symmetries() {
    for d in [1, 2, 3] {
        let k = QuadField::new(d).unwrap();
        for (n, bound) in [(2usize, 5u32), (3, 3)] {
            let set: BTreeSet<_> = enumerate_indices(n, k, bound).unwrap().into_iter().collect();
            let conj: BTreeSet<_> = set.iter().map(|h| h.conj()).collect();
            assert_eq!(conj, set, "d={d} n={n}");
            let perms: Vec<Vec<usize>> = if n == 2 {
                vec![vec![1, 0]]
            } else {
                vec![vec![1, 0, 2], vec![0, 2, 1], vec![2, 0, 1]]
            };
            for p in perms {
                let image: BTreeSet<_> = set.iter().map(|h| h.permute(&p)).collect();
                assert_eq!(image, set, "d={d} n={n} perm={p:?}");
            }
        }
    }
}

#[test]
fn enumerated_indices_pair_integrally_with_the_lattice() {
    for d in [1, 2, 3, 5] {
        let k = QuadField::new(d).unwrap();
        let gens = lattice_generators(2, k);
        for h in enumerate_indices(2, k, 4).unwrap() {
            assert!(dual_membership(&h));
            for g in &gens {
                let t = trace_pair(&h, g);
                assert!(t.is_rational() && t.x().is_integer(), "d={d} h={h}");
            }
        }
    }
}

#[test]
fn enumeration_counts() {
    let k = QuadField::new(1).unwrap();
    for bound in 0..12u32 {
        assert_eq!(enumerate_indices(1, k, bound).unwrap().len(), bound as usize + 1);
    }
    for n in [2, 3] {
        let counts: Vec<usize> = (0..5).map(|b| enumerate_indices(n, k, b).unwrap().len()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }
}

fn multiset() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(1u8..=3, 0..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symmetrized_tensors_are_slot_symmetric(letters in multiset()) {
        let k = QuadField::new(1).unwrap();
        let t = symmetrize_embed(&letters, k);
        for s in 0..letters.len().saturating_sub(1) {
            let swapped = t.map_words(|a, b| {
                let mut w = a.0.clone();
                w.swap(s, s + 1);
                (TensorWord(w), b.clone())
            });
            prop_assert_eq!(&swapped, &t);
        }
    }

    #[test]
    fn rho_is_multiplicative_for_n2(seed in any::<u64>(), which in 0usize..5) {
        let lambdas = [vec![1, 0], vec![2, 0], vec![1, 1], vec![2, 1], vec![1, -1]];
        let w = HighestWeight::new(lambdas[which].clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = QuadField::new(2).unwrap();
        let g = random_invertible(2, k, &mut rng);
        let h = random_invertible(2, k, &mut rng);
        prop_assert_eq!(rho_matrix(&w, &(&g * &h)).unwrap(), &rho_matrix(&w, &g).unwrap() * &rho_matrix(&w, &h).unwrap());
    }

    #[test]
    fn frame_change_is_a_left_action(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = QuadField::new(1).unwrap();
        let mut v = TensorCoefficient::new();
        for _ in 0..3 {
            v.add_term(common::random_word(2, 2, &mut rng), common::random_word(2, 1, &mut rng), common::small_element(k, &mut rng));
        }
        let pair = |rng: &mut ChaCha8Rng| FramePair::new(random_invertible(2, k, rng), random_invertible(2, k, rng));
        let a = pair(&mut rng);
        let b = pair(&mut rng);
        let lhs = transform_frame(&a, &transform_frame(&b, &v).unwrap()).unwrap();
        prop_assert_eq!(lhs, transform_frame(&a.compose(&b), &v).unwrap());
    }
}
