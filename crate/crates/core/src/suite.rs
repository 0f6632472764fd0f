//! Seeded invariant suites behind `check`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmfield::{padic_valuation, rat, split_prime_data, FieldElement, QuadField};
use crate::error::{Error, Result};
use crate::gmks::{
    d_composite, d_thexpl_linear, du, gauss_manin, ks_kernel_check, ks_pair, shimura_composite, HodgeFrame,
    HorizontalSymbol, Kind, PointOfHn, Section,
};
use crate::hermidx::{enumerate_indices, HermitianIndex};
use crate::maass::{delta, holomorphic_part, shimura_closed_formula, NearlyHoloForm, ShimuraInput};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::qexp::{add_scale, derivation_d, frobenius, multiply, padic_integral, QExpansion};
use crate::theta::theta;
use crate::unitary::{automorphy_factor, gu_check, moebius, random_element, random_invertible, GroupElement};
use crate::weights::{rho_matrix, HighestWeight, TensorCoefficient, TensorWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Theta,
    Gmks,
    Maass,
    Weights,
    Unitary,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Theta, Suite::Gmks, Suite::Maass, Suite::Weights, Suite::Unitary];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Gmks => "gmks",
            Suite::Maass => "maass",
            Suite::Weights => "weights",
            Suite::Unitary => "unitary",
        }
    }
}

/// One named check and its outcome.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: &'static str,
    pub outcome: std::result::Result<(), String>,
}

/// Options shared by the suites.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    /// Upper bound on p-adic precision, if any.
    pub precision_cap: Option<u32>,
}

type Check = (&'static str, fn(&SuiteOptions) -> Result<()>);

pub fn run(suite: Suite, opts: SuiteOptions) -> Vec<CheckResult> {
    let checks: Vec<Check> = match suite {
        Suite::Theta => vec![
            ("coefficient law", theta_law),
            ("Leibniz rule in the commutative quotient", theta_leibniz),
            ("Frobenius interplay", theta_frobenius),
            ("agreement with D(gamma)", theta_via_d),
            ("Ramanujan on E4", theta_ramanujan),
            ("p-integrality at both primes above 5", integrality),
        ],
        Suite::Gmks => vec![
            ("Gauss-Manin on du", gauss_manin_du),
            ("Kodaira-Spencer table and kernel", ks_table),
            ("explicit D against the composite", thexpl),
        ],
        Suite::Maass => vec![
            ("delta examples", delta_examples),
            ("holomorphic part of delta is theta", maass_theta),
            ("closed formulas against the composite", closed_formulas),
        ],
        Suite::Weights => vec![("multiplicativity and torus eigenvalues", representations)],
        Suite::Unitary => vec![("examples", unitary_examples), ("cocycle on random triples", cocycle)],
    };
    checks
        .into_iter()
        .map(|(name, f)| CheckResult {
            suite,
            name,
            outcome: f(&opts).map_err(|e| e.to_string()),
        })
        .collect()
}

fn fail(msg: String) -> Error {
    Error::Invariant(msg)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small<R: Rng>(k: QuadField, rng: &mut R) -> FieldElement {
    k.elem(rat(rng.gen_range(-7..=7), rng.gen_range(1..=3)), rat(rng.gen_range(-7..=7), rng.gen_range(1..=3)))
}

/// Random series over the indices of trace at most `bound`.
pub fn random_series<R: Rng>(
    indices: &[HermitianIndex],
    n: usize,
    k: QuadField,
    bound: u32,
    degree: (usize, usize),
    rng: &mut R,
) -> QExpansion {
    let mut f = QExpansion::zero(n, k, bound, degree);
    let word = |len: usize, rng: &mut R| TensorWord((0..len).map(|_| rng.gen_range(1..=n as u8)).collect());
    for _ in 0..rng.gen_range(0..=5) {
        let h = indices[rng.gen_range(0..indices.len())].clone();
        let mut c = f.coefficient(&h).cloned().unwrap_or_default();
        for _ in 0..rng.gen_range(1..=2) {
            c.add_term(word(degree.0, rng), word(degree.1, rng), small(k, rng));
        }
        f.insert(h, c).expect("index from the enumeration");
    }
    f
}

fn series_pool(seed: u64, count: usize, max_degree: usize) -> Result<Vec<QExpansion>> {
    let mut r = rng(seed);
    let mut cache: BTreeMap<(usize, i64, u32), Vec<HermitianIndex>> = BTreeMap::new();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n = r.gen_range(1..=2);
        let k = QuadField::new(r.gen_range(1..=2))?;
        let bound = r.gen_range(0..=5);
        let degree = (r.gen_range(0..=max_degree), r.gen_range(0..=max_degree));
        let indices = match cache.get(&(n, k.d(), bound)) {
            Some(v) => v,
            None => cache.entry((n, k.d(), bound)).or_insert(enumerate_indices(n, k, bound)?),
        };
        out.push(random_series(indices, n, k, bound, degree, &mut r));
    }
    Ok(out)
}

fn theta_law(_: &SuiteOptions) -> Result<()> {
    for (t, f) in series_pool(101, 60, 2)?.iter().enumerate() {
        let g = theta(f);
        for (h, c) in f.coefficients() {
            for (wm, wp, x) in c.iter() {
                for i in 0..f.n() {
                    for j in 0..f.n() {
                        let key_m = wm.push(j as u8 + 1);
                        let key_p = wp.push(i as u8 + 1);
                        // recompute the full entry from every source term landing on this key
                        let mut expected = x.zero_like();
                        for (wm2, wp2, y) in c.iter() {
                            for i2 in 0..f.n() {
                                for j2 in 0..f.n() {
                                    if wm2.push(j2 as u8 + 1) == key_m && wp2.push(i2 as u8 + 1) == key_p {
                                        expected += &(h.entry(i2, j2) * y);
                                    }
                                }
                            }
                        }
                        let got = g
                            .coefficient(h)
                            .and_then(|c| c.get(&key_m, &key_p))
                            .cloned()
                            .unwrap_or_else(|| x.zero_like());
                        check(got == expected, || format!("series {t} at {h}"))?;
                    }
                }
            }
        }
        check(g.degree() == (f.degree().0 + 1, f.degree().1 + 1), || format!("series {t}: degree"))?;
    }
    Ok(())
}

fn theta_leibniz(_: &SuiteOptions) -> Result<()> {
    let pool = series_pool(102, 60, 1)?;
    for (t, pair) in pool.chunks(2).enumerate() {
        let f = pair[0].clone().into_commutative();
        let g = pair[1].clone();
        if f.n() != g.n() || f.field() != g.field() {
            continue;
        }
        let g = g.into_commutative();
        let lhs = theta(&multiply(&f, &g)?);
        let rhs = add_scale(&multiply(&theta(&f), &g)?, &multiply(&f, &theta(&g))?, &f.field().one())?;
        check(lhs == rhs, || format!("pair {t}"))?;
    }
    Ok(())
}

fn scale_series(f: &QExpansion, a: &FieldElement) -> Result<QExpansion> {
    add_scale(&QExpansion::zero(f.n(), f.field(), f.trace_bound(), f.degree()), f, a)
}

fn theta_frobenius(_: &SuiteOptions) -> Result<()> {
    for (t, f) in series_pool(103, 30, 1)?.iter().enumerate() {
        for p in [2u64, 3, 5] {
            let lhs = theta(&frobenius(f, p, None)?);
            let rhs = scale_series(&frobenius(&theta(f), p, None)?, &f.field().int(p as i64))?;
            check(lhs == rhs, || format!("series {t}, p={p}"))?;
        }
    }
    Ok(())
}

fn theta_via_d(_: &SuiteOptions) -> Result<()> {
    for (t, f) in series_pool(104, 30, 1)?.iter().enumerate() {
        let (n, k) = (f.n(), f.field());
        let degree = (f.degree().0 + 1, f.degree().1 + 1);
        let mut acc = QExpansion::zero(n, k, f.trace_bound(), degree);
        for i in 0..n {
            for j in 0..n {
                let d = derivation_d(&Matrix::unit(n, j, i, k), f)?;
                let appended = d.map_coefficients(degree, |_, c| c.append(j as u8 + 1, i as u8 + 1));
                acc = add_scale(&acc, &appended, &k.one())?;
            }
        }
        check(theta(f) == acc, || format!("series {t}"))?;
    }
    Ok(())
}

fn divisor_sum(m: i64, power: u32) -> i64 {
    (1..=m).filter(|d| m % d == 0).map(|d| d.pow(power)).sum()
}

fn theta_ramanujan(_: &SuiteOptions) -> Result<()> {
    let k = QuadField::new(1)?;
    let coeffs: Vec<i64> = (0..=20).map(|m| if m == 0 { 1 } else { 240 * divisor_sum(m, 3) }).collect();
    let g = theta(&QExpansion::from_integers(k, &coeffs, 20)?);
    let one = TensorWord(vec![1]);
    for m in 1..=20i64 {
        let h = HermitianIndex::diagonal(&[m], k);
        let got = g.coefficient(&h).and_then(|c| c.get(&one, &one)).cloned();
        check(got == Some(k.int(240 * m * divisor_sum(m, 3))), || format!("m={m}"))?;
    }
    Ok(())
}

fn integrality(opts: &SuiteOptions) -> Result<()> {
    let k = QuadField::new(1)?;
    let mut v = split_prime_data(5, 1, 4)?;
    if let Some(cap) = opts.precision_cap {
        v = v.with_cap(cap);
    }
    let vbar = v.conjugate();
    let pi = k.gaussian(2, -1);
    check(padic_valuation(&pi, &v)?.finite() == Some(1), || "v(2 - omega) at root 2".into())?;
    let cases = [
        (vec![k.one(), k.gaussian(3, 4)], (true, true)),
        (vec![pi.inv()?], (false, true)),
        (vec![k.gaussian(2, 1).inv()?], (true, false)),
        (vec![k.rational(rat(1, 5))], (false, false)),
    ];
    for (t, (cs, expected)) in cases.iter().enumerate() {
        let mut f = QExpansion::zero(1, k, cs.len() as u32, (0, 0));
        for (m, c) in cs.iter().enumerate() {
            f.insert(HermitianIndex::diagonal(&[m as i64 + 1], k), TensorCoefficient::scalar(c.clone()))?;
        }
        let got = (padic_integral(&f, &v)?, padic_integral(&f, &vbar)?);
        check(got == *expected, || format!("case {t}: {got:?}"))?;
    }
    Ok(())
}

fn gauss_manin_du(_: &SuiteOptions) -> Result<()> {
    for d in [1, 2] {
        let k = QuadField::new(d)?;
        for n in 1..=3 {
            for a in 0..n {
                for (i, c) in [(a + 1, -k.omega()), (n + a + 1, k.omega())] {
                    let got = gauss_manin(&du(i, n, k));
                    let mut expected = BTreeMap::new();
                    for j in 0..n {
                        let s = Section::symbol(n, k, HorizontalSymbol::new(Kind::Beta, j))
                            .add(&Section::symbol(n, k, HorizontalSymbol::new(Kind::BetaPrime, j)).scale(&c));
                        let label = if i <= n { (a as u8, j as u8) } else { (j as u8, a as u8) };
                        expected.insert(label, s);
                    }
                    check(got == expected, || format!("d={d} n={n} du_{i}"))?;
                }
            }
        }
    }
    Ok(())
}

fn ks_table(_: &SuiteOptions) -> Result<()> {
    let mut r = rng(201);
    for n in [1, 2] {
        for _ in 0..5 {
            let k = QuadField::new(r.gen_range(1..=3))?;
            let p = PointOfHn::random(n, k, &mut r);
            for i in 1..=2 * n {
                for j in 1..=2 * n {
                    let expected = match (i <= n, j <= n) {
                        (true, false) => Some((i, j - n)),
                        (false, true) => Some((j, i - n)),
                        _ => None,
                    };
                    check(ks_pair(i, j, &p)? == expected, || format!("n={n} ({i}, {j})"))?;
                }
            }
            check(ks_kernel_check(n, &p)?, || format!("n={n}: kernel"))?;
        }
    }
    Ok(())
}

fn random_section<R: Rng>(n: usize, k: QuadField, rng: &mut R) -> Section {
    let degree = rng.gen_range(0..=2);
    let mut s = Section::zero(n, k, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let word = (0..degree)
            .map(|_| {
                let kind = [Kind::Alpha, Kind::Beta, Kind::AlphaPrime, Kind::BetaPrime][rng.gen_range(0..4)];
                HorizontalSymbol::new(kind, rng.gen_range(0..n))
            })
            .collect();
        s.add_term(word, Poly::random(n, k, 3, 2, true, rng));
    }
    s
}

fn thexpl(_: &SuiteOptions) -> Result<()> {
    let mut r = rng(202);
    for t in 0..12 {
        let n = 1 + t % 2;
        let k = QuadField::new(r.gen_range(1..=2))?;
        let s = random_section(n, k, &mut r);
        let frame = HodgeFrame::new(&PointOfHn::random(n, k, &mut r))?;
        check(d_thexpl_linear(&s) == d_composite(&s, &frame)?, || format!("section {t}"))?;
    }
    Ok(())
}

fn delta_examples(_: &SuiteOptions) -> Result<()> {
    let k = QuadField::new(1)?;
    let form = |w: i64, terms: &[(u32, u32, i64)]| {
        let mut f = NearlyHoloForm::zero(w, k, 5);
        for &(y, m, c) in terms {
            f.add_term(y, m, k.int(c));
        }
        f
    };
    check(delta(&form(4, &[(0, 0, 1)])) == form(6, &[(1, 0, 4)]), || "delta_4(1)".into())?;
    check(delta(&form(2, &[(0, 1, 1)])) == form(4, &[(0, 1, 1), (1, 1, 2)]), || "delta_2(q)".into())?;
    check(delta(&delta(&form(2, &[(0, 0, 1)]))) == form(6, &[(2, 0, 6)]), || "delta_4 delta_2(1)".into())
}

fn maass_theta(_: &SuiteOptions) -> Result<()> {
    let mut r = rng(301);
    let k = QuadField::new(1)?;
    let one = TensorWord(vec![1]);
    for t in 0..10 {
        let bound = r.gen_range(0..=50);
        let coeffs: Vec<i64> = (0..=bound).map(|_| r.gen_range(-30..=30)).collect();
        let f = QExpansion::from_integers(k, &coeffs, bound)?;
        let got = holomorphic_part(&delta(&NearlyHoloForm::from_qexp(&f, r.gen_range(-4..=12))?));
        let mut expected = QExpansion::zero(1, k, bound, (0, 0));
        for (h, c) in theta(&f).coefficients() {
            if let Some(x) = c.get(&one, &one) {
                expected.insert(h.clone(), TensorCoefficient::scalar(x.clone()))?;
            }
        }
        check(got == expected, || format!("form {t}"))?;
    }
    Ok(())
}

fn random_input<R: Rng>(n: usize, k: QuadField, tag: usize, rng: &mut R) -> ShimuraInput {
    let letter = |rng: &mut R| rng.gen_range(1..=n as u8);
    match tag {
        0 => {
            let mut m = BTreeMap::new();
            m.insert((letter(rng), letter(rng)), Poly::random(n, k, 3, 2, false, rng));
            ShimuraInput::StSt(m)
        }
        1 => {
            let mut lm = vec![letter(rng), letter(rng)];
            lm.sort_unstable();
            let mut f = BTreeMap::new();
            f.insert((lm, vec![letter(rng)]), Poly::random(n, k, 3, 2, false, rng));
            ShimuraInput::Sym { m_minus: 2, m_plus: 1, f }
        }
        _ => ShimuraInput::Det {
            m_minus: rng.gen_range(0..=2),
            m_plus: rng.gen_range(0..=2),
            f: Poly::random(n, k, 3, 2, false, rng),
        },
    }
}

fn closed_formulas(_: &SuiteOptions) -> Result<()> {
    let mut r = rng(302);
    for n in [1, 2] {
        for tag in 0..3 {
            for t in 0..5 {
                let k = QuadField::new(r.gen_range(1..=2))?;
                let input = random_input(n, k, tag, &mut r);
                let p = PointOfHn::random(n, k, &mut r);
                let composite = shimura_composite(&input.to_du_form(n, k), &HodgeFrame::new(&p)?)?;
                check(shimura_closed_formula(&input, &p)? == composite, || format!("n={n} tag={tag} point {t}"))?;
            }
        }
    }
    Ok(())
}

fn representations(_: &SuiteOptions) -> Result<()> {
    let mut r = rng(401);
    let weights: [(usize, [&[i64]; 5]); 2] = [
        (2, [&[1, 0], &[2, 0], &[1, 1], &[2, 1], &[1, -1]]),
        (3, [&[1, 0, 0], &[2, 0, 0], &[1, 1, 0], &[2, 1, 0], &[1, 0, -1]]),
    ];
    for (n, list) in weights {
        let k = QuadField::new(1)?;
        for lambda in list {
            let w = HighestWeight::new(lambda.to_vec())?;
            for t in 0..4 {
                let g = random_invertible(n, k, &mut r);
                let h = random_invertible(n, k, &mut r);
                check(rho_matrix(&w, &(&g * &h))? == &rho_matrix(&w, &g)? * &rho_matrix(&w, &h)?, || {
                    format!("{lambda:?} pair {t}")
                })?;
            }
            let ts: Vec<FieldElement> = (0..n).map(|i| k.gaussian(i as i64 + 2, 1)).collect();
            let mut torus = Matrix::zeros(n, n, k);
            let mut eig = k.one();
            for (i, x) in ts.iter().enumerate() {
                torus.set(i, i, x.clone());
                eig = &eig * &x.powi(lambda[i])?;
            }
            let rt = rho_matrix(&w, &torus)?;
            for i in 0..rt.rows() {
                let expected = if i == 0 { eig.clone() } else { k.zero() };
                check(rt.get(i, 0) == &expected, || format!("{lambda:?} torus row {i}"))?;
            }
        }
    }
    Ok(())
}

fn unitary_examples(_: &SuiteOptions) -> Result<()> {
    let k = QuadField::new(1)?;
    check(gu_check(&GroupElement::identity(2, k)) == Some(k.one()), || "identity".into())?;
    check(gu_check(&GroupElement::eta(2, k)) == Some(k.one()), || "eta".into())?;
    let two = GroupElement::new(Matrix::scalar(4, &k.int(2)))?;
    check(gu_check(&two) == Some(k.int(4)), || "2 I".into())?;
    let z = PointOfHn::new(Matrix::scalar(1, &k.omega()))?;
    check(moebius(&GroupElement::eta(1, k), &z)? == z, || "eta fixes omega".into())
}

fn cocycle(_: &SuiteOptions) -> Result<()> {
    let mut r = rng(501);
    for t in 0..20 {
        let n = 1 + t % 2;
        let k = QuadField::new(r.gen_range(1..=2))?;
        let g = random_element(n, k, &mut r);
        let h = random_element(n, k, &mut r);
        let z = PointOfHn::random(n, k, &mut r);
        let gh = g.mul(&h)?;
        let nu = |x: &GroupElement| gu_check(x).ok_or_else(|| fail(format!("triple {t}: not a similitude")));
        check(nu(&gh)? == &nu(&g)? * &nu(&h)?, || format!("triple {t}: nu"))?;
        let hz = moebius(&h, &z)?;
        let (mu_gh, la_gh) = automorphy_factor(&gh, &z)?;
        let (mu_g, la_g) = automorphy_factor(&g, &hz)?;
        let (mu_h, la_h) = automorphy_factor(&h, &z)?;
        check(mu_gh == &mu_g * &mu_h && la_gh == &la_g * &la_h, || format!("triple {t}: cocycle"))?;
        check(moebius(&g, &hz)? == moebius(&gh, &z)?, || format!("triple {t}: action"))?;
    }
    Ok(())
}
