//! Exact arithmetic in the imaginary quadratic field `K = Q(sqrt(-d))` and
//! valuations at the two primes above a split rational prime.
//!
//! Elements are stored as `x + y*w` with `w^2 = -d`. The generator `w` is the
//! fixed CM generator, so its complex conjugate is `-w`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default ceiling on the p-adic precision used by [`padic_valuation`].
pub const DEFAULT_PRECISION_CAP: u32 = 1024;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn is_squarefree(d: i64) -> bool {
    if d <= 0 {
        return false;
    }
    let mut m = d;
    let mut f = 2i64;
    while f * f <= m {
        if m % f == 0 {
            m /= f;
            if m % f == 0 {
                return false;
            }
        }
        f += 1;
    }
    true
}

/// The field `Q(sqrt(-d))`, validated once so element constructors can skip the check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadField {
    d: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::Parameter(format!(
                "field parameter d={d} must be a positive square-free integer"
            )));
        }
        Ok(QuadField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::from_rational(Rational::zero(), self.d)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_rational(Rational::one(), self.d)
    }

    /// The generator `w = sqrt(-d)`.
    pub fn omega(&self) -> FieldElement {
        FieldElement::new(Rational::zero(), Rational::one(), self.d)
    }

    pub fn int(&self, v: i64) -> FieldElement {
        FieldElement::from_rational(int(v), self.d)
    }

    pub fn rational(&self, r: Rational) -> FieldElement {
        FieldElement::from_rational(r, self.d)
    }

    pub fn elem(&self, x: Rational, y: Rational) -> FieldElement {
        FieldElement::new(x, y, self.d)
    }

    /// `a + b*w` with integer coordinates.
    pub fn gaussian(&self, a: i64, b: i64) -> FieldElement {
        FieldElement::new(int(a), int(b), self.d)
    }
}

/// An element `x + y*w` of `Q(sqrt(-d))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    x: Rational,
    y: Rational,
    d: i64,
}

impl FieldElement {
    /// Builds `x + y*w`. `d` is trusted; use [`QuadField`] for validated construction.
    pub fn new(x: Rational, y: Rational, d: i64) -> Self {
        debug_assert!(d > 0);
        FieldElement { x, y, d }
    }

    pub fn from_rational(x: Rational, d: i64) -> Self {
        FieldElement::new(x, Rational::zero(), d)
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn field(&self) -> QuadField {
        QuadField { d: self.d }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn zero_like(&self) -> Self {
        FieldElement::from_rational(Rational::zero(), self.d)
    }

    pub fn one_like(&self) -> Self {
        FieldElement::from_rational(Rational::one(), self.d)
    }

    /// The rational value if `y = 0`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.y.is_zero().then_some(&self.x)
    }

    pub fn conj(&self) -> Self {
        FieldElement::new(self.x.clone(), -&self.y, self.d)
    }

    /// `Tr_{K/Q}(a) = a + conj(a)`.
    pub fn trace(&self) -> Rational {
        &self.x + &self.x
    }

    /// `N_{K/Q}(a) = a * conj(a) = x^2 + d y^2`.
    pub fn norm(&self) -> Rational {
        &self.x * &self.x + int(self.d) * &self.y * &self.y
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FieldElement::new(&self.x * r, &self.y * r, self.d)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Parameter(format!(
                "field mismatch: d={} vs d={}",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FieldElement::new(&self.x + &other.x, &self.y + &other.y, self.d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FieldElement::new(&self.x - &other.x, &self.y - &other.y, self.d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = int(self.d);
        let x = &self.x * &other.x - d * &self.y * &other.y;
        let y = &self.x * &other.y + &self.y * &other.x;
        Ok(FieldElement::new(x, y, self.d))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::MathDomain("division by zero in K".into()));
        }
        let n = self.norm();
        Ok(FieldElement::new(&self.x / &n, -&self.y / &n, self.d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.one_like();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Integer power, negative exponents allowed for nonzero elements.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    /// Membership in `Z[w]`.
    pub fn in_z_omega(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    /// Membership in the maximal order: trace and norm both integral.
    pub fn in_maximal_order(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }
}

fn expect_same_field(a: &FieldElement, b: &FieldElement) {
    assert_eq!(a.d, b.d, "field mismatch between d={} and d={}", a.d, b.d);
}

impl Add<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        expect_same_field(self, rhs);
        FieldElement::new(&self.x + &rhs.x, &self.y + &rhs.y, self.d)
    }
}

impl Sub<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        expect_same_field(self, rhs);
        FieldElement::new(&self.x - &rhs.x, &self.y - &rhs.y, self.d)
    }
}

impl Mul<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        expect_same_field(self, rhs);
        let d = int(self.d);
        let x = &self.x * &rhs.x - d * &self.y * &rhs.y;
        let y = &self.x * &rhs.y + &self.y * &rhs.x;
        FieldElement::new(x, y, self.d)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        expect_same_field(self, rhs);
        self.x += &rhs.x;
        self.y += &rhs.y;
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        expect_same_field(self, rhs);
        self.x -= &rhs.x;
        self.y -= &rhs.y;
    }
}

impl MulAssign<&FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &FieldElement) {
        *self = &*self * rhs;
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(-&self.x, -&self.y, self.d)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on `(d, x, y)`; only used to give containers a deterministic order.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.y.cmp(&other.y))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "({})w", self.y),
            (false, false) => write!(f, "{} + ({})w", self.x, self.y),
        }
    }
}

/// Canonical text for a rational: `"n"` for integers, `"p/q"` otherwise, always reduced.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Validation(format!("malformed rational {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Validation(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Wire form of a field element: `["x", "y"]`; `d` lives in the enclosing header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementRepr(pub Rational, pub Rational);

impl ElementRepr {
    pub fn of(e: &FieldElement) -> Self {
        ElementRepr(e.x.clone(), e.y.clone())
    }

    pub fn into_element(self, d: i64) -> FieldElement {
        FieldElement::new(self.0, self.1, d)
    }
}

impl Serialize for ElementRepr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.0), format_rational(&self.1)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ElementRepr {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(de)?;
        let x = parse_rational(&x).map_err(D::Error::custom)?;
        let y = parse_rational(&y).map_err(D::Error::custom)?;
        Ok(ElementRepr(x, y))
    }
}

/// p-adic valuation, with `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

/// A split prime `p` together with a Hensel-lifted square root of `-d` in `Z_p`.
///
/// The embedding `w -> r` picks one of the two primes above `p`;
/// [`SplitPrimeData::conjugate`] gives the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPrimeData {
    p: u64,
    d: i64,
    /// `roots[k - 1]` is `r_k`, with `r_k^2 = -d mod p^k`.
    roots: Vec<BigInt>,
    cap: u32,
}

impl SplitPrimeData {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn precision(&self) -> u32 {
        self.roots.len() as u32
    }

    pub fn roots(&self) -> &[BigInt] {
        &self.roots
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Sets the ceiling used when a valuation needs more digits than were precomputed.
    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap.max(self.precision());
        self
    }

    /// The data for the conjugate prime, i.e. the embedding `w -> -r`.
    pub fn conjugate(&self) -> Self {
        let p = BigInt::from(self.p);
        let mut pk = BigInt::one();
        let roots = self
            .roots
            .iter()
            .map(|r| {
                pk *= &p;
                (&pk - r).mod_floor(&pk)
            })
            .collect();
        SplitPrimeData {
            p: self.p,
            d: self.d,
            roots,
            cap: self.cap,
        }
    }

    /// `r_k`, lifting past the stored precision when needed.
    pub fn root_mod(&self, k: u32) -> BigInt {
        assert!(k >= 1);
        if let Some(r) = self.roots.get(k as usize - 1) {
            return r.clone();
        }
        let mut r = self.roots.last().cloned().expect("at least one root");
        for level in self.precision()..k {
            r = hensel_step(&r, self.p, self.d, level);
        }
        r
    }
}

/// Lifts `r` with `r^2 = -d mod p^level` to a root mod `p^(level + 1)`.
fn hensel_step(r: &BigInt, p: u64, d: i64, level: u32) -> BigInt {
    let p_big = BigInt::from(p);
    let pk = p_big.pow(level);
    let f = r * r + BigInt::from(d);
    debug_assert!((&f % &pk).is_zero());
    let quotient = (&f / &pk).mod_floor(&p_big);
    let deriv = (BigInt::from(2) * r).mod_floor(&p_big);
    let inv = mod_inverse(&deriv, &p_big).expect("2r is a unit for odd p not dividing d");
    let t = (-(quotient * inv)).mod_floor(&p_big);
    (r + t * &pk).mod_floor(&(pk * p_big))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    g.gcd.is_one().then(|| g.x.mod_floor(m))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= p {
        if p.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Finds the smallest nonnegative square root of `-d` mod `p` and lifts it to `p^precision`.
pub fn split_prime_data(p: u64, d: i64, precision: u32) -> Result<SplitPrimeData> {
    QuadField::new(d)?;
    if precision == 0 {
        return Err(Error::Parameter("precision must be positive".into()));
    }
    if !is_prime(p) || p == 2 {
        return Err(Error::Parameter(format!("{p} is not an odd prime")));
    }
    if d % p as i64 == 0 {
        return Err(Error::NotSplit { p, d });
    }
    let target = (-d).rem_euclid(p as i64) as u64;
    let r0 = (0..p)
        .find(|r| (*r as u128 * *r as u128 % p as u128) as u64 == target)
        .ok_or(Error::NotSplit { p, d })?;
    let mut roots = vec![BigInt::from(r0)];
    for level in 1..precision {
        let next = hensel_step(roots.last().unwrap(), p, d, level);
        roots.push(next);
    }
    Ok(SplitPrimeData {
        p,
        d,
        roots,
        cap: DEFAULT_PRECISION_CAP.max(precision),
    })
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Valuation of `x + y*r` where `w -> r` is the embedding recorded in `v`.
///
/// Precision is raised from `v.precision()` by doubling until the residue is
/// nonzero or the cap is reached.
pub fn padic_valuation(a: &FieldElement, v: &SplitPrimeData) -> Result<Valuation> {
    if a.d != v.d {
        return Err(Error::Parameter(format!(
            "element over d={} but prime data over d={}",
            a.d, v.d
        )));
    }
    if a.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let p = BigInt::from(v.p);
    let den = a.x.denom().lcm(a.y.denom());
    let num_x = a.x.numer() * (&den / a.x.denom());
    let num_y = a.y.numer() * (&den / a.y.denom());
    let den_val = int_valuation(&den, &p);
    if num_y.is_zero() {
        return Ok(Valuation::Finite(int_valuation(&num_x, &p) - den_val));
    }
    let mut k = v.precision().max(1);
    loop {
        let pk = p.pow(k);
        let residue = (&num_x + &num_y * v.root_mod(k)).mod_floor(&pk);
        if !residue.is_zero() {
            return Ok(Valuation::Finite(int_valuation(&residue, &p) - den_val));
        }
        if k >= v.cap {
            return Err(Error::Precision { cap: v.cap });
        }
        k = (k * 2).min(v.cap);
    }
}

/// Valuation of a rational at `p`.
pub fn rational_valuation(r: &Rational, p: u64) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    Valuation::Finite(int_valuation(r.numer(), &p) - int_valuation(r.denom(), &p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> QuadField {
        QuadField::new(1).unwrap()
    }

    #[test]
    fn field_parameter_validation() {
        assert!(QuadField::new(1).is_ok());
        assert!(QuadField::new(3).is_ok());
        assert!(QuadField::new(4).is_err());
        assert!(QuadField::new(0).is_err());
        assert!(QuadField::new(-1).is_err());
    }

    #[test]
    fn one_is_multiplicative_identity() {
        let k = QuadField::new(7).unwrap();
        let a = k.elem(rat(3, 4), rat(-5, 2));
        assert_eq!(&k.one() * &a, a);
    }

    #[test]
    fn conjugation() {
        let k = k1();
        assert_eq!(k.gaussian(2, 3).conj(), k.gaussian(2, -3));
        let a = k.elem(rat(1, 3), rat(2, 7));
        assert_eq!(a.conj().conj(), a);
        assert_eq!(k.int(5).conj(), k.int(5));
    }

    #[test]
    fn gaussian_norm_product() {
        let k = k1();
        assert_eq!(k.gaussian(1, 1) * k.gaussian(1, -1), k.int(2));
    }

    #[test]
    fn trace_and_norm() {
        let k = k1();
        assert_eq!(k.rational(rat(7, 3)).trace(), rat(14, 3));
        let a = k.gaussian(3, 5);
        assert_eq!(a.trace(), int(6));
        assert_eq!(a.norm(), int(34));
        assert_eq!(k.zero().norm(), int(0));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = QuadField::new(1).unwrap().one();
        let b = QuadField::new(2).unwrap().one();
        assert!(matches!(a.try_add(&b), Err(Error::Parameter(_))));
        assert!(matches!(a.try_mul(&b), Err(Error::Parameter(_))));
    }

    #[test]
    fn division() {
        let k = QuadField::new(5).unwrap();
        let a = k.gaussian(3, -2);
        let b = k.elem(rat(1, 2), rat(3, 1));
        assert_eq!(a.try_div(&b).unwrap() * &b, a);
        assert!(matches!(a.try_div(&k.zero()), Err(Error::MathDomain(_))));
    }

    #[test]
    fn maximal_order_membership() {
        let k3 = QuadField::new(3).unwrap();
        let half = k3.elem(rat(1, 2), rat(1, 2));
        assert!(half.in_maximal_order());
        assert!(!half.in_z_omega());
        let k1 = k1();
        assert!(!k1.elem(rat(1, 2), rat(1, 2)).in_maximal_order());
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-3", "1/2", "-22/7"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("4/2").unwrap(), int(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn split_prime_examples() {
        let v = split_prime_data(5, 1, 2).unwrap();
        assert_eq!(v.roots(), &[BigInt::from(2), BigInt::from(7)]);
        assert!(matches!(
            split_prime_data(3, 1, 2),
            Err(Error::NotSplit { p: 3, d: 1 })
        ));
        let v = split_prime_data(13, 3, 1).unwrap();
        assert_eq!(v.roots()[0], BigInt::from(6));
        assert!(matches!(split_prime_data(5, 5, 1), Err(Error::NotSplit { .. })));
        assert!(matches!(split_prime_data(9, 1, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn hensel_roots_are_coherent() {
        let v = split_prime_data(13, 3, 6).unwrap();
        let p = BigInt::from(13);
        for (i, r) in v.roots().iter().enumerate() {
            let pk = p.pow(i as u32 + 1);
            assert!(((r * r + BigInt::from(3)) % &pk).is_zero());
            if i > 0 {
                let prev = &v.roots()[i - 1];
                assert_eq!(r.mod_floor(&p.pow(i as u32)), *prev);
            }
        }
        assert_eq!(v.root_mod(9).mod_floor(&p.pow(6)), v.roots()[5]);
    }

    #[test]
    fn valuation_examples() {
        let k = k1();
        let v = split_prime_data(5, 1, 3).unwrap();
        assert_eq!(padic_valuation(&k.int(5), &v).unwrap(), Valuation::Finite(1));
        assert_eq!(padic_valuation(&k.int(1), &v).unwrap(), Valuation::Finite(0));
        assert_eq!(padic_valuation(&k.zero(), &v).unwrap(), Valuation::Infinite);
        let a = k.gaussian(2, -1);
        assert_eq!(padic_valuation(&a, &v).unwrap(), Valuation::Finite(1));
        assert_eq!(
            padic_valuation(&a, &v.conjugate()).unwrap(),
            Valuation::Finite(0)
        );
        let b = a.scale(&rat(1, 25));
        assert_eq!(padic_valuation(&b, &v).unwrap(), Valuation::Finite(-1));
    }

    #[test]
    fn valuation_needs_more_precision_than_stored() {
        let k = k1();
        let v = split_prime_data(5, 1, 1).unwrap();
        // (2 - w)^6 has valuation 6 at the prime where w -> 2.
        let a = k.gaussian(2, -1).pow(6);
        assert_eq!(padic_valuation(&a, &v).unwrap(), Valuation::Finite(6));
        let capped = v.with_cap(3);
        assert!(matches!(
            padic_valuation(&a, &capped),
            Err(Error::Precision { cap: 3 })
        ));
    }
}
