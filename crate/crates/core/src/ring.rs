//! Exact arithmetic in `Z[1/N]`.
//!
//! Besides the ring itself this module carries the number theory the rest of
//! the crate leans on: trial-division factorization, `p`-adic and `m`-adic
//! valuations (with the per-prime floor formula for composite `m`), the
//! matching norms, primitive roots, and residues modulo `M * Z_(S)` where
//! `Z_(S)` is the localization away from a finite prime set `S`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest integer accepted by [`factorize`]. Trial division up to `2^24`.
pub const FACTORIZE_CAP: u64 = 1 << 48;

/// Prime factorization `base = p_1^e_1 * ... * p_k^e_k`, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    base: u64,
    primes: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn base(&self) -> u64 {
        self.base
    }

    /// `(prime, exponent)` pairs sorted by prime.
    pub fn primes(&self) -> &[(u64, u32)] {
        &self.primes
    }

    pub fn prime_list(&self) -> Vec<u64> {
        self.primes.iter().map(|&(p, _)| p).collect()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.primes
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes.iter().map(|&(p, _)| p).product()
    }

    pub fn is_prime(&self) -> bool {
        self.primes.len() == 1 && self.primes[0].1 == 1
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .primes
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "cannot factorize {n}: expected an integer >= 2"
        )));
    }
    if n > FACTORIZE_CAP {
        return Err(Error::TooLarge {
            value: n,
            cap: FACTORIZE_CAP,
        });
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut push = |m: &mut u64, p: u64| {
        let mut e = 0;
        while m.is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
    };
    push(&mut m, 2);
    push(&mut m, 3);
    // 6k +- 1 wheel
    let mut d = 5u64;
    while d * d <= m {
        push(&mut m, d);
        push(&mut m, d + 2);
        d += 6;
    }
    if m > 1 {
        primes.push((m, 1));
    }
    Ok(Factorization { base: n, primes })
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `m = root^exponent` with `exponent` maximal, so `root` is not a proper power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct PrimitiveRoot {
    pub root: u64,
    pub exponent: u32,
}

pub fn primitive_root(n: u64) -> Result<PrimitiveRoot> {
    let fac = factorize(n)?;
    let g = fac.primes().iter().fold(0u32, |g, &(_, e)| g.gcd(&e));
    let root = fac
        .primes()
        .iter()
        .map(|&(p, e)| p.pow(e / g))
        .product();
    Ok(PrimitiveRoot { root, exponent: g })
}

/// Strips every prime of `primes` from `den`, returning `(S-part, coprime part)`.
fn split_support(den: &BigInt, primes: &[u64]) -> (BigInt, BigInt) {
    let mut rest = den.clone();
    let mut part = BigInt::one();
    for &p in primes {
        let p = BigInt::from(p);
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            part *= &p;
        }
    }
    (part, rest)
}

/// True when every prime factor of `den` divides `n`.
fn supported_by(den: &BigInt, n: u64) -> bool {
    let n = BigInt::from(n);
    let mut d = den.abs();
    loop {
        if d.is_one() {
            return true;
        }
        let g = d.gcd(&n);
        if g.is_one() {
            return false;
        }
        while (&d % &g).is_zero() {
            d /= &g;
        }
    }
}

/// Element of `Z[1/N]`: a reduced fraction whose denominator only involves
/// primes dividing the context `N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NRational {
    value: BigRational,
    context: u64,
}

impl NRational {
    pub fn new(numer: BigInt, denom: BigInt, context: u64) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Self::from_ratio(BigRational::new(numer, denom), context)
    }

    pub fn from_ratio(value: BigRational, context: u64) -> Result<Self> {
        if context < 2 {
            return Err(Error::InvalidParameter(format!(
                "ring context must be >= 2, got {context}"
            )));
        }
        if !supported_by(value.denom(), context) {
            return Err(Error::Domain {
                value: value.to_string(),
                modulus: context,
            });
        }
        Ok(NRational { value, context })
    }

    pub fn from_integer(n: impl Into<BigInt>, context: u64) -> Self {
        assert!(context >= 2, "ring context must be >= 2");
        NRational {
            value: BigRational::from_integer(n.into()),
            context,
        }
    }

    pub fn zero(context: u64) -> Self {
        Self::from_integer(0, context)
    }

    pub fn one(context: u64) -> Self {
        Self::from_integer(1, context)
    }

    pub fn context(&self) -> u64 {
        self.context
    }

    pub fn numer(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.value
    }

    pub fn into_ratio(self) -> BigRational {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }

    /// Same value read in another ring; fails if the denominator leaves it.
    pub fn with_context(&self, context: u64) -> Result<Self> {
        Self::from_ratio(self.value.clone(), context)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.context == other.context {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.context, other.context))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.unchecked(&self.value + &other.value))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.unchecked(&self.value - &other.value))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.unchecked(&self.value * &other.value))
    }

    /// Units of `Z[1/N]` are `+-` products of primes dividing `N`.
    pub fn is_unit(&self) -> bool {
        !self.value.is_zero() && supported_by(self.value.numer(), self.context)
    }

    pub fn inv_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string(), self.context));
        }
        Ok(self.unchecked(self.value.recip()))
    }

    pub fn abs(&self) -> Self {
        self.unchecked(self.value.abs())
    }

    /// `self * base^exp` for a base whose primes divide the context.
    pub fn scale_pow(&self, base: u64, exp: i64) -> Self {
        self.unchecked(&self.value * rational_pow(base, exp))
    }

    /// Parses `"a/b"` or `"a"`.
    pub fn parse(s: &str, context: u64) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| err("bad numerator"))?;
        let den = BigInt::from_str(den).map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        Self::new(num, den, context)
    }

    /// Always `"num/den"`, the wire form used in JSON.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.value.numer(), self.value.denom())
    }

    fn unchecked(&self, value: BigRational) -> Self {
        NRational {
            value,
            context: self.context,
        }
    }
}

impl fmt::Display for NRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for NRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in Z[1/{}]", self.value, self.context)
    }
}

impl PartialOrd for NRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .cmp(&other.value)
            .then(self.context.cmp(&other.context))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for &NRational {
            type Output = NRational;
            fn $method(self, rhs: &NRational) -> NRational {
                self.$checked(rhs).expect("operands share a ring context")
            }
        }
        impl $tr for NRational {
            type Output = NRational;
            fn $method(self, rhs: NRational) -> NRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &NRational {
    type Output = NRational;
    fn neg(self) -> NRational {
        self.unchecked(-&self.value)
    }
}

impl Neg for NRational {
    type Output = NRational;
    fn neg(self) -> NRational {
        -&self
    }
}

/// `+inf` for zero, otherwise a finite integer. `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
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

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Ordinary `p`-adic valuation of a rational; `p` is assumed prime.
pub fn p_adic_valuation(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// `m`-adic valuation of any rational, viewed in `prod_{p | m} Q_p`:
/// `min_{p | m} floor(v_p(x) / v_p(m))`.
pub fn local_valuation(x: &BigRational, m: u64) -> Result<Valuation> {
    let fac = factorize(m)?;
    Ok(local_valuation_with(x, &fac))
}

pub(crate) fn local_valuation_with(x: &BigRational, m: &Factorization) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let v = m
        .primes()
        .iter()
        .map(|&(p, e)| {
            let vp = int_valuation(x.numer(), p) - int_valuation(x.denom(), p);
            Integer::div_floor(&vp, &(e as i64))
        })
        .min()
        .expect("factorization has at least one prime");
    Valuation::Finite(v)
}

/// `m`-adic valuation of an element of `Z[1/m]`.
pub fn n_adic_valuation(x: &NRational, m: u64) -> Result<Valuation> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("modulus must be >= 2, got {m}")));
    }
    if !supported_by(x.denom(), m) {
        return Err(Error::Domain {
            value: x.to_string(),
            modulus: m,
        });
    }
    local_valuation(x.as_ratio(), m)
}

/// `|x|_m = m^(-v_m(x))`, exact; `|0|_m = 0`.
pub fn n_adic_norm(x: &NRational, m: u64) -> Result<BigRational> {
    Ok(norm_of(n_adic_valuation(x, m)?, m))
}

/// Norm of an arbitrary rational in `prod_{p | m} Q_p`.
pub fn local_norm(x: &BigRational, m: u64) -> Result<BigRational> {
    Ok(norm_of(local_valuation(x, m)?, m))
}

fn norm_of(v: Valuation, m: u64) -> BigRational {
    match v {
        Valuation::Infinite => BigRational::zero(),
        Valuation::Finite(v) => rational_pow(m, -v),
    }
}

/// `base^exp` as an exact rational.
pub fn rational_pow(base: u64, exp: i64) -> BigRational {
    let b = BigInt::from(base).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// Canonical residue of `x` modulo `modulus * Z_(S)`, where `Z_(S)` holds the
/// rationals whose denominators avoid `primes`.
///
/// `modulus` must be positive and supported on `primes`. The result `r`
/// satisfies `0 <= r < modulus`, lies in `Z[1/S]`, and `x - r` is in
/// `modulus * Z_(S)`; two inputs share a residue iff they share a coset.
pub fn residue_mod(x: &BigRational, modulus: &BigRational, primes: &[u64]) -> BigRational {
    debug_assert!(modulus.is_positive());
    let t = x / modulus;
    let (s_part, rest) = split_support(t.denom(), primes);
    if s_part.is_one() {
        return BigRational::zero();
    }
    // t = a / (s_part * rest); pick k = a * rest^-1 mod s_part.
    let inv = mod_inverse(&rest, &s_part);
    let k = (t.numer() * inv).mod_floor(&s_part);
    modulus * BigRational::new(k, s_part)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "unit modulo S-part");
    e.x.mod_floor(m)
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back through the logs of numerator and denominator.
    let sign = if x.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * (big_ln(x.numer()) - big_ln(x.denom())).exp()
}

fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64, ctx: u64) -> NRational {
        NRational::new(n.into(), d.into(), ctx).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().primes(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(2).unwrap().primes(), &[(2, 1)]);
        assert_eq!(factorize(60).unwrap().primes(), &[(2, 2), (3, 1), (5, 1)]);
        assert_eq!(factorize(1 << 40).unwrap().primes(), &[(2, 40)]);
        assert_eq!(factorize(999_983 * 999_979).unwrap().primes().len(), 2);
    }

    #[test]
    fn factorize_rejects_small_and_huge() {
        assert!(matches!(factorize(0), Err(Error::InvalidParameter(_))));
        assert!(matches!(factorize(1), Err(Error::InvalidParameter(_))));
        assert!(matches!(factorize(u64::MAX), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn factorization_products_match() {
        for n in 2..5000u64 {
            let f = factorize(n).unwrap();
            let prod: u64 = f.primes().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.primes().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn ring_arithmetic() {
        assert_eq!(&q(1, 2, 6) + &q(1, 3, 6), q(5, 6, 6));
        assert_eq!(&q(1, 2, 2) * &NRational::from_integer(2, 2), NRational::one(2));
        assert_eq!(q(3, 1, 6).inv_unit().unwrap(), q(1, 3, 6));
        assert_eq!(q(-4, 9, 6).inv_unit().unwrap(), q(-9, 4, 6));
        assert!(matches!(q(5, 1, 6).inv_unit(), Err(Error::NotAUnit(_, 6))));
        assert!(NRational::zero(6).inv_unit().is_err());
        assert_eq!(-q(1, 2, 6), q(-1, 2, 6));
    }

    #[test]
    fn ring_membership_is_enforced() {
        assert!(matches!(
            NRational::new(1.into(), 5.into(), 6),
            Err(Error::Domain { .. })
        ));
        assert_eq!(NRational::zero(6).denom(), &BigInt::one());
        assert!(q(1, 2, 6).checked_add(&q(1, 2, 10)).is_err());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(NRational::parse(" -3/12 ", 6).unwrap(), q(-1, 4, 6));
        assert_eq!(NRational::parse("7", 6).unwrap().to_fraction_string(), "7/1");
        assert!(NRational::parse("1/0", 6).is_err());
        assert!(NRational::parse("x", 6).is_err());
    }

    // Largest t in [-8, 8] with x * m^-t integral at every prime of m.
    fn brute_valuation(x: &BigRational, m: u64) -> i64 {
        let primes = factorize(m).unwrap().prime_list();
        (-8..=8i64)
            .rev()
            .find(|&t| {
                let y = x * rational_pow(m, -t);
                let (s, _) = split_support(y.denom(), &primes);
                s.is_one()
            })
            .expect("valuation within search window")
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(brute_valuation(&rat(1, 2), 12), -1);
        assert_eq!(brute_valuation(&rat(6, 1), 12), 0);
        assert_eq!(n_adic_valuation(&q(1, 2, 12), 12).unwrap(), Valuation::Finite(-1));
        assert_eq!(n_adic_valuation(&q(6, 1, 12), 12).unwrap(), Valuation::Finite(0));
        assert_eq!(n_adic_valuation(&NRational::zero(12), 12).unwrap(), Valuation::Infinite);
    }

    #[test]
    fn valuation_matches_brute_force() {
        for num in -60i64..=60 {
            for den in [1i64, 2, 3, 4, 6, 8, 9, 12, 16, 27, 36, 144] {
                let x = rat(num, den);
                if x.is_zero() {
                    continue;
                }
                for m in [2u64, 3, 4, 6, 12, 18] {
                    if !supported_by(x.denom(), m) {
                        continue;
                    }
                    let v = local_valuation(&x, m).unwrap();
                    assert_eq!(v, Valuation::Finite(brute_valuation(&x, m)), "x={x} m={m}");
                }
            }
        }
    }

    #[test]
    fn valuation_domain_error() {
        assert!(matches!(
            n_adic_valuation(&q(1, 5, 30), 12),
            Err(Error::Domain { .. })
        ));
        // the general form accepts it: 5 is a unit at 2 and 3
        assert_eq!(local_valuation(&rat(1, 5), 12).unwrap(), Valuation::Finite(0));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(n_adic_norm(&q(1, 2, 12), 12).unwrap(), rat(12, 1));
        assert_eq!(n_adic_norm(&q(144, 1, 12), 12).unwrap(), rat(1, 144));
        assert_eq!(n_adic_norm(&NRational::one(12), 12).unwrap(), rat(1, 1));
        assert_eq!(n_adic_norm(&NRational::zero(12), 12).unwrap(), rat(0, 1));
    }

    fn brute_primitive_root(n: u64) -> (u64, u32) {
        for r in 2..=n {
            let mut a = 1u32;
            let mut pow = r;
            while pow < n {
                pow = pow.saturating_mul(r);
                a += 1;
            }
            if pow == n {
                return (r, a);
            }
        }
        unreachable!()
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(brute_primitive_root(8), (2, 3));
        assert_eq!(brute_primitive_root(12), (12, 1));
        assert_eq!(brute_primitive_root(36), (6, 2));
        for n in 2..3000 {
            let pr = primitive_root(n).unwrap();
            assert_eq!((pr.root, pr.exponent), brute_primitive_root(n), "n={n}");
        }
    }

    #[test]
    fn residues() {
        let m = rat(4, 1);
        // 1/3 = 3 mod 4 Z_(2) since 3 * 3 = 9 = 1 mod 4
        assert_eq!(residue_mod(&rat(1, 3), &m, &[2]), rat(3, 1));
        assert_eq!(residue_mod(&rat(-1, 2), &m, &[2]), rat(7, 2));
        assert_eq!(residue_mod(&rat(5, 1), &rat(1, 2), &[2]), rat(0, 1));
        assert_eq!(residue_mod(&rat(5, 4), &rat(1, 2), &[2]), rat(1, 4));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn element(ctx: u64) -> impl Strategy<Value = BigRational> {
            let primes = factorize(ctx).unwrap().prime_list();
            (-5000i64..5000, proptest::collection::vec(0u32..5, primes.len())).prop_map(
                move |(n, exps)| {
                    let den: u64 = primes.iter().zip(&exps).map(|(p, &e)| p.pow(e)).product();
                    BigRational::new(n.into(), den.into())
                },
            )
        }

        fn canonical(x: &NRational) -> bool {
            x.numer().gcd(x.denom()).is_one()
                && x.denom().is_positive()
                && supported_by(x.denom(), x.context())
                && (!x.is_zero() || x.denom().is_one())
        }

        proptest! {
            #[test]
            fn results_are_canonical(a in element(60), b in element(60)) {
                let a = NRational::from_ratio(a, 60).unwrap();
                let b = NRational::from_ratio(b, 60).unwrap();
                prop_assert!(canonical(&(&a + &b)));
                prop_assert!(canonical(&(&a * &b)));
                prop_assert!(canonical(&(&a - &b)));
                prop_assert!(canonical(&-&a));
            }

            #[test]
            fn ultrametric(x in element(12), y in element(12), m in prop::sample::select(vec![2u64, 3, 6, 12])) {
                let vx = local_valuation(&x, m).unwrap();
                let vy = local_valuation(&y, m).unwrap();
                let vs = local_valuation(&(&x + &y), m).unwrap();
                prop_assert!(vs >= vx.min(vy));
                if vx != vy {
                    prop_assert_eq!(vs, vx.min(vy));
                }
            }

            #[test]
            fn valuation_shift(x in element(30), m in prop::sample::select(vec![2u64, 5, 6, 10, 30, 4, 9])) {
                prop_assume!(!x.is_zero());
                let v = local_valuation(&x, m).unwrap().finite().unwrap();
                let mx = &x * BigRational::from_integer(m.into());
                prop_assert_eq!(local_valuation(&mx, m).unwrap(), Valuation::Finite(v + 1));
            }

            #[test]
            fn prime_modulus_is_p_adic(x in element(30), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
                // direct oracle: strip p from numerator and denominator by hand
                let mut expected = 0i64;
                let (mut a, mut b) = (x.numer().clone(), x.denom().clone());
                let pb = BigInt::from(p);
                if x.is_zero() {
                    prop_assert_eq!(local_valuation(&x, p).unwrap(), Valuation::Infinite);
                } else {
                    while (&a % &pb).is_zero() { a /= &pb; expected += 1; }
                    while (&b % &pb).is_zero() { b /= &pb; expected -= 1; }
                    prop_assert_eq!(local_valuation(&x, p).unwrap(), Valuation::Finite(expected));
                    prop_assert_eq!(p_adic_valuation(&x, p), Valuation::Finite(expected));
                }
            }

            #[test]
            fn primitive_root_idempotent(n in 2u64..100_000) {
                let pr = primitive_root(n).unwrap();
                prop_assert_eq!(pr.root.checked_pow(pr.exponent), Some(n));
                prop_assert_eq!(primitive_root(pr.root).unwrap(), PrimitiveRoot { root: pr.root, exponent: 1 });
            }

            #[test]
            fn residue_is_canonical(x in element(12), shift in element(12), lvl in -4i64..6) {
                let primes = [2u64, 3];
                let modulus = rational_pow(6, lvl);
                let r = residue_mod(&x, &modulus, &primes);
                prop_assert!(!r.is_negative() && r < modulus);
                // shifting by an integer multiple of the modulus keeps the residue
                let k = shift.numer().clone();
                let y = &x + &modulus * BigRational::from_integer(k);
                prop_assert_eq!(residue_mod(&y, &modulus, &primes), r.clone());
                // and shifting by a unit-denominator multiple too
                let z = &x + &modulus * BigRational::new(7.into(), 5.into());
                prop_assert_eq!(residue_mod(&z, &modulus, &primes), r);
            }
        }
    }
}
