//! The group `Gamma(S)` as exact algebra.
//!
//! An element is a pair `(q, v)` with `q` in `Z[1/N]` and `v` in `Z^k`,
//! multiplied by `(q, v)(q', v') = (q + lambda(v) q', v + v')` where
//! `lambda(v) = prod n_i^{v_i}`. The generators are `b = (1, 0)` and
//! `a_i = (0, e_i)`, so `a_i b a_i^-1 = b^{n_i}`. Presentations written with
//! `a_i^-1 b a_i = b^{n_i}` are the same group under `a_i -> a_i^-1`.
//!
//! Every element acts on the line by `x -> lambda(v) x + q` and on each
//! `Q_{n_i}` as a similarity with ratio `n_i^{-v_i}`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{self, factorize, gcd_u64, Factorization, NRational};

/// Ordered list of pairwise coprime factors `n_i >= 2`.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    factors: Vec<u64>,
    modulus: u64,
    factorizations: Vec<Factorization>,
    gamma_n: Option<u64>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for GroupSpec {}

impl GroupSpec {
    pub fn new(factors: Vec<u64>) -> Result<Arc<Self>> {
        Self::build(factors, None)
    }

    /// `Gamma_n ~ Gamma(p_1^{2e_1}, ..., p_k^{2e_k})` for `n = prod p_i^{e_i}`.
    pub fn gamma_n(n: u64) -> Result<Arc<Self>> {
        let fac = factorize(n)?;
        let factors = fac
            .primes()
            .iter()
            .map(|&(p, e)| {
                p.checked_pow(2 * e).ok_or(Error::TooLarge {
                    value: n,
                    cap: ring::FACTORIZE_CAP,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(factors, Some(n))
    }

    fn build(factors: Vec<u64>, gamma_n: Option<u64>) -> Result<Arc<Self>> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("at least one factor is required".into()));
        }
        let factorizations = factors
            .iter()
            .map(|&n| factorize(n))
            .collect::<Result<Vec<_>>>()?;
        for (i, &a) in factors.iter().enumerate() {
            for &b in &factors[i + 1..] {
                if gcd_u64(a, b) != 1 {
                    return Err(Error::NotCoprime(a, b));
                }
            }
        }
        let modulus = factors
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
            .filter(|&m| m <= ring::FACTORIZE_CAP)
            .ok_or(Error::TooLarge {
                value: u64::MAX,
                cap: ring::FACTORIZE_CAP,
            })?;
        Ok(Arc::new(GroupSpec {
            factors,
            modulus,
            factorizations,
            gamma_n,
        }))
    }

    /// Accepts `"gamma:n"` or a comma separated factor list such as `"4,9"`.
    pub fn parse(s: &str) -> Result<Arc<Self>> {
        let s = s.trim();
        let parse_int = |t: &str| {
            t.trim().parse::<u64>().map_err(|_| Error::Parse {
                input: s.to_string(),
                reason: format!("{t:?} is not a positive integer"),
            })
        };
        if let Some(n) = s.strip_prefix("gamma:") {
            return Self::gamma_n(parse_int(n)?);
        }
        let factors = s.split(',').map(parse_int).collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// `N`, the product of all factors.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factorizations(&self) -> &[Factorization] {
        &self.factorizations
    }

    pub fn gamma_n_origin(&self) -> Option<u64> {
        self.gamma_n
    }

    pub fn factor(&self, i: usize) -> Result<u64> {
        self.factors.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.rank(),
        })
    }

    /// `lambda(v) = prod n_i^{v_i}`.
    pub fn lambda(&self, v: &[i64]) -> BigRational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&n, &e) in self.factors.iter().zip(v) {
            let p = BigInt::from(n).pow(e.unsigned_abs() as u32);
            if e >= 0 {
                num *= p;
            } else {
                den *= p;
            }
        }
        BigRational::new_raw(num, den)
    }

    /// `(s_1, ..., s_k)` with `n_i = s_i^2` when every factor is an even prime power.
    fn matrix_roots(&self) -> Option<Vec<u64>> {
        self.factorizations
            .iter()
            .map(|f| match f.primes() {
                &[(p, e)] if e % 2 == 0 => Some(p.pow(e / 2)),
                _ => None,
            })
            .collect()
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut gens: Vec<Generator> = (0..self.rank()).map(Generator::A).collect();
        gens.push(Generator::B);
        gens
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        write!(f, "Gamma({})", list.join(","))
    }
}

/// `b`, or `a_i` with a zero-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A(usize),
    B,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::A(i) => write!(f, "a{}", i + 1),
            Generator::B => write!(f, "b"),
        }
    }
}

/// A generator raised to a nonzero power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub power: i64,
}

impl Letter {
    pub fn new(generator: Generator, power: i64) -> Self {
        Letter { generator, power }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power == 1 {
            write!(f, "{}", self.generator)
        } else {
            write!(f, "{}^{}", self.generator, self.power)
        }
    }
}

pub fn format_word(word: &[Letter]) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    word.iter().map(Letter::to_string).collect::<Vec<_>>().join(" ")
}

/// Parses whitespace separated letters such as `"a1 b a1^-1 b^-2"`.
/// A bare `a` names `a1` when the group has rank one; `1` is the empty word.
pub fn parse_word(spec: &GroupSpec, s: &str) -> Result<Vec<Letter>> {
    let err = |reason: String| Error::Parse {
        input: s.to_string(),
        reason,
    };
    let mut word = Vec::new();
    for token in s.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (base, power) = match token.split_once('^') {
            Some((b, p)) => (
                b,
                p.parse::<i64>()
                    .map_err(|_| err(format!("bad exponent in {token:?}")))?,
            ),
            None => (token, 1),
        };
        let generator = match base {
            "b" => Generator::B,
            "a" if spec.rank() == 1 => Generator::A(0),
            "a" => return Err(err("bare 'a' is ambiguous for rank > 1".into())),
            _ => {
                let idx = base
                    .strip_prefix('a')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| i >= 1 && i <= spec.rank())
                    .ok_or_else(|| err(format!("unknown generator {base:?}")))?;
                Generator::A(idx - 1)
            }
        };
        if power != 0 {
            word.push(Letter::new(generator, power));
        }
    }
    Ok(word)
}

/// `(q, v)` in `Z[1/N] x| Z^k`.
#[derive(Clone)]
pub struct GroupElement {
    q: NRational,
    v: Vec<i64>,
    spec: Arc<GroupSpec>,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
            && self.v == other.v
            && (Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec)
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.q.hash(state);
        self.v.hash(state);
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?})", self.q, self.v)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl GroupElement {
    pub fn new(spec: &Arc<GroupSpec>, q: NRational, v: Vec<i64>) -> Result<Self> {
        if v.len() != spec.rank() {
            return Err(Error::InvalidParameter(format!(
                "exponent vector has length {}, expected {}",
                v.len(),
                spec.rank()
            )));
        }
        let q = q.with_context(spec.modulus())?;
        Ok(GroupElement {
            q,
            v,
            spec: Arc::clone(spec),
        })
    }

    pub fn identity(spec: &Arc<GroupSpec>) -> Self {
        GroupElement {
            q: NRational::zero(spec.modulus()),
            v: vec![0; spec.rank()],
            spec: Arc::clone(spec),
        }
    }

    pub fn generator(spec: &Arc<GroupSpec>, which: Generator) -> Result<Self> {
        let mut g = Self::identity(spec);
        match which {
            Generator::B => g.q = NRational::one(spec.modulus()),
            Generator::A(i) => {
                spec.factor(i)?;
                g.v[i] = 1;
            }
        }
        Ok(g)
    }

    /// `b^m`.
    pub fn b_power(spec: &Arc<GroupSpec>, m: impl Into<BigInt>) -> Self {
        let mut g = Self::identity(spec);
        g.q = NRational::from_integer(m, spec.modulus());
        g
    }

    pub fn q(&self) -> &NRational {
        &self.q
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn is_identity(&self) -> bool {
        self.q.is_zero() && self.v.iter().all(|&e| e == 0)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    /// `lambda(v)`, the expansion factor of the affine action.
    pub fn expansion(&self) -> BigRational {
        self.spec.lambda(&self.v)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let shifted = other.q.as_ratio() * self.expansion();
        let q = NRational::from_ratio(self.q.as_ratio() + shifted, self.spec.modulus())?;
        let v = self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect();
        Ok(GroupElement {
            q,
            v,
            spec: Arc::clone(&self.spec),
        })
    }

    /// `(q, v)^-1 = (-q / lambda(v), -v)`.
    pub fn inverse(&self) -> Self {
        let q = -self.q.as_ratio() / self.expansion();
        GroupElement {
            q: NRational::from_ratio(q, self.spec.modulus()).expect("lambda is a unit"),
            v: self.v.iter().map(|e| -e).collect(),
            spec: Arc::clone(&self.spec),
        }
    }

    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(&self.spec);
        let mut sq = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(&(self * other) * &self.inverse()) * &other.inverse()
    }

    /// Exact affine action `x -> lambda(v) x + q` on `Q`.
    pub fn act(&self, x: &BigRational) -> BigRational {
        self.expansion() * x + self.q.as_ratio()
    }

    pub fn affine_action(&self, x: f64) -> f64 {
        ring::ratio_to_f64(&self.expansion()) * x + self.q.to_f64()
    }

    /// Similarity ratio `|lambda(v)|_{n_i} = n_i^{-v_i}` of the action on `Q_{n_i}`.
    pub fn similarity_factor(&self, i: usize) -> Result<BigRational> {
        let n = self.spec.factor(i)?;
        Ok(ring::rational_pow(n, -self.v[i]))
    }

    pub fn normal_form(&self) -> NormalForm {
        let den = self.q.denom();
        let u: Vec<u64> = self
            .spec
            .factorizations()
            .iter()
            .map(|fac| {
                fac.primes()
                    .iter()
                    .map(|&(p, e)| {
                        let vp = ring::p_adic_valuation(&BigRational::from_integer(den.clone()), p)
                            .finite()
                            .unwrap_or(0) as u64;
                        vp.div_ceil(e as u64)
                    })
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let ui: Vec<i64> = u.iter().map(|&x| x as i64).collect();
        let m = self.q.as_ratio() * self.spec.lambda(&ui);
        debug_assert!(m.is_integer());
        let w = ui.iter().zip(&self.v).map(|(a, b)| a + b).collect();
        NormalForm {
            u,
            m: m.to_integer(),
            w,
        }
    }

    /// `a_i -> diag(s_i, 1/s_i)`, `b -> [[1, 1], [0, 1]]` where `n_i = s_i^2`.
    /// The image of `(q, v)` is `[[s, q/s], [0, 1/s]]` with `s^2 = lambda(v)`.
    pub fn to_matrix(&self) -> Result<Matrix2> {
        let roots = self
            .spec
            .matrix_roots()
            .ok_or_else(|| Error::NotGammaN(self.spec.to_string()))?;
        let ctx = self.spec.modulus();
        let mut s = BigRational::one();
        for (&r, &e) in roots.iter().zip(&self.v) {
            s *= ring::rational_pow(r, e);
        }
        let wrap = |x: BigRational| NRational::from_ratio(x, ctx).expect("entries lie in Z[1/n]");
        Ok(Matrix2 {
            a: wrap(s.clone()),
            b: wrap(self.q.as_ratio() / &s),
            c: NRational::zero(ctx),
            d: wrap(s.recip()),
        })
    }

    pub fn to_repr(&self) -> ElementRepr {
        ElementRepr {
            q: self.q.to_fraction_string(),
            v: self.v.clone(),
        }
    }

    pub fn from_repr(spec: &Arc<GroupSpec>, repr: &ElementRepr) -> Result<Self> {
        let q = NRational::parse(&repr.q, spec.modulus())?;
        Self::new(spec, q, repr.v.clone())
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.checked_mul(rhs).expect("elements of the same group")
    }
}

/// Left-to-right product of a word; the empty word is the identity.
pub fn evaluate_word(spec: &Arc<GroupSpec>, word: &[Letter]) -> Result<GroupElement> {
    let mut g = GroupElement::identity(spec);
    for letter in word {
        let x = GroupElement::generator(spec, letter.generator)?;
        g = &g * &x.pow(letter.power);
    }
    Ok(g)
}

/// Wire form `{"q": "num/den", "v": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRepr {
    pub q: String,
    pub v: Vec<i64>,
}

/// `a^{-u} b^m a^w`, with `n_i` not dividing `m` whenever `u_i > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub u: Vec<u64>,
    #[serde(with = "bigint_string")]
    pub m: BigInt,
    pub w: Vec<i64>,
}

impl NormalForm {
    pub fn satisfies_invariants(&self, spec: &GroupSpec) -> bool {
        self.u.len() == spec.rank()
            && self.w.len() == spec.rank()
            && self
                .u
                .iter()
                .zip(spec.factors())
                .all(|(&u, &n)| u == 0 || !(&self.m % BigInt::from(n)).is_zero())
    }

    pub fn to_word(&self) -> Vec<Letter> {
        let mut word = Vec::new();
        for (i, &u) in self.u.iter().enumerate() {
            if u > 0 {
                word.push(Letter::new(Generator::A(i), -(u as i64)));
            }
        }
        if !self.m.is_zero() {
            let m = i64::try_from(&self.m).expect("b exponent fits in i64");
            word.push(Letter::new(Generator::B, m));
        }
        for (i, &w) in self.w.iter().enumerate() {
            if w != 0 {
                word.push(Letter::new(Generator::A(i), w));
            }
        }
        word
    }

    /// Element realized by the form, computed directly as `(lambda(-u) m, w - u)`.
    pub fn element(&self, spec: &Arc<GroupSpec>) -> Result<GroupElement> {
        let neg_u: Vec<i64> = self.u.iter().map(|&x| -(x as i64)).collect();
        let q = spec.lambda(&neg_u) * BigRational::from_integer(self.m.clone());
        let v = self.w.iter().zip(&neg_u).map(|(w, u)| w + u).collect();
        GroupElement::new(spec, NRational::from_ratio(q, spec.modulus())?, v)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_word(&self.to_word()))
    }
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// 2x2 matrix over `Z[1/N]`, read in `SL_2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    pub a: NRational,
    pub b: NRational,
    pub c: NRational,
    pub d: NRational,
}

impl Matrix2 {
    pub fn identity(context: u64) -> Self {
        Matrix2 {
            a: NRational::one(context),
            b: NRational::zero(context),
            c: NRational::zero(context),
            d: NRational::one(context),
        }
    }

    pub fn determinant(&self) -> NRational {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.c.is_zero()
    }

    pub fn rows(&self) -> [[String; 2]; 2] {
        [
            [self.a.to_string(), self.b.to_string()],
            [self.c.to_string(), self.d.to_string()],
        ]
    }
}

impl Mul for &Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// The `Gamma_n` images are chosen with positive diagonal, so `M` and `-M` never collide.
pub fn has_positive_diagonal(m: &Matrix2) -> bool {
    m.a.as_ratio().is_positive() && m.d.as_ratio().is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn spec(f: &[u64]) -> Arc<GroupSpec> {
        GroupSpec::new(f.to_vec()).unwrap()
    }

    fn elem(s: &Arc<GroupSpec>, n: i64, d: i64, v: &[i64]) -> GroupElement {
        let q = NRational::new(n.into(), d.into(), s.modulus()).unwrap();
        GroupElement::new(s, q, v.to_vec()).unwrap()
    }

    fn word(s: &Arc<GroupSpec>, w: &str) -> GroupElement {
        evaluate_word(s, &parse_word(s, w).unwrap()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(GroupSpec::new(vec![6, 10]), Err(Error::NotCoprime(6, 10))));
        assert!(GroupSpec::new(vec![]).is_err());
        assert!(GroupSpec::new(vec![1]).is_err());
        assert_eq!(GroupSpec::parse("gamma:6").unwrap().factors(), &[4, 9]);
        assert_eq!(GroupSpec::parse(" 2, 3,5").unwrap().modulus(), 30);
        assert!(GroupSpec::parse("2,x").is_err());
    }

    #[test]
    fn generators() {
        let s = spec(&[2]);
        assert_eq!(GroupElement::generator(&s, Generator::B).unwrap(), elem(&s, 1, 1, &[0]));
        let s = spec(&[2, 3]);
        assert_eq!(GroupElement::generator(&s, Generator::A(1)).unwrap(), elem(&s, 0, 1, &[0, 1]));
        let s = spec(&[4, 9]);
        assert_eq!(GroupElement::generator(&s, Generator::A(0)).unwrap(), elem(&s, 0, 1, &[1, 0]));
        assert!(matches!(
            GroupElement::generator(&s, Generator::A(2)),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn multiplication_examples() {
        let s = spec(&[2]);
        let a = GroupElement::generator(&s, Generator::A(0)).unwrap();
        let b = GroupElement::generator(&s, Generator::B).unwrap();
        assert_eq!(&b * &a, elem(&s, 1, 1, &[1]));
        assert_eq!(&a * &b, elem(&s, 2, 1, &[1]));
        assert_eq!(&a * &b, &b.pow(2) * &a);
        let other = spec(&[3]);
        assert_eq!(
            a.checked_mul(&GroupElement::identity(&other)),
            Err(Error::SpecMismatch)
        );
    }

    #[test]
    fn inverse_examples() {
        let s = spec(&[2]);
        assert!(GroupElement::identity(&s).inverse().is_identity());
        let g = elem(&s, 1, 1, &[1]);
        assert_eq!(g.inverse(), elem(&s, -1, 2, &[-1]));
        assert!((&g * &g.inverse()).is_identity());
    }

    #[test]
    fn word_examples() {
        assert!(word(&spec(&[2, 3]), "a1 a2 a1^-1 a2^-1").is_identity());
        assert!(word(&spec(&[2]), "a b a^-1 b^-1 b^-1").is_identity());
        assert_eq!(word(&spec(&[2]), "b b b"), elem(&spec(&[2]), 3, 1, &[0]));
        assert!(word(&spec(&[2]), "").is_identity());
        assert_eq!(word(&spec(&[2]), "a^-1 b a"), elem(&spec(&[2]), 1, 2, &[0]));
    }

    #[test]
    fn word_parse_errors() {
        let s = spec(&[2, 3]);
        assert!(parse_word(&s, "a3").is_err());
        assert!(parse_word(&s, "a").is_err());
        assert!(parse_word(&s, "b^x").is_err());
        assert!(parse_word(&s, "c").is_err());
        assert_eq!(format_word(&parse_word(&s, "a1 b a1^-1 b^-2").unwrap()), "a1 b a1^-1 b^-2");
    }

    #[test]
    fn normal_form_examples() {
        let s = spec(&[2]);
        let nf = elem(&s, 1, 2, &[0]).normal_form();
        assert_eq!((nf.u.clone(), nf.m.clone(), nf.w.clone()), (vec![1], 1.into(), vec![1]));
        assert_eq!(nf.to_string(), "a1^-1 b a1");
        let nf = GroupElement::identity(&s).normal_form();
        assert_eq!((nf.u, nf.m, nf.w), (vec![0], 0.into(), vec![0]));
        let s = spec(&[12]);
        let nf = elem(&s, 1, 2, &[0]).normal_form();
        assert_eq!((nf.u.clone(), nf.m.clone(), nf.w.clone()), (vec![1], 6.into(), vec![1]));
        assert!(nf.satisfies_invariants(&s));
    }

    #[test]
    fn normal_form_minimality_brute_force() {
        // smallest u with 12^u * q integral, searched directly
        let s = spec(&[12, 5]);
        for (n, d) in [(1i64, 2i64), (1, 3), (5, 8), (7, 144), (1, 1728), (3, 50), (1, 60)] {
            let g = elem(&s, n, d, &[0, 0]);
            let nf = g.normal_form();
            for (i, &base) in [12u64, 5].iter().enumerate() {
                let fac = factorize(base).unwrap();
                let brute = (0u64..20)
                    .find(|&u| {
                        let y = g.q().as_ratio() * ring::rational_pow(base, u as i64);
                        fac.primes().iter().all(|&(p, _)| {
                            ring::p_adic_valuation(&y, p).finite().is_none_or(|v| v >= 0)
                        })
                    })
                    .unwrap();
                assert_eq!(nf.u[i], brute, "q={n}/{d} factor {base}");
            }
            assert_eq!(nf.element(&s).unwrap(), g);
        }
    }

    #[test]
    fn matrices() {
        let s = GroupSpec::gamma_n(6).unwrap();
        let a1 = GroupElement::generator(&s, Generator::A(0)).unwrap();
        let b = GroupElement::generator(&s, Generator::B).unwrap();
        let m = a1.to_matrix().unwrap();
        assert_eq!(m.rows(), [["2".to_string(), "0".into()], ["0".into(), "1/2".into()]]);
        assert_eq!(b.to_matrix().unwrap().rows(), [["1".to_string(), "1".into()], ["0".into(), "1".into()]]);
        assert_eq!((&a1 * &b).to_matrix().unwrap(), &m * &b.to_matrix().unwrap());
        assert!(matches!(
            GroupElement::identity(&spec(&[2])).to_matrix(),
            Err(Error::NotGammaN(_))
        ));
        let g = elem(&s, 5, 36, &[-1, 2]);
        let mg = g.to_matrix().unwrap();
        assert!(mg.determinant().as_ratio().is_one());
        assert!(mg.is_upper_triangular() && has_positive_diagonal(&mg));
    }

    #[test]
    fn affine_and_expansion() {
        let s = spec(&[2]);
        let b = GroupElement::generator(&s, Generator::B).unwrap();
        let a = GroupElement::generator(&s, Generator::A(0)).unwrap();
        assert_eq!(b.affine_action(0.5), 1.5);
        assert!(b.expansion().is_one());
        assert_eq!(a.affine_action(3.0), 6.0);
        assert_eq!(a.expansion(), BigRational::from_u64(2).unwrap());
        let s = spec(&[4, 9]);
        assert_eq!(word(&s, "a1 a2").expansion(), BigRational::from_u64(36).unwrap());
    }

    #[test]
    fn similarity_examples() {
        let s = spec(&[4, 9]);
        let b = GroupElement::generator(&s, Generator::B).unwrap();
        let a1 = GroupElement::generator(&s, Generator::A(0)).unwrap();
        assert!(b.similarity_factor(0).unwrap().is_one() && b.similarity_factor(1).unwrap().is_one());
        assert_eq!(a1.similarity_factor(0).unwrap(), BigRational::new(1.into(), 4.into()));
        assert!(a1.similarity_factor(1).unwrap().is_one());
        assert!(a1.similarity_factor(2).is_err());
    }

    #[test]
    fn repr_round_trip() {
        let s = spec(&[4, 9]);
        let g = elem(&s, -7, 108, &[3, -2]);
        let json = serde_json::to_string(&g.to_repr()).unwrap();
        assert_eq!(json, r#"{"q":"-7/108","v":[3,-2]}"#);
        let back: ElementRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(GroupElement::from_repr(&s, &back).unwrap(), g);
        let bad = ElementRepr { q: "1/5".into(), v: vec![0, 0] };
        assert!(GroupElement::from_repr(&s, &bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const SPECS: &[&[u64]] = &[&[2], &[4, 9], &[16, 9], &[2, 3, 5], &[12, 5]];

        fn arb_element() -> impl Strategy<Value = GroupElement> {
            (0..SPECS.len()).prop_flat_map(|si| {
                let s = spec(SPECS[si]);
                let k = s.rank();
                (
                    Just(s),
                    -500i64..500,
                    proptest::collection::vec(0u32..4, k),
                    proptest::collection::vec(-4i64..5, k),
                )
                    .prop_map(|(s, n, dexp, v)| {
                        let den: u64 = s.factors().iter().zip(&dexp).map(|(f, &e)| f.pow(e)).product();
                        elem(&s, n, den as i64, &v)
                    })
            })
        }

        fn arb_triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
            (arb_element(), -300i64..300, -300i64..300, proptest::collection::vec(-3i64..4, 6))
                .prop_map(|(g, n1, n2, vs)| {
                    let s = Arc::clone(g.spec());
                    let k = s.rank();
                    let h = elem(&s, n1, s.modulus() as i64, &vs[..k]);
                    let l = elem(&s, n2, 1, &vs[vs.len() - k..]);
                    (g, h, l)
                })
        }

        proptest! {
            #[test]
            fn associativity((g, h, l) in arb_triple()) {
                prop_assert_eq!(&(&g * &h) * &l, &g * &(&h * &l));
            }

            #[test]
            fn inverse_axioms(g in arb_element()) {
                prop_assert!((&g * &g.inverse()).is_identity());
                prop_assert!((&g.inverse() * &g).is_identity());
                prop_assert_eq!(g.inverse().inverse(), g.clone());
                let e = GroupElement::identity(g.spec());
                prop_assert_eq!(&e * &g, g.clone());
            }

            #[test]
            fn normal_form_round_trip(g in arb_element()) {
                let nf = g.normal_form();
                prop_assert!(nf.satisfies_invariants(g.spec()));
                prop_assert_eq!(evaluate_word(g.spec(), &nf.to_word()).unwrap(), g.clone());
                prop_assert_eq!(nf.element(g.spec()).unwrap(), g);
            }

            #[test]
            fn unimodularity(g in arb_element()) {
                let mut prod = g.expansion();
                for i in 0..g.spec().rank() {
                    prod *= g.similarity_factor(i).unwrap();
                }
                prop_assert!(prod.is_one());
            }

            #[test]
            fn action_axiom((g, h, _l) in arb_triple(), x in -1000i64..1000) {
                let x = BigRational::from_integer(x.into()) / BigRational::from_integer(7.into());
                prop_assert_eq!((&g * &h).act(&x), g.act(&h.act(&x)));
            }

            #[test]
            fn similarity_axiom(g in arb_element(), x in -999i64..999, y in -999i64..999, d in 0u32..4) {
                let s = Arc::clone(g.spec());
                let den = BigRational::from_integer(BigInt::from(s.modulus()).pow(d));
                let x = BigRational::from_integer(x.into()) / &den;
                let y = BigRational::from_integer(y.into()) / &den;
                for (i, &n) in s.factors().iter().enumerate() {
                    let lhs = ring::local_norm(&(g.act(&x) - g.act(&y)), n).unwrap();
                    let rhs = g.similarity_factor(i).unwrap() * ring::local_norm(&(&x - &y), n).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
