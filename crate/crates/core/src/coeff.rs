//! Exact coefficients: arbitrary-precision rationals and elements of the
//! cyclotomic fields Q(zeta_N) for N <= 12.
//!
//! A cyclotomic element is a vector of phi(N) rationals giving its
//! coordinates in the power basis 1, zeta, ..., zeta^(phi(N)-1) of
//! Q[x]/(Phi_N(x)).  All arithmetic reduces modulo the N-th cyclotomic
//! polynomial, so representations are canonical and equality is literal.
//! No floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Euler's totient for small arguments.
pub fn phi(n: u32) -> usize {
    (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count()
}

/// Coefficients of the N-th cyclotomic polynomial, lowest degree first,
/// computed exactly as (x^N - 1) / prod_{d | N, d < N} Phi_d(x).
fn cyclotomic_polynomial(n: u32) -> Vec<Rat> {
    // x^n - 1
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial_cached(d);
            num = poly_divide_exact(&num, &phi_d);
        }
    }
    num
}

fn cyclotomic_polynomial_cached(n: u32) -> Vec<Rat> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Rat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(p) = guard.get(&n) {
        return p.clone();
    }
    drop(guard);
    let p = cyclotomic_polynomial(n);
    guard = cache.lock().unwrap();
    guard.insert(n, p.clone());
    p
}

/// Exact polynomial division, panicking on a nonzero remainder.
fn poly_divide_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
    let mut rem: Vec<Rat> = num.to_vec();
    let dd = den.len() - 1;
    assert!(!den[dd].is_zero());
    let mut quot = vec![Rat::zero(); rem.len().saturating_sub(dd)];
    for i in (dd..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &den[dd];
        quot[i - dd] = c.clone();
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[i - dd + j] -= t;
        }
    }
    assert!(rem.iter().all(Rat::is_zero), "inexact polynomial division");
    quot
}

/// An element of Q(zeta_n) in the power basis of length phi(n).
#[derive(Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    pub n: u32,
    pub coords: Vec<Rat>,
}

impl Cyclotomic {
    pub fn zero(n: u32) -> Self {
        Cyclotomic { n, coords: vec![Rat::zero(); phi(n)] }
    }

    pub fn from_rat(n: u32, r: Rat) -> Self {
        let mut z = Self::zero(n);
        z.coords[0] = r;
        z
    }

    /// zeta_n^e, reduced.
    pub fn root_power(n: u32, e: i64) -> Self {
        let e = e.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rat::zero(); e + 1];
        poly[e] = Rat::one();
        Self::from_poly(n, poly)
    }

    /// Reduce an arbitrary polynomial in zeta modulo Phi_n.
    fn from_poly(n: u32, mut poly: Vec<Rat>) -> Self {
        let modulus = cyclotomic_polynomial_cached(n);
        let deg = modulus.len() - 1; // phi(n)
        while poly.len() > deg {
            let top = poly.len() - 1;
            let c = poly[top].clone();
            if !c.is_zero() {
                // x^top = x^(top-deg) * (x^deg) and x^deg = -(lower part of Phi_n)
                for j in 0..deg {
                    let t = &modulus[j] * &c;
                    poly[top - deg + j] -= t;
                }
            }
            poly.pop();
        }
        poly.resize(deg, Rat::zero());
        Cyclotomic { n, coords: poly }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rat::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Cyclotomic { n: self.n, coords })
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { n: self.n, coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut poly = vec![Rat::zero(); 2 * self.coords.len()];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                poly[i + j] += a * b;
            }
        }
        Ok(Self::from_poly(self.n, poly))
    }

    /// Multiplicative inverse by the extended Euclidean algorithm against
    /// Phi_n; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotAUnit("division by zero in Q(zeta)".into()));
        }
        let modulus = cyclotomic_polynomial_cached(self.n);
        // Extended gcd of (self as polynomial) and Phi_n over Q[x]; Phi_n is
        // irreducible, so the gcd is a nonzero constant.
        let mut r0 = modulus.clone();
        let mut r1 = trim(self.coords.clone());
        let mut s0: Vec<Rat> = vec![];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while poly_deg(&r1) > 0 {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            assert!(!r1.is_empty(), "cyclotomic inverse: zero divisor");
        }
        // r1 is a nonzero constant c; inverse is s1 / c.
        let c = r1[0].clone();
        let coords = s1.iter().map(|a| a / &c).collect::<Vec<_>>();
        Ok(Self::from_poly(self.n, coords))
    }

    /// The Galois automorphism zeta -> zeta^a (gcd(a, n) = 1).
    pub fn galois(&self, a: u32) -> Result<Self> {
        if num_integer::gcd(a, self.n) != 1 {
            return Err(Error::Bounds(format!("galois exponent {a} not coprime to {}", self.n)));
        }
        let mut acc = Self::zero(self.n);
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = Self::root_power(self.n, (i as i64) * (a as i64));
            for x in term.coords.iter_mut() {
                *x = &*x * c;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::CyclotomicMismatch(self.n, other.n));
        }
        Ok(())
    }
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().map_or(false, Rat::is_zero) {
        v.pop();
    }
    v
}

fn poly_deg(v: &[Rat]) -> usize {
    v.len().saturating_sub(1)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let dd = poly_deg(&den);
    if rem.len() < den.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &den[dd];
        quot[i - dd] = c.clone();
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[i - dd + j] -= t;
        }
    }
    (trim(quot), trim(rem))
}

/// A coefficient: a rational, or an element of a fixed cyclotomic field.
/// Rationals silently promote when combined with cyclotomic values, and
/// equality is value-based: a rational-valued cyclotomic element equals
/// the corresponding rational.
#[derive(Clone, Eq)]
pub enum Coeff {
    Rat(Rat),
    Cyclo(Cyclotomic),
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coeff::Rat(a), Coeff::Rat(b)) => a == b,
            (Coeff::Cyclo(a), Coeff::Cyclo(b)) => a == b,
            (Coeff::Rat(r), Coeff::Cyclo(c)) | (Coeff::Cyclo(c), Coeff::Rat(r)) => {
                c.coords[0] == *r && c.coords[1..].iter().all(Rat::is_zero)
            }
        }
    }
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        Coeff::Rat(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::Rat(rat_int(n))
    }

    pub fn from_rat(n: i64, d: i64) -> Self {
        Coeff::Rat(rat(n, d))
    }

    pub fn zeta(n: u32, e: i64) -> Self {
        Coeff::Cyclo(Cyclotomic::root_power(n, e))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Rat(r) => r.is_zero(),
            Coeff::Cyclo(c) => c.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Rat(r) => r.is_one(),
            Coeff::Cyclo(c) => {
                c.coords[0].is_one() && c.coords[1..].iter().all(Rat::is_zero)
            }
        }
    }

    fn promote(a: &Coeff, b: &Coeff) -> Result<(Cyclotomic, Cyclotomic)> {
        match (a, b) {
            (Coeff::Cyclo(x), Coeff::Cyclo(y)) => {
                if x.n != y.n {
                    return Err(Error::CyclotomicMismatch(x.n, y.n));
                }
                Ok((x.clone(), y.clone()))
            }
            (Coeff::Cyclo(x), Coeff::Rat(r)) => {
                Ok((x.clone(), Cyclotomic::from_rat(x.n, r.clone())))
            }
            (Coeff::Rat(r), Coeff::Cyclo(y)) => {
                Ok((Cyclotomic::from_rat(y.n, r.clone()), y.clone()))
            }
            _ => unreachable!(),
        }
    }

    pub fn add(&self, other: &Coeff) -> Result<Coeff> {
        match (self, other) {
            (Coeff::Rat(a), Coeff::Rat(b)) => Ok(Coeff::Rat(a + b)),
            _ => {
                let (a, b) = Self::promote(self, other)?;
                Ok(Coeff::Cyclo(a.add(&b)?))
            }
        }
    }

    pub fn sub(&self, other: &Coeff) -> Result<Coeff> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Rat(a) => Coeff::Rat(-a),
            Coeff::Cyclo(c) => Coeff::Cyclo(c.neg()),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Result<Coeff> {
        match (self, other) {
            (Coeff::Rat(a), Coeff::Rat(b)) => Ok(Coeff::Rat(a * b)),
            _ => {
                let (a, b) = Self::promote(self, other)?;
                Ok(Coeff::Cyclo(a.mul(&b)?))
            }
        }
    }

    pub fn inv(&self) -> Result<Coeff> {
        match self {
            Coeff::Rat(a) => {
                if a.is_zero() {
                    Err(Error::NotAUnit("division by zero".into()))
                } else {
                    Ok(Coeff::Rat(a.recip()))
                }
            }
            Coeff::Cyclo(c) => Ok(Coeff::Cyclo(c.inv()?)),
        }
    }

    /// Apply zeta -> zeta^a to cyclotomic values; identity on rationals.
    pub fn galois(&self, a: u32) -> Result<Coeff> {
        match self {
            Coeff::Rat(_) => Ok(self.clone()),
            Coeff::Cyclo(c) => Ok(Coeff::Cyclo(c.galois(a)?)),
        }
    }

    /// The rational value, if this coefficient is rational.
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Coeff::Rat(r) => Some(r),
            Coeff::Cyclo(_) => None,
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rat(r) => write!(f, "{}", r),
            Coeff::Cyclo(c) => {
                write!(f, "(")?;
                let mut first = true;
                for (i, x) in c.coords.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if i == 0 {
                        write!(f, "{}", x)?;
                    } else if x.is_one() {
                        write!(f, "z{}^{}", c.n, i)?;
                    } else {
                        write!(f, "{}*z{}^{}", x, c.n, i)?;
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Coeff::Cyclo(self.clone()))
    }
}

/// Render a rational with positive denominator in lowest terms (the
/// num-rational invariant) as separate numerator/denominator strings.
pub fn rat_to_strings(r: &Rat) -> (String, String) {
    let mut n = r.numer().clone();
    let mut d = r.denom().clone();
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    (n.to_string(), d.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let p3 = cyclotomic_polynomial_cached(3);
        assert_eq!(p3, vec![rat_int(1), rat_int(1), rat_int(1)]);
        let p4 = cyclotomic_polynomial_cached(4);
        assert_eq!(p4, vec![rat_int(1), rat_int(0), rat_int(1)]);
        let p12 = cyclotomic_polynomial_cached(12);
        assert_eq!(
            p12,
            vec![rat_int(1), rat_int(0), rat_int(-1), rat_int(0), rat_int(1)]
        );
    }

    #[test]
    fn zeta_orders() {
        // zeta_3^3 = 1, zeta_3^2 = -1 - zeta_3.
        let z = Cyclotomic::root_power(3, 1);
        let z3 = z.mul(&z).unwrap().mul(&z).unwrap();
        assert_eq!(z3, Cyclotomic::from_rat(3, Rat::one()));
        let z2 = Cyclotomic::root_power(3, 2);
        assert_eq!(z2.coords, vec![rat_int(-1), rat_int(-1)]);
    }

    #[test]
    fn cyclotomic_inverse() {
        for n in [3u32, 4, 5, 8, 12] {
            let x = Cyclotomic::root_power(n, 1)
                .add(&Cyclotomic::from_rat(n, rat_int(2)))
                .unwrap();
            let inv = x.inv().unwrap();
            let prod = x.mul(&inv).unwrap();
            assert_eq!(prod, Cyclotomic::from_rat(n, Rat::one()), "n = {n}");
        }
    }

    #[test]
    fn galois_conjugation() {
        // Complex conjugation on Q(zeta_3) sends zeta to zeta^2.
        let z = Cyclotomic::root_power(3, 1);
        let conj = z.galois(2).unwrap();
        assert_eq!(conj, Cyclotomic::root_power(3, 2));
        // Conjugating twice is the identity.
        assert_eq!(conj.galois(2).unwrap(), z);
    }

    #[test]
    fn mixed_promotion() {
        let a = Coeff::zeta(4, 1);
        let b = Coeff::from_int(3);
        let s = a.add(&b).unwrap();
        let expected = Cyclotomic {
            n: 4,
            coords: vec![rat_int(3), rat_int(1)],
        };
        assert_eq!(s, Coeff::Cyclo(expected));
        // zeta_4 * zeta_4 = -1 (as a cyclotomic element)
        let sq = Coeff::zeta(4, 1).mul(&Coeff::zeta(4, 1)).unwrap();
        assert_eq!(sq, Coeff::Cyclo(Cyclotomic::from_rat(4, rat_int(-1))));
        assert!(sq.sub(&Coeff::from_int(-1)).unwrap().is_zero());
    }
}
