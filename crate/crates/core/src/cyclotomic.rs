//! Exact arithmetic in cyclotomic fields `ℚ(ζ_m)`.
//!
//! A number is stored as rational coefficients on `1, ζ, …, ζ^{φ(m)-1}`,
//! i.e. reduced modulo the `m`-th cyclotomic polynomial, so equal values
//! have equal coefficient vectors.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num::integer::{gcd, lcm};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduction data for one conductor.
#[derive(Debug)]
struct Basis {
    degree: usize,
    /// `powers[k]` = coefficients of `ζ^k` in the reduced basis, `0 ≤ k < m`.
    powers: Vec<Vec<i64>>,
}

fn basis(m: usize) -> Arc<Basis> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.read().expect("cyclotomic cache").get(&m) {
        return Arc::clone(b);
    }
    let phi = cyclotomic_polynomial(m);
    let degree = phi.len() - 1;
    let mut powers = Vec::with_capacity(m);
    // x^k mod Φ_m, built incrementally by multiplying by x
    let mut current = vec![0i64; degree];
    current[0] = 1;
    for _ in 0..m {
        powers.push(current.clone());
        let top = current[degree - 1];
        for i in (1..degree).rev() {
            current[i] = current[i - 1];
        }
        current[0] = 0;
        // x^degree = -(phi[0] + ... + phi[degree-1] x^{degree-1})
        for i in 0..degree {
            current[i] -= top * phi[i];
        }
    }
    let b = Arc::new(Basis { degree, powers });
    cache.write().expect("cyclotomic cache").insert(m, Arc::clone(&b));
    b
}

/// Integer coefficients of `Φ_m`, constant term first.
pub fn cyclotomic_polynomial(m: usize) -> Vec<i64> {
    assert!(m >= 1, "conductor must be positive");
    // x^m - 1
    let mut poly = vec![0i64; m + 1];
    poly[0] = -1;
    poly[m] = 1;
    for d in 1..m {
        if m % d == 0 {
            poly = divide_monic(&poly, &cyclotomic_polynomial(d));
        }
    }
    poly
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0), "inexact cyclotomic division");
    quot
}

/// An element of `ℚ(ζ_m)`.
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    conductor: usize,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(conductor: usize) -> Self {
        let degree = basis(conductor).degree;
        Self { conductor, coeffs: vec![BigRational::zero(); degree] }
    }

    pub fn from_rational(q: BigRational, conductor: usize) -> Self {
        let mut z = Self::zero(conductor);
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(n: i64, conductor: usize) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()), conductor)
    }

    pub fn one(conductor: usize) -> Self {
        Self::from_integer(1, conductor)
    }

    /// `ζ_m^k`.
    pub fn root_of_unity(conductor: usize, k: i64) -> Self {
        let b = basis(conductor);
        let k = k.rem_euclid(conductor as i64) as usize;
        Self {
            conductor,
            coeffs: b.powers[k].iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        }
    }

    /// `Σ_k counts[k] ζ_m^k` for a vector of length `m`.
    pub fn from_power_counts(conductor: usize, counts: &[BigRational]) -> Self {
        let b = basis(conductor);
        let mut coeffs = vec![BigRational::zero(); b.degree];
        for (k, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, &p) in b.powers[k % conductor].iter().enumerate() {
                if p != 0 {
                    coeffs[i] += c * BigRational::from_integer(p.into());
                }
            }
        }
        Self { conductor, coeffs }
    }

    /// Nonzero coefficients as `(power, value)` when all are integers.
    pub(crate) fn integer_terms(&self) -> Option<Vec<(usize, i128)>> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| c.is_integer().then(|| c.to_integer().to_i128()).flatten().map(|v| (k, v)))
            .collect()
    }

    /// Reduces integer counts on `ζ^0, …, ζ^{m-1}` to basis coefficients.
    pub(crate) fn reduce_integer_counts(conductor: usize, counts: &[i128]) -> Vec<i128> {
        let b = basis(conductor);
        let mut coeffs = vec![0i128; b.degree];
        for (k, &c) in counts.iter().enumerate().filter(|(_, c)| **c != 0) {
            for (i, &p) in b.powers[k % conductor].iter().enumerate() {
                coeffs[i] += c * p as i128;
            }
        }
        coeffs
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    /// Coefficients on the reduced power basis.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, if every non-constant coefficient vanishes.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| self.coeffs[0].clone())
    }

    /// The value as an integer, with no tolerance.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Re-expresses the number over `ℚ(ζ_target)`; `conductor | target`.
    pub fn promote(&self, target: usize) -> Self {
        if target == self.conductor {
            return self.clone();
        }
        assert!(target % self.conductor == 0, "cannot promote conductor {} to {target}", self.conductor);
        let step = target / self.conductor;
        let mut counts = vec![BigRational::zero(); target];
        for (i, c) in self.coeffs.iter().enumerate() {
            counts[i * step] = c.clone();
        }
        Self::from_power_counts(target, &counts)
    }

    /// Complex conjugation `ζ ↦ ζ^{m-1}`.
    pub fn conj(&self) -> Self {
        let m = self.conductor;
        let mut counts = vec![BigRational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            counts[(m - i) % m] = c.clone();
        }
        Self::from_power_counts(m, &counts)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let m = lcm(a.conductor, b.conductor);
        (a.promote(m), b.promote(m))
    }

    /// Numerical value `(re, im)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.conductor as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (k, c)| {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let t = 2.0 * std::f64::consts::PI * k as f64 / m;
            (re + v * t.cos(), im + v * t.sin())
        })
    }

    /// Parses sums such as `-1`, `1/2`, `zeta(3,1) + zeta(3,2)` or
    /// `2*zeta(8,1) - zeta(8,3)`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::CharacterTable(format!("cannot parse character value `{text}`"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        // split into signed terms at top-level +/- signs
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0usize;
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.checked_sub(1).ok_or_else(bad)?,
                '+' | '-' if depth == 0 => {
                    if i > 0 {
                        if current.is_empty() {
                            return Err(bad());
                        }
                        terms.push((negative, std::mem::take(&mut current)));
                    }
                    negative = ch == '-';
                    continue;
                }
                _ => {}
            }
            current.push(ch);
        }
        if current.is_empty() {
            return Err(bad());
        }
        terms.push((negative, current));

        let mut parsed: Vec<(BigRational, Option<(usize, i64)>)> = Vec::new();
        for (neg, term) in terms {
            let (coef, atom) = match term.find("zeta(") {
                Some(0) => (BigRational::one(), Some(&term[..])),
                Some(pos) => {
                    let c = term[..pos].strip_suffix('*').ok_or_else(bad)?;
                    (parse_rational(c).ok_or_else(bad)?, Some(&term[pos..]))
                }
                None => (parse_rational(&term).ok_or_else(bad)?, None),
            };
            let root = match atom {
                Some(a) => {
                    let inner = a.strip_prefix("zeta(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
                    let (m, k) = inner.split_once(',').ok_or_else(bad)?;
                    let m: usize = m.parse().map_err(|_| bad())?;
                    let k: i64 = k.parse().map_err(|_| bad())?;
                    if m == 0 {
                        return Err(bad());
                    }
                    Some((m, k))
                }
                None => None,
            };
            parsed.push((if neg { -coef } else { coef }, root));
        }
        let conductor = parsed.iter().filter_map(|(_, r)| r.map(|(m, _)| m)).fold(1, lcm);
        let mut total = Self::zero(conductor);
        for (c, root) in parsed {
            let term = match root {
                Some((m, k)) => Self::root_of_unity(m, k).promote(conductor).scale(&c),
                None => Self::from_rational(c, conductor),
            };
            total = &total + &term;
        }
        Ok(total)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl PartialOrd for CyclotomicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on coefficient vectors over a common conductor.
/// This is a bookkeeping order only; it has no arithmetic meaning.
impl Ord for CyclotomicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = Self::aligned(self, other);
        a.coeffs.cmp(&b.coeffs)
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;

    fn add(self, rhs: Self) -> CyclotomicNumber {
        let (a, b) = CyclotomicNumber::aligned(self, rhs);
        CyclotomicNumber {
            conductor: a.conductor,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;

    fn sub(self, rhs: Self) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;

    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;

    fn mul(self, rhs: Self) -> CyclotomicNumber {
        let (a, b) = CyclotomicNumber::aligned(self, rhs);
        let m = a.conductor;
        let mut counts = vec![BigRational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    counts[(i + j) % m] += x * y;
                }
            }
        }
        CyclotomicNumber::from_power_counts(m, &counts)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (_, true) => format!("zeta({},{k})", self.conductor),
                (_, false) => format!("{mag}*zeta({},{k})", self.conductor),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Euler's totient, used for basis sizes.
pub fn totient(m: usize) -> usize {
    (1..=m).filter(|&k| gcd(k, m) == 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64, m: usize) -> CyclotomicNumber {
        CyclotomicNumber::from_integer(n, m)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        for m in 1..40 {
            assert_eq!(cyclotomic_polynomial(m).len() - 1, totient(m));
        }
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in 2..25 {
            let mut s = CyclotomicNumber::zero(m);
            for k in 0..m as i64 {
                s = &s + &CyclotomicNumber::root_of_unity(m, k);
            }
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = CyclotomicNumber::root_of_unity(4, 1);
        assert_eq!(&i * &i, int(-1, 4));
        assert_eq!(i.conj(), CyclotomicNumber::root_of_unity(4, 3));
        assert_eq!(&i * &i.conj(), int(1, 4));
    }

    #[test]
    fn mixed_conductors_promote() {
        let w = CyclotomicNumber::root_of_unity(3, 1);
        let minus = CyclotomicNumber::root_of_unity(2, 1);
        // -ζ_3 is a primitive 6th root of unity
        let p = &w * &minus;
        assert_eq!(p.conductor(), 6);
        assert_eq!(p, CyclotomicNumber::root_of_unity(6, 5));
        // ζ_3 + ζ_3^2 = -1
        let s = &w + &CyclotomicNumber::root_of_unity(3, 2);
        assert_eq!(s.to_integer(), Some(BigInt::from(-1)));
    }

    #[test]
    fn parse_values() {
        assert_eq!(CyclotomicNumber::parse("-1").unwrap().to_integer(), Some(BigInt::from(-1)));
        assert_eq!(CyclotomicNumber::parse("zeta(3,1)+zeta(3,2)").unwrap(), int(-1, 3));
        let v = CyclotomicNumber::parse("2*zeta(8,1) - zeta(8,3)").unwrap();
        assert_eq!(v.conductor(), 8);
        let (re, im) = v.to_complex();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((re - (2.0 * s + s)).abs() < 1e-12 && (im - (2.0 * s - s)).abs() < 1e-12);
        assert!(CyclotomicNumber::parse("zeta(0,1)").is_err());
        assert!(CyclotomicNumber::parse("1+").is_err());
        assert_eq!(CyclotomicNumber::parse("1/2").unwrap().to_rational(), Some(BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn display_is_parseable() {
        let v = &CyclotomicNumber::root_of_unity(5, 2) + &int(3, 5);
        assert_eq!(CyclotomicNumber::parse(&v.to_string()).unwrap(), v);
    }
}
