//! Scalar fields, integer helpers and exact rational conversions.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Ordered field used by the generic geometry routines.
///
/// Implemented for `f64` (fast path) and [`Rational`] (exact path).
pub trait Field: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn from_i128(v: i128) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Strictly positive (false for both float zeros).
    fn is_pos(&self) -> bool;
    /// Strictly negative (false for both float zeros).
    fn is_neg(&self) -> bool;
}

impl Field for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_i128(v: i128) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > 0.0
    }
    fn is_neg(&self) -> bool {
        *self < 0.0
    }
}

impl Field for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_i128(v: i128) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// `num / den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Parse `"3"`, `"-1/2"` or `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{}{}", if ip_abs.is_empty() { "0" } else { ip_abs }, fp);
        let mut num: BigInt = digits.parse().ok()?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), fp.len());
        return Some(Rational::new(num, den));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Convert an integer vector into any field.
pub fn to_field<S: Field>(v: &[i64]) -> Vec<S> {
    v.iter().map(|&x| S::from_i64(x)).collect()
}

/// Convert a rational vector to floats.
pub fn to_f64_vec<S: Field>(v: &[S]) -> Vec<f64> {
    v.iter().map(Field::to_f64).collect()
}

/// Generic dot product.
pub fn dot<S: Field>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Float dot product.
pub fn dot_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer dot product, widened to avoid overflow.
pub fn dot_i(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Nonnegative gcd of all entries; zero for the zero vector.
pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// True iff the coordinates have gcd one.
pub fn is_primitive(v: &[i64]) -> bool {
    gcd_slice(v) == 1
}

/// Split a nonzero vector as `h * w` with `w` primitive. Returns `(h, w)`.
pub fn primitive_part(v: &[i64]) -> Option<(i64, Vec<i64>)> {
    let g = gcd_slice(v);
    if g == 0 {
        return None;
    }
    Some((g, v.iter().map(|x| x / g).collect()))
}

/// Divide an `i128` vector by the gcd of its entries.
pub fn reduce_i128(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Primitive representative of a line through the origin: first nonzero entry positive.
pub fn line_key(v: &[i64]) -> Option<Vec<i64>> {
    let (_, mut w) = primitive_part(v)?;
    if w.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in &mut w {
            *x = -*x;
        }
    }
    Some(w)
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `n!` as an integer.
pub fn factorial_i(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Binomial coefficient as an exact big integer.
pub fn binomial(n: u64, k: u64) -> num_bigint::BigUint {
    if k > n {
        return num_bigint::BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = num_bigint::BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Floor division for `i128`.
pub fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

/// Ceiling division for `i128`.
pub fn ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&(-a), &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_split() {
        assert_eq!(primitive_part(&[4, 6]), Some((2, vec![2, 3])));
        assert_eq!(primitive_part(&[0, -3]), Some((3, vec![0, -1])));
        assert_eq!(primitive_part(&[0, 0]), None);
        assert!(is_primitive(&[2, 3]));
        assert!(!is_primitive(&[2, 0]));
    }

    #[test]
    fn line_keys_identify_opposites() {
        assert_eq!(line_key(&[-2, 4]), line_key(&[1, -2]));
        assert_eq!(line_key(&[0, -3, 6]), Some(vec![0, 1, -2]));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("1/2"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("3"), Some(rat(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn division_rounding() {
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(floor_div(7, -2), -4);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56u32.into());
        assert_eq!(binomial(3, 5), 0u32.into());
    }
}
