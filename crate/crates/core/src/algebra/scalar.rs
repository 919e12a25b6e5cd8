use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact Gaussian rational `re + im·i`.
///
/// `BigRational` keeps denominators positive and in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn imag(im: BigRational) -> Self {
        Scalar { re: BigRational::zero(), im }
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::real(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::real(BigRational::new(num.into(), den.into()))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::imag(BigRational::one())
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `(-i)^k`.
    pub fn minus_i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Scalar::from_int(1),
            1 => -Scalar::i(),
            2 => Scalar::from_int(-1),
            _ => Scalar::i(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        Scalar::new(&self.re * k, &self.im * k)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// Parses `3/2`, `-1/2i`, `i`, `-i` or `(3/2+1/4i)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            // split at the last sign that is not the leading one
            let bytes = inner.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| bytes[k] == b'+' || bytes[k] == b'-')
                .ok_or_else(|| Error::Parse(format!("bad complex coefficient `{t}`")))?;
            let re = parse_rational(&inner[..split])?;
            let im_part = Scalar::parse(&inner[split..])?;
            if !im_part.re.is_zero() {
                return Err(Error::Parse(format!("bad complex coefficient `{t}`")));
            }
            return Ok(Scalar::new(re, im_part.im));
        }
        if let Some(body) = t.strip_suffix('i') {
            let body = body.trim_start_matches('+');
            let im = match body {
                "" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rational(body)?,
            };
            return Ok(Scalar::imag(im));
        }
        Ok(Scalar::real(parse_rational(t.trim_start_matches('+'))?))
    }
}

/// Parses `p/q` or `p` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad rational `{t}`"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::from_int(1)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::real(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_agree() {
        for s in ["0", "3/2", "-1/2i", "1i", "(3/2+1/4i)", "(-2-5/3i)"] {
            let v = Scalar::parse(s).unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!(Scalar::parse("i").unwrap(), Scalar::i());
        assert_eq!(Scalar::parse("-i").unwrap(), -Scalar::i());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = parse_rational("4/-6").unwrap();
        assert_eq!(r.to_string(), "-2/3");
    }

    #[test]
    fn powers_of_minus_i() {
        let mut acc = Scalar::one();
        for k in 0..8 {
            assert_eq!(Scalar::minus_i_pow(k), acc);
            acc = &acc * &(-Scalar::i());
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(Scalar::parse("3/0").is_err());
        assert!(Scalar::parse("abc").is_err());
    }
}
