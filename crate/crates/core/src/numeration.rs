//! Integers written in base `a/b`.
//!
//! A positive integer `n` is expanded by repeatedly writing `b*n = eps + a*n'`
//! with `0 <= eps < a`. The digits come out least significant first; words are
//! stored most significant first so that they print the usual way.

use std::fmt;
use std::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Digit = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Base {
    a: u32,
    b: u32,
}

impl Base {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        let (a64, b64) = (a as u64, b as u64);
        if b == 0 {
            return Err(Error::InvalidBase { a: a64, b: b64, reason: "b must be at least 1" });
        }
        if a <= b {
            return Err(Error::InvalidBase { a: a64, b: b64, reason: "a must exceed b" });
        }
        if a.gcd(&b) != 1 {
            return Err(Error::InvalidBase { a: a64, b: b64, reason: "a and b must be coprime" });
        }
        Ok(Base { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn alpha(&self) -> BigRational {
        BigRational::new(BigInt::from(self.a), BigInt::from(self.b))
    }

    pub fn alpha_f64(&self) -> f64 {
        self.a as f64 / self.b as f64
    }

    pub fn digits(&self) -> Range<Digit> {
        0..self.a
    }

    /// Prime factorisation of `b` as `(p, v_p(b))`, primes ascending.
    pub fn primes_of_b(&self) -> Vec<(u64, u32)> {
        factorize(self.b as u64)
    }

    pub fn encode(&self, n: &BigUint) -> DigitWord {
        let mut lsb = Vec::new();
        let a = BigUint::from(self.a);
        let b = BigUint::from(self.b);
        let mut n = n.clone();
        // Values shrink by a factor of about a/b per step, so the big-integer
        // loop only runs until the remainder fits a machine word.
        while n.bits() > 64 {
            let bn = &n * &b;
            let (q, d) = bn.div_rem(&a);
            lsb.push(d.to_u32().expect("digit below a"));
            n = q;
        }
        self.digits_lsb_into(n.to_u64().expect("fits u64"), &mut lsb);
        lsb.reverse();
        DigitWord { base: *self, digits: lsb }
    }

    pub fn encode_u64(&self, n: u64) -> DigitWord {
        let mut lsb = Vec::new();
        self.digits_lsb_into(n, &mut lsb);
        lsb.reverse();
        DigitWord { base: *self, digits: lsb }
    }

    /// Appends the digits of `n` to `buf`, least significant first.
    #[inline]
    pub fn digits_lsb_into(&self, n: u64, buf: &mut Vec<Digit>) {
        let a = self.a as u128;
        let b = self.b as u128;
        let mut n = n as u128;
        while n > 0 {
            let bn = b * n;
            let d = bn % a;
            buf.push(d as Digit);
            n = (bn - d) / a;
        }
    }

    /// The padded digit `eps_k(n)`, zero for `k >= length(n)`.
    pub fn digit(&self, n: u64, k: usize) -> Digit {
        let a = self.a as u128;
        let b = self.b as u128;
        let mut n = n as u128;
        let mut i = 0;
        while n > 0 {
            let bn = b * n;
            let d = bn % a;
            if i == k {
                return d as Digit;
            }
            n = (bn - d) / a;
            i += 1;
        }
        0
    }

    pub fn length(&self, n: u64) -> usize {
        let a = self.a as u128;
        let b = self.b as u128;
        let mut n = n as u128;
        let mut len = 0;
        while n > 0 {
            n = b * n / a;
            len += 1;
        }
        len
    }

    pub fn sum_of_digits(&self, n: u64) -> u64 {
        let a = self.a as u128;
        let b = self.b as u128;
        let mut n = n as u128;
        let mut s = 0u64;
        while n > 0 {
            let bn = b * n;
            let d = bn % a;
            s += d as u64;
            n = (bn - d) / a;
        }
        s
    }

    /// Checks a digit sequence against the alphabet; leading zeros allowed.
    pub fn check_digits(&self, digits: &[Digit]) -> Result<()> {
        match digits.iter().find(|&&d| d >= self.a) {
            Some(&d) => Err(Error::DigitOutOfRange { digit: d as u64, a: self.a }),
            None => Ok(()),
        }
    }

    /// Formats a digit sequence: bare ASCII digits when `a <= 10`, otherwise
    /// a parenthesised comma list.
    pub fn format_digits(&self, digits: &[Digit]) -> String {
        if self.a <= 10 {
            digits.iter().map(|&d| char::from(b'0' + d as u8)).collect()
        } else {
            let body: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
            format!("({})", body.join(","))
        }
    }

    /// Inverse of [`Base::format_digits`]. Also accepts the comma form for
    /// small alphabets. Leading zeros are kept.
    pub fn parse_digits(&self, s: &str) -> Result<Vec<Digit>> {
        let t = s.trim();
        let digits = if let Some(inner) = t.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(s, "missing closing parenthesis"))?;
            if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|p| p.trim().parse::<Digit>().map_err(|e| Error::parse(s, e.to_string())))
                    .collect::<Result<Vec<_>>>()?
            }
        } else if t.contains(',') {
            t.split(',')
                .map(|p| p.trim().parse::<Digit>().map_err(|e| Error::parse(s, e.to_string())))
                .collect::<Result<Vec<_>>>()?
        } else {
            t.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::parse(s, format!("unexpected character {c:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        self.check_digits(&digits)?;
        Ok(digits)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

/// A base-`a/b` digit word, most significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitWord {
    base: Base,
    digits: Vec<Digit>,
}

impl DigitWord {
    pub fn new(base: Base, digits: Vec<Digit>) -> Result<Self> {
        base.check_digits(&digits)?;
        if digits.first() == Some(&0) {
            return Err(Error::LeadingZero);
        }
        Ok(DigitWord { base, digits })
    }

    pub fn parse(base: Base, s: &str) -> Result<Self> {
        Self::new(base, base.parse_digits(s)?)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    /// Digits, most significant first.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `eps_k`, counted from the least significant end; zero past the end.
    pub fn digit(&self, k: usize) -> Digit {
        if k < self.digits.len() {
            self.digits[self.digits.len() - 1 - k]
        } else {
            0
        }
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().map(|&d| d as u64).sum()
    }

    /// The word with its least significant digit removed.
    pub fn shift(&self) -> DigitWord {
        let mut digits = self.digits.clone();
        digits.pop();
        DigitWord { base: self.base, digits }
    }

    /// `(1/b) * sum_k eps_k * (a/b)^k` as an exact rational.
    pub fn evaluate_rational(&self) -> BigRational {
        let len = self.digits.len() as u32;
        if len == 0 {
            return BigRational::zero();
        }
        let a = BigInt::from(self.base.a);
        let b = BigInt::from(self.base.b);
        // Common denominator b^len: term k contributes eps_k * a^k * b^(len-1-k).
        let mut num = BigInt::zero();
        let mut apow = BigInt::one();
        for k in 0..len {
            let eps = self.digit(k as usize);
            if eps != 0 {
                num += BigInt::from(eps) * &apow * num_traits::pow(b.clone(), (len - 1 - k) as usize);
            }
            apow *= &a;
        }
        BigRational::new(num, num_traits::pow(b, len as usize))
    }

    /// The integer this word represents, or `NotInLanguage`.
    pub fn decode(&self) -> Result<BigUint> {
        let a = self.base.a as u128;
        let b = self.base.b as u128;
        let mut n: u128 = 0;
        let mut i = 0;
        while i < self.digits.len() {
            let eps = self.digits[i] as u128;
            let t = match n.checked_mul(a).and_then(|x| x.checked_add(eps)) {
                Some(t) => t,
                None => break,
            };
            if t % b != 0 {
                return Err(self.not_in_language());
            }
            n = t / b;
            i += 1;
        }
        if i == self.digits.len() {
            return Ok(BigUint::from(n));
        }
        let a = BigUint::from(self.base.a);
        let b = BigUint::from(self.base.b);
        let mut n = BigUint::from(n);
        for &eps in &self.digits[i..] {
            let t = &n * &a + BigUint::from(eps);
            let (q, r) = t.div_rem(&b);
            if !r.is_zero() {
                return Err(self.not_in_language());
            }
            n = q;
        }
        Ok(n)
    }

    fn not_in_language(&self) -> Error {
        Error::NotInLanguage { word: self.to_string(), value: self.evaluate_rational().to_string() }
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base.format_digits(&self.digits))
    }
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
