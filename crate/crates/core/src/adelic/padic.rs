//! p-adic fractional parts and the additive character on rationals.
//!
//! Everything is exact: a rational `u/v` is read in `Q_p` through modular
//! inverses of the part of `v` prime to `p`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AdeleContext;
use crate::Q;

/// `x^{-1} mod m` for `gcd(x, m) = 1`, in `0..m`.
pub(crate) fn mod_inv(x: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = x.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

pub(crate) fn mod_inv_i128(x: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (x.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    s0.rem_euclid(m)
}

/// Splits `den` into `(d_S, d')` where `d_S` collects the primes in `primes`.
pub(crate) fn split_den(den: &BigInt, primes: &[(u64, u32)]) -> (BigInt, BigInt) {
    let mut rest = den.clone();
    let mut part = BigInt::one();
    for &(p, _) in primes {
        let p = BigInt::from(p);
        while (&rest % &p).is_zero() {
            rest /= &p;
            part *= &p;
        }
    }
    (part, rest)
}

pub(crate) fn split_den_i128(mut den: i128, primes: &[(u64, u32)]) -> (i128, i128) {
    let mut part = 1;
    for &(p, _) in primes {
        let p = p as i128;
        while den % p == 0 {
            den /= p;
            part *= p;
        }
    }
    (part, den)
}

/// `lambda_p(x)`: the rational in `[0, 1)` with `p`-power denominator such
/// that `x - lambda_p(x)` is a `p`-adic integer.
pub fn frac_p(p: u64, x: &Q) -> Q {
    let den = x.denom();
    let (pe, rest) = split_den(den, &[(p, 1)]);
    if pe.is_one() {
        return Q::zero();
    }
    let r = (x.numer() * mod_inv(&rest, &pe)).mod_floor(&pe);
    Q::new(r, pe)
}

/// Whether `x` lies in `Z[alpha] = Z[1/b]`.
pub fn in_z_alpha(ctx: &AdeleContext, x: &Q) -> bool {
    split_den(x.denom(), ctx.primes()).1.is_one()
}

/// Canonical representative in `[0, 1)` of `x` modulo `Z[alpha]`.
///
/// With `x = u / (v_S v')` the class is `(u v_S^{-1} mod v') / v'`.
pub fn lattice_class(ctx: &AdeleContext, x: &Q) -> Q {
    let (vs, vp) = split_den(x.denom(), ctx.primes());
    if vp.is_one() {
        return Q::zero();
    }
    let r = (x.numer() * mod_inv(&vs, &vp)).mod_floor(&vp);
    Q::new(r, vp)
}

/// Phase `theta in [0, 1)` with `char_tilde(x) = e(theta)`.
///
/// `sum_p lambda_p(x) - x` is congruent to `-lattice_class(x)` modulo 1.
pub fn char_phase(ctx: &AdeleContext, x: &Q) -> Q {
    let c = lattice_class(ctx, x);
    if c.is_zero() {
        c
    } else {
        Q::one() - c
    }
}

/// `chi(Phi(x))` for rational `x`.
pub fn char_tilde(ctx: &AdeleContext, x: &Q) -> Complex64 {
    e(&char_phase(ctx, x))
}

/// Phase of `num/den` as `(t, m)` meaning `t/m` in `[0, 1)`; machine-word
/// version of [`char_phase`] for the series kernels.
pub(crate) fn char_phase_i128(primes: &[(u64, u32)], num: i128, den: i128) -> (i128, i128) {
    debug_assert!(den > 0);
    let g = num.abs().gcd(&den).max(1);
    let (num, den) = (num / g, den / g);
    let (vs, vp) = split_den_i128(den, primes);
    if vp == 1 {
        return (0, 1);
    }
    let r = mul_mod(num.rem_euclid(vp), mod_inv_i128(vs, vp), vp);
    ((vp - r) % vp, vp)
}

pub(crate) fn mul_mod(x: i128, y: i128, m: i128) -> i128 {
    match x.checked_mul(y) {
        Some(p) => p.rem_euclid(m),
        None => {
            let p = BigInt::from(x) * BigInt::from(y);
            p.mod_floor(&BigInt::from(m)).to_i128().expect("below modulus")
        }
    }
}

/// `e(t) = exp(2 pi i t)`, reducing `t` modulo 1 exactly first.
pub fn e(t: &Q) -> Complex64 {
    let frac = t - t.floor();
    e_f64(frac.to_f64().unwrap_or(0.0))
}

pub(crate) fn e_ratio(t: i128, m: i128) -> Complex64 {
    let t = t.rem_euclid(m);
    e_f64(t as f64 / m as f64)
}

pub(crate) fn e_f64(t: f64) -> Complex64 {
    let ang = std::f64::consts::TAU * t;
    Complex64::new(ang.cos(), ang.sin())
}

/// `v_p(x)`; `None` for zero.
pub fn valuation(p: u64, x: &Q) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |v: &BigInt| {
        let mut v = v.abs();
        let mut c = 0i64;
        while (&v % &p).is_zero() {
            v /= &p;
            c += 1;
        }
        c
    };
    Some(count(x.numer()) - count(x.denom()))
}

/// Residue of a `p`-integral rational modulo the integer `m` (all primes of
/// `m` must be coprime to the denominator).
pub(crate) fn residue_mod(x: &Q, m: &BigInt) -> BigInt {
    (x.numer() * mod_inv(x.denom(), m)).mod_floor(m)
}
