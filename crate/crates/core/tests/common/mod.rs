//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use ratbase::Q;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn pow(b: u32, e: u32) -> BigInt {
    BigInt::from(b).pow(e)
}

/// Prime factorisation by trial division.
pub fn primes_of(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Inverse of `x` modulo `m` by the extended Euclidean algorithm.
pub fn inverse(x: &BigInt, m: &BigInt) -> BigInt {
    let (mut r0, mut r1) = (x.mod_floor(m), m.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    while !r1.is_zero() {
        let qt = &r0 / &r1;
        let r2 = &r0 - &qt * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &qt * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    assert!(r0.is_one(), "not invertible");
    s0.mod_floor(m)
}

/// `x mod m` for a rational whose denominator is prime to `m`.
pub fn residue(x: &Q, m: &BigInt) -> BigInt {
    (x.numer() * inverse(x.denom(), m)).mod_floor(m)
}

/// The `p`-adic fractional part: the unique `t / p^k` in `[0, 1)` with
/// `x - t / p^k` integral at `p`.
pub fn lambda(p: u64, x: &Q) -> Q {
    let pb = BigInt::from(p);
    let mut den = x.denom().clone();
    let mut pk = BigInt::one();
    while (&den % &pb).is_zero() {
        den /= &pb;
        pk *= &pb;
    }
    if pk.is_one() {
        return Q::zero();
    }
    let t = (x.numer() * inverse(&den, &pk)).mod_floor(&pk);
    Q::new(t, pk)
}

/// Chinese remainder for pairwise coprime moduli.
pub fn crt(parts: &[(BigInt, BigInt)]) -> BigInt {
    let m: BigInt = parts.iter().map(|(_, m)| m.clone()).product();
    let mut x = BigInt::zero();
    for (r, mi) in parts {
        let rest = &m / mi;
        x += r * &rest * inverse(&rest, mi);
    }
    x.mod_floor(&m)
}

/// An element `y` of `Z[1/b]` with `w_p - y` in `b^r Z_p` for each `p | b`,
/// where `w` lists one rational per prime.
pub fn lattice_lift(primes: &[(u64, u32)], w: &[Q], r: u32) -> Q {
    let y0: Q = primes.iter().zip(w).map(|(&(p, _), x)| lambda(p, x)).sum();
    let parts: Vec<(BigInt, BigInt)> = primes
        .iter()
        .zip(w)
        .map(|(&(p, e), x)| {
            let m = BigInt::from(p).pow(e * r);
            (residue(&(x - &y0), &m), m)
        })
        .collect();
    y0 + Q::from_integer(crt(&parts))
}

pub fn random_rational<R: Rng>(rng: &mut R, b: u32, max_b_exp: u32, max_num: i64) -> Q {
    let den = pow(b, rng.gen_range(0..=max_b_exp)) * BigInt::from(rng.gen_range(1..1000i64));
    Q::new(BigInt::from(rng.gen_range(-max_num..=max_num)), den)
}

/// A box hit by the brute-force cover oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit {
    pub digit: u32,
    /// The point lies on the real boundary of the box.
    pub on_face: bool,
}

/// All corners `T / a^r` of the level-`r` tile approximations, with their
/// digit, built straight from `d alpha^{-1} + sum_{k>=2} eps_k alpha^{-k}`.
pub fn tile_corners(a: u32, b: u32, r: u32) -> Vec<(i128, u32)> {
    let (a, b) = (a as i128, b as i128);
    let mut out = Vec::new();
    let count = a.pow(r - 1);
    for d in 0..a {
        for idx in 0..count {
            let mut t = d * b * a.pow(r - 1);
            let mut rest = idx;
            for k in 2..=r {
                let eps = rest % a;
                rest /= a;
                t += eps * b.pow(k) * a.pow(r - k);
            }
            out.push((t, d as u32));
        }
    }
    out
}

/// Every translate `y + x + D_r` (`y in Z[1/b]`, `x` a tile corner) whose
/// closed box contains the point `(real, padic)`.
pub fn cover_hits(a: u32, b: u32, r: u32, corners: &[(i128, u32)], real: &Q, padic: &[Q]) -> Vec<Hit> {
    let primes = primes_of(b as u64);
    let y0: Q = primes.iter().zip(padic).map(|(&(p, _), x)| lambda(p, x)).sum();
    let m = pow(b, r);
    let parts: Vec<(BigInt, BigInt)> = primes
        .iter()
        .zip(padic)
        .map(|(&(p, e), x)| {
            let mp = BigInt::from(p).pow(e * r);
            (residue(&(x - &y0), &mp), mp)
        })
        .collect();
    let rz = crt(&parts).to_i128().unwrap();
    let m = m.to_i128().unwrap();
    let ar = (a as i128).pow(r);
    let inv_ar = inverse(&BigInt::from(ar), &BigInt::from(m)).to_i128().unwrap();
    let z = real - &y0;
    let (pn, dn) = (z.numer().to_i128().unwrap(), z.denom().to_i128().unwrap());
    let big_k = m * ar * dn;
    let mut hits = Vec::new();
    for &(t, d) in corners {
        let j = (rz - (t.rem_euclid(m) * inv_ar).rem_euclid(m)).rem_euclid(m);
        let l = pn * ar - (t + j * ar) * dn;
        let lo = l - m * dn;
        let k_hi = l.div_euclid(big_k);
        if k_hi * big_k >= lo {
            hits.push(Hit { digit: d, on_face: k_hi * big_k == l || k_hi * big_k == lo });
        }
    }
    hits
}

/// `g_{x,r}(t, s)`: the share of `(t, s) + D_r` lying in `x + Z[alpha] + D_r`,
/// where the `p`-adic coordinate is the integer `s` modulo `b^r`.
fn g_offset(b: u32, r: u32, x: &Q, s: u64) -> f64 {
    let primes = primes_of(b as u64);
    let w: Vec<Q> = primes.iter().map(|_| Q::from_integer(s.into()) - x).collect();
    let m0 = lattice_lift(&primes, &w, r);
    let br = pow(b, r);
    let o = x + m0;
    (o.clone() - Q::from_integer(br.clone()) * (o / Q::from_integer(br)).floor()).to_f64().unwrap()
}

/// `integral over D_0` of `g_{x,r}(z) conj(chi(xi z))`, `xi = j / b^r`, by
/// Gauss-Legendre quadrature in the real variable and an exact sum over the
/// `b^r` classes of the `p`-adic variable.
pub fn coeff_g_quadrature(a: u32, b: u32, r: u32, x: &Q, j: i64) -> (f64, f64) {
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let br = (b as u64).pow(r);
    let brf = br as f64;
    let h = (b as f64 / a as f64).powi(r as i32);
    let xi = j as f64 / brf;
    let tau = std::f64::consts::TAU;
    let (mut re, mut im) = (0.0, 0.0);
    for s in 0..br {
        let o = g_offset(b, r, x, s);
        let g = |t: f64| {
            let delta = (t - o).rem_euclid(brf);
            ((h - delta).max(0.0) + (h - (brf - delta)).max(0.0)) / h
        };
        // Kinks of g in [0, 1].
        let mut cuts = vec![0.0, 1.0];
        for k in -2..=2 {
            for off in [0.0, h, brf - h] {
                let c = o + off + k as f64 * brf;
                if c > 0.0 && c < 1.0 {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let phase_s = -(j as f64) * s as f64 / brf;
        for w in cuts.windows(2) {
            let pieces = 64;
            let step = (w[1] - w[0]) / pieces as f64;
            for i in 0..pieces {
                let (lo, hi) = (w[0] + i as f64 * step, w[0] + (i + 1) as f64 * step);
                let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
                for (node, weight) in NODES {
                    let t = mid + half * node;
                    let ang = tau * (xi * t + phase_s);
                    let v = g(t) * weight * half;
                    re += v * ang.cos();
                    im += v * ang.sin();
                }
            }
        }
    }
    (re / brf, im / brf)
}
