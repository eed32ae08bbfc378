//! Fourier analysis of the box-averaged tile indicators.
//!
//! `g_{x,r}(z) = a^r mu(y in D_r : z + y in x + Z[alpha] + D_r)` and
//! `f_{d,r} = sum_x g_{x,r}` over the corners `x` of `F_{d,r}`. Both are
//! continuous on `K_alpha / Z[alpha]` with Fourier series over
//! `xi in Z[alpha]`, supported on `xi = j / b^r`. Writing `j = xi b^r`,
//!
//! `c_{x,r,xi} = chi~(-x xi) a^r sin^2(pi j / a^r) / (pi^2 j^2)` for `j != 0`.

use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::adelic::{
    box_digits, char_phase_i128, char_tilde, e_ratio, in_z_alpha, locate, membership_point,
    tile_approx, AdeleContext, AdelePoint, BoxIndex,
};
use crate::error::{Error, Result};
use crate::numeration::Digit;
use crate::patterns::Pattern;
use crate::Q;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficient {
    pub xi: Q,
    pub level: u32,
    /// `Some(d)` for `c'_{d,r,xi}`; `None` for a single-box coefficient.
    pub digit: Option<Digit>,
    pub value: Complex64,
}

impl FourierCoefficient {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }

    /// The CSV row, with `xi` written as its numerator `xi b^r`.
    pub fn row(&self, b: u32) -> CoefficientRow {
        let j = &self.xi * Q::from_integer(BigInt::from(b).pow(self.level));
        CoefficientRow {
            xi_numerator: j.to_integer().to_i64().unwrap_or(i64::MAX),
            r: self.level,
            digit: self.digit.unwrap_or(0),
            re: self.value.re,
            im: self.value.im,
            abs: self.value.norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub xi_numerator: i64,
    pub r: u32,
    pub digit: Digit,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64Ser,
    pub cutoff: u64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// Serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(c: Complex64) -> Self {
        Complex64Ser { re: c.re, im: c.im }
    }
}

/// `j = xi b^r` when `xi in Z / b^r`.
fn support_index(ctx: &AdeleContext, r: u32, xi: &Q) -> Option<BigInt> {
    let scaled = xi * Q::from_integer(BigInt::from(ctx.b()).pow(r));
    scaled.is_integer().then(|| scaled.to_integer())
}

/// `a^r sin^2(pi j / a^r) / (pi^2 j^2)`, the modulus shared by all
/// single-box coefficients at `xi = j / b^r`.
fn magnitude(ar: &BigInt, j: &BigInt) -> f64 {
    let rem = j.mod_floor(ar);
    if rem.is_zero() {
        return 0.0;
    }
    let t = Q::new(rem, ar.clone()).to_f64().unwrap_or(0.0);
    let s = (std::f64::consts::PI * t).sin();
    let jf = j.to_f64().unwrap_or(f64::INFINITY);
    ar.to_f64().unwrap_or(f64::INFINITY) * s * s / (std::f64::consts::PI.powi(2) * jf * jf)
}

/// `c_{x,r,xi}`. `x` must be a level-`r` corner.
pub fn coeff_g(ctx: &AdeleContext, x: &Q, r: u32, xi: &Q) -> Result<Complex64> {
    BoxIndex::new(ctx, r, x.clone())?;
    let ar = BigInt::from(ctx.a()).pow(r);
    if xi.is_zero() {
        return Ok(Complex64::new(1.0 / ar.to_f64().unwrap_or(f64::INFINITY), 0.0));
    }
    let Some(j) = support_index(ctx, r, xi) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let m = magnitude(&ar, &j);
    if m == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(char_tilde(ctx, &-(x * xi)) * m)
}

/// Machine-word evaluation of `c'_{d,r,j/b^r}` and of the series terms.
#[derive(Debug, Clone)]
pub struct FourierKernel {
    primes: Vec<(u64, u32)>,
    a: i128,
    b: i128,
    r: u32,
    ar: i128,
}

impl FourierKernel {
    pub fn new(ctx: &AdeleContext, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("level must be at least 1".into()));
        }
        let a = ctx.a() as i128;
        let ar = a.checked_pow(r).filter(|v| *v < 1 << 100).ok_or_else(|| Error::InvalidArgument("level too large".into()))?;
        Ok(FourierKernel { primes: ctx.primes().to_vec(), a, b: ctx.b() as i128, r, ar })
    }

    fn phase(&self, num: i128, den: i128) -> (i128, i128) {
        char_phase_i128(&self.primes, num, den)
    }

    fn magnitude(&self, j: i128) -> f64 {
        let rem = j.rem_euclid(self.ar);
        if rem == 0 {
            return 0.0;
        }
        let s = (std::f64::consts::PI * rem as f64 / self.ar as f64).sin();
        self.ar as f64 * s * s / (std::f64::consts::PI.powi(2) * (j as f64).powi(2))
    }

    /// `c'_{d,r,j/b^r}` from the factorised digit sums; exact zeros are
    /// returned as `0`.
    pub fn coeff_f(&self, d: Digit, j: i128) -> Complex64 {
        if j == 0 {
            // a^{r-1} boxes with coefficient a^{-r} each.
            return Complex64::new((self.ar / self.a) as f64 / self.ar as f64, 0.0);
        }
        let m = self.magnitude(j);
        if m == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let r = self.r;
        // xi / alpha^k = j / (b^{r-k} a^k).
        let (t, q) = self.phase(-(d as i128) * j, self.b.pow(r - 1) * self.a);
        let mut acc = e_ratio(t, q) * m;
        for k in 2..=r {
            let (t, q) = self.phase(-j, self.b.pow(r - k) * self.a.pow(k));
            if t == 0 {
                acc *= self.a as f64;
                continue;
            }
            if (self.a * t) % q == 0 {
                // A non-trivial a-th root of unity sums to zero over the digits.
                return Complex64::new(0.0, 0.0);
            }
            let s: Complex64 = (0..self.a).map(|eps| e_ratio(eps * t, q)).sum();
            acc *= s;
        }
        acc
    }

    /// `chi~(j z / b^r)` for `z = num / den`.
    pub fn wave(&self, j: i128, num: i128, den: i128) -> Complex64 {
        let (t, q) = self.phase(j * num, den * self.b.pow(self.r));
        e_ratio(t, q)
    }
}

/// `c'_{d,r,xi}` through the factorised product over digit positions.
pub fn coeff_f(ctx: &AdeleContext, d: Digit, r: u32, xi: &Q) -> Result<Complex64> {
    if d >= ctx.a() {
        return Err(Error::DigitOutOfRange { digit: d as u64, a: ctx.a() });
    }
    let kernel = FourierKernel::new(ctx, r)?;
    if xi.is_zero() {
        return Ok(kernel.coeff_f(d, 0));
    }
    let Some(j) = support_index(ctx, r, xi) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let j = j.to_i128().filter(|j| j.abs() < 1 << 60).ok_or_else(|| Error::InvalidArgument("frequency too large".into()))?;
    Ok(kernel.coeff_f(d, j))
}

/// `c'_{d,r,xi}` as the plain sum of `c_{x,r,xi}` over the `a^{r-1}`
/// corners of `F_{d,r}`.
pub fn coeff_f_by_prefixes(ctx: &AdeleContext, d: Digit, r: u32, xi: &Q) -> Result<Complex64> {
    let tile = tile_approx(ctx, d, r)?;
    tile.corners.par_iter().map(|x| coeff_g(ctx, x, r, xi)).try_reduce(|| Complex64::new(0.0, 0.0), |s, t| Ok(s + t))
}

/// `c'_{d,r,j/b^r}` for `|j| <= max_j`, ascending in `j`.
pub fn coefficient_table(ctx: &AdeleContext, d: Digit, r: u32, max_j: u64) -> Result<Vec<FourierCoefficient>> {
    if d >= ctx.a() {
        return Err(Error::DigitOutOfRange { digit: d as u64, a: ctx.a() });
    }
    let kernel = FourierKernel::new(ctx, r)?;
    let br = BigInt::from(ctx.b()).pow(r);
    let m = max_j as i64;
    Ok((-m..=m)
        .map(|j| FourierCoefficient {
            xi: Q::new(BigInt::from(j), br.clone()),
            level: r,
            digit: Some(d),
            value: kernel.coeff_f(d, j as i128),
        })
        .collect())
}

pub fn write_coefficients_csv<W: Write>(ctx: &AdeleContext, coeffs: &[FourierCoefficient], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for c in coeffs {
        wtr.serialize(c.row(ctx.b()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Real offset `u` of `z` in its level-`r` box and the corners of that box
/// and of its right neighbour: `z + D_r` meets exactly these two boxes,
/// with overlaps `1 - u` and `u`.
fn two_boxes(ctx: &AdeleContext, r: u32, z: &AdelePoint) -> (Q, BoxIndex, BoxIndex) {
    let loc = locate(ctx, z, r);
    let right = loc.index.neighbours(ctx)[1].clone();
    (loc.offset, loc.index, right)
}

/// `f_{d,r}(z)` computed from box overlaps.
pub fn eval_urysohn_direct_at(ctx: &AdeleContext, d: Digit, r: u32, z: &AdelePoint) -> Q {
    let (u, left, right) = two_boxes(ctx, r, z);
    let hit = |bx: &BoxIndex| box_digits(ctx, bx).1.colour() == d;
    let mut v = Q::zero();
    if hit(&left) {
        v += Q::one() - &u;
    }
    if hit(&right) {
        v += u;
    }
    v
}

pub fn eval_urysohn_direct(ctx: &AdeleContext, d: Digit, r: u32, z: &Q) -> Q {
    eval_urysohn_direct_at(ctx, d, r, &AdelePoint::diagonal(ctx, z))
}

/// `g_{x,r}(z)` computed from box overlaps.
pub fn eval_g_direct(ctx: &AdeleContext, x: &Q, r: u32, z: &AdelePoint) -> Result<Q> {
    BoxIndex::new(ctx, r, x.clone())?;
    let (u, left, right) = two_boxes(ctx, r, z);
    let hit = |bx: &BoxIndex| in_z_alpha(ctx, &(bx.corner() - x));
    let mut v = Q::zero();
    if hit(&left) {
        v += Q::one() - &u;
    }
    if hit(&right) {
        v += u;
    }
    Ok(v)
}

/// Bound on `sum_{|j| > J} |c'_{d,r,j/b^r}|`: each of the `a^{r-1}` box
/// coefficients is at most `a^r / (pi^2 j^2)`, and `sum_{|j|>J} j^{-2} < 2/J`.
pub fn tail_bound(ctx: &AdeleContext, r: u32, cutoff: u64) -> f64 {
    let a = ctx.a() as f64;
    2.0 * a.powi(2 * r as i32 - 1) / (std::f64::consts::PI.powi(2) * cutoff as f64)
}

/// Partial sum of the Fourier series of `f_{d,r}` at `Phi(z)` over
/// `|xi b^r| <= cutoff`, pairing `+-xi`.
pub fn eval_urysohn_series(ctx: &AdeleContext, d: Digit, r: u32, z: &Q, cutoff: u64) -> Result<SeriesValue> {
    if d >= ctx.a() {
        return Err(Error::DigitOutOfRange { digit: d as u64, a: ctx.a() });
    }
    let br = (ctx.b() as u64).checked_pow(r).unwrap_or(u64::MAX);
    if cutoff < br {
        return Err(Error::InvalidArgument(format!("cutoff must be at least b^r = {br}")));
    }
    let kernel = FourierKernel::new(ctx, r)?;
    let (num, den) = match (z.numer().to_i128(), z.denom().to_i128()) {
        (Some(n), Some(dd)) if n.abs() < 1 << 50 && dd < 1 << 50 => (n, dd),
        _ => return Err(Error::InvalidArgument("point too large for the series kernel".into())),
    };
    let mut sum = kernel.coeff_f(d, 0);
    let mut terms = 1usize;
    for j in 1..=cutoff as i128 {
        let c = kernel.coeff_f(d, j);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let cm = kernel.coeff_f(d, -j);
        sum += c * kernel.wave(j, num, den) + cm * kernel.wave(-j, num, den);
        terms += 2;
    }
    Ok(SeriesValue { value: sum.into(), cutoff, terms, tail_bound: tail_bound(ctx, r, cutoff) })
}

/// `sum_{n <= N} prod_j f_{w_j,r}(Phi(b n / alpha^{k+j+1}))`, exactly.
pub fn urysohn_pattern_estimate(ctx: &AdeleContext, w: &Pattern, k: u32, r: u32, n_max: u64) -> Result<Q> {
    if r == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    ctx.check_enum(n_max as u128 * w.len() as u128)?;
    let total = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut p = Q::one();
            for j in 0..w.len() {
                let z = membership_point(ctx, n, k + j as u32);
                p *= eval_urysohn_direct(ctx, w.w(j), r, &z);
                if p.is_zero() {
                    break;
                }
            }
            p
        })
        .reduce(Q::zero, |x, y| x + y);
    Ok(total)
}
