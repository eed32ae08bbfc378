//! Level-`r` boxes, the tile approximations `F_{d,r}` and point location.
//!
//! A level-`r` box with corner `x in alpha^{-r} Z[alpha]` is
//! `Phi(x) + alpha^{-r} ([0, 1] x prod Z_p)`. Every corner is congruent mod
//! `Z[alpha]` to exactly one digit sum `sum_{i=1}^r eps_i alpha^{-i}`; the
//! leading digit `eps_1` is the colour of the box, i.e. the `d` with the box
//! inside some translate of `F_{d,r}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::padic::{mod_inv_i128, mul_mod};
use super::tube::TubeAtlas;
use super::{in_z_alpha, qi, reduce_mod_lattice, residue_mod, AdeleContext, AdelePoint};
use crate::error::{Error, Result};
use crate::numeration::Digit;
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxIndex {
    level: u32,
    corner: Q,
}

impl BoxIndex {
    pub fn new(ctx: &AdeleContext, level: u32, corner: Q) -> Result<Self> {
        let scaled = &corner * ctx.alpha_pow(level as i64);
        if !in_z_alpha(ctx, &scaled) {
            return Err(Error::NotBoxCorner { value: corner.to_string(), level });
        }
        Ok(BoxIndex { level, corner })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn corner(&self) -> &Q {
        &self.corner
    }

    /// Real length `alpha^{-r}` of the box.
    pub fn side(&self, ctx: &AdeleContext) -> Q {
        ctx.alpha_pow(-(self.level as i64))
    }

    /// The boxes sharing a face with this one: corners `x -+ alpha^{-r}`.
    pub fn neighbours(&self, ctx: &AdeleContext) -> [BoxIndex; 2] {
        let s = self.side(ctx);
        [
            BoxIndex { level: self.level, corner: &self.corner - &s },
            BoxIndex { level: self.level, corner: &self.corner + &s },
        ]
    }

    /// Half-open containment (real part `[x, x + alpha^{-r})`).
    pub fn contains(&self, ctx: &AdeleContext, z: &AdelePoint) -> bool {
        let loc = locate(ctx, z, self.level);
        loc.index == *self
    }
}

/// A class of level-`r` corners modulo `Z[alpha]`, as its digits
/// `eps_1, .., eps_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxResidue {
    digits: Vec<Digit>,
}

impl BoxResidue {
    pub fn new(digits: Vec<Digit>) -> Self {
        BoxResidue { digits }
    }

    pub fn from_code(a: u32, level: u32, mut code: u64) -> Self {
        let mut digits = Vec::with_capacity(level as usize);
        for _ in 0..level {
            digits.push((code % a as u64) as Digit);
            code /= a as u64;
        }
        BoxResidue { digits }
    }

    pub fn level(&self) -> u32 {
        self.digits.len() as u32
    }

    /// `eps_1 .. eps_r`.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn colour(&self) -> Digit {
        self.digits[0]
    }

    /// `sum_i eps_i a^{i-1}`.
    pub fn code(&self, a: u32) -> u64 {
        self.digits.iter().rev().fold(0u64, |acc, &d| acc * a as u64 + d as u64)
    }

    /// The canonical corner `sum_i eps_i alpha^{-i}`.
    pub fn corner(&self, ctx: &AdeleContext) -> Q {
        self.digits
            .iter()
            .enumerate()
            .fold(Q::zero(), |acc, (i, &d)| acc + qi(d) * ctx.alpha_pow(-(i as i64 + 1)))
    }
}

/// Splits a corner as `m + sum_i eps_i alpha^{-i}` with `m in Z[alpha]`.
pub fn box_digits(ctx: &AdeleContext, index: &BoxIndex) -> (Q, BoxResidue) {
    let a = BigInt::from(ctx.a());
    let bq = qi(ctx.b());
    let aq = qi(ctx.a());
    let r = index.level as usize;
    let mut y = &index.corner * ctx.alpha_pow(r as i64);
    let mut digits = vec![0; r];
    for j in (0..r).rev() {
        let eps = residue_mod(&y, &a);
        let e = eps.to_u32().expect("digit");
        digits[j] = e;
        y = (y - qi(e)) * &bq / &aq;
    }
    (y, BoxResidue { digits })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxLocation {
    /// The half-open level-`r` box containing the point.
    pub index: BoxIndex,
    /// Real offset of the point inside the box, in units of `alpha^{-r}`, in `[0, 1)`.
    pub offset: Q,
}

impl BoxLocation {
    /// True when the point sits on the left face, so it also lies in the
    /// closed box to the left.
    pub fn on_face(&self) -> bool {
        self.offset.is_zero()
    }

    /// Corners of every closed level-`r` box containing the point.
    pub fn closed_boxes(&self, ctx: &AdeleContext) -> Vec<BoxIndex> {
        if self.on_face() {
            let left = self.index.neighbours(ctx)[0].clone();
            vec![self.index.clone(), left]
        } else {
            vec![self.index.clone()]
        }
    }
}

pub fn locate(ctx: &AdeleContext, z: &AdelePoint, r: u32) -> BoxLocation {
    let scaled = z.scale(&ctx.alpha_pow(r as i64));
    let (y, res) = reduce_mod_lattice(ctx, &scaled);
    BoxLocation { index: BoxIndex { level: r, corner: y * ctx.alpha_pow(-(r as i64)) }, offset: res.real }
}

/// Translate `m` and colour `d` with the point in `Phi(m) + F_{d,r}`
/// (half-open convention).
pub fn colour(ctx: &AdeleContext, z: &AdelePoint, r: u32) -> (Q, Digit) {
    let loc = locate(ctx, z, r);
    let (m, res) = box_digits(ctx, &loc.index);
    (m, res.colour())
}

/// Machine-integer arithmetic on `p`-integral corners `T / a^r`.
///
/// For such corners the ball is `T mod b^r`, the face neighbours are
/// `T -+ b^r` and the class modulo `Z[alpha]` is `T mod a^r`.
#[derive(Debug, Clone)]
pub(crate) struct IntBoxes {
    a: i128,
    level: u32,
    bpow: Vec<i128>,
    binv: Vec<i128>,
}

impl IntBoxes {
    pub(crate) fn new(ctx: &AdeleContext, level: u32) -> Self {
        let a = ctx.a() as i128;
        let b = ctx.b() as i128;
        let bpow: Vec<i128> = (0..=level).map(|j| b.pow(j)).collect();
        let binv = bpow.iter().map(|&p| mod_inv_i128(p % a, a)).collect();
        IntBoxes { a, level, bpow, binv }
    }

    pub(crate) fn b_r(&self) -> i128 {
        self.bpow[self.level as usize]
    }

    /// `(m, code, eps_1)` for the corner `T / a^r`.
    #[inline]
    pub(crate) fn digits(&self, mut t: i128) -> (i128, u64, Digit) {
        let a = self.a;
        let mut code = 0u64;
        let mut eps = 0i128;
        for j in (1..=self.level as usize).rev() {
            eps = mul_mod(t.rem_euclid(a), self.binv[j], a);
            code = code * a as u64 + eps as u64;
            t = (t - eps * self.bpow[j]) / a;
        }
        // `code` was built with eps_r most significant, matching sum eps_i a^{i-1}.
        (t, code, eps as Digit)
    }
}

/// The corners of `F_{d,r}`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileApprox {
    pub digit: Digit,
    pub level: u32,
    pub corners: Vec<Q>,
}

impl TileApprox {
    /// Total measure: `a^{r-1}` boxes of measure `a^{-r}` each.
    pub fn measure(&self, ctx: &AdeleContext) -> Q {
        qi(self.corners.len()) * Q::new(1.into(), BigInt::from(ctx.a()).pow(self.level))
    }
}

/// `F_{d,r}`: corners `d alpha^{-1} + sum_{k=2}^r eps_k alpha^{-k}`.
pub fn tile_approx(ctx: &AdeleContext, d: Digit, r: u32) -> Result<TileApprox> {
    if r == 0 {
        return Err(Error::InvalidArgument("tile level must be at least 1".into()));
    }
    if d >= ctx.a() {
        return Err(Error::DigitOutOfRange { digit: d as u64, a: ctx.a() });
    }
    ctx.a_pow_checked(r - 1)?;
    let den = BigInt::from(ctx.a()).pow(r);
    let mut ts = prefix_numerators(ctx, d, r);
    ts.sort_unstable();
    let corners = ts.into_iter().map(|t| Q::new(BigInt::from(t), den.clone())).collect();
    Ok(TileApprox { digit: d, level: r, corners })
}

/// Numerators `T` of the corners `T / a^r` of `F_{d,r}`.
pub(crate) fn prefix_numerators(ctx: &AdeleContext, d: Digit, r: u32) -> Vec<i128> {
    let a = ctx.a() as i128;
    let b = ctx.b() as i128;
    // T_j = a T_{j-1} + eps_j b^j over the prefix eps_1 .. eps_j.
    let mut ts = vec![d as i128 * b];
    for j in 2..=r {
        let bj = b.pow(j);
        ts = ts.iter().flat_map(|&t| (0..a).map(move |e| a * t + e * bj)).collect();
    }
    ts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueReport {
    pub level: u32,
    pub count: u64,
    pub distinct: u64,
}

impl ResidueReport {
    pub fn passed(&self) -> bool {
        self.count == self.distinct
    }
}

/// Checks that the `a^r` digit sums `sum_{i<=r} eps_i alpha^{-i}` are pairwise
/// incongruent modulo `Z[alpha]`.
pub fn verify_residue_system(ctx: &AdeleContext, r: u32) -> Result<ResidueReport> {
    if r == 0 {
        return Err(Error::InvalidArgument("residue level must be at least 1".into()));
    }
    let ar = ctx.a_pow_checked(r)? as i128;
    let primes = ctx.primes().to_vec();
    let mut seen = vec![false; ar as usize];
    let mut distinct = 0u64;
    let mut count = 0u64;
    for d in 0..ctx.a() {
        for t in prefix_numerators(ctx, d, r) {
            count += 1;
            // Class of T / a^r as (c / m) in [0, 1), placed on the grid 1 / a^r.
            let (c, m) = lattice_class_i128(&primes, t, ar);
            let slot = (c * (ar / m)) as usize;
            if !seen[slot] {
                seen[slot] = true;
                distinct += 1;
            }
        }
    }
    Ok(ResidueReport { level: r, count, distinct })
}

fn lattice_class_i128(primes: &[(u64, u32)], num: i128, den: i128) -> (i128, i128) {
    let g = num.abs().gcd(&den).max(1);
    let (num, den) = (num / g, den / g);
    let (vs, vp) = super::padic::split_den_i128(den, primes);
    if vp == 1 {
        return (0, 1);
    }
    (mul_mod(num.rem_euclid(vp), mod_inv_i128(vs, vp), vp), vp)
}

/// `b n / alpha^{k+1} = b^{k+2} n / a^{k+1}`.
pub fn membership_point(ctx: &AdeleContext, n: u64, k: u32) -> Q {
    let a = BigInt::from(ctx.a());
    let b = BigInt::from(ctx.b());
    Q::new(b.pow(k + 2) * BigInt::from(n), a.pow(k + 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitCertificate {
    pub digit: Digit,
    pub level: u32,
    /// The point is itself a level-`r` corner (`r >= k + 1`), so no tube
    /// check was needed.
    pub exact_corner: bool,
}

/// Recovers `eps_k(n)` from the location of `Phi(b n / alpha^{k+1})` at
/// level `r`.
///
/// For `r >= k + 1` the point is a box corner and its colour is the digit.
/// Below that level the containing box decides only if it avoids the
/// boundary tube; otherwise `BoundaryAmbiguous` asks for a finer level.
pub fn identify_digit(
    ctx: &AdeleContext,
    n: u64,
    k: u32,
    r: u32,
    atlas: Option<&TubeAtlas>,
) -> Result<DigitCertificate> {
    let z = AdelePoint::diagonal(ctx, &membership_point(ctx, n, k));
    let loc = locate(ctx, &z, r);
    if r >= k + 1 {
        debug_assert!(loc.on_face());
        let (_, res) = box_digits(ctx, &loc.index);
        return Ok(DigitCertificate { digit: res.colour(), level: r, exact_corner: true });
    }
    let atlas = atlas.ok_or_else(|| Error::InvalidArgument("a boundary tube is needed below level k+1".into()))?;
    if atlas.level() != r {
        return Err(Error::InvalidArgument("tube level does not match".into()));
    }
    if atlas.location_in_tube(ctx, &loc) {
        return Err(Error::BoundaryAmbiguous { level: r });
    }
    let (_, res) = box_digits(ctx, &loc.index);
    Ok(DigitCertificate { digit: res.colour(), level: r, exact_corner: false })
}
