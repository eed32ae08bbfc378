//! Boundary tubes: the level-`r` boxes that may meet
//! `(F_d - F_{d,r}) u (F_{d,r} - F_d) u dF_d u dF_{d,r}` or any of their
//! `Z[alpha]`-translates.
//!
//! `F` itself is a limit set, so membership is decided through finer pieces.
//! At level `s` the translates `c + alpha^{-s} F` (`c` a level-`s` corner)
//! tile `K_alpha`, and the piece at `c = m + sum eps_i alpha^{-i}` lies in
//! `m + F_{eps_1}`. Its real extent is `[c, c + W alpha^{-s}]` with
//! `W = (a-1) b / (a-b)`, and its ball is inside the level-`s` ball of `c`.
//!
//! Give a level-`r` box the key `Some(m)` when it lies in `m + F_{d,r}` and
//! `None` otherwise, and give a piece the key `Some(m)` when it lies in
//! `m + F_d`. A box is dropped from the tube at resolution `s` when both of
//! its face neighbours share its key and every level-`s` piece meeting the
//! closed box carries the same key as well. The pieces then cover a
//! neighbourhood of the box, so the box avoids every boundary and both
//! differences. The reported set intersects this test over `s = r+1 ..= r'`,
//! so it can only shrink as `r'` grows and always contains the true tube.
//!
//! Corners near `F_d` are `p`-integral, which keeps everything in machine
//! integers: see [`IntBoxes`].

use rayon::prelude::*;

use super::lattice::{box_digits, BoxLocation, BoxResidue, IntBoxes};
use super::{locate, membership_point, AdeleContext, AdelePoint, BoxIndex};
use crate::error::{Error, Result};
use crate::numeration::Digit;
use crate::Q;

const NONE_KEY: i128 = i128::MIN;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTube {
    digit: Digit,
    level: u32,
    resolution: u32,
    /// Residue codes `sum eps_i a^{i-1}` of the members, ascending.
    codes: Vec<u64>,
    /// Numerators `T` of the member corners `T / a^r` around `F_d`, ascending.
    numerators: Vec<i128>,
}

impl BoundaryTube {
    pub fn digit(&self) -> Digit {
        self.digit
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Number of member classes modulo `Z[alpha]`.
    pub fn period_count(&self) -> usize {
        self.codes.len()
    }

    /// Number of member boxes around `F_d` itself.
    pub fn actual_count(&self) -> usize {
        self.numerators.len()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    /// One canonical corner per member class.
    pub fn members(&self, ctx: &AdeleContext) -> Vec<BoxIndex> {
        self.codes
            .iter()
            .map(|&c| {
                let corner = BoxResidue::from_code(ctx.a(), self.level, c).corner(ctx);
                BoxIndex::new(ctx, self.level, corner).expect("canonical corner")
            })
            .collect()
    }

    /// The member boxes around `F_d`, as corners.
    pub fn member_corners(&self, ctx: &AdeleContext) -> Vec<Q> {
        let den = num_bigint::BigInt::from(ctx.a()).pow(self.level);
        self.numerators.iter().map(|&t| Q::new(t.into(), den.clone())).collect()
    }
}

fn key(boxes: &IntBoxes, t: i128, d: Digit) -> i128 {
    let (m, _, e1) = boxes.digits(t);
    if e1 == d {
        m
    } else {
        NONE_KEY
    }
}

pub fn boundary_tube(ctx: &AdeleContext, d: Digit, r: u32, resolution: u32) -> Result<BoundaryTube> {
    if r == 0 {
        return Err(Error::InvalidArgument("tube level must be at least 1".into()));
    }
    if resolution <= r {
        return Err(Error::InvalidArgument("resolution must exceed the tube level".into()));
    }
    if d >= ctx.a() {
        return Err(Error::DigitOutOfRange { digit: d as u64, a: ctx.a() });
    }
    ctx.a_pow_checked(resolution)?;

    let a = ctx.a() as i128;
    let b = ctx.b() as i128;
    let (w_num, w_den) = ((a - 1) * b, a - b);
    let level_r = IntBoxes::new(ctx, r);
    let br = level_r.b_r();
    let fine: Vec<(u32, IntBoxes)> = (r + 1..=resolution).rev().map(|s| (s, IntBoxes::new(ctx, s))).collect();

    // Both F_d and F_{d,r} lie in [d b / a, (d + W) b / a] x b prod Z_p.
    let ar1 = a.pow(r - 1);
    let lo = d as i128 * b * ar1 - br;
    let hi = ((d as i128 * w_den + w_num) * b * ar1).div_euclid(w_den);
    let first = lo.div_euclid(b) * b + if lo.rem_euclid(b) == 0 { 0 } else { b };
    let candidates: Vec<i128> = (0..).map(|i| first + i * b).take_while(|&t| t <= hi).collect();

    let uniform = |t: i128, kx: i128, s: u32, boxes: &IntBoxes| -> bool {
        let scale = a.pow(s - r);
        let base = t * scale;
        let reach = w_num * b.pow(s) / w_den;
        let end = (t + br) * scale;
        let mut ts = base - (reach / br) * br;
        while ts <= end {
            if key(boxes, ts, d) != kx {
                return false;
            }
            ts += br;
        }
        true
    };

    let mut numerators: Vec<i128> = candidates
        .into_par_iter()
        .filter(|&t| {
            let kx = key(&level_r, t, d);
            if key(&level_r, t - br, d) != kx || key(&level_r, t + br, d) != kx {
                return true;
            }
            !fine.iter().any(|(s, boxes)| uniform(t, kx, *s, boxes))
        })
        .collect();
    numerators.sort_unstable();
    let mut codes: Vec<u64> = numerators.iter().map(|&t| level_r.digits(t).1).collect();
    codes.sort_unstable();
    codes.dedup();
    Ok(BoundaryTube { digit: d, level: r, resolution, codes, numerators })
}

/// Classes modulo `Z[alpha]` of the level-`r` boxes meeting
/// `(F - F'_r) u (F'_r - F) u dF u dF'_r`, where `F'_r` is the union of the
/// `F_{d,r}` over all digits.
///
/// `F_0 = alpha^{-1} F` and `F_{0,r+1} = alpha^{-1} F'_r`, so these boxes are
/// `alpha` times the members of the digit-0 tube at level `r + 1`; the
/// resolution refers to that tube.
pub fn union_boundary_classes(ctx: &AdeleContext, r: u32, resolution: u32) -> Result<Vec<u64>> {
    let tube = boundary_tube(ctx, 0, r + 1, resolution)?;
    let b = ctx.b() as i128;
    let boxes = IntBoxes::new(ctx, r);
    let mut codes: Vec<u64> = tube.numerators.iter().map(|&t| boxes.digits(t / b).1).collect();
    codes.sort_unstable();
    codes.dedup();
    Ok(codes)
}

/// The tubes of every digit at one level, for point queries.
#[derive(Debug, Clone)]
pub struct TubeAtlas {
    level: u32,
    resolution: u32,
    tubes: Vec<BoundaryTube>,
    union: Vec<bool>,
}

impl TubeAtlas {
    pub fn new(ctx: &AdeleContext, r: u32, resolution: u32) -> Result<Self> {
        let tubes = ctx.base().digits().map(|d| boundary_tube(ctx, d, r, resolution)).collect::<Result<Vec<_>>>()?;
        let mut union = vec![false; ctx.a_pow_checked(r)? as usize];
        for t in &tubes {
            for &c in t.codes() {
                union[c as usize] = true;
            }
        }
        Ok(TubeAtlas { level: r, resolution, tubes, union })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn tubes(&self) -> &[BoundaryTube] {
        &self.tubes
    }

    /// Number of classes in the union over digits.
    pub fn union_count(&self) -> usize {
        self.union.iter().filter(|&&x| x).count()
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.union.get(code as usize).copied().unwrap_or(false)
    }

    /// Whether some closed level-`r` box through the located point is a
    /// tube member.
    pub fn location_in_tube(&self, ctx: &AdeleContext, loc: &BoxLocation) -> bool {
        debug_assert_eq!(loc.index.level(), self.level);
        loc.closed_boxes(ctx).iter().any(|bx| self.contains_code(box_digits(ctx, bx).1.code(ctx.a())))
    }

    pub fn point_in_tube(&self, ctx: &AdeleContext, z: &AdelePoint) -> bool {
        self.location_in_tube(ctx, &locate(ctx, z, self.level))
    }
}

/// `F_{k,r}`: how many `1 <= n <= N` have `Phi(b n / alpha^{k+1})` in a
/// closed tube box of any digit.
pub fn count_boundary_hits(ctx: &AdeleContext, k: u32, r: u32, n_max: u64, atlas: &TubeAtlas) -> Result<u64> {
    if atlas.level() != r {
        return Err(Error::InvalidArgument(format!("tube is at level {}, not {r}", atlas.level())));
    }
    Ok((1..=n_max)
        .into_par_iter()
        .filter(|&n| atlas.point_in_tube(ctx, &AdelePoint::diagonal(ctx, &membership_point(ctx, n, k))))
        .count() as u64)
}

/// Least-squares fit of `count ~ C rho^r` on log counts; zero counts are
/// skipped. Returns `(C, rho)`.
pub fn fit_growth(points: &[(u32, u64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0).map(|&(r, c)| (r as f64, (c as f64).ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), slope.exp()))
}
