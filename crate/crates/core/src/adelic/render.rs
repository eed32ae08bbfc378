//! Planar pictures of tiles in `R x prod Q_p`.
//!
//! The real coordinate is kept. The `p`-adic coordinate is flattened to a
//! real number through a digit expansion: a point `x = sum_{j>=k} d_j
//! alpha^{-j}` with `d_j in {0, .., b-1}` is drawn at height
//! `sum_j d_j b^{-j}`. A level-`r` ball fixes the digits below `r`, so it
//! becomes an aligned interval of length `b^{1-r}`.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use super::{qi, residue_mod, tile_approx, valuation, AdeleContext};
use crate::error::{Error, Result};
use crate::numeration::Digit;
use crate::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiberScheme {
    /// Digits of `x = sum d_j alpha^{-j}`, matching the usual picture.
    #[default]
    AlphaDigits,
    /// Ordinary `b`-adic digits `x = sum d_j b^j`.
    PadicDigits,
}

/// Digits `d_start, .., d_{start+count-1}` of `x` in the given scheme.
pub fn fiber_digits(ctx: &AdeleContext, x: &Q, start: i32, count: usize, scheme: FiberScheme) -> Result<Vec<Digit>> {
    let b = ctx.b();
    let bb = BigInt::from(b);
    let shift = match scheme {
        FiberScheme::AlphaDigits => ctx.alpha_pow(start as i64),
        FiberScheme::PadicDigits => ctx_b_pow(b, -(start as i64)),
    };
    let mut y = x * shift;
    if let Some(&(p, _)) = ctx.primes().iter().find(|&&(p, _)| valuation(p, &y).is_some_and(|v| v < 0)) {
        return Err(Error::NotIntegral { p, value: x.to_string() });
    }
    let bq = qi(b);
    let aq = qi(ctx.a());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if b == 1 {
            out.push(0);
            continue;
        }
        let d = residue_mod(&y, &bb).to_u32().expect("digit below b");
        out.push(d);
        y = match scheme {
            FiberScheme::AlphaDigits => (y - qi(d)) * &aq / &bq,
            FiberScheme::PadicDigits => (y - qi(d)) / &bq,
        };
    }
    Ok(out)
}

fn ctx_b_pow(b: u32, e: i64) -> Q {
    let p = BigInt::from(b).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Q::from_integer(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

/// `sum_{j=0}^{depth} d_j b^{-j}` for `x` integral at every `p | b`.
pub fn fiber_coordinate(ctx: &AdeleContext, x: &Q, depth: u32, scheme: FiberScheme) -> Result<Q> {
    let digits = fiber_digits(ctx, x, 0, depth as usize + 1, scheme)?;
    Ok(weigh(ctx.b(), 0, &digits))
}

fn weigh(b: u32, start: i32, digits: &[Digit]) -> Q {
    digits
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0)
        .map(|(i, &d)| qi(d) * ctx_b_pow(b, -(start as i64 + i as i64)))
        .sum()
}

/// First digit index needed to expand `x`: `-max_p ceil(-v_p(x) / v_p(b))`.
fn start_index(ctx: &AdeleContext, x: &Q) -> i32 {
    let mut need = 0i64;
    for &(p, e) in ctx.primes() {
        if let Some(v) = valuation(p, x) {
            if v < 0 {
                need = need.max(Integer::div_ceil(&(-v), &(e as i64)));
            }
        }
    }
    -(need as i32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileRect {
    pub translate: Q,
    pub digit: Digit,
    pub real_lo: Q,
    pub real_hi: Q,
    pub fiber_lo: Q,
    pub fiber_hi: Q,
}

/// One rectangle per level-`r` box of `x + F_{d,r}` for every translate and
/// digit; ordered by translate (as given), digit and corner.
pub fn render_tiles(ctx: &AdeleContext, r: u32, translates: &[Q], scheme: FiberScheme) -> Result<Vec<TileRect>> {
    if r == 0 {
        return Err(Error::InvalidArgument("tile level must be at least 1".into()));
    }
    let ar = ctx.a_pow_checked(r)? as u128;
    ctx.check_enum(ar * translates.len() as u128)?;
    let side = ctx.alpha_pow(-(r as i64));
    let height = ctx_b_pow(ctx.b(), 1 - r as i64);
    let mut out = Vec::with_capacity((ar as usize) * translates.len());
    for x in translates {
        let start = start_index(ctx, x);
        let count = (r as i32 - start) as usize;
        for d in ctx.base().digits() {
            let tile = tile_approx(ctx, d, r)?;
            let rects = tile
                .corners
                .par_iter()
                .map(|c| {
                    let p = x + c;
                    let digits = fiber_digits(ctx, &p, start, count, scheme)?;
                    let lo = weigh(ctx.b(), start, &digits);
                    Ok(TileRect {
                        translate: x.clone(),
                        digit: d,
                        real_hi: &p + &side,
                        real_lo: p,
                        fiber_hi: &lo + &height,
                        fiber_lo: lo,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.extend(rects);
        }
    }
    Ok(out)
}

/// Returns the first pair of rectangles whose interiors overlap, if any.
///
/// Fiber intervals are aligned of equal length, so they either coincide or
/// have disjoint interiors; within one fiber interval the real intervals
/// are compared after sorting.
pub fn find_overlap(rects: &[TileRect]) -> Option<(usize, usize)> {
    let mut rows: BTreeMap<&Q, Vec<usize>> = BTreeMap::new();
    for (i, t) in rects.iter().enumerate() {
        rows.entry(&t.fiber_lo).or_default().push(i);
    }
    for (_, mut idx) in rows {
        idx.sort_by(|&i, &j| rects[i].real_lo.cmp(&rects[j].real_lo));
        for w in idx.windows(2) {
            if rects[w[0]].real_hi > rects[w[1]].real_lo {
                return Some((w[0], w[1]));
            }
        }
    }
    None
}

pub fn write_csv<W: Write>(rects: &[TileRect], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["translate", "digit", "real_lo", "real_hi", "fiber_lo", "fiber_hi"])?;
    for t in rects {
        wtr.write_record([
            t.translate.to_string(),
            t.digit.to_string(),
            t.real_lo.to_string(),
            t.real_hi.to_string(),
            t.fiber_lo.to_string(),
            t.fiber_hi.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Writes the rectangles as SVG on an integer grid: one horizontal unit is
/// the common denominator of the real coordinates, one vertical unit that of
/// the fiber coordinates. The fiber axis points up.
pub fn write_svg<W: Write>(rects: &[TileRect], digits: u32, mut out: W) -> Result<()> {
    let lcm_of = |f: &dyn Fn(&TileRect) -> [&Q; 2]| -> BigInt {
        rects.iter().flat_map(|t| f(t)).fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
    };
    let sx = lcm_of(&|t| [&t.real_lo, &t.real_hi]);
    let sy = lcm_of(&|t| [&t.fiber_lo, &t.fiber_hi]);
    let ix = |v: &Q| (v * Q::from_integer(sx.clone())).to_integer();
    // Flip so that larger fiber values are drawn higher.
    let iy = |v: &Q| -(v * Q::from_integer(sy.clone())).to_integer();

    let (mut x0, mut x1, mut y0, mut y1) = (None::<BigInt>, None::<BigInt>, None::<BigInt>, None::<BigInt>);
    let upd = |slot: &mut Option<BigInt>, v: BigInt, less: bool| {
        if slot.as_ref().map_or(true, |s| if less { v < *s } else { v > *s }) {
            *slot = Some(v);
        }
    };
    for t in rects {
        upd(&mut x0, ix(&t.real_lo), true);
        upd(&mut x1, ix(&t.real_hi), false);
        upd(&mut y0, iy(&t.fiber_hi), true);
        upd(&mut y1, iy(&t.fiber_lo), false);
    }
    let (x0, x1, y0, y1) = (x0.unwrap_or_default(), x1.unwrap_or_default(), y0.unwrap_or_default(), y1.unwrap_or_default());
    let (w, h) = (&x1 - &x0, &y1 - &y0);

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {w} {h}" width="1600" height="400" preserveAspectRatio="none" shape-rendering="crispEdges">"#
    )?;
    let style: String = (0..digits).map(|d| format!(".d{d}{{fill:{}}}", PALETTE[d as usize % PALETTE.len()])).collect();
    writeln!(out, "<style>{style}</style>")?;
    let mut i = 0;
    while i < rects.len() {
        let (tr, d) = (&rects[i].translate, rects[i].digit);
        writeln!(out, r#"<g class="d{d}" data-translate="{tr}">"#)?;
        while i < rects.len() && rects[i].translate == *tr && rects[i].digit == d {
            let t = &rects[i];
            let (x, y) = (ix(&t.real_lo), iy(&t.fiber_hi));
            let (rw, rh) = (ix(&t.real_hi) - &x, iy(&t.fiber_lo) - &y);
            writeln!(out, r#"<rect x="{x}" y="{y}" width="{rw}" height="{rh}"/>"#)?;
            i += 1;
        }
        writeln!(out, "</g>")?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}
