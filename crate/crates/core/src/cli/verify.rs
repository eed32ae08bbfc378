//! Invariant suites behind `ratbase verify`.

use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{max_level, Suite, VerifyArgs};
use crate::adelic::{
    boundary_tube, box_digits, fit_growth, identify_digit, locate, tile_approx, union_boundary_classes, valuation,
    verify_residue_system, AdeleContext, AdelePoint, TubeAtlas,
};
use crate::error::{Error, Result};
use crate::fourier::{coeff_f, eval_urysohn_direct, eval_urysohn_series};
use crate::Q;

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

pub(super) fn run(ctx: &AdeleContext, args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let all = args.suite == Suite::All;
    let mut checks = Vec::new();
    if all || args.suite == Suite::Roundtrip {
        checks.extend(roundtrip(ctx, args.n));
    }
    if all || args.suite == Suite::Tiling {
        checks.extend(tiling(ctx, args.r, args.samples, &mut rng)?);
    }
    if all || args.suite == Suite::Digits {
        checks.extend(digits(ctx, args.n, args.r)?);
    }
    if all || args.suite == Suite::Tube {
        checks.extend(tube(ctx, args.r)?);
    }
    if all || args.suite == Suite::Fourier {
        checks.extend(fourier(ctx, args.r, args.samples, &mut rng)?);
    }
    let mut ok = true;
    for c in &checks {
        writeln!(out, "{}: {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail)?;
        ok &= c.passed;
    }
    Ok(ok)
}

fn roundtrip(ctx: &AdeleContext, n_max: u64) -> Vec<Check> {
    let base = ctx.base();
    let (a, b) = (ctx.a() as u64, ctx.b() as u64);
    let (bad_trip, bad_cong) = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let w = base.encode_u64(n);
            let trip = w.decode().ok() != Some(n.into());
            let cong = (w.digit_sum() % (a - b)) != ((b % (a - b)) * (n % (a - b))) % (a - b);
            (trip as u64, cong as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    vec![
        Check::new(format!("roundtrip N={n_max}"), bad_trip == 0, format!("{bad_trip} failures")),
        Check::new(format!("congruence N={n_max}"), bad_cong == 0, format!("{bad_cong} failures")),
    ]
}

fn random_rational<R: Rng>(rng: &mut R, b: u32) -> Q {
    let e = rng.gen_range(0..6u32);
    let den = BigInt::from(b).pow(e) * BigInt::from(rng.gen_range(1..1000i64));
    Q::new(BigInt::from(rng.gen_range(-1_000_000i64..1_000_000)), den)
}

fn random_point<R: Rng>(rng: &mut R, ctx: &AdeleContext) -> AdelePoint {
    let real = random_rational(rng, ctx.b());
    let padic = ctx.primes().iter().map(|_| random_rational(rng, ctx.b())).collect();
    AdelePoint::new(ctx, real, padic).expect("one coordinate per prime")
}

/// Whether `z` lies in the closed level-`r` box at `corner`, tested
/// coordinate by coordinate.
fn in_closed_box(ctx: &AdeleContext, z: &AdelePoint, corner: &Q, r: u32) -> bool {
    let side = ctx.alpha_pow(-(r as i64));
    let t = &z.real - corner;
    if t < Q::zero() || t > side {
        return false;
    }
    ctx.primes().iter().zip(&z.padic).all(|(&(p, e), x)| valuation(p, &(x - corner)).map_or(true, |v| v >= (e * r) as i64))
}

fn tiling<R: Rng>(ctx: &AdeleContext, r: u32, samples: usize, rng: &mut R) -> Result<Vec<Check>> {
    let report = verify_residue_system(ctx, r)?;
    let mut checks = vec![Check::new(
        format!("residue_system r={r}"),
        report.passed(),
        format!("{} distinct", report.distinct),
    )];
    let tiles: Vec<HashSet<Q>> = ctx
        .base()
        .digits()
        .map(|d| tile_approx(ctx, d, r).map(|t| t.corners.into_iter().collect()))
        .collect::<Result<_>>()?;
    // Every tenth point is a level-r corner, which sits on a face.
    let ar = BigInt::from(ctx.a()).pow(r);
    let points: Vec<AdelePoint> = (0..samples)
        .map(|i| {
            if i % 10 == 0 {
                let den = &ar * BigInt::from(ctx.b()).pow(rng.gen_range(0..6u32));
                AdelePoint::diagonal(ctx, &Q::new(BigInt::from(rng.gen_range(-1_000_000i64..1_000_000)), den))
            } else {
                random_point(rng, ctx)
            }
        })
        .collect();
    let (bad, faces) = points
        .par_iter()
        .map(|z| {
            let loc = locate(ctx, z, r);
            let mut ok = true;
            for bx in loc.closed_boxes(ctx) {
                let (m, res) = box_digits(ctx, &bx);
                let rep = bx.corner() - &m;
                let owners: Vec<usize> = (0..tiles.len()).filter(|&d| tiles[d].contains(&rep)).collect();
                ok &= owners == [res.colour() as usize] && in_closed_box(ctx, z, bx.corner(), r);
            }
            ((!ok) as u64, loc.on_face() as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    checks.push(Check::new(
        format!("cover r={r}"),
        bad == 0,
        format!("{samples} points, {faces} on faces, {bad} failures"),
    ));
    Ok(checks)
}

fn digits(ctx: &AdeleContext, n_max: u64, r: u32) -> Result<Vec<Check>> {
    let base = ctx.base();
    let (positions, wrong) = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let len = base.length(n) as u32;
            let wrong = (0..len)
                .filter(|&k| identify_digit(ctx, n, k, k + 1, None).map(|c| c.digit) != Ok(base.digit(n, k as usize)))
                .count() as u64;
            (len as u64, wrong)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let mut checks =
        vec![Check::new(format!("digit_criterion N={n_max}"), wrong == 0, format!("{positions} positions, {wrong} wrong"))];

    // Below the exact level a tube decides; ambiguous points are allowed,
    // wrong answers are not.
    let level = r.clamp(1, 3);
    let res = (level + 8).min(max_level(ctx));
    if res > level {
        let atlas = TubeAtlas::new(ctx, level, res)?;
        let (resolved, ambiguous, wrong) = (1..=n_max)
            .into_par_iter()
            .map(|n| {
                let mut t = (0u64, 0u64, 0u64);
                for k in level..base.length(n) as u32 {
                    match identify_digit(ctx, n, k, level, Some(&atlas)) {
                        Ok(c) if c.digit == base.digit(n, k as usize) => t.0 += 1,
                        Ok(_) => t.2 += 1,
                        Err(Error::BoundaryAmbiguous { .. }) => t.1 += 1,
                        Err(_) => t.2 += 1,
                    }
                }
                t
            })
            .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
        checks.push(Check::new(
            format!("digit_criterion_tube r={level}"),
            wrong == 0,
            format!("{resolved} resolved, {ambiguous} ambiguous, {wrong} wrong"),
        ));
    }
    Ok(checks)
}

fn tube(ctx: &AdeleContext, r: u32) -> Result<Vec<Check>> {
    let top = max_level(ctx);
    let a = ctx.a() as f64;
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for d in ctx.base().digits() {
        let mut pts = Vec::new();
        for level in 1..=r {
            let res = (level + 8).min(top);
            if res <= level {
                return Err(Error::ScaleExceeded {
                    requested: (ctx.a() as u128).saturating_pow(level + 1),
                    cap: ctx.max_enum(),
                });
            }
            pts.push((level, boundary_tube(ctx, d, level, res)?.period_count() as u64));
        }
        if let Some((_, rho)) = fit_growth(&pts) {
            worst = worst.max(rho);
        }
    }
    checks.push(Check::new(format!("tube_growth r=1..{r}"), worst < a, format!("rho={worst:.3}, a={}", ctx.a())));

    // Some level k leaves at least one class free of the boundary.
    let mut found = None;
    for k in 0..r {
        let res = (k + 9).min(top);
        if res <= k + 1 {
            break;
        }
        let n = union_boundary_classes(ctx, k, res)?.len() as u64;
        let cap = (ctx.a() as u64).pow(k) - 1;
        if n <= cap {
            found = Some((k, n, cap));
            break;
        }
    }
    let detail = match found {
        Some((k, n, cap)) => format!("k={k}: {n} <= {cap}"),
        None => format!("no k < {r}"),
    };
    checks.push(Check::new("pigeonhole", found.is_some(), detail));
    Ok(checks)
}

fn fourier<R: Rng>(ctx: &AdeleContext, r: u32, samples: usize, rng: &mut R) -> Result<Vec<Check>> {
    let levels = 1..=r.clamp(1, 4);
    let inv_a = 1.0 / ctx.a() as f64;
    let mut zero_ok = true;
    let mut vanish = (0u64, 0u64);
    for level in levels.clone() {
        let br = BigInt::from(ctx.b()).pow(level);
        for d in ctx.base().digits() {
            let c0 = coeff_f(ctx, d, level, &Q::zero())?;
            zero_ok &= (c0.re - inv_a).abs() < 1e-15 && c0.im == 0.0;
            for j in (-1000i64..=1000).filter(|j| *j != 0 && j % ctx.a() as i64 == 0) {
                let c = coeff_f(ctx, d, level, &Q::new(BigInt::from(j), br.clone()))?;
                vanish.0 += 1;
                vanish.1 += (c.norm() > 1e-12) as u64;
            }
        }
    }
    let top = levels.end();
    let mut checks = vec![
        Check::new(format!("coeff_zero r<={top}"), zero_ok, format!("1/{} for every digit", ctx.a())),
        Check::new(
            format!("coeff_vanishing r<={top}"),
            vanish.1 == 0,
            format!("{} frequencies, {} nonzero", vanish.0, vanish.1),
        ),
    ];

    let points: Vec<Q> = (0..samples.min(100)).map(|_| random_rational(rng, ctx.b())).collect();
    let mut unity_bad = 0;
    let mut series_bad = 0;
    let series_levels = 1..=r.clamp(1, 3);
    for z in &points {
        for level in series_levels.clone() {
            let sum: Q = ctx.base().digits().map(|d| eval_urysohn_direct(ctx, d, level, z)).sum();
            unity_bad += (sum != Q::one()) as u64;
            for d in ctx.base().digits() {
                let direct = eval_urysohn_direct(ctx, d, level, z);
                let s = eval_urysohn_series(ctx, d, level, z, 1000)?;
                let err = ((s.value.re - num_traits::ToPrimitive::to_f64(&direct).unwrap_or(f64::NAN)).powi(2)
                    + s.value.im.powi(2))
                .sqrt();
                series_bad += (err > s.tail_bound) as u64;
            }
        }
    }
    checks.push(Check::new("partition_of_unity", unity_bad == 0, format!("{} points, {unity_bad} failures", points.len())));
    checks.push(Check::new(
        format!("series_vs_direct r<={}", series_levels.end()),
        series_bad == 0,
        format!("{} points, cutoff 1000, {series_bad} above the tail bound", points.len()),
    ));
    Ok(checks)
}
