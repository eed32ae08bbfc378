//! Exact arithmetic in `K_alpha = R x prod_{p | b} Q_p` on rational points.
//!
//! `Z[alpha] = Z[1/b]` sits in `K_alpha` as a lattice through the diagonal map
//! `Phi`, with fundamental domain `D_0 = [0, 1) x prod Z_p`. The level-`r`
//! boxes are the translates of `alpha^{-r} D_0`; each is an interval of
//! length `alpha^{-r}` times a ball `x + b^r prod Z_p`.

mod lattice;
mod padic;
mod render;
mod tube;

pub use lattice::{
    box_digits, colour, identify_digit, locate, membership_point, tile_approx, verify_residue_system,
    BoxIndex, BoxLocation, BoxResidue, DigitCertificate, ResidueReport, TileApprox,
};
pub use padic::{char_phase, char_tilde, e, frac_p, in_z_alpha, lattice_class, valuation};
pub use render::{fiber_coordinate, fiber_digits, find_overlap, render_tiles, write_csv, write_svg, FiberScheme, TileRect};
pub use tube::{boundary_tube, count_boundary_hits, fit_growth, union_boundary_classes, BoundaryTube, TubeAtlas};

pub(crate) use padic::{char_phase_i128, e_ratio, residue_mod, split_den};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeration::Base;
use crate::Q;

/// Default cap on the number of boxes any single call may enumerate.
pub const DEFAULT_MAX_ENUM: u64 = 10_000_000;

#[cfg(test)]
pub(crate) fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn qi(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdeleContext {
    base: Base,
    primes: Vec<(u64, u32)>,
    max_enum: u64,
}

impl AdeleContext {
    pub fn new(base: Base) -> Self {
        AdeleContext { base, primes: base.primes_of_b(), max_enum: DEFAULT_MAX_ENUM }
    }

    pub fn with_max_enum(mut self, cap: u64) -> Self {
        self.max_enum = cap;
        self
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn a(&self) -> u32 {
        self.base.a()
    }

    pub fn b(&self) -> u32 {
        self.base.b()
    }

    /// `(p, v_p(b))` for the primes dividing `b`.
    pub fn primes(&self) -> &[(u64, u32)] {
        &self.primes
    }

    pub fn max_enum(&self) -> u64 {
        self.max_enum
    }

    pub(crate) fn check_enum(&self, requested: u128) -> Result<()> {
        if requested > self.max_enum as u128 {
            Err(Error::ScaleExceeded { requested, cap: self.max_enum })
        } else {
            Ok(())
        }
    }

    /// `a^r` if it fits the cap.
    pub(crate) fn a_pow_checked(&self, r: u32) -> Result<u64> {
        let v = (self.a() as u128).checked_pow(r).unwrap_or(u128::MAX);
        self.check_enum(v)?;
        Ok(v as u64)
    }

    pub fn alpha(&self) -> Q {
        self.base.alpha()
    }

    /// `alpha^e` for any integer `e`.
    pub fn alpha_pow(&self, e: i64) -> Q {
        let a = BigInt::from(self.a());
        let b = BigInt::from(self.b());
        let k = e.unsigned_abs() as usize;
        let (n, d) = (num_traits::pow(a, k), num_traits::pow(b, k));
        if e >= 0 {
            Q::new(n, d)
        } else {
            Q::new(d, n)
        }
    }

    /// Whether `x` is a `p`-adic integer for every `p | b`.
    pub fn is_integral(&self, x: &Q) -> bool {
        let (s, _) = split_den(x.denom(), &self.primes);
        s.is_one()
    }
}

/// A point of `K_alpha` with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdelePoint {
    pub real: Q,
    /// One coordinate per prime of the context, in the same order.
    pub padic: Vec<Q>,
}

impl AdelePoint {
    /// `Phi(x)`.
    pub fn diagonal(ctx: &AdeleContext, x: &Q) -> Self {
        AdelePoint { real: x.clone(), padic: vec![x.clone(); ctx.primes().len()] }
    }

    pub fn new(ctx: &AdeleContext, real: Q, padic: Vec<Q>) -> Result<Self> {
        if padic.len() != ctx.primes().len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} p-adic coordinates, got {}",
                ctx.primes().len(),
                padic.len()
            )));
        }
        Ok(AdelePoint { real, padic })
    }

    pub fn zero(ctx: &AdeleContext) -> Self {
        Self::diagonal(ctx, &Q::zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.padic.iter().all(|x| *x == self.real)
    }

    pub fn scale(&self, c: &Q) -> Self {
        AdelePoint { real: &self.real * c, padic: self.padic.iter().map(|x| x * c).collect() }
    }

    pub fn sub_diagonal(&self, y: &Q) -> Self {
        AdelePoint { real: &self.real - y, padic: self.padic.iter().map(|x| x - y).collect() }
    }

    /// Membership in `D_0 = [0, 1) x prod Z_p` (half-open in the real part).
    pub fn in_d0(&self, ctx: &AdeleContext) -> bool {
        self.real >= Q::zero()
            && self.real < Q::one()
            && ctx.primes().iter().zip(&self.padic).all(|(&(p, _), x)| valuation(p, x).map_or(true, |v| v >= 0))
    }
}

/// `chi(z) = e(sum_p lambda_p(z_p) - z_infinity)`.
pub fn character(ctx: &AdeleContext, z: &AdelePoint) -> Complex64 {
    if z.is_diagonal() {
        return char_tilde(ctx, &z.real);
    }
    let mut s = -z.real.clone();
    for (&(p, _), x) in ctx.primes().iter().zip(&z.padic) {
        s += frac_p(p, x);
    }
    e(&s)
}

/// Writes `z = Phi(y) + residual` with `y` in `Z[alpha]` and the residual in
/// `D_0`.
pub fn reduce_mod_lattice(ctx: &AdeleContext, z: &AdelePoint) -> (Q, AdelePoint) {
    let mut s = Q::zero();
    for (&(p, _), x) in ctx.primes().iter().zip(&z.padic) {
        s += frac_p(p, x);
    }
    let y = &s + (&z.real - &s).floor();
    let residual = z.sub_diagonal(&y);
    (y, residual)
}
