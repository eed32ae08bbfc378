//! Digit-pattern statistics over `1..=N` and the concatenated digit stream.
//!
//! A pattern `w` is written most significant first, `w = (w_{l-1}, .., w_0)`.
//! It occurs at position `k` of `n` when `eps_{k+j}(n) = w_j` for every `j`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::{Base, Digit};

/// Integers per work unit in the parallel kernels.
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    base: Base,
    digits: Vec<Digit>,
}

impl Pattern {
    /// Digits most significant first; leading zeros are allowed.
    pub fn new(base: Base, digits: Vec<Digit>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyPattern);
        }
        base.check_digits(&digits)?;
        Ok(Pattern { base, digits })
    }

    pub fn parse(base: Base, s: &str) -> Result<Self> {
        Self::new(base, base.parse_digits(s)?)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `w_j`, indexed from the least significant end.
    pub fn w(&self, j: usize) -> Digit {
        self.digits[self.digits.len() - 1 - j]
    }

    fn all_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Does `w` sit at position `k` of the digits `lsb` (least significant
    /// first), with missing digits read as zero?
    #[inline]
    fn matches_padded(&self, lsb: &[Digit], k: usize) -> bool {
        let l = self.digits.len();
        (0..l).all(|j| lsb.get(k + j).copied().unwrap_or(0) == self.digits[l - 1 - j])
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base.format_digits(&self.digits))
    }
}

/// Exact occurrence counts of one pattern over a range of integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternStats {
    /// First integer counted (1 for a full initial segment).
    pub start: u64,
    /// Last integer counted, the horizon `N`.
    #[serde(rename = "N")]
    pub horizon: u64,
    pub pattern_len: usize,
    /// `S_{k,w}` for `0 <= k <= l(N) - |w|`.
    pub per_position: Vec<u64>,
    /// `S'_{k,w}` for `0 <= k < padded_len`; entries with `k > l(N) - |w|`
    /// lie outside the range used by `total`.
    pub padded_per_position: Vec<u64>,
    pub total: u64,
    #[serde(skip)]
    all_zero: bool,
}

impl PatternStats {
    fn empty(pattern: &Pattern, start: u64, horizon: u64, positions: usize, padded_len: usize) -> Self {
        PatternStats {
            start,
            horizon,
            pattern_len: pattern.len(),
            per_position: vec![0; positions],
            padded_per_position: vec![0; padded_len],
            total: 0,
            all_zero: pattern.all_zero(),
        }
    }

    fn count_n(&self) -> u64 {
        self.horizon + 1 - self.start
    }

    /// Extends the padded table; every integer shorter than the new positions
    /// matches there exactly when the pattern is all zeros.
    fn extend_padded(&mut self, len: usize) {
        let fill = if self.all_zero { self.count_n() } else { 0 };
        while self.padded_per_position.len() < len {
            self.padded_per_position.push(fill);
        }
    }

    /// Combines counts over adjacent or disjoint ranges.
    pub fn merge(mut self, mut other: PatternStats) -> PatternStats {
        assert_eq!(self.pattern_len, other.pattern_len, "merging stats of different patterns");
        let plen = self.padded_per_position.len().max(other.padded_per_position.len());
        self.extend_padded(plen);
        other.extend_padded(plen);
        let pos = self.per_position.len().max(other.per_position.len());
        self.per_position.resize(pos, 0);
        for (x, y) in self.per_position.iter_mut().zip(&other.per_position) {
            *x += y;
        }
        for (x, y) in self.padded_per_position.iter_mut().zip(&other.padded_per_position) {
            *x += y;
        }
        self.total += other.total;
        self.start = self.start.min(other.start);
        self.horizon = self.horizon.max(other.horizon);
        self
    }

    /// Position `k` of the padded table, or `None` if it was not tabulated.
    pub fn padded_at(&self, k: usize) -> Option<u64> {
        self.padded_per_position.get(k).copied()
    }

    /// Whether padded position `k` lies outside `0..=l(N)-|w|`.
    pub fn padded_out_of_range(&self, k: usize) -> bool {
        k >= self.per_position.len()
    }
}

/// `S_{k,w}(N)` (or `S'_{k,w}(N)` when `padded`) by a direct digit-by-digit
/// scan. Slow but independent of the batched kernels.
pub fn count_pattern_at(base: Base, w: &Pattern, k: usize, n_max: u64, padded: bool) -> u64 {
    let l = w.len();
    (1..=n_max)
        .into_par_iter()
        .filter(|&n| {
            if !padded && base.length(n) < k + l {
                return false;
            }
            (0..l).all(|j| base.digit(n, k + j) == w.w(j))
        })
        .count() as u64
}

pub fn count_pattern(base: Base, w: &Pattern, n_max: u64) -> PatternStats {
    count_patterns(base, std::slice::from_ref(w), n_max).pop().expect("one pattern")
}

/// Counts several patterns over `1..=N` in one pass.
pub fn count_patterns(base: Base, patterns: &[Pattern], n_max: u64) -> Vec<PatternStats> {
    let len_n = if n_max == 0 { 0 } else { base.length(n_max) };
    count_patterns_range(base, patterns, 1, n_max, len_n)
}

/// Counts over `lo..=hi`. Positions are tabulated with respect to the
/// horizon `hi`; padded positions are tabulated for `k < padded_len`.
pub fn count_patterns_range(
    base: Base,
    patterns: &[Pattern],
    lo: u64,
    hi: u64,
    padded_len: usize,
) -> Vec<PatternStats> {
    for p in patterns {
        assert_eq!(p.base(), base, "pattern base differs from counting base");
    }
    let len_n = if hi == 0 { 0 } else { base.length(hi) };
    let positions: Vec<usize> = patterns.iter().map(|p| (len_n + 1).saturating_sub(p.len())).collect();
    let padded_len = padded_len.max(len_n);
    let fresh = |s: u64, e: u64| -> Vec<PatternStats> {
        patterns
            .iter()
            .zip(&positions)
            .map(|(p, &np)| PatternStats::empty(p, s, e, np, padded_len))
            .collect()
    };
    if lo > hi {
        return fresh(lo, hi);
    }
    let chunks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut s = lo;
        loop {
            let e = s.saturating_add(CHUNK - 1).min(hi);
            v.push((s, e));
            if e == hi {
                break;
            }
            s = e + 1;
        }
        v
    };
    chunks
        .into_par_iter()
        .map(|(s, e)| {
            let mut stats = fresh(s, e);
            let mut lsb = Vec::with_capacity(64);
            for n in s..=e {
                lsb.clear();
                base.digits_lsb_into(n, &mut lsb);
                let ln = lsb.len();
                for (p, st) in patterns.iter().zip(stats.iter_mut()) {
                    let l = p.len();
                    for k in 0..ln.min(padded_len) {
                        if p.matches_padded(&lsb, k) {
                            st.padded_per_position[k] += 1;
                            if k + l <= ln {
                                st.per_position[k] += 1;
                                st.total += 1;
                            }
                        }
                    }
                    // Windows starting past the last digit see only zeros.
                    if st.all_zero {
                        for c in st.padded_per_position.iter_mut().skip(ln) {
                            *c += 1;
                        }
                    }
                }
            }
            stats
        })
        .reduce(
            || fresh(lo, lo.saturating_sub(1)),
            |x, y| x.into_iter().zip(y).map(|(p, q)| p.merge(q)).collect(),
        )
        .into_iter()
        .map(|mut st| {
            st.start = lo;
            st.horizon = hi;
            st
        })
        .collect()
}

/// `sum_{n <= N} s(n)`, computed directly from the digit sums.
pub fn summatory_sod(base: Base, n_max: u64) -> u64 {
    (1..=n_max).into_par_iter().map(|n| base.sum_of_digits(n)).sum()
}

/// `S_{(d)}(N)` for every digit `d`.
pub fn digit_counts(base: Base, n_max: u64) -> Vec<u64> {
    let singles: Vec<Pattern> = base.digits().map(|d| Pattern::new(base, vec![d]).unwrap()).collect();
    count_patterns(base, &singles, n_max).into_iter().map(|s| s.total).collect()
}

/// The digits of `z_{a/b}`: the words of `1, 2, 3, ..` concatenated, each
/// written most significant first.
#[derive(Debug, Clone)]
pub struct ChampernowneStream {
    base: Base,
    next_n: u64,
    // Digits of the current word, least significant first; popped from the end.
    pending: Vec<Digit>,
}

impl ChampernowneStream {
    pub fn new(base: Base) -> Self {
        ChampernowneStream { base, next_n: 1, pending: Vec::new() }
    }
}

impl Iterator for ChampernowneStream {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        if self.pending.is_empty() {
            self.base.digits_lsb_into(self.next_n, &mut self.pending);
            self.next_n += 1;
        }
        self.pending.pop()
    }
}

pub fn champernowne_digits(base: Base, m: usize) -> Vec<Digit> {
    ChampernowneStream::new(base).take(m).collect()
}

/// `gamma_w(x)`: the number of `1 <= n <= x` with `z_n .. z_{n+|w|-1}` equal
/// to the digits of `w` as written.
pub fn champernowne_freq(base: Base, w: &Pattern, x: u64) -> u64 {
    champernowne_freqs(base, std::slice::from_ref(w), x)[0]
}

pub fn champernowne_freqs(base: Base, patterns: &[Pattern], x: u64) -> Vec<u64> {
    let max_len = patterns.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut counts = vec![0u64; patterns.len()];
    if max_len == 0 || x == 0 {
        return counts;
    }
    // Ring buffer of the last max_len digits.
    let mut ring = vec![0 as Digit; max_len];
    let total = x + max_len as u64 - 1;
    for (i, z) in ChampernowneStream::new(base).take(total as usize).enumerate() {
        let pos = i as u64 + 1;
        ring[i % max_len] = z;
        for (p, c) in patterns.iter().zip(counts.iter_mut()) {
            let l = p.len() as u64;
            if pos < l || pos - l + 1 > x {
                continue;
            }
            // The window ends at `pos`; its last digit is w_0.
            let ok = (0..p.len()).all(|j| ring[(i + max_len - j) % max_len] == p.w(j));
            if ok {
                *c += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRow {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S_w")]
    pub s_w: u64,
    pub main_term: f64,
    pub residual: f64,
    pub residual_norm: f64,
}

/// `N a^{-|w|} log_alpha N`.
pub fn main_term(base: Base, pattern_len: usize, n: u64) -> f64 {
    let nf = n as f64;
    nf * (base.a() as f64).powi(-(pattern_len as i32)) * nf.ln() / base.alpha_f64().ln()
}

/// Exact counts against the main term at each horizon. Horizons must be
/// strictly ascending and at least 16; each range is counted once.
pub fn asymptotic_report(base: Base, w: &Pattern, horizons: &[u64]) -> Result<Vec<AsymptoticRow>> {
    if horizons.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("horizons must be strictly ascending".into()));
    }
    if horizons.iter().any(|&n| n < 16) {
        return Err(Error::InvalidArgument("horizons must be at least 16".into()));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    let mut acc = 0u64;
    let mut prev = 0u64;
    for &n in horizons {
        acc += count_patterns_range(base, std::slice::from_ref(w), prev + 1, n, 0)[0].total;
        prev = n;
        rows.push(report_row(base, w.len(), n, acc));
    }
    Ok(rows)
}

pub(crate) fn report_row(base: Base, pattern_len: usize, n: u64, s_w: u64) -> AsymptoticRow {
    let main = main_term(base, pattern_len, n);
    let residual = s_w as f64 - main;
    let nf = n as f64;
    AsymptoticRow { n, s_w, main_term: main, residual, residual_norm: residual / (nf * nf.ln().ln()) }
}

pub fn write_report_csv<W: Write>(rows: &[AsymptoticRow], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn report_json(rows: &[AsymptoticRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}
