//! Lookup-table S-boxes: permutation test, DDT and BCT.
//!
//! The BCT is computed two independent ways. The definitional method uses
//! the compositional inverse:
//!
//! ```text
//! BCT(a, b) = #{x : F^-1(F(x) + b) + F^-1(F(x + a) + b) = a}
//! ```
//!
//! The pair-counting method never touches the inverse:
//!
//! ```text
//! S(a, b) = #{(x, y) : F(x + a) + F(y + a) = b,  F(x) + F(y) = b}
//! ```
//!
//! Both equations together force `F(x) + F(x + a) = F(y) + F(y + a)`, so the
//! pairs are found by bucketing `x` on that difference and pairing within a
//! bucket. Bucket sizes are DDT entries, so a row costs `sum_d DDT(a, d)^2`.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Coeffs, FamilyBasis};
use crate::field::Field;

/// Largest `n` for which full tables are kept.
pub const MAX_FULL_TABLE_N: u32 = 12;

/// Largest `n` accepted by the analytics.
pub const MAX_ANALYSIS_N: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SboxTable {
    n: u32,
    table: Vec<u32>,
    inverse: Option<Vec<u32>>,
}

impl SboxTable {
    pub fn new(n: u32, table: Vec<u32>) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(Error::Params(format!("table width n = {n} out of range")));
        }
        if table.len() != 1usize << n {
            return Err(Error::Params(format!(
                "table for n = {n} must have {} entries, got {}",
                1usize << n,
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >> n != 0) {
            return Err(Error::Params(format!("table entry {bad:#x} exceeds {n} bits")));
        }
        let inverse = invert(&table);
        Ok(SboxTable { n, table, inverse })
    }

    pub fn from_fn(field: &Field, f: impl Fn(crate::Elem) -> crate::Elem) -> Self {
        let table = field.elements().map(|x| f(x).0).collect();
        SboxTable::new(field.n(), table).expect("field elements fit in n bits")
    }

    pub fn identity(n: u32) -> Self {
        SboxTable::new(n, (0..1u32 << n).collect()).expect("valid width")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn inverse(&self) -> Option<&[u32]> {
        self.inverse.as_deref()
    }

    pub fn is_permutation(&self) -> bool {
        self.inverse.is_some()
    }

    /// The compositional inverse as a table of its own.
    pub fn inverted(&self) -> Option<SboxTable> {
        let inv = self.inverse.clone()?;
        Some(SboxTable {
            n: self.n,
            inverse: Some(self.table.clone()),
            table: inv,
        })
    }

    /// Little-endian `u32` per entry.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        for &y in &self.table {
            w.write_all(&y.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(n: u32, mut r: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() % 4 != 0 {
            return Err(Error::Parse("binary table length is not a multiple of 4".into()));
        }
        let table = buf
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        SboxTable::new(n, table)
    }

    /// Lowercase hex, one entry per line.
    pub fn write_hex(&self, mut w: impl Write) -> Result<()> {
        for &y in &self.table {
            writeln!(w, "{y:x}")?;
        }
        Ok(())
    }

    pub fn read_hex(n: u32, r: impl BufRead) -> Result<Self> {
        let mut table = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v = u32::from_str_radix(line, 16)
                .map_err(|e| Error::Parse(format!("bad hex entry {line:?}: {e}")))?;
            table.push(v);
        }
        SboxTable::new(n, table)
    }
}

fn invert(table: &[u32]) -> Option<Vec<u32>> {
    let mut inv = vec![u32::MAX; table.len()];
    for (x, &y) in table.iter().enumerate() {
        let slot = &mut inv[y as usize];
        if *slot != u32::MAX {
            return None;
        }
        *slot = x as u32;
    }
    Some(inv)
}

/// Bijectivity by bitset scan.
pub fn is_permutation(table: &[u32]) -> bool {
    let mut seen = vec![0u64; table.len().div_ceil(64)];
    for &y in table {
        let (w, b) = (y as usize / 64, y % 64);
        if w >= seen.len() || seen[w] >> b & 1 == 1 {
            return false;
        }
        seen[w] |= 1 << b;
    }
    true
}

pub fn build_table(field: &Field, c: &Coeffs) -> SboxTable {
    let basis = FamilyBasis::new(field, field.k());
    build_table_with(field, &basis, c)
}

pub fn build_table_with(field: &Field, basis: &FamilyBasis, c: &Coeffs) -> SboxTable {
    let table = basis.table(field, c).into_iter().map(|e| e.0).collect();
    SboxTable::new(field.n(), table).expect("field elements fit in n bits")
}

/// Value -> number of cells, serialized as `[[value, count], ...]` sorted by
/// value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Spectrum(pub BTreeMap<u32, u64>);

impl Spectrum {
    pub fn add_row(&mut self, row: &[u32], skip_first: bool) {
        for &v in &row[skip_first as usize..] {
            *self.0.entry(v).or_insert(0) += 1;
        }
    }

    pub fn merge(mut self, other: Spectrum) -> Spectrum {
        for (v, c) in other.0 {
            *self.0.entry(v).or_insert(0) += c;
        }
        self
    }

    pub fn max_value(&self) -> u32 {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

impl Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(v, c)| [*v as u64, *c]))
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[u64; 2]> = Vec::deserialize(d)?;
        Ok(Spectrum(pairs.into_iter().map(|[v, c]| (v as u32, c)).collect()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdtSummary {
    pub uniformity: u32,
    pub spectrum: Spectrum,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub full_table: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BctMethod {
    Definitional,
    Lqsl,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BctSummary {
    pub uniformity: u32,
    pub spectrum: Spectrum,
    pub method: BctMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub full_table: Option<Vec<Vec<u32>>>,
}

/// DDT row `a`: `out[b] = #{x : F(x) + F(x + a) = b}`.
pub fn ddt_row(table: &[u32], a: u32, out: &mut [u32]) {
    out.fill(0);
    for (x, &y) in table.iter().enumerate() {
        out[(y ^ table[x ^ a as usize]) as usize] += 1;
    }
}

/// Maximum DDT entry of row `a`, without materializing the row for the
/// caller.
pub fn ddt_row_max(table: &[u32], a: u32, scratch: &mut [u32]) -> u32 {
    ddt_row(table, a, scratch);
    scratch.iter().copied().max().unwrap_or(0)
}

/// BCT row `a` via the compositional inverse.
pub fn bct_definitional_row(table: &[u32], inverse: &[u32], a: u32, out: &mut [u32]) {
    let a = a as usize;
    for (b, slot) in out.iter_mut().enumerate() {
        let b = b as u32;
        let mut cnt = 0;
        for x in 0..table.len() {
            let l = inverse[(table[x] ^ b) as usize];
            let r = inverse[(table[x ^ a] ^ b) as usize];
            cnt += ((l ^ r) as usize == a) as u32;
        }
        *slot = cnt;
    }
}

/// Scratch space for [`bct_lqsl_row`].
#[derive(Clone, Debug)]
pub struct LqslScratch {
    start: Vec<u32>,
    fill: Vec<u32>,
    order: Vec<u32>,
}

impl LqslScratch {
    pub fn new(len: usize) -> Self {
        LqslScratch {
            start: vec![0; len + 1],
            fill: vec![0; len],
            order: vec![0; len],
        }
    }
}

/// Pair-counting row `a`: `out[b] = S(a, b)`. Uses no inverse.
pub fn bct_lqsl_row(table: &[u32], a: u32, scratch: &mut LqslScratch, out: &mut [u32]) {
    let len = table.len();
    let a = a as usize;
    let LqslScratch { start, fill, order } = scratch;
    // counting sort of x by d(x) = F(x) + F(x + a)
    start.fill(0);
    for x in 0..len {
        start[(table[x] ^ table[x ^ a]) as usize + 1] += 1;
    }
    for d in 0..len {
        start[d + 1] += start[d];
    }
    fill.copy_from_slice(&start[..len]);
    for x in 0..len {
        let d = (table[x] ^ table[x ^ a]) as usize;
        order[fill[d] as usize] = x as u32;
        fill[d] += 1;
    }
    out.fill(0);
    for d in 0..len {
        let bucket = &order[start[d] as usize..start[d + 1] as usize];
        for &x in bucket {
            let fx = table[x as usize];
            for &y in bucket {
                out[(fx ^ table[y as usize]) as usize] += 1;
            }
        }
    }
}

fn check_analysis_width(t: &SboxTable) -> Result<()> {
    if t.n() > MAX_ANALYSIS_N {
        return Err(Error::Params(format!(
            "table analytics support n <= {MAX_ANALYSIS_N}, got {}",
            t.n()
        )));
    }
    Ok(())
}

fn row_max(row: &[u32], skip_b0: bool) -> u32 {
    row[skip_b0 as usize..].iter().copied().max().unwrap_or(0)
}

struct RowFold {
    max: u32,
    spectrum: Spectrum,
}

fn fold_rows<F>(len: usize, keep: bool, skip_b0: bool, row_fn: F) -> (RowFold, Option<Vec<Vec<u32>>>)
where
    F: Fn(u32, &mut [u32]) + Sync,
{
    if keep {
        let rows: Vec<Vec<u32>> = (0..len as u32)
            .into_par_iter()
            .map(|a| {
                let mut row = vec![0u32; len];
                row_fn(a, &mut row);
                row
            })
            .collect();
        let mut spectrum = Spectrum::default();
        let mut max = 0;
        for row in &rows[1..] {
            spectrum.add_row(row, skip_b0);
            max = max.max(row_max(row, skip_b0));
        }
        (RowFold { max, spectrum }, Some(rows))
    } else {
        let fold = (1..len as u32)
            .into_par_iter()
            .fold(
                || (vec![0u32; len], RowFold { max: 0, spectrum: Spectrum::default() }),
                |(mut row, mut acc), a| {
                    row_fn(a, &mut row);
                    acc.spectrum.add_row(&row, skip_b0);
                    acc.max = acc.max.max(row_max(&row, skip_b0));
                    (row, acc)
                },
            )
            .map(|(_, acc)| acc)
            .reduce(
                || RowFold { max: 0, spectrum: Spectrum::default() },
                |x, y| RowFold {
                    max: x.max.max(y.max),
                    spectrum: x.spectrum.merge(y.spectrum),
                },
            );
        (fold, None)
    }
}

/// DDT uniformity and spectrum over all cells with `a != 0`.
pub fn ddt(t: &SboxTable, keep_full: bool) -> Result<DdtSummary> {
    check_analysis_width(t)?;
    let keep = keep_full && t.n() <= MAX_FULL_TABLE_N;
    let table = t.table();
    let (fold, full_table) = fold_rows(t.len(), keep, false, |a, row| ddt_row(table, a, row));
    Ok(DdtSummary {
        uniformity: fold.max,
        spectrum: fold.spectrum,
        full_table,
    })
}

/// Differential uniformity only.
pub fn differential_uniformity(table: &[u32]) -> u32 {
    let len = table.len();
    (1..len as u32)
        .into_par_iter()
        .fold(
            || (vec![0u32; len], 0u32),
            |(mut row, m), a| {
                let r = ddt_row_max(table, a, &mut row);
                (row, m.max(r))
            },
        )
        .map(|(_, m)| m)
        .reduce(|| 0, u32::max)
}

fn require_permutation(t: &SboxTable) -> Result<&[u32]> {
    t.inverse()
        .ok_or_else(|| Error::Precondition("BCT requires a permutation".into()))
}

/// BCT rows `a = 0..2^n`, each over all `b` (cells with `a = 0` or `b = 0`
/// equal `2^n`).
pub fn bct_rows(t: &SboxTable, method: BctMethod) -> Result<Vec<Vec<u32>>> {
    check_analysis_width(t)?;
    let inverse = require_permutation(t)?;
    let table = t.table();
    let len = t.len();
    let rows = (0..len as u32)
        .into_par_iter()
        .map_init(
            || LqslScratch::new(len),
            |scratch, a| {
                let mut row = vec![0u32; len];
                match method {
                    BctMethod::Definitional => bct_definitional_row(table, inverse, a, &mut row),
                    BctMethod::Lqsl => bct_lqsl_row(table, a, scratch, &mut row),
                }
                row
            },
        )
        .collect();
    Ok(rows)
}

fn bct_summary(t: &SboxTable, method: BctMethod, keep_full: bool) -> Result<BctSummary> {
    check_analysis_width(t)?;
    let inverse = require_permutation(t)?;
    let table = t.table();
    let len = t.len();
    let keep = keep_full && t.n() <= MAX_FULL_TABLE_N;
    let (fold, full_table) = match method {
        BctMethod::Definitional => {
            fold_rows(len, keep, true, |a, row| bct_definitional_row(table, inverse, a, row))
        }
        BctMethod::Lqsl => fold_rows(len, keep, true, |a, row| {
            let mut scratch = LqslScratch::new(len);
            bct_lqsl_row(table, a, &mut scratch, row)
        }),
    };
    Ok(BctSummary {
        uniformity: fold.max,
        spectrum: fold.spectrum,
        method,
        full_table,
    })
}

impl BctSummary {
    /// Summary of full rows as returned by [`bct_rows`].
    pub fn from_rows(rows: Vec<Vec<u32>>, method: BctMethod, keep_full: bool) -> Self {
        let mut spectrum = Spectrum::default();
        for row in &rows[1..] {
            spectrum.add_row(row, true);
        }
        let keep = keep_full && rows.len() <= 1 << MAX_FULL_TABLE_N;
        BctSummary {
            uniformity: spectrum.max_value(),
            spectrum,
            method,
            full_table: keep.then_some(rows),
        }
    }
}

pub fn bct_definitional(t: &SboxTable, keep_full: bool) -> Result<BctSummary> {
    bct_summary(t, BctMethod::Definitional, keep_full)
}

pub fn bct_lqsl(t: &SboxTable, keep_full: bool) -> Result<BctSummary> {
    bct_summary(t, BctMethod::Lqsl, keep_full)
}

pub fn bct(t: &SboxTable, method: BctMethod, keep_full: bool) -> Result<BctSummary> {
    bct_summary(t, method, keep_full)
}

/// DDT and BCT summaries of one table.
pub fn spectra_report(t: &SboxTable, method: BctMethod) -> Result<(DdtSummary, BctSummary)> {
    Ok((ddt(t, false)?, bct(t, method, false)?))
}

/// Seeded Fisher-Yates permutation of `{0, .., 2^n - 1}`.
pub fn random_permutation(n: u32, seed: u64) -> SboxTable {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut table: Vec<u32> = (0..1u32 << n).collect();
    table.shuffle(&mut rng);
    SboxTable::new(n, table).expect("valid width")
}
