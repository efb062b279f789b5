//! Coefficient-space campaigns and baseline S-boxes.
//!
//! An exhaustive campaign classifies every tuple of `GF(2^n)^4` and tests
//! bijectivity of every table (which also settles the converse question: are
//! there permutations outside Gamma?). Records are emitted for Gamma members
//! and for permutations outside Gamma. Sampled campaigns draw tuples from a
//! counter-based ChaCha stream (sample `i` uses stream `i`), so results do
//! not depend on the worker count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::{classify_thetas, Coeffs, FamilyBasis, Reason, Thetas, Verdict};
use crate::field::{gcd_u64, Elem, Field, FieldInfo};
use crate::machinery::{verify_theorem_with, BetaMode, TheoremVerdict};
use crate::sbox::{self, BctMethod, SboxTable, Spectrum};

/// Exhaustive scans are limited to `4n <= 28`.
pub const MAX_EXHAUSTIVE_BITS: u32 = 28;

pub const DEFAULT_FIRST_N: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    /// Tuples uniform over `GF(2^n)^4`.
    Sample,
    /// Tuples uniform over Gamma: `(c0, c1, c2)` uniform, then `c3` uniform
    /// among the completions that land in Gamma.
    GammaSample,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sample => "sample",
            Mode::GammaSample => "gamma_sample",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaPolicy {
    All,
    /// The first `first_n` Gamma0 and first `first_n` Gamma1 members in
    /// visiting order.
    FirstN,
    Skip,
}

impl BetaPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            BetaPolicy::All => "all",
            BetaPolicy::FirstN => "first_n",
            BetaPolicy::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub m: u32,
    pub k: u32,
    pub mode: Mode,
    pub sample_count: u64,
    pub seed: u64,
    pub beta_policy: BetaPolicy,
    pub first_n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output_path: Option<PathBuf>,
    /// Adds per-record wall time (records are then no longer reproducible).
    #[serde(default)]
    pub timing: bool,
}

impl SearchConfig {
    pub fn exhaustive(m: u32, k: u32) -> Self {
        SearchConfig {
            m,
            k,
            mode: Mode::Exhaustive,
            sample_count: 0,
            seed: 0,
            beta_policy: BetaPolicy::FirstN,
            first_n: DEFAULT_FIRST_N,
            output_path: None,
            timing: false,
        }
    }

    pub fn sample(m: u32, k: u32, count: u64, seed: u64) -> Self {
        SearchConfig {
            mode: Mode::Sample,
            sample_count: count,
            seed,
            ..SearchConfig::exhaustive(m, k)
        }
    }

    pub fn gamma_sample(m: u32, k: u32, count: u64, seed: u64) -> Self {
        SearchConfig {
            mode: Mode::GammaSample,
            ..SearchConfig::sample(m, k, count, seed)
        }
    }

    pub fn validate(&self) -> Result<Field> {
        let field = Field::new(self.m, self.k)?;
        match self.mode {
            Mode::Exhaustive if 4 * field.n() > MAX_EXHAUSTIVE_BITS => Err(Error::Params(format!(
                "exhaustive mode needs 4n <= {MAX_EXHAUSTIVE_BITS}, got n = {}",
                field.n()
            ))),
            Mode::Sample | Mode::GammaSample if self.sample_count == 0 => {
                Err(Error::Params("sample_count must be positive".into()))
            }
            _ => Ok(field),
        }
    }

    /// SHA-256 (first 16 hex digits) of the parameters that determine the
    /// records.
    pub fn config_hash(&self, field: &Field) -> String {
        let canon = format!(
            "m={};k={};modulus={:x};seed={};mode={};count={};beta={};first_n={}",
            self.m,
            self.k,
            field.modulus(),
            self.seed,
            self.mode.as_str(),
            self.sample_count,
            self.beta_policy.as_str(),
            self.first_n
        );
        let digest = Sha256::digest(canon.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub config_hash: String,
    /// Sample index, or the tuple encoding in exhaustive mode.
    pub index: u64,
    #[serde(flatten)]
    pub verdict: TheoremVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_us: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverseSummary {
    pub k: u32,
    /// Whether zero permutations outside Gamma are expected (k = 1).
    pub expectation_applies: bool,
    pub tuples_checked: u64,
    pub non_gamma_permutations: u64,
    pub examples: Vec<Coeffs>,
}

impl ConverseSummary {
    /// `None` when the run is exploratory.
    pub fn pass(&self) -> Option<bool> {
        self.expectation_applies.then_some(self.non_gamma_permutations == 0)
    }
}

/// DDT/BCT spectra of Gamma0 members side by side with a Gold function (a
/// necessary condition for affine equivalence; no equivalence is decided).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldScreen {
    pub gold_t: u32,
    pub gold_ddt_spectrum: Spectrum,
    pub gold_bct_spectrum: Spectrum,
    pub gamma0_compared: u64,
    pub ddt_spectrum_equal: u64,
    pub bct_spectrum_equal: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassHistograms {
    #[serde(rename = "Gamma0")]
    pub gamma0: Spectrum,
    #[serde(rename = "Gamma1")]
    pub gamma1: Spectrum,
    #[serde(rename = "NotGamma")]
    pub not_gamma: Spectrum,
}

impl ClassHistograms {
    fn add(&mut self, v: Verdict, value: u32) {
        let s = match v {
            Verdict::Gamma0 => &mut self.gamma0,
            Verdict::Gamma1 => &mut self.gamma1,
            Verdict::NotGamma => &mut self.not_gamma,
        };
        *s.0.entry(value).or_insert(0) += 1;
    }

    pub fn get(&self, v: Verdict) -> &Spectrum {
        match v {
            Verdict::Gamma0 => &self.gamma0,
            Verdict::Gamma1 => &self.gamma1,
            Verdict::NotGamma => &self.not_gamma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub config_hash: String,
    pub field: FieldInfo,
    pub mode: Mode,
    pub seed: u64,
    pub beta_policy: BetaPolicy,
    pub visited: u64,
    pub class_counts: BTreeMap<Verdict, u64>,
    pub reason_counts: BTreeMap<Reason, u64>,
    /// Permutations per class among visited tuples.
    pub permutations: BTreeMap<Verdict, u64>,
    pub records: u64,
    pub beta_computed: BTreeMap<Verdict, u64>,
    pub anomaly_count: u64,
    pub anomalous_tuples: Vec<Coeffs>,
    pub delta_histogram: ClassHistograms,
    pub beta_histogram: ClassHistograms,
    pub converse: Option<ConverseSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gold_screen: Option<GoldScreen>,
}

/// Campaign output kept in memory (for tests and bindings).
#[derive(Clone, Debug)]
pub struct CampaignOutcome {
    pub summary: CampaignSummary,
    pub records: Vec<ReportRecord>,
}

/// Runs a campaign, writing JSONL records to `cfg.output_path` when set.
pub fn run_campaign(cfg: &SearchConfig) -> Result<CampaignSummary> {
    let outcome = run_campaign_collect(cfg)?;
    if let Some(path) = &cfg.output_path {
        let mut w = BufWriter::new(File::create(path)?);
        write_records(&outcome.records, &mut w)?;
        w.flush()?;
    }
    Ok(outcome.summary)
}

pub fn write_records(records: &[ReportRecord], mut w: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Runs a campaign and returns all records.
pub fn run_campaign_collect(cfg: &SearchConfig) -> Result<CampaignOutcome> {
    let field = cfg.validate()?;
    let basis = FamilyBasis::new(&field, field.k());
    let hash = cfg.config_hash(&field);

    // (index, tuple, verdict, is_permutation if known)
    let (visited, summary_counts, candidates, converse) = match cfg.mode {
        Mode::Exhaustive => {
            let scan = exhaustive_scan(&field, &basis);
            let converse = scan.converse(&field);
            let cands: Vec<(u64, Coeffs, Verdict)> = scan
                .interesting
                .iter()
                .map(|&(code, v)| (code as u64, Coeffs::decode(code as u128, field.n()), v))
                .collect();
            (scan.visited, scan.counts, cands, Some(converse))
        }
        Mode::Sample | Mode::GammaSample => {
            let tuples = draw_samples(&field, cfg)?;
            let mut counts = ScanCounts::default();
            let cands: Vec<(u64, Coeffs, Verdict)> = tuples
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    let (v, failed) = classify_thetas(&field, &Thetas::compute(&field, &c));
                    counts.add(v, failed);
                    (i as u64, c, v)
                })
                .collect();
            (cfg.sample_count, counts, cands, None)
        }
    };

    // Decide the verification depth per candidate in visiting order.
    let mut taken = [0usize; 3];
    let modes: Vec<BetaMode> = candidates
        .iter()
        .map(|&(_, _, v)| {
            if !v.is_gamma() {
                return BetaMode::Skip;
            }
            match cfg.beta_policy {
                BetaPolicy::All => BetaMode::Full,
                BetaPolicy::Skip => BetaMode::Skip,
                BetaPolicy::FirstN => {
                    let slot = &mut taken[v as usize];
                    *slot += 1;
                    if *slot <= cfg.first_n {
                        BetaMode::Full
                    } else {
                        BetaMode::Skip
                    }
                }
            }
        })
        .collect();

    let records: Vec<ReportRecord> = candidates
        .par_iter()
        .zip(modes.par_iter())
        .map(|(&(index, c, _), &mode)| {
            let start = Instant::now();
            let verdict = verify_theorem_with(&field, &basis, &c, mode);
            ReportRecord {
                config_hash: hash.clone(),
                index,
                verdict,
                elapsed_us: cfg.timing.then(|| start.elapsed().as_micros() as u64),
            }
        })
        .collect();

    let mut summary = CampaignSummary {
        config_hash: hash.clone(),
        field: field.info(),
        mode: cfg.mode,
        seed: cfg.seed,
        beta_policy: cfg.beta_policy,
        visited,
        class_counts: BTreeMap::new(),
        reason_counts: BTreeMap::new(),
        permutations: BTreeMap::new(),
        records: records.len() as u64,
        beta_computed: BTreeMap::new(),
        anomaly_count: 0,
        anomalous_tuples: Vec::new(),
        delta_histogram: ClassHistograms::default(),
        beta_histogram: ClassHistograms::default(),
        converse,
        gold_screen: None,
    };
    for v in [Verdict::NotGamma, Verdict::Gamma0, Verdict::Gamma1] {
        summary.class_counts.insert(v, summary_counts.class[v as usize]);
    }
    for r in [Reason::Theta1Zero, Reason::TraceTheta4, Reason::Theta23Link] {
        summary.reason_counts.insert(r, summary_counts.reasons[r as usize]);
    }
    summary.reason_counts.insert(
        Reason::GammaBranch,
        summary_counts.class[Verdict::Gamma0 as usize] + summary_counts.class[Verdict::Gamma1 as usize],
    );
    if cfg.mode == Mode::Exhaustive {
        for v in [Verdict::NotGamma, Verdict::Gamma0, Verdict::Gamma1] {
            summary.permutations.insert(v, summary_counts.perms[v as usize]);
        }
    }
    let mut sample_non_gamma_perms = Vec::new();
    for r in &records {
        let v = &r.verdict;
        if cfg.mode != Mode::Exhaustive && v.permutation {
            *summary.permutations.entry(v.verdict).or_insert(0) += 1;
            if !v.verdict.is_gamma() {
                sample_non_gamma_perms.push(v.tuple);
            }
        }
        summary.delta_histogram.add(v.verdict, v.delta);
        if let Some(b) = v.beta {
            summary.beta_histogram.add(v.verdict, b);
            *summary.beta_computed.entry(v.verdict).or_insert(0) += 1;
        }
        if !v.consistent {
            summary.anomaly_count += v.anomaly_count as u64;
            if summary.anomalous_tuples.len() < 32 {
                summary.anomalous_tuples.push(v.tuple);
            }
        }
    }
    if cfg.mode != Mode::Exhaustive {
        summary.converse = Some(ConverseSummary {
            k: field.k_input(),
            expectation_applies: false,
            tuples_checked: visited,
            non_gamma_permutations: sample_non_gamma_perms.len() as u64,
            examples: sample_non_gamma_perms.into_iter().take(32).collect(),
        });
    }
    summary.gold_screen = gold_screen(&field, &records)?;
    Ok(CampaignOutcome { summary, records })
}

fn gold_screen(field: &Field, records: &[ReportRecord]) -> Result<Option<GoldScreen>> {
    let compared: Vec<&TheoremVerdict> = records
        .iter()
        .map(|r| &r.verdict)
        .filter(|v| v.verdict == Verdict::Gamma0 && v.bct_spectrum.is_some())
        .collect();
    if compared.is_empty() {
        return Ok(None);
    }
    let gold_t = 2;
    let table = gold_table(field, gold_t);
    let (ddt, bct) = sbox::spectra_report(&table, BctMethod::Lqsl)?;
    let ddt_equal = compared
        .iter()
        .filter(|v| v.ddt_spectrum.as_ref() == Some(&ddt.spectrum))
        .count() as u64;
    let bct_equal = compared
        .iter()
        .filter(|v| v.bct_spectrum.as_ref() == Some(&bct.spectrum))
        .count() as u64;
    Ok(Some(GoldScreen {
        gold_t,
        gold_ddt_spectrum: ddt.spectrum,
        gold_bct_spectrum: bct.spectrum,
        gamma0_compared: compared.len() as u64,
        ddt_spectrum_equal: ddt_equal,
        bct_spectrum_equal: bct_equal,
    }))
}

#[derive(Clone, Debug, Default)]
struct ScanCounts {
    class: [u64; 3],
    reasons: [u64; 3],
    perms: [u64; 3],
}

impl ScanCounts {
    fn add(&mut self, v: Verdict, failed: u8) {
        self.class[v as usize] += 1;
        for r in 0..3 {
            self.reasons[r] += (failed >> r & 1) as u64;
        }
    }

    fn merge(mut self, o: ScanCounts) -> ScanCounts {
        for i in 0..3 {
            self.class[i] += o.class[i];
            self.reasons[i] += o.reasons[i];
            self.perms[i] += o.perms[i];
        }
        self
    }
}

/// Result of classifying and permutation-testing every tuple.
#[derive(Clone, Debug)]
pub struct ExhaustiveScan {
    pub visited: u64,
    counts: ScanCounts,
    /// Gamma members and permutations outside Gamma, by tuple encoding.
    pub interesting: Vec<(u32, Verdict)>,
}

impl ExhaustiveScan {
    pub fn class_count(&self, v: Verdict) -> u64 {
        self.counts.class[v as usize]
    }

    pub fn permutation_count(&self, v: Verdict) -> u64 {
        self.counts.perms[v as usize]
    }

    pub fn non_gamma_permutations(&self) -> impl Iterator<Item = u32> + '_ {
        self.interesting
            .iter()
            .filter(|(_, v)| !v.is_gamma())
            .map(|(c, _)| *c)
    }

    pub fn converse(&self, field: &Field) -> ConverseSummary {
        ConverseSummary {
            k: field.k_input(),
            expectation_applies: field.k_input() == 1,
            tuples_checked: self.visited,
            non_gamma_permutations: self.permutation_count(Verdict::NotGamma),
            examples: self
                .non_gamma_permutations()
                .take(32)
                .map(|c| Coeffs::decode(c as u128, field.n()))
                .collect(),
        }
    }
}

/// Classifies all `2^(4n)` tuples and tests each table for bijectivity.
/// Needs `2^n <= 64`.
pub fn exhaustive_scan(field: &Field, basis: &FamilyBasis) -> ExhaustiveScan {
    let n = field.n();
    assert!(n <= 6 && 4 * n <= MAX_EXHAUSTIVE_BITS, "exhaustive scan needs n <= 6");
    let size = field.size();
    // pair[(ci * size + cj) * size + x] = ci * mono_i(x) + cj * mono_j(x)
    let pair_table = |i: usize, j: usize| -> Vec<u8> {
        let mut t = vec![0u8; size * size * size];
        for ci in 0..size {
            for cj in 0..size {
                for x in 0..size {
                    let v = field.mul(Elem(ci as u32), basis.mono[i][x])
                        + field.mul(Elem(cj as u32), basis.mono[j][x]);
                    t[(ci * size + cj) * size + x] = v.0 as u8;
                }
            }
        }
        t
    };
    let p01 = pair_table(0, 1);
    let p23 = pair_table(2, 3);
    let full_mask = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };

    let parts: Vec<(ScanCounts, Vec<(u32, Verdict)>)> = (0..size * size)
        .into_par_iter()
        .map(|i01| {
            let mut counts = ScanCounts::default();
            let mut found = Vec::new();
            let row01 = &p01[i01 * size..(i01 + 1) * size];
            let (c0, c1) = ((i01 / size) as u32, (i01 % size) as u32);
            for i23 in 0..size * size {
                let row23 = &p23[i23 * size..(i23 + 1) * size];
                let mut seen = 0u64;
                for x in 0..size {
                    seen |= 1u64 << (row01[x] ^ row23[x]);
                }
                let perm = seen == full_mask;
                let c = Coeffs::from_bits([c0, c1, (i23 / size) as u32, (i23 % size) as u32]);
                let (v, failed) = classify_thetas(field, &Thetas::compute(field, &c));
                counts.add(v, failed);
                counts.perms[v as usize] += perm as u64;
                if v.is_gamma() || perm {
                    found.push(((i01 * size * size + i23) as u32, v));
                }
            }
            (counts, found)
        })
        .collect();
    let mut counts = ScanCounts::default();
    let mut interesting = Vec::new();
    for (c, f) in parts {
        counts = counts.merge(c);
        interesting.extend(f);
    }
    ExhaustiveScan {
        visited: (size as u64).pow(4),
        counts,
        interesting,
    }
}

/// Exhaustive permutation search outside Gamma.
pub fn converse_experiment(cfg: &SearchConfig) -> Result<ConverseSummary> {
    if cfg.mode != Mode::Exhaustive {
        return Err(Error::Params("the converse experiment needs exhaustive mode".into()));
    }
    let field = cfg.validate()?;
    let basis = FamilyBasis::new(&field, field.k());
    Ok(exhaustive_scan(&field, &basis).converse(&field))
}

/// Attempts per Gamma sample before giving up.
const GAMMA_SAMPLE_ATTEMPTS: usize = 10_000;

/// A tuple uniform over `GF(2^n)^4`.
pub fn sample_tuple(field: &Field, rng: &mut impl Rng) -> Coeffs {
    let size = field.size() as u32;
    let mut draw = || Elem(rng.random_range(0..size));
    Coeffs::new(draw(), draw(), draw(), draw())
}

/// Draws `(c0, c1, c2)` uniformly, then `c3` uniformly among the completions
/// in Gamma, redrawing when there are none.
pub fn sample_gamma_member(field: &Field, rng: &mut impl Rng) -> Result<Coeffs> {
    let size = field.size() as u32;
    for _ in 0..GAMMA_SAMPLE_ATTEMPTS {
        let mut draw = || Elem(rng.random_range(0..size));
        let (c0, c1, c2) = (draw(), draw(), draw());
        let members: Vec<Elem> = field
            .elements()
            .filter(|&c3| {
                let t = Thetas::compute(field, &Coeffs::new(c0, c1, c2, c3));
                classify_thetas(field, &t).0.is_gamma()
            })
            .collect();
        if !members.is_empty() {
            let pick = rng.random_range(0..members.len());
            return Ok(Coeffs::new(c0, c1, c2, members[pick]));
        }
    }
    Err(Error::Consistency(format!(
        "no Gamma member found in {GAMMA_SAMPLE_ATTEMPTS} draws"
    )))
}

/// RNG for item `i` of a seeded run: stream `i` of the seed's ChaCha8 key.
pub fn stream_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn draw_samples(field: &Field, cfg: &SearchConfig) -> Result<Vec<Coeffs>> {
    (0..cfg.sample_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, i);
            match cfg.mode {
                Mode::GammaSample => sample_gamma_member(field, &mut rng),
                _ => Ok(sample_tuple(field, &mut rng)),
            }
        })
        .collect()
}

/// Class-conditional histograms as CSV: `metric,class,value,count`.
pub fn write_histograms_csv(summary: &CampaignSummary, mut w: impl Write) -> Result<()> {
    writeln!(w, "metric,class,value,count")?;
    for (metric, h) in [("delta", &summary.delta_histogram), ("beta", &summary.beta_histogram)] {
        for v in [Verdict::NotGamma, Verdict::Gamma0, Verdict::Gamma1] {
            for (value, count) in &h.get(v).0 {
                writeln!(w, "{metric},{v},{value},{count}")?;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineFamily {
    /// `x^(2^t + 1)` with `gcd(2m, t) = 2`.
    Gold,
    /// `x^(2^n - 2)`.
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub family: BaselineFamily,
    pub m: u32,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<u32>,
    pub exponent: u64,
    pub permutation: bool,
    pub delta: u32,
    pub beta: Option<u32>,
    pub bct_methods_agree: bool,
    pub consistent: bool,
    pub anomalies: Vec<String>,
}

fn gold_table(field: &Field, t: u32) -> SboxTable {
    let e = (1u64 << t) + 1;
    SboxTable::from_fn(field, |x| field.pow(x, e))
}

/// The baseline table over `GF(2^(2m))` together with its exponent.
pub fn baseline_table(family: BaselineFamily, m: u32, t: Option<u32>) -> Result<(Field, SboxTable, u64)> {
    let field = Field::new(m, 1)?;
    let n = field.n();
    match family {
        BaselineFamily::Gold => {
            let t = t.ok_or_else(|| Error::Params("gold baseline needs t".into()))?;
            if t == 0 || t >= n || gcd_u64(2 * m as u64, t as u64) != 2 {
                return Err(Error::Params(format!(
                    "gold baseline needs 0 < t < n and gcd(2m, t) = 2, got m = {m}, t = {t}"
                )));
            }
            let table = gold_table(&field, t);
            Ok((field, table, (1u64 << t) + 1))
        }
        BaselineFamily::Inverse => {
            let e = (1u64 << n) - 2;
            let table = SboxTable::from_fn(&field, |x| field.pow(x, e));
            Ok((field, table, e))
        }
    }
}

/// Builds a baseline and checks it is a permutation with boomerang
/// uniformity 4, computing the BCT both ways.
pub fn baseline(family: BaselineFamily, m: u32, t: Option<u32>) -> Result<BaselineRecord> {
    let (field, table, exponent) = baseline_table(family, m, t)?;
    let permutation = table.is_permutation();
    let delta = sbox::differential_uniformity(table.table());
    let mut anomalies = Vec::new();
    let (beta, agree) = if permutation {
        let lq = sbox::bct_rows(&table, BctMethod::Lqsl)?;
        let def = sbox::bct_rows(&table, BctMethod::Definitional)?;
        let agree = lq == def;
        let s = sbox::BctSummary::from_rows(lq, BctMethod::Lqsl, false);
        (Some(s.uniformity), agree)
    } else {
        anomalies.push("not a permutation".to_string());
        (None, false)
    };
    if permutation && !agree {
        anomalies.push("BCT methods disagree".to_string());
    }
    if let Some(b) = beta.filter(|&b| b != 4) {
        anomalies.push(format!("beta = {b}, expected 4"));
    }
    Ok(BaselineRecord {
        family,
        m,
        n: field.n(),
        t: if family == BaselineFamily::Gold { t } else { None },
        exponent,
        permutation,
        delta,
        beta,
        bct_methods_agree: agree,
        consistent: anomalies.is_empty(),
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SearchConfig::exhaustive(3, 1).validate().is_ok());
        assert!(SearchConfig::exhaustive(5, 1).validate().is_err());
        assert!(SearchConfig::sample(5, 3, 0, 1).validate().is_err());
        assert!(SearchConfig::sample(4, 1, 10, 1).validate().is_err());
    }

    #[test]
    fn config_hash_pins_parameters() {
        let f = Field::new(5, 3).unwrap();
        let a = SearchConfig::sample(5, 3, 100, 42);
        assert_eq!(a.config_hash(&f), a.config_hash(&f));
        assert_eq!(a.config_hash(&f).len(), 16);
        let b = SearchConfig::sample(5, 3, 100, 43);
        assert_ne!(a.config_hash(&f), b.config_hash(&f));
    }

    #[test]
    fn baselines_small() {
        let r = baseline(BaselineFamily::Gold, 3, Some(2)).unwrap();
        assert_eq!(r.exponent, 5);
        assert!(r.permutation && r.consistent, "{r:?}");
        assert_eq!(r.beta, Some(4));
        let r = baseline(BaselineFamily::Inverse, 3, None).unwrap();
        assert_eq!(r.exponent, 62);
        assert!(r.consistent, "{r:?}");
        assert!(baseline(BaselineFamily::Gold, 3, Some(3)).is_err());
        assert!(baseline(BaselineFamily::Gold, 3, None).is_err());
    }

    #[test]
    fn gold_17_is_the_monomial_member() {
        let (f, t, _) = baseline_table(BaselineFamily::Gold, 3, Some(4)).unwrap();
        assert_eq!(t, sbox::build_table(&f, &Coeffs::from_bits([0, 1, 0, 0])));
    }

    #[test]
    fn samples_are_reproducible_and_thread_independent() {
        let cfg = SearchConfig::sample(3, 1, 40, 9);
        let field = cfg.validate().unwrap();
        let a = draw_samples(&field, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| draw_samples(&field, &cfg).unwrap());
        assert_eq!(a, b);
        let g = draw_samples(&field, &SearchConfig::gamma_sample(3, 1, 20, 9)).unwrap();
        assert!(g.iter().all(|c| crate::family::classify_verdict(&field, c).is_gamma()));
    }

    #[test]
    fn exhaustive_scan_gf4() {
        // m = 1: 256 tuples, checked against a direct per-tuple computation
        let field = Field::new(1, 1).unwrap();
        let basis = FamilyBasis::new(&field, 1);
        let scan = exhaustive_scan(&field, &basis);
        assert_eq!(scan.visited, 256);
        let mut perms = [0u64; 3];
        let mut classes = [0u64; 3];
        for code in 0..256u32 {
            let c = Coeffs::decode(code as u128, 2);
            let v = crate::family::classify_verdict(&field, &c);
            classes[v as usize] += 1;
            perms[v as usize] += sbox::build_table(&field, &c).is_permutation() as u64;
        }
        for v in [Verdict::NotGamma, Verdict::Gamma0, Verdict::Gamma1] {
            assert_eq!(scan.class_count(v), classes[v as usize]);
            assert_eq!(scan.permutation_count(v), perms[v as usize]);
        }
    }

    #[test]
    fn csv_header() {
        let cfg = SearchConfig::sample(3, 1, 5, 1);
        let out = run_campaign_collect(&cfg).unwrap();
        let mut buf = Vec::new();
        write_histograms_csv(&out.summary, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("metric,class,value,count\n"));
        assert_eq!(out.records.len(), 5);
    }
}
