//! Self-check suites: each evaluates a family of tagged checks over
//! exhaustive or seeded inputs and reports counts and the first failure.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{
    classify_verdict, eval_f, identity_suite, Coeffs, StructureCache, Thetas, Verdict,
};
use crate::field::{Elem, Field};
use crate::machinery::{
    compute_tau_vector, compute_vi, lemma_core_agreement, verify_theorem, vi_properties, BetaMode,
};
use crate::search::{sample_gamma_member, sample_tuple, stream_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Field,
    LemmaCore,
    Identities,
    Vi,
    Theorem,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Field,
        Suite::LemmaCore,
        Suite::Identities,
        Suite::Vi,
        Suite::Theorem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Field => "field",
            Suite::LemmaCore => "lemma-core",
            Suite::Identities => "identities",
            Suite::Vi => "vi",
            Suite::Theorem => "theorem",
        }
    }

    /// Default sample count: full verdicts are far more expensive per item.
    pub fn default_samples(self) -> u64 {
        match self {
            Suite::Theorem => 32,
            _ => 10_000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagCount {
    pub checked: u64,
    pub passed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub m: u32,
    pub k: u32,
    pub seed: u64,
    pub checked: u64,
    pub failed: u64,
    pub tags: BTreeMap<String, TagCount>,
    /// Extra tallies (e.g. the solution-count histogram).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub counts: BTreeMap<String, u64>,
    pub first_counterexample: Option<String>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    pub fn tag(&self, tag: &str) -> Option<&TagCount> {
        self.tags.get(tag)
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} m={} k={}: {}/{} checks pass{}",
            self.suite,
            self.m,
            self.k,
            self.checked - self.failed,
            self.checked,
            if self.pass() { "" } else { " (FAIL)" }
        )
    }
}

/// One check outcome: tag, pass flag and a description used on failure.
type Outcome = (&'static str, bool, String);

fn outcome(tag: &'static str, pass: bool, ctx: impl FnOnce() -> String) -> Outcome {
    (tag, pass, if pass { String::new() } else { ctx() })
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(suite: Suite, field: &Field, seed: u64) -> Self {
        Tally {
            report: SuiteReport {
                suite,
                m: field.m(),
                k: field.k_input(),
                seed,
                checked: 0,
                failed: 0,
                tags: BTreeMap::new(),
                counts: BTreeMap::new(),
                first_counterexample: None,
            },
        }
    }

    fn record(&mut self, (tag, pass, ctx): Outcome) {
        let r = &mut self.report;
        r.checked += 1;
        let t = r.tags.entry(tag.to_string()).or_default();
        t.checked += 1;
        if pass {
            t.passed += 1;
        } else {
            r.failed += 1;
            if r.first_counterexample.is_none() {
                r.first_counterexample = Some(format!("{tag}: {ctx}"));
            }
        }
    }

    fn extend(&mut self, items: Vec<Vec<Outcome>>) {
        for o in items.into_iter().flatten() {
            self.record(o);
        }
    }
}

pub fn run_suite(suite: Suite, field: &Field, opts: &SuiteOptions) -> Result<SuiteReport> {
    if opts.samples == 0 {
        return Err(Error::Params("samples must be positive".into()));
    }
    match suite {
        Suite::Field => Ok(field_suite(field, opts)),
        Suite::LemmaCore => Ok(lemma_core_suite(field, opts)),
        Suite::Identities => identities_suite(field, opts),
        Suite::Vi => Ok(vi_suite(field, opts)),
        Suite::Theorem => theorem_suite(field, opts),
    }
}

fn random_elem(field: &Field, rng: &mut impl Rng) -> Elem {
    Elem(rng.random_range(0..field.size() as u32))
}

fn random_nonzero(field: &Field, rng: &mut impl Rng) -> Elem {
    Elem(rng.random_range(1..field.size() as u32))
}

/// Fields up to this size get exhaustive single-element scans.
const EXHAUSTIVE_ELEMS_MAX_N: u32 = 16;
/// Fields up to this size get exhaustive pair and triple scans.
const EXHAUSTIVE_TRIPLES_MAX_N: u32 = 6;

fn field_suite(field: &Field, opts: &SuiteOptions) -> SuiteReport {
    let mut tally = Tally::new(Suite::Field, field, opts.seed);
    let n = field.n();
    let size = field.size() as u32;

    let triples: Vec<(Elem, Elem, Elem)> = if n <= EXHAUSTIVE_TRIPLES_MAX_N {
        (0..size.pow(3))
            .map(|i| (Elem(i % size), Elem(i / size % size), Elem(i / size / size)))
            .collect()
    } else {
        (0..opts.samples * 10)
            .map(|i| {
                let mut rng = stream_rng(opts.seed, i);
                (
                    random_elem(field, &mut rng),
                    random_elem(field, &mut rng),
                    random_elem(field, &mut rng),
                )
            })
            .collect()
    };
    let items: Vec<Vec<Outcome>> = triples
        .par_iter()
        .enumerate()
        .map(|(i, &(x, y, z))| {
            let ctx = || format!("x = {x}, y = {y}, z = {z}");
            let j = (i as u32) % n;
            vec![
                outcome("mul_matches_reference", field.mul(x, y) == field.mul_reference(x, y), ctx),
                outcome("mul_commutative", field.mul(x, y) == field.mul(y, x), ctx),
                outcome(
                    "mul_associative",
                    field.mul(field.mul(x, y), z) == field.mul(x, field.mul(y, z)),
                    ctx,
                ),
                outcome(
                    "distributive",
                    field.mul(x, y + z) == field.mul(x, y) + field.mul(x, z),
                    ctx,
                ),
                outcome(
                    "frob_automorphism",
                    field.frob(field.mul(x, y), j) == field.mul(field.frob(x, j), field.frob(y, j)),
                    ctx,
                ),
            ]
        })
        .collect();
    tally.extend(items);

    let singles: Vec<Elem> = if n <= EXHAUSTIVE_ELEMS_MAX_N {
        field.elements().collect()
    } else {
        (0..opts.samples)
            .map(|i| random_elem(field, &mut stream_rng(opts.seed ^ 1, i)))
            .collect()
    };
    let k = field.k();
    let items: Vec<Vec<Outcome>> = singles
        .par_iter()
        .map(|&x| {
            let ctx = || format!("x = {x}");
            let xb = field.conj(x);
            let mut v = vec![
                outcome("conj_involution", field.conj(xb) == x, ctx),
                outcome(
                    "trace_relation",
                    field.in_subfield(x + xb)
                        && field.subfield_trace(x + xb).ok() == Some(field.abs_trace(x)),
                    ctx,
                ),
                outcome("frob_full_cycle", field.frob(x, n) == x, ctx),
            ];
            if !x.is_zero() {
                let inv = field.inv(x).unwrap_or(Elem::ZERO);
                v.push(outcome("inverse", field.mul(x, inv) == Elem::ONE, ctx));
            }
            let roots = field.solve_artin_schreier(x, k).unwrap_or_default();
            let expect = if field.abs_trace(x) == 0 { 2 } else { 0 };
            let roots_ok = roots.len() == expect
                && roots.iter().all(|&r| field.frob(r, k) + r == x)
                && roots.windows(2).all(|w| w[0] < w[1]);
            v.push(outcome("artin_schreier", roots_ok, || {
                format!("a = {x}, roots = {roots:?}")
            }));
            v
        })
        .collect();
    tally.extend(items);

    if n <= EXHAUSTIVE_ELEMS_MAX_N {
        let fixed = field.elements().filter(|&x| field.conj(x) == x).count() as u64;
        let solvable = field.elements().filter(|&x| field.abs_trace(x) == 0).count() as u64;
        tally.record(outcome("conj_fixed_field_size", fixed == 1 << field.m(), || {
            format!("{fixed} fixed points")
        }));
        tally.record(outcome(
            "artin_schreier_index_two",
            solvable == 1 << (n - 1),
            || format!("{solvable} solvable right-hand sides"),
        ));
    }

    // Linearized solver against exhaustive evaluation.
    if n <= 12 {
        let items: Vec<Vec<Outcome>> = (0..32u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(opts.seed ^ 2, i);
                let terms: Vec<(u32, Elem)> = (0..3)
                    .map(|_| (rng.random_range(0..n), random_elem(field, &mut rng)))
                    .collect();
                if terms.iter().all(|t| t.1.is_zero()) {
                    return Vec::new();
                }
                let rhs = if i % 2 == 0 {
                    field.eval_linearized(&terms, random_elem(field, &mut rng))
                } else {
                    random_elem(field, &mut rng)
                };
                let brute: Vec<Elem> = field
                    .elements()
                    .filter(|&x| field.eval_linearized(&terms, x) == rhs)
                    .collect();
                let solved = field
                    .solve_linearized(&terms, rhs)
                    .map(|s| s.to_sorted_vec())
                    .unwrap_or_default();
                vec![outcome("linearized_solver", solved == brute, || {
                    format!("terms = {terms:?}, rhs = {rhs}")
                })]
            })
            .collect();
        tally.extend(items);
    }
    tally.report
}

/// Every `(tau, nu)` pair is checked when `n` is at most this.
const LEMMA_EXHAUSTIVE_MAX_N: u32 = 8;

fn lemma_core_suite(field: &Field, opts: &SuiteOptions) -> SuiteReport {
    let mut tally = Tally::new(Suite::LemmaCore, field, opts.seed);
    let size = field.size() as u32;
    let pairs: Vec<(Elem, Elem)> = if field.n() <= LEMMA_EXHAUSTIVE_MAX_N {
        (0..size * size).map(|i| (Elem(i / size), Elem(i % size))).collect()
    } else {
        (0..opts.samples)
            .map(|i| {
                let mut rng = stream_rng(opts.seed, i);
                (random_elem(field, &mut rng), random_elem(field, &mut rng))
            })
            .collect()
    };
    let agreement = lemma_core_agreement(field, pairs);
    let r = &mut tally.report;
    r.checked = agreement.checked;
    r.failed = agreement.checked - agreement.agree;
    r.tags.insert(
        "criteria_match_brute_force".into(),
        TagCount {
            checked: agreement.checked,
            passed: agreement.agree,
        },
    );
    for (count, &hits) in agreement.count_histogram.iter().enumerate() {
        if hits > 0 {
            r.counts.insert(format!("count_{count}"), hits);
        }
    }
    r.first_counterexample = agreement.first_mismatch.map(|(tau, nu, crit, brute)| {
        format!("tau = {tau}, nu = {nu}: criteria count {crit}, brute-force count {brute}")
    });
    tally.report
}

/// Orbit checks run over every nonzero `a` when `n` is at most this.
const ORBIT_EXHAUSTIVE_MAX_N: u32 = 8;
const ORBIT_SAMPLED_POINTS: usize = 16;

fn identities_suite(field: &Field, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::Identities, field, opts.seed);

    // The norm balance is a polynomial identity: check it on arbitrary tuples.
    let items: Vec<Vec<Outcome>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let c = sample_tuple(field, &mut stream_rng(opts.seed ^ 1, i));
            let ok = Thetas::compute(field, &c).norm_balance_holds(field);
            vec![outcome("norm_balance_any_tuple", ok, || format!("c = {c}"))]
        })
        .collect();
    tally.extend(items);

    let items: Vec<Result<Vec<Outcome>>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(opts.seed, i);
            let c = sample_gamma_member(field, &mut rng)?;
            let points: Vec<Elem> = if field.n() <= ORBIT_EXHAUSTIVE_MAX_N {
                field.nonzero_elements().collect()
            } else {
                (0..ORBIT_SAMPLED_POINTS)
                    .map(|_| random_nonzero(field, &mut rng))
                    .collect()
            };
            gamma_member_checks(field, &c, &points)
        })
        .collect();
    let items = items.into_iter().collect::<Result<Vec<_>>>()?;
    tally.extend(items);
    Ok(tally.report)
}

fn gamma_member_checks(field: &Field, c: &Coeffs, points: &[Elem]) -> Result<Vec<Outcome>> {
    let ctx = |what: &str| format!("c = {c}{what}");
    let mut out: Vec<Outcome> = identity_suite(field, c, points)?
        .into_iter()
        .map(|chk| {
            let tag: &'static str = match chk.tag.as_str() {
                "norm_balance" => "norm_balance",
                "c0_relation" => "c0_relation",
                "c1_relation" => "c1_relation",
                "c2_relation" => "c2_relation",
                "c3_relation" => "c3_relation",
                "xi_branch" => "xi_branch",
                "eta_reconstruction" => "eta_reconstruction",
                _ => "other_identity",
            };
            outcome(tag, chk.pass, || ctx(""))
        })
        .collect();

    let cache = StructureCache::new(field, c)?;
    let t = &cache.thetas;
    out.push(outcome(
        "xi_conjugate",
        field.conj(cache.xi) == cache.xi + Elem::ONE,
        || ctx(&format!(", xi = {}", cache.xi)),
    ));
    out.push(outcome(
        "thetas_in_subfield",
        field.in_subfield(t.t1) && field.in_subfield(t.t4),
        || ctx(""),
    ));
    if cache.verdict != Verdict::Gamma0 {
        return Ok(out);
    }
    let other = cache.with_other_root();
    let mut orbit_ok = [true; 5];
    let mut first_bad = None;
    for &a in points {
        let [a0, a1, a2] = cache.orbit(field, a);
        let m = cache.big_m(field, a);
        let checks = [
            cache.eta(field, a2) == a0 && a2 == a0 + a1,
            !m.is_zero() && cache.big_m(field, a1) == m && cache.big_m(field, a2) == m,
            (eval_f(field, c, a0) + eval_f(field, c, a1) + eval_f(field, c, a2)).is_zero(),
            {
                let mut x = [a0, a1, a2];
                let mut y = other.orbit(field, a);
                x.sort();
                y.sort();
                x == y
            },
            field.in_subfield(m),
        ];
        for (slot, ok) in orbit_ok.iter_mut().zip(checks) {
            if !ok && first_bad.is_none() {
                first_bad = Some(a);
            }
            *slot &= ok;
        }
    }
    let at = |a: Option<Elem>| ctx(&a.map(|a| format!(", a = {a}")).unwrap_or_default());
    let tags = [
        "eta_order_three",
        "m_constant_on_orbit",
        "orbit_sum_zero",
        "orbit_root_independent",
        "m_in_subfield",
    ];
    for (tag, ok) in tags.into_iter().zip(orbit_ok) {
        out.push(outcome(tag, ok, || at(first_bad)));
    }
    Ok(out)
}

fn vi_suite(field: &Field, opts: &SuiteOptions) -> SuiteReport {
    let mut tally = Tally::new(Suite::Vi, field, opts.seed);
    let items: Vec<Vec<Outcome>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(opts.seed, i);
            let c = sample_tuple(field, &mut rng);
            let a = random_nonzero(field, &mut rng);
            let b = random_elem(field, &mut rng);
            let ctx = || format!("c = {c}, a = {a}, b = {b}");
            let tv = match compute_tau_vector(field, &c, a, b) {
                Ok(tv) => tv,
                Err(e) => return vec![outcome("closed_forms", false, || format!("{}: {e}", ctx()))],
            };
            match compute_vi(field, &c, a, b, &tv) {
                Ok(vi) => {
                    let mut v = vec![outcome("closed_forms", true, ctx)];
                    for chk in vi_properties(field, &c, a, b, &tv, &vi) {
                        let tag: &'static str = match chk.tag.as_str() {
                            "v_sum_zero" => "v_sum_zero",
                            "tau_pairs_sum_to_f" => "tau_pairs_sum_to_f",
                            "v4_from_v1" => "v4_from_v1",
                            "elimination_relations" => "elimination_relations",
                            _ => "other_property",
                        };
                        v.push(outcome(tag, chk.pass, ctx));
                    }
                    v
                }
                Err(e) => vec![outcome("closed_forms", false, || format!("{e}"))],
            }
        })
        .collect();
    tally.extend(items);
    tally.report
}

fn theorem_suite(field: &Field, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::Theorem, field, opts.seed);
    let tuples: Vec<Coeffs> = (0..opts.samples)
        .into_par_iter()
        .map(|i| sample_gamma_member(field, &mut stream_rng(opts.seed, i)))
        .collect::<Result<_>>()?;
    let mut class_counts = [0u64; 3];
    for c in &tuples {
        let v = verify_theorem(field, c, BetaMode::Full);
        class_counts[v.verdict as usize] += 1;
        let tag = match v.verdict {
            Verdict::Gamma0 => "gamma0_consistent",
            Verdict::Gamma1 => "gamma1_consistent",
            Verdict::NotGamma => "not_gamma_consistent",
        };
        let ok = v.consistent && classify_verdict(field, c) == v.verdict;
        tally.record(outcome(tag, ok, || {
            serde_json::to_string(&v).unwrap_or_else(|e| e.to_string())
        }));
    }
    for v in [Verdict::Gamma0, Verdict::Gamma1] {
        tally.report.counts.insert(v.to_string(), class_counts[v as usize]);
    }
    Ok(tally.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(samples: u64) -> SuiteOptions {
        SuiteOptions { seed: 7, samples }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma".parse::<Suite>().is_err());
    }

    #[test]
    fn field_suite_gf64() {
        let f = Field::new(3, 1).unwrap();
        let r = run_suite(Suite::Field, &f, &opts(100)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.tag("mul_associative").unwrap().checked, 1 << 18);
        assert_eq!(r.tag("conj_fixed_field_size").unwrap().passed, 1);
    }

    #[test]
    fn lemma_core_suite_gf64() {
        let f = Field::new(3, 1).unwrap();
        let r = run_suite(Suite::LemmaCore, &f, &opts(1)).unwrap();
        assert_eq!((r.checked, r.failed), (4096, 0));
        let total: u64 = r.counts.values().sum();
        assert_eq!(total, 4096);
        assert!(r.counts.keys().all(|k| ["count_0", "count_2", "count_4"].contains(&k.as_str())));
    }

    #[test]
    fn identities_and_vi_small() {
        let f = Field::new(3, 1).unwrap();
        let r = run_suite(Suite::Identities, &f, &opts(50)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.tag("orbit_sum_zero").is_some_and(|t| t.checked > 0));
        let r = run_suite(Suite::Vi, &f, &opts(200)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.tag("closed_forms").unwrap().passed, 200);
    }

    #[test]
    fn theorem_suite_small() {
        let f = Field::new(3, 1).unwrap();
        let r = run_suite(Suite::Theorem, &f, &opts(6)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.checked, 6);
    }

    #[test]
    fn zero_samples_rejected() {
        let f = Field::new(3, 1).unwrap();
        assert!(run_suite(Suite::Vi, &f, &opts(0)).is_err());
    }
}
