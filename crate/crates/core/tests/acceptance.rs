//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. All tolerances are exact (integer counts).

use std::time::Instant;

use quadbct_core::family::FamilyBasis;
use quadbct_core::machinery::TheoremVerdict;
use quadbct_core::sbox::{self, build_table, random_permutation, BctMethod, SboxTable};
use quadbct_core::search::{
    self, baseline, baseline_table, exhaustive_scan, run_campaign_collect, BaselineFamily,
    BetaPolicy, CampaignOutcome, SearchConfig,
};
use quadbct_core::suites::{run_suite, Suite, SuiteOptions, SuiteReport};
use quadbct_core::{Field, Verdict};

/// Class counts of the m = 3 exhaustive scans (Gamma0, Gamma1, NotGamma);
/// identical for k = 1 and k = 5.
const M3_CLASS_COUNTS: [(Verdict, u64); 3] = [
    (Verdict::Gamma0, 98_784),
    (Verdict::Gamma1, 127_008),
    (Verdict::NotGamma, 16_551_424),
];
const SUITE_SEED: u64 = 7;
const SUITE_SAMPLES: u64 = 10_000;
const MIN_FULL_N6: usize = 1000;
const RANDOM_PERMUTATIONS: u64 = 50;
const M5_KS: [u32; 4] = [1, 3, 7, 9];
const M5_SAMPLES: u64 = 10_000;
const M5_SEED: u64 = 42;
const M5_GAMMA_SAMPLES_PER_K: u64 = 14;
const M5_MIN_FULL: usize = 20;

struct Criterion {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &'static str, pass: bool, detail: String) -> Criterion {
    let c = Criterion {
        id,
        name,
        pass,
        detail,
    };
    println!(
        "criterion {:>2} {} {}: {}",
        c.id,
        if c.pass { "PASS" } else { "FAIL" },
        c.name,
        c.detail
    );
    c
}

fn suite(s: Suite, m: u32, k: u32, samples: u64) -> SuiteReport {
    let field = Field::new(m, k).unwrap();
    let opts = SuiteOptions {
        seed: SUITE_SEED,
        samples,
    };
    run_suite(s, &field, &opts).unwrap()
}

fn tags_all_pass(r: &SuiteReport, tags: &[&str]) -> bool {
    tags.iter()
        .all(|t| r.tag(t).is_some_and(|c| c.checked > 0 && c.checked == c.passed))
}

fn bct_methods_agree(t: &SboxTable) -> bool {
    sbox::bct_rows(t, BctMethod::Definitional).unwrap() == sbox::bct_rows(t, BctMethod::Lqsl).unwrap()
}

fn criterion_1() -> Criterion {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [1, 5] {
        let r = suite(Suite::LemmaCore, 3, k, 1);
        let counts_ok = r
            .counts
            .keys()
            .all(|c| ["count_0", "count_2", "count_4"].contains(&c.as_str()));
        pass &= r.pass() && r.checked == 4096 && counts_ok;
        parts.push(format!("k={k}: {}/{} agree", r.checked - r.failed, r.checked));
    }
    let detail = format!("{} ({:.1}s)", parts.join(", "), start.elapsed().as_secs_f64());
    report(1, "small-equation counts match brute force", pass, detail)
}

fn class_counts_match(out: &CampaignOutcome) -> bool {
    M3_CLASS_COUNTS
        .iter()
        .all(|(v, n)| out.summary.class_counts.get(v) == Some(n))
}

fn gamma_records(out: &CampaignOutcome, v: Verdict) -> impl Iterator<Item = &TheoremVerdict> {
    out.records.iter().map(|r| &r.verdict).filter(move |x| x.verdict == v)
}

fn criterion_2(out: &CampaignOutcome) -> Criterion {
    let s = &out.summary;
    let mut gamma = 0u64;
    let mut bijective = 0u64;
    for v in [Verdict::Gamma0, Verdict::Gamma1] {
        gamma += s.class_counts[&v];
        bijective += s.permutations[&v];
    }
    // records rebuild each table independently of the scan's bitset test
    let records_ok = out
        .records
        .iter()
        .filter(|r| r.verdict.verdict.is_gamma())
        .all(|r| r.verdict.permutation);
    let pass = gamma == bijective && records_ok && class_counts_match(out) && s.anomaly_count == 0;
    report(
        2,
        "every Gamma member is a permutation (m=3, k=1, all 2^24 tuples)",
        pass,
        format!(
            "{bijective}/{gamma} bijective; Gamma0 {} Gamma1 {} NotGamma {}",
            s.class_counts[&Verdict::Gamma0],
            s.class_counts[&Verdict::Gamma1],
            s.class_counts[&Verdict::NotGamma]
        ),
    )
}

fn criterion_3(field: &Field, out: &CampaignOutcome) -> (Criterion, usize) {
    let all_delta = gamma_records(out, Verdict::Gamma0).all(|v| v.delta == 4);
    let full: Vec<&TheoremVerdict> = gamma_records(out, Verdict::Gamma0)
        .filter(|v| v.beta.is_some())
        .collect();
    let good = full
        .iter()
        .filter(|v| v.delta == 4 && v.beta == Some(4) && v.consistent)
        .count();
    let agree = full
        .iter()
        .filter(|v| bct_methods_agree(&build_table(field, &v.tuple)))
        .count();
    let pass = all_delta && full.len() >= MIN_FULL_N6 && good == full.len() && agree == full.len();
    let c = report(
        3,
        "Gamma0 has delta = 4 and beta = 4 (m=3)",
        pass,
        format!(
            "delta = 4 on all Gamma0; {good}/{} with beta = 4; BCT methods agree on {agree}",
            full.len()
        ),
    );
    (c, agree)
}

fn criterion_4(field: &Field, out: &CampaignOutcome) -> (Criterion, usize) {
    let expect = 1u32 << (field.m() + 1);
    let all_delta = gamma_records(out, Verdict::Gamma1).all(|v| v.delta == expect);
    let full: Vec<&TheoremVerdict> = gamma_records(out, Verdict::Gamma1)
        .filter(|v| v.beta.is_some())
        .collect();
    let good = full
        .iter()
        .filter(|v| v.beta.is_some_and(|b| b >= expect) && v.consistent)
        .count();
    let agree = full
        .iter()
        .filter(|v| bct_methods_agree(&build_table(field, &v.tuple)))
        .count();
    let betas: Vec<u32> = out.summary.beta_histogram.gamma1.0.keys().copied().collect();
    let pass = all_delta && full.len() >= MIN_FULL_N6 && good == full.len();
    let c = report(
        4,
        "Gamma1 has delta = 2^(m+1) = 16 and beta >= 16 (m=3)",
        pass,
        format!(
            "delta = {expect} on all Gamma1; {good}/{} with beta >= {expect} (observed {betas:?})",
            full.len()
        ),
    );
    (c, agree)
}

fn criterion_5(family_agree: usize, family_total: usize) -> Criterion {
    let random_ok = (0..RANDOM_PERMUTATIONS)
        .filter(|&seed| bct_methods_agree(&random_permutation(6, seed)))
        .count() as u64;
    let mut baselines_ok = 0;
    let specs = [
        (BaselineFamily::Gold, Some(2)),
        (BaselineFamily::Gold, Some(4)),
        (BaselineFamily::Inverse, None),
    ];
    for (fam, t) in specs {
        let (_, table, _) = baseline_table(fam, 3, t).unwrap();
        baselines_ok += bct_methods_agree(&table) as usize;
    }
    let pass = random_ok == RANDOM_PERMUTATIONS
        && family_agree == family_total
        && baselines_ok == specs.len();
    report(
        5,
        "definitional BCT equals the pair-counting BCT entrywise",
        pass,
        format!(
            "random permutations {random_ok}/{RANDOM_PERMUTATIONS}, family members \
             {family_agree}/{family_total}, baselines {baselines_ok}/{}",
            specs.len()
        ),
    )
}

fn criterion_6() -> Criterion {
    let tags = [
        "closed_forms",
        "v_sum_zero",
        "tau_pairs_sum_to_f",
        "v4_from_v1",
        "elimination_relations",
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, k) in [(3, 1), (5, 3)] {
        let r = suite(Suite::Vi, m, k, SUITE_SAMPLES);
        let n_ok = r.tag("closed_forms").map_or(0, |t| t.passed);
        pass &= r.pass() && tags_all_pass(&r, &tags) && n_ok == SUITE_SAMPLES;
        parts.push(format!("n={}: {n_ok}/{SUITE_SAMPLES} (c, a, b)", 2 * m));
    }
    report(
        6,
        "difference-equation closed forms and linear relations",
        pass,
        parts.join(", "),
    )
}

fn criterion_7_8() -> (Criterion, Criterion) {
    let identity_tags = [
        "norm_balance_any_tuple",
        "norm_balance",
        "c0_relation",
        "c1_relation",
        "c2_relation",
        "c3_relation",
        "xi_branch",
        "eta_reconstruction",
        "xi_conjugate",
    ];
    let orbit_tags = [
        "eta_order_three",
        "m_constant_on_orbit",
        "orbit_sum_zero",
        "orbit_root_independent",
    ];
    let r6 = suite(Suite::Identities, 3, 1, SUITE_SAMPLES);
    let r10 = suite(Suite::Identities, 5, 3, SUITE_SAMPLES);
    let members = |r: &SuiteReport| r.tag("xi_branch").map_or(0, |t| t.passed);
    let pass7 = [&r6, &r10]
        .iter()
        .all(|r| r.pass() && tags_all_pass(r, &identity_tags) && members(r) == SUITE_SAMPLES);
    let c7 = report(
        7,
        "coefficient identities on random Gamma members",
        pass7,
        format!(
            "n=6: {} checks, n=10: {} checks, {SUITE_SAMPLES} members each; {}",
            r6.checked,
            r10.checked,
            r6.first_counterexample
                .as_deref()
                .or(r10.first_counterexample.as_deref())
                .unwrap_or("no counterexample")
        ),
    );
    let gamma0 = r6.tag("orbit_sum_zero").map_or(0, |t| t.checked);
    let pass8 = tags_all_pass(&r6, &orbit_tags) && gamma0 > 0;
    let c8 = report(
        8,
        "eta has order 3, M is constant on orbits and f sums to 0 on orbits (n=6)",
        pass8,
        format!("{gamma0} Gamma0 tuples, all 63 nonzero a each"),
    );
    (c7, c8)
}

fn criterion_9() -> Criterion {
    let mut pass = true;
    let mut parts = Vec::new();
    for (fam, t) in [
        (BaselineFamily::Gold, Some(2)),
        (BaselineFamily::Gold, Some(4)),
        (BaselineFamily::Inverse, None),
    ] {
        let r = baseline(fam, 3, t).unwrap();
        pass &= r.permutation && r.beta == Some(4) && r.bct_methods_agree && r.consistent;
        parts.push(format!("x^{}: beta {:?}", r.exponent, r.beta));
    }
    let field = Field::new(3, 1).unwrap();
    let (_, gold17, _) = baseline_table(BaselineFamily::Gold, 3, Some(4)).unwrap();
    let same = gold17 == build_table(&field, &"0:1:0:0".parse().unwrap());
    pass &= same;
    parts.push(format!("x^17 equals f_(0,1,0,0): {same}"));
    report(9, "Gold and inverse baselines over GF(2^6)", pass, parts.join(", "))
}

fn criterion_10() -> Criterion {
    let start = Instant::now();
    let mut anomalies = 0u64;
    let mut visited = 0u64;
    for k in M5_KS {
        let mut cfg = SearchConfig::sample(5, k, M5_SAMPLES, M5_SEED);
        cfg.beta_policy = BetaPolicy::Skip;
        let out = run_campaign_collect(&cfg).unwrap();
        anomalies += out.summary.anomaly_count;
        visited += out.summary.visited;
    }
    let mut g0 = 0usize;
    let mut g1 = 0usize;
    for k in M5_KS {
        let mut cfg = SearchConfig::gamma_sample(5, k, M5_GAMMA_SAMPLES_PER_K, M5_SEED);
        cfg.beta_policy = BetaPolicy::All;
        let out = run_campaign_collect(&cfg).unwrap();
        anomalies += out.summary.anomaly_count;
        for v in out.records.iter().map(|r| &r.verdict) {
            match v.verdict {
                Verdict::Gamma0 if v.delta == 4 && v.beta == Some(4) && v.consistent => g0 += 1,
                Verdict::Gamma1 if v.delta == 64 && v.consistent => g1 += 1,
                _ => {}
            }
        }
    }
    let pass = anomalies == 0 && g0 >= M5_MIN_FULL && g1 >= M5_MIN_FULL;
    report(
        10,
        "m=5 sampled campaign",
        pass,
        format!(
            "{visited} uniform tuples over k in {M5_KS:?}, {anomalies} anomalies; \
             Gamma0 beta = delta = 4: {g0}, Gamma1 delta = 64: {g1} ({:.0}s)",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_11(out_k1: &CampaignOutcome) -> Criterion {
    let c1 = out_k1.summary.converse.clone().unwrap();
    let field = Field::new(3, 5).unwrap();
    let scan = exhaustive_scan(&field, &FamilyBasis::new(&field, field.k()));
    let c5 = scan.converse(&field);
    let k5_counts = M3_CLASS_COUNTS
        .iter()
        .all(|&(v, n)| scan.class_count(v) == n);
    let pass = c1.pass() == Some(true) && c1.tuples_checked == 1 << 24 && k5_counts;
    report(
        11,
        "no permutation outside Gamma (m=3, k=1)",
        pass,
        format!(
            "k=1: {} of {} tuples; k=5 (exploratory): {} permutations outside Gamma, class counts \
             as k=1: {k5_counts}",
            c1.non_gamma_permutations, c1.tuples_checked, c5.non_gamma_permutations
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut results = vec![criterion_1()];

    let field = Field::new(3, 1).unwrap();
    let mut cfg = SearchConfig::exhaustive(3, 1);
    cfg.first_n = search::DEFAULT_FIRST_N.max(MIN_FULL_N6);
    let out = run_campaign_collect(&cfg).unwrap();
    results.push(criterion_2(&out));
    let (c3, agree0) = criterion_3(&field, &out);
    let (c4, agree1) = criterion_4(&field, &out);
    let full_total = out
        .records
        .iter()
        .filter(|r| r.verdict.beta.is_some())
        .count();
    results.push(c3);
    results.push(c4);
    results.push(criterion_5(agree0 + agree1, full_total));
    results.push(criterion_6());
    let (c7, c8) = criterion_7_8();
    results.push(c7);
    results.push(c8);
    results.push(criterion_9());
    results.push(criterion_10());
    results.push(criterion_11(&out));

    let failed: Vec<u32> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    println!(
        "acceptance: {}/{} criteria pass ({:.0}s)",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
