//! The difference-equation reduction behind the permutation, differential
//! and boomerang claims, as executable checks.
//!
//! For `a != 0` the equation `f(x + a) + f(x) = b` becomes, after `x -> a x`,
//!
//! ```text
//! t1 xb^(2^k) + t2 x^(2^k) + t3 xb + t4 x + t5 = 0
//! ```
//!
//! with the [`TauVector`] coefficients. Eliminating `xb^(2^k)` gives
//! `v1 x^(2^k) + v2 xb + v3 x + v4 = 0` ([`ViVector`]). When `v1 != 0` this is
//! `L(x) = x^(2^k) + tau xb + (tau + 1) x + nu = 0`, whose solution count is
//! decided by [`lemma_core_criteria`]. When `v1 = 0` the tuple is in Gamma1
//! and the equation splits into a pair of linearized equations.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{
    classify, eval_f, Coeffs, FamilyBasis, GammaClass, IdentityCheck, Reason, StructureCache,
    Verdict,
};
use crate::field::{Elem, Field};
use crate::sbox::{self, BctMethod, SboxTable, Spectrum, MAX_FULL_TABLE_N};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaBranch {
    /// `1 + tau + taub = 0` and the iterated-sum condition holds: 2 solutions.
    DegenerateTwo,
    /// `1 + tau + taub != 0`, `Tr(Delta) = 0`, `mub + mu = lambda + 1`: 2 solutions.
    Two,
    /// `1 + tau + taub != 0`, `Tr(Delta) = 0`, `mub + mu = lambda`,
    /// `Tr(mu^(2^k) nub / lambda^(2^k)) = 0`: 4 solutions.
    Four,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCoreVerdict {
    pub count: u32,
    pub branch: LemmaBranch,
    /// Known solutions: all of them for the oracle, the closed-form set
    /// `{0, 1, mu, mu + 1}` for the criteria when `nu = 0` in the 4-branch.
    pub solutions: Option<Vec<Elem>>,
}

/// `x^(2^k) + tau xb + (tau + 1) x + nu`.
#[inline]
pub fn lemma_core_eval(field: &Field, tau: Elem, nu: Elem, x: Elem) -> Elem {
    field.frob_k(x) + field.mul(tau, field.conj(x)) + field.mul(tau + Elem::ONE, x) + nu
}

/// Brute-force roots of `x^(2^k) + tau xb + (tau + 1) x + nu`.
pub fn lemma_core_oracle(field: &Field, tau: Elem, nu: Elem) -> LemmaCoreVerdict {
    let sols: Vec<Elem> = field
        .elements()
        .filter(|&x| lemma_core_eval(field, tau, nu, x).is_zero())
        .collect();
    LemmaCoreVerdict {
        count: sols.len() as u32,
        branch: match sols.len() {
            4 => LemmaBranch::Four,
            0 => LemmaBranch::None,
            _ => LemmaBranch::Two,
        },
        solutions: Some(sols),
    }
}

/// Solution count of `x^(2^k) + tau xb + (tau + 1) x + nu = 0` from the
/// trace criteria, without enumerating. Errors if `mu^(2^k) + mu = tau lambda`
/// is unsolvable in the non-degenerate branch, which the criteria never
/// allow.
pub fn lemma_core_criteria(field: &Field, tau: Elem, nu: Elem) -> Result<LemmaCoreVerdict> {
    let k = field.k();
    let t = Elem::ONE + tau + field.conj(tau);
    let nub = field.conj(nu);
    if t.is_zero() {
        let base = field.mul(field.frob_k(tau), nu + nub) + field.frob_k(nu);
        let sum = (0..field.m()).fold(Elem::ZERO, |acc, i| acc + field.frob(base, k * i));
        let hit = sum == nu + nub;
        return Ok(LemmaCoreVerdict {
            count: if hit { 2 } else { 0 },
            branch: if hit { LemmaBranch::DegenerateTwo } else { LemmaBranch::None },
            solutions: None,
        });
    }
    let lambda = field.root_2k_minus_1(t);
    if !field.in_subfield(lambda) {
        return Err(Error::Consistency(format!(
            "lambda = {lambda} with lambda^(2^k-1) = {t} is not in the subfield"
        )));
    }
    let lambda_k = field.frob_k(lambda);
    let delta = field.div(nu, lambda_k);
    let mu = *field
        .solve_artin_schreier(field.mul(tau, lambda), k)?
        .first()
        .ok_or_else(|| {
            Error::Consistency(format!(
                "mu^(2^k) + mu = tau lambda unsolvable for tau = {tau}, nu = {nu}"
            ))
        })?;
    let mu_sum = mu + field.conj(mu);
    let tr_delta = field.abs_trace(delta);
    let (count, branch) = if tr_delta == 0 && mu_sum == lambda + Elem::ONE {
        (2, LemmaBranch::Two)
    } else if tr_delta == 0
        && mu_sum == lambda
        && field.abs_trace(field.div(field.mul(field.frob_k(mu), nub), lambda_k)) == 0
    {
        (4, LemmaBranch::Four)
    } else {
        (0, LemmaBranch::None)
    };
    let solutions = (branch == LemmaBranch::Four && nu.is_zero()).then(|| {
        let mut s = vec![Elem::ZERO, Elem::ONE, mu, mu + Elem::ONE];
        s.sort_unstable();
        s
    });
    Ok(LemmaCoreVerdict {
        count,
        branch,
        solutions,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauVector {
    pub tau1: Elem,
    pub tau2: Elem,
    pub tau3: Elem,
    pub tau4: Elem,
    pub tau5: Elem,
}

pub fn compute_tau_vector(field: &Field, c: &Coeffs, a: Elem, b: Elem) -> Result<TauVector> {
    if a.is_zero() {
        return Err(Error::Precondition("tau vector needs a != 0".into()));
    }
    Ok(tau_vector_unchecked(field, c, a, b))
}

fn tau_vector_unchecked(field: &Field, c: &Coeffs, a: Elem, b: Elem) -> TauVector {
    let [c0, c1, c2, c3] = c.0;
    let ab = field.conj(a);
    let ak = field.frob_k(a);
    let abk = field.frob_k(ab);
    let mul = |x, y| field.mul(x, y);
    TauVector {
        tau1: mul(mul(c0, ab) + mul(c1, a), abk),
        tau2: mul(mul(c2, ab) + mul(c3, a), ak),
        tau3: mul(mul(c0, abk) + mul(c2, ak), ab),
        tau4: mul(mul(c1, abk) + mul(c3, ak), a),
        tau5: eval_f(field, c, a) + b,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViVector {
    pub v1: Elem,
    pub v2: Elem,
    pub v3: Elem,
    pub v4: Elem,
}

/// The defining forms `v1 = t1 t1b + t2 t2b`, `v2 = t1 t4b + t2b t3`,
/// `v3 = t1 t3b + t2b t4`, `v4 = t1 t5b + t2b t5`.
pub fn vi_from_tau(field: &Field, tv: &TauVector) -> ViVector {
    let cj = |x| field.conj(x);
    let mul = |x, y| field.mul(x, y);
    let t2b = cj(tv.tau2);
    ViVector {
        v1: mul(tv.tau1, cj(tv.tau1)) + mul(tv.tau2, t2b),
        v2: mul(tv.tau1, cj(tv.tau4)) + mul(t2b, tv.tau3),
        v3: mul(tv.tau1, cj(tv.tau3)) + mul(t2b, tv.tau4),
        v4: mul(tv.tau1, cj(tv.tau5)) + mul(t2b, tv.tau5),
    }
}

/// The `v_i` as functions of the thetas, `a` and `b`:
///
/// ```text
/// v1 = (a ab)^(2^k) M(a)
/// v2 = (a ab)^(2^k+1) (t4 + g^(2^k) t3 + g t2b)            g = ab / a
/// v3 = (a ab)^(2^k+1) (t1 + t4 + g^(2^k) t3 + t2 / g)
/// v4 = v1 + ab^(2^k) ((c2b a + c3b ab) b + (c0 ab + c1 a) bb)
/// ```
pub fn vi_closed_form(field: &Field, c: &Coeffs, a: Elem, b: Elem) -> Result<ViVector> {
    if a.is_zero() {
        return Err(Error::Precondition("closed forms need a != 0".into()));
    }
    let t = crate::family::Thetas::compute(field, c);
    let [c0, c1, c2, c3] = c.0;
    let mul = |x, y| field.mul(x, y);
    let ab = field.conj(a);
    let bb = field.conj(b);
    let na = field.norm(a);
    let nak = field.frob_k(na);
    let nak1 = mul(nak, na);
    let g = field.div(ab, a);
    let gk = field.frob_k(g);
    let v1 = mul(nak, t.big_m(field, a));
    let v2 = mul(nak1, t.t4 + mul(gk, t.t3) + mul(g, field.conj(t.t2)));
    let v3 = mul(nak1, t.t1 + t.t4 + mul(gk, t.t3) + field.div(t.t2, g));
    let inner = mul(mul(field.conj(c2), a) + mul(field.conj(c3), ab), b)
        + mul(mul(c0, ab) + mul(c1, a), bb);
    let v4 = v1 + mul(field.frob_k(ab), inner);
    Ok(ViVector { v1, v2, v3, v4 })
}

/// The `v_i` from their defining forms, checked against the closed forms.
pub fn compute_vi(field: &Field, c: &Coeffs, a: Elem, b: Elem, tv: &TauVector) -> Result<ViVector> {
    let vi = vi_from_tau(field, tv);
    let cf = vi_closed_form(field, c, a, b)?;
    for (name, x, y) in [
        ("v1", vi.v1, cf.v1),
        ("v2", vi.v2, cf.v2),
        ("v3", vi.v3, cf.v3),
        ("v4", vi.v4, cf.v4),
    ] {
        if x != y {
            return Err(Error::Consistency(format!(
                "{name} closed form {y} != defining form {x} for c = {c}, a = {a}, b = {b}"
            )));
        }
    }
    Ok(vi)
}

/// The linear relations among the `tau_i` and `v_i`.
pub fn vi_properties(
    field: &Field,
    c: &Coeffs,
    a: Elem,
    b: Elem,
    tv: &TauVector,
    vi: &ViVector,
) -> Vec<IdentityCheck> {
    let cj = |x| field.conj(x);
    let mul = |x, y| field.mul(x, y);
    let fa = eval_f(field, c, a);
    let chk = |tag: &str, pass: bool| IdentityCheck {
        tag: tag.to_string(),
        pass,
    };
    let (t1, t2, t3, t4, t5) = (tv.tau1, tv.tau2, tv.tau3, tv.tau4, tv.tau5);
    vec![
        chk("v_sum_zero", (vi.v1 + vi.v2 + vi.v3).is_zero()),
        chk("tau_pairs_sum_to_f", t1 + t2 == fa && t3 + t4 == fa),
        chk("v4_from_v1", vi.v4 == vi.v1 + mul(t1, cj(b)) + mul(cj(t2), b)),
        chk(
            "elimination_relations",
            (mul(t1, cj(vi.v3)) + mul(t2, vi.v2) + mul(t3, vi.v1)).is_zero()
                && (mul(t1, cj(vi.v2)) + mul(t2, vi.v3) + mul(t4, vi.v1)).is_zero()
                && (mul(t1, cj(vi.v4)) + mul(t2, vi.v4) + mul(t5, vi.v1)).is_zero(),
        ),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauNuParams {
    pub tau: Elem,
    pub nu: Elem,
    pub lambda: Elem,
    pub mu: Elem,
    pub delta: Elem,
}

/// The `b`-independent part of [`TauNuParams`] at one `a`, with its
/// invariants checked on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauNuBase {
    pub a: Elem,
    pub tau: Elem,
    pub lambda: Elem,
    pub mu: Elem,
    pub big_m: Elem,
    lambda_k: Elem,
    // nu = 1 + (nu_b * b + nu_bb * bb) / denom
    nu_b: Elem,
    nu_bb: Elem,
    denom: Elem,
}

impl TauNuBase {
    pub fn new(field: &Field, cache: &StructureCache, a: Elem) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Precondition("a must be nonzero".into()));
        }
        let t = &cache.thetas;
        let big_m = t.big_m(field, a);
        if big_m.is_zero() {
            return Err(Error::Precondition(format!("v1 = 0 at a = {a} (M(a) = 0)")));
        }
        let [c0, c1, c2, c3] = cache.coeffs.0;
        let mul = |x, y| field.mul(x, y);
        let ab = field.conj(a);
        let abk = field.frob_k(ab);
        let t1_aab = mul(t.t1, mul(a, ab));
        let w = field.div(mul(field.conj(t.t2), ab), mul(t.t1, a));
        let tau = mul(
            field.div(t1_aab, big_m),
            field.div(t.t4, t.t1) + w + field.frob_k(w),
        );
        let lambda = field.div(big_m, t1_aab);
        let mu = cache.xi + w;
        let base = TauNuBase {
            a,
            tau,
            lambda,
            mu,
            big_m,
            lambda_k: field.frob_k(lambda),
            nu_b: mul(mul(abk, ab), field.conj(c3)) + mul(mul(abk, a), field.conj(c2)),
            nu_bb: mul(mul(abk, ab), c0) + mul(mul(abk, a), c1),
            denom: mul(field.frob_k(field.norm(a)), big_m),
        };
        base.check(field, cache)?;
        Ok(base)
    }

    fn check(&self, field: &Field, cache: &StructureCache) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::Consistency(format!(
                "{what} at c = {}, a = {}",
                cache.coeffs, self.a
            )))
        };
        let t = Elem::ONE + self.tau + field.conj(self.tau);
        if t.is_zero() {
            return fail("1 + tau + taub = 0");
        }
        if !field.in_subfield(self.lambda) {
            return fail("lambda not in the subfield");
        }
        if field.div(self.lambda_k, self.lambda) != t {
            return fail("lambda^(2^k-1) != 1 + tau + taub");
        }
        if field.frob_k(self.mu) + self.mu != field.mul(self.tau, self.lambda) {
            return fail("mu^(2^k) + mu != tau lambda");
        }
        if self.mu + field.conj(self.mu) != self.lambda {
            return fail("mu + mub != lambda");
        }
        // tau from its definition v2 / v1
        let tv = tau_vector_unchecked(field, &cache.coeffs, self.a, Elem::ZERO);
        let vi = vi_from_tau(field, &tv);
        if field.div(vi.v2, vi.v1) != self.tau {
            return fail("closed-form tau != v2 / v1");
        }
        Ok(())
    }

    #[inline]
    pub fn nu(&self, field: &Field, b: Elem) -> Elem {
        let num = field.mul(self.nu_b, b) + field.mul(self.nu_bb, field.conj(b));
        Elem::ONE + field.div(num, self.denom)
    }

    #[inline]
    pub fn params(&self, field: &Field, b: Elem) -> TauNuParams {
        let nu = self.nu(field, b);
        TauNuParams {
            tau: self.tau,
            nu,
            lambda: self.lambda,
            mu: self.mu,
            delta: field.div(nu, self.lambda_k),
        }
    }

    /// `Tr(nu / lambda^(2^k))`.
    #[inline]
    pub fn delta_trace(&self, field: &Field, nu: Elem) -> u8 {
        field.abs_trace(field.div(nu, self.lambda_k))
    }

    /// `Tr(mu^(2^k) nub / lambda^(2^k))`.
    #[inline]
    pub fn mu_trace(&self, field: &Field, nu: Elem) -> u8 {
        let x = field.mul(field.frob_k(self.mu), field.conj(nu));
        field.abs_trace(field.div(x, self.lambda_k))
    }

    /// Solution count predicted by the criteria with the closed-form `mu`
    /// (`mu + mub = lambda`, so only the 0/4 branches are reachable).
    #[inline]
    pub fn predicted_count(&self, field: &Field, b: Elem) -> u32 {
        let nu = self.nu(field, b);
        if self.delta_trace(field, nu) == 0 && self.mu_trace(field, nu) == 0 {
            4
        } else {
            0
        }
    }
}

/// `tau, nu, lambda, mu, Delta` at `(a, b)`; requires `v1 != 0`. Checks the
/// closed forms against their definitions.
pub fn gen_eq_params(field: &Field, cache: &StructureCache, a: Elem, b: Elem) -> Result<TauNuParams> {
    let base = TauNuBase::new(field, cache, a)?;
    let p = base.params(field, b);
    let tv = tau_vector_unchecked(field, &cache.coeffs, a, b);
    let vi = vi_from_tau(field, &tv);
    let nu_def =
        Elem::ONE + field.div(field.mul(tv.tau1, field.conj(b)) + field.mul(field.conj(tv.tau2), b), vi.v1);
    if nu_def != p.nu {
        return Err(Error::Consistency(format!(
            "closed-form nu {} != definition {nu_def} at c = {}, a = {a}, b = {b}",
            p.nu, cache.coeffs
        )));
    }
    Ok(p)
}

/// Brute-force solutions of `f(x + a) + f(x) = b`.
pub fn diff_eq_count(field: &Field, c: &Coeffs, a: Elem, b: Elem) -> Result<(u32, Vec<Elem>)> {
    if a.is_zero() {
        return Err(Error::Precondition("difference equation needs a != 0".into()));
    }
    let sols: Vec<Elem> = field
        .elements()
        .filter(|&x| eval_f(field, c, x + a) + eval_f(field, c, x) == b)
        .collect();
    Ok((sols.len() as u32, sols))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct V1ZeroReport {
    pub a: Elem,
    /// `ab t2b / (a t1)`, one of the two roots `xi`, `xib`.
    pub xi_prime: Elem,
    pub tau: TauVector,
    pub checks: Vec<IdentityCheck>,
}

impl V1ZeroReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The structure forced by `v1 = 0`: Gamma1, all thetas nonzero,
/// `t2 t2b / t1^2 = xi + xi^2`, `ab t2b / (a t1) in {xi, xib}`, `v2 = v3 = 0`,
/// `f(a) != 0`, all `tau_i != 0` and the two ratio formulas.
pub fn v1_zero_analysis(field: &Field, cache: &StructureCache, a: Elem) -> Result<V1ZeroReport> {
    if a.is_zero() {
        return Err(Error::Precondition("a must be nonzero".into()));
    }
    let c = &cache.coeffs;
    let tv = tau_vector_unchecked(field, c, a, Elem::ZERO);
    let vi = vi_from_tau(field, &tv);
    if !vi.v1.is_zero() {
        return Err(Error::Precondition(format!("v1 != 0 at a = {a}")));
    }
    let t = &cache.thetas;
    let mul = |x, y| field.mul(x, y);
    let xi = cache.xi;
    let ab = field.conj(a);
    let t2b = field.conj(t.t2);
    let chk = |tag: &str, pass: bool| IdentityCheck {
        tag: tag.to_string(),
        pass,
    };
    let mut checks = vec![
        chk("gamma1", cache.verdict == Verdict::Gamma1),
        chk(
            "thetas_nonzero",
            !(t.t1.is_zero() || t.t2.is_zero() || t.t3.is_zero() || t.t4.is_zero()),
        ),
    ];
    if t.t1.is_zero() {
        return Ok(V1ZeroReport {
            a,
            xi_prime: Elem::ZERO,
            tau: tv,
            checks,
        });
    }
    checks.push(chk(
        "branch_xi",
        field.div(field.norm(t.t2), field.square(t.t1)) == xi + field.square(xi),
    ));
    let xi_prime = field.div(mul(ab, t2b), mul(a, t.t1));
    checks.push(chk("ratio_root", xi_prime == xi || xi_prime == field.conj(xi)));
    checks.push(chk("v2_v3_zero", vi.v2.is_zero() && vi.v3.is_zero()));
    checks.push(chk("f_a_nonzero", !eval_f(field, c, a).is_zero()));
    let all_tau = [tv.tau1, tv.tau2, tv.tau3, tv.tau4];
    checks.push(chk("tau_nonzero", all_tau.iter().all(|x| !x.is_zero())));
    if !tv.tau1.is_zero() && !t2b.is_zero() {
        let r3 = field.div(mul(t.t1, a), mul(t2b, ab));
        let want3 = field.div(field.frob_k(r3), r3);
        checks.push(chk("tau3_ratio", field.div(tv.tau3, tv.tau1) == want3));
        let r2 = field.div(mul(t.t2, field.square(a)), mul(t2b, field.square(ab)));
        checks.push(chk("tau2_ratio", field.div(tv.tau2, tv.tau1) == field.frob_k(r2)));
    }
    Ok(V1ZeroReport {
        a,
        xi_prime,
        tau: tv,
        checks,
    })
}

/// Solution count of the split system `x^(2^k) + (t3b/t1b) x + y = 0`,
/// `yb + (t2/t1) y + t5/t1 = 0`.
pub fn split_system_count(field: &Field, tv: &TauVector) -> Result<u64> {
    if tv.tau1.is_zero() {
        return Err(Error::Precondition("split system needs tau1 != 0".into()));
    }
    let r3 = field.div(field.conj(tv.tau3), field.conj(tv.tau1));
    let r2 = field.div(tv.tau2, tv.tau1);
    let r5 = field.div(tv.tau5, tv.tau1);
    count_pair_system(field, &[(field.m(), Elem::ONE), (0, r2)], r5, r3)
}

/// Solution count of the normalized system `x1^(2^k) + x1 + y1 = 0`,
/// `y1b + y1 = rho`.
pub fn normalized_system_count(field: &Field, rho: Elem) -> Result<u64> {
    count_pair_system(field, &[(field.m(), Elem::ONE), (0, Elem::ONE)], rho, Elem::ONE)
}

// #{(x, y) : Y(y) = rhs, x^(2^k) + r x = y}
fn count_pair_system(field: &Field, y_op: &[(u32, Elem)], rhs: Elem, r: Elem) -> Result<u64> {
    let Some(ys) = field.solve_linearized(y_op, rhs) else {
        return Ok(0);
    };
    if ys.is_whole_space() {
        return Err(Error::Consistency("degenerate y-equation".into()));
    }
    let x_op = [(field.k(), Elem::ONE), (0, r)];
    Ok(ys
        .iter()
        .map(|y| field.solve_linearized(&x_op, y).map_or(0, |s| s.len()))
        .sum())
}

/// `rho = xi'^(2^k) t5 / t1` of the normalized system at a `v1 = 0` point.
pub fn normalized_rho(field: &Field, report: &V1ZeroReport, b: Elem, fa: Elem) -> Result<Elem> {
    if report.tau.tau1.is_zero() {
        return Err(Error::Precondition("normalization needs tau1 != 0".into()));
    }
    let tau5 = fa + b;
    Ok(field.mul(field.frob_k(report.xi_prime), field.div(tau5, report.tau.tau1)))
}

/// Per-orbit trace data at `(a, b)` for a Gamma0 tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TzOutcome {
    pub orbit: [Elem; 3],
    /// `Tr(nu_z / lambda_z^(2^k))` per orbit point.
    pub delta_traces: [u8; 3],
    /// `T_z = Tr(mu_z^(2^k) nub_z / lambda_z^(2^k))` per orbit point.
    pub tz: [u8; 3],
    /// `sum_z 4 [both traces vanish]`, the predicted `S(a, b)`.
    pub predicted_s: u32,
    /// Failed reductions of the traces to `f(z)` and `f(eta2(z))`.
    pub reduction_failures: Vec<String>,
}

impl TzOutcome {
    pub fn zero_delta_traces(&self) -> usize {
        self.delta_traces.iter().filter(|&&t| t == 0).count()
    }

    /// The orbit-trace claims: one or three vanishing delta traces, and
    /// `T_z = 1` everywhere when all three vanish.
    pub fn claims_hold(&self) -> bool {
        let zeros = self.zero_delta_traces();
        (zeros == 1 || zeros == 3)
            && (zeros != 3 || self.tz.iter().all(|&t| t == 1))
            && self.reduction_failures.is_empty()
    }
}

/// Evaluates the boomerang trace conditions on the orbit of `a`. `base_of`
/// supplies the per-point parameters (cached by the caller).
pub fn tz_outcome<'a>(
    field: &Field,
    cache: &StructureCache,
    a: Elem,
    b: Elem,
    base_of: impl Fn(Elem) -> Result<std::borrow::Cow<'a, TauNuBase>>,
) -> Result<TzOutcome> {
    let orbit = cache.orbit(field, a);
    let t1k = field.frob_k(cache.thetas.t1);
    let ma = cache.big_m(field, a);
    let ma_pow = field.mul(field.frob_k(ma), ma);
    let bb = field.conj(b);
    let mut out = TzOutcome {
        orbit,
        delta_traces: [0; 3],
        tz: [0; 3],
        predicted_s: 0,
        reduction_failures: Vec::new(),
    };
    for (i, &z) in orbit.iter().enumerate() {
        let base = base_of(z)?;
        let nu = base.nu(field, b);
        let d = base.delta_trace(field, nu);
        let t = base.mu_trace(field, nu);
        out.delta_traces[i] = d;
        out.tz[i] = t;
        if d == 0 && t == 0 {
            out.predicted_s += 4;
        }
        let scale = field.div(field.mul(t1k, bb), ma_pow);
        let d_red = field.abs_trace(field.mul(scale, eval_f(field, &cache.coeffs, z)));
        if d_red != d {
            out.reduction_failures.push(format!("delta trace reduction at z = {z}"));
        }
        let e2 = cache.eta(field, cache.eta(field, z));
        let t_red = 1 ^ field.abs_trace(field.mul(scale, eval_f(field, &cache.coeffs, e2)));
        if t_red != t {
            out.reduction_failures.push(format!("T_z reduction at z = {z}"));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    /// Compute the BCT both ways and run the structural checks.
    Full,
    /// Permutation and differential uniformity only.
    Skip,
}

/// One observed disagreement with the expected behaviour.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Anomaly {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<Elem>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<Elem>,
    pub message: String,
}

impl Anomaly {
    pub fn global(message: impl Into<String>) -> Self {
        Anomaly {
            a: None,
            b: None,
            message: message.into(),
        }
    }

    pub fn at(a: Elem, b: Option<Elem>, message: impl Into<String>) -> Self {
        Anomaly {
            a: Some(a),
            b,
            message: message.into(),
        }
    }
}

/// At most this many anomalies are kept in a verdict (all are counted).
pub const MAX_REPORTED_ANOMALIES: usize = 64;

/// Number of `(a, b)` pairs sampled for the orbit-trace check above
/// [`TZ_EXHAUSTIVE_MAX_N`].
pub const TZ_SAMPLE_PAIRS: usize = 64;
pub const TZ_EXHAUSTIVE_MAX_N: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub tuple: Coeffs,
    pub verdict: Verdict,
    pub reasons: Vec<Reason>,
    pub permutation: bool,
    pub delta: u32,
    pub beta: Option<u32>,
    pub consistent: bool,
    pub anomaly_count: usize,
    pub anomalies: Vec<Anomaly>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ddt_spectrum: Option<Spectrum>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bct_spectrum: Option<Spectrum>,
}

pub fn verify_theorem(field: &Field, c: &Coeffs, mode: BetaMode) -> TheoremVerdict {
    let basis = FamilyBasis::new(field, field.k());
    verify_theorem_with(field, &basis, c, mode)
}

/// [`verify_theorem`] with a precomputed monomial basis.
pub fn verify_theorem_with(
    field: &Field,
    basis: &FamilyBasis,
    c: &Coeffs,
    mode: BetaMode,
) -> TheoremVerdict {
    let GammaClass { verdict, reasons } = classify(field, c);
    let table = sbox::build_table_with(field, basis, c);
    let permutation = table.is_permutation();
    let mut anomalies = Vec::new();
    let full = mode == BetaMode::Full;

    let ddt = sbox::ddt(&table, false).expect("family tables are within analysis range");
    let delta = ddt.uniformity;
    let two_m1 = 1u32 << (field.m() + 1);
    if verdict.is_gamma() && !permutation {
        anomalies.push(Anomaly::global("Gamma member is not a permutation"));
    }
    match verdict {
        Verdict::Gamma0 if delta != 4 => {
            anomalies.push(Anomaly::global(format!("Gamma0 member has delta = {delta}, expected 4")))
        }
        Verdict::Gamma1 if delta != two_m1 => anomalies.push(Anomaly::global(format!(
            "Gamma1 member has delta = {delta}, expected {two_m1}"
        ))),
        _ => {}
    }

    let mut beta = None;
    let mut bct_spectrum = None;
    let mut bct_rows: Option<Vec<Vec<u32>>> = None;
    if full && permutation {
        match beta_cross_check(&table, &mut anomalies) {
            Ok((b, spectrum, rows)) => {
                beta = Some(b);
                bct_spectrum = Some(spectrum);
                bct_rows = rows;
            }
            Err(e) => anomalies.push(Anomaly::global(format!("BCT failed: {e}"))),
        }
        if let Some(b) = beta {
            if b < delta {
                anomalies.push(Anomaly::global(format!("beta = {b} < delta = {delta}")));
            }
            match verdict {
                Verdict::Gamma0 if b != 4 => anomalies
                    .push(Anomaly::global(format!("Gamma0 member has beta = {b}, expected 4"))),
                Verdict::Gamma1 if b < two_m1 => anomalies.push(Anomaly::global(format!(
                    "Gamma1 member has beta = {b} < {two_m1}"
                ))),
                _ => {}
            }
        }
    }

    if full && verdict.is_gamma() {
        match StructureCache::new(field, c) {
            Ok(cache) => structural_checks(field, &cache, &table, bct_rows.as_deref(), &mut anomalies),
            Err(e) => anomalies.push(Anomaly::global(format!("structure constants: {e}"))),
        }
    }

    anomalies.sort();
    let anomaly_count = anomalies.len();
    anomalies.truncate(MAX_REPORTED_ANOMALIES);
    TheoremVerdict {
        tuple: *c,
        verdict,
        reasons,
        permutation,
        delta,
        beta,
        consistent: anomaly_count == 0,
        anomaly_count,
        anomalies,
        ddt_spectrum: full.then_some(ddt.spectrum),
        bct_spectrum,
    }
}

type BetaOutcome = (u32, Spectrum, Option<Vec<Vec<u32>>>);

// beta by both methods; entrywise when the full tables fit.
fn beta_cross_check(table: &SboxTable, anomalies: &mut Vec<Anomaly>) -> Result<BetaOutcome> {
    if table.n() <= MAX_FULL_TABLE_N {
        let lq = sbox::bct_rows(table, BctMethod::Lqsl)?;
        let def = sbox::bct_rows(table, BctMethod::Definitional)?;
        let mut mismatches = 0usize;
        for (a, (rl, rd)) in lq.iter().zip(&def).enumerate() {
            for (b, (x, y)) in rl.iter().zip(rd).enumerate() {
                if x != y {
                    if mismatches < 4 {
                        anomalies.push(Anomaly::at(
                            Elem(a as u32),
                            Some(Elem(b as u32)),
                            format!("BCT methods disagree: pair-count {x}, definitional {y}"),
                        ));
                    }
                    mismatches += 1;
                }
            }
        }
        if mismatches > 4 {
            anomalies.push(Anomaly::global(format!("{mismatches} BCT cells disagree in total")));
        }
        let s = sbox::BctSummary::from_rows(lq, BctMethod::Lqsl, true);
        Ok((s.uniformity, s.spectrum, s.full_table))
    } else {
        let lq = sbox::bct_lqsl(table, false)?;
        let def = sbox::bct_definitional(table, false)?;
        if lq.spectrum != def.spectrum {
            anomalies.push(Anomaly::global("BCT spectra of the two methods disagree"));
        }
        Ok((lq.uniformity, lq.spectrum, None))
    }
}

struct PerA {
    anomalies: Vec<Anomaly>,
    base: Option<TauNuBase>,
    v1_zero: bool,
}

fn structural_checks(
    field: &Field,
    cache: &StructureCache,
    table: &SboxTable,
    bct_rows: Option<&[Vec<u32>]>,
    anomalies: &mut Vec<Anomaly>,
) {
    let size = field.size();
    let per_a: Vec<PerA> = (1..size as u32)
        .into_par_iter()
        .map(|a| per_a_checks(field, cache, table, Elem(a)))
        .collect();
    let mut bases: Vec<Option<TauNuBase>> = vec![None; size];
    let mut witness = false;
    for (i, r) in per_a.into_iter().enumerate() {
        anomalies.extend(r.anomalies);
        witness |= r.v1_zero;
        bases[i + 1] = r.base;
    }
    if cache.verdict == Verdict::Gamma1 && !witness {
        anomalies.push(Anomaly::global("no v1-zero witness"));
    }
    if cache.verdict == Verdict::Gamma0 {
        tz_checks(field, cache, &bases, bct_rows, anomalies);
    }
}

fn per_a_checks(field: &Field, cache: &StructureCache, table: &SboxTable, a: Elem) -> PerA {
    let mut out = PerA {
        anomalies: Vec::new(),
        base: None,
        v1_zero: false,
    };
    let c = &cache.coeffs;
    let t = table.table();
    let size = field.size();
    let fa = Elem(t[a.0 as usize]);

    let tv = tau_vector_unchecked(field, c, a, Elem::ZERO);
    let vi = match compute_vi(field, c, a, Elem::ZERO, &tv) {
        Ok(vi) => vi,
        Err(e) => {
            out.anomalies.push(Anomaly::at(a, None, e.to_string()));
            return out;
        }
    };
    for p in vi_properties(field, c, a, Elem::ZERO, &tv, &vi) {
        if !p.pass {
            out.anomalies.push(Anomaly::at(a, None, format!("{} fails", p.tag)));
        }
    }

    // d(x) = f(a x + a) + f(a x): solutions of the scaled equation, by b
    let mut hist_d = vec![0u32; size];
    let dvals: Vec<Elem> = field
        .elements()
        .map(|x| {
            let ax = field.mul(a, x).0 as usize;
            let d = t[ax ^ a.0 as usize] ^ t[ax];
            hist_d[d as usize] += 1;
            Elem(d)
        })
        .collect();

    if !vi.v1.is_zero() {
        let base = match TauNuBase::new(field, cache, a) {
            Ok(b) => b,
            Err(e) => {
                out.anomalies.push(Anomaly::at(a, None, e.to_string()));
                return out;
            }
        };
        // the scaled equation and L_{tau,nu} have the same solutions for every b
        let mut hist_l = vec![0u32; size];
        let mut set_mismatch = false;
        for (x, &d) in field.elements().zip(&dvals) {
            let l0 = lemma_core_eval(field, base.tau, Elem::ZERO, x);
            hist_l[l0.0 as usize] += 1;
            set_mismatch |= base.nu(field, d) != l0;
        }
        for b in field.elements() {
            let nu = base.nu(field, b);
            let observed = hist_d[b.0 as usize];
            set_mismatch |= hist_l[nu.0 as usize] != observed;
            let predicted = base.predicted_count(field, b);
            if predicted != observed {
                out.anomalies.push(Anomaly::at(
                    a,
                    Some(b),
                    format!("criteria predict {predicted} solutions, observed {observed}"),
                ));
            }
        }
        if set_mismatch {
            out.anomalies
                .push(Anomaly::at(a, None, "scaled equation and L(tau, nu) differ in solutions"));
        }
        let nu0 = base.nu(field, Elem::ZERO);
        if base.mu_trace(field, nu0) != 1 {
            out.anomalies.push(Anomaly::at(a, Some(Elem::ZERO), "Tr(mu^(2^k) / lambda^(2^k)) != 1"));
        }
        let roots = [Elem::ZERO, Elem::ONE, base.mu, base.mu + Elem::ONE];
        if base.mu.is_zero()
            || base.mu == Elem::ONE
            || roots
                .iter()
                .any(|&x| !lemma_core_eval(field, base.tau, Elem::ZERO, x).is_zero())
        {
            out.anomalies.push(Anomaly::at(a, None, "{0, 1, mu, mu + 1} are not the roots at nu = 0"));
        }
        out.base = Some(base);
    } else {
        out.v1_zero = true;
        if cache.verdict == Verdict::Gamma0 {
            out.anomalies.push(Anomaly::at(a, None, "M(a) = 0 for a Gamma0 member"));
            return out;
        }
        match v1_zero_analysis(field, cache, a) {
            Ok(report) => {
                for ch in report.checks.iter().filter(|ch| !ch.pass) {
                    out.anomalies
                        .push(Anomaly::at(a, None, format!("v1 = 0 conclusion {} fails", ch.tag)));
                }
                for (b, expected) in [(Elem::ZERO, 0u64), (fa, 1u64 << (field.m() + 1))] {
                    let observed = hist_d[b.0 as usize] as u64;
                    let tvb = tau_vector_unchecked(field, c, a, b);
                    let split = split_system_count(field, &tvb);
                    let norm = normalized_rho(field, &report, b, fa)
                        .and_then(|rho| normalized_system_count(field, rho));
                    match (split, norm) {
                        (Ok(s), Ok(nm)) if s == observed && nm == observed && observed == expected => {}
                        (s, nm) => out.anomalies.push(Anomaly::at(
                            a,
                            Some(b),
                            format!(
                                "v1 = 0 system counts: observed {observed}, split {s:?}, \
                                 normalized {nm:?}, expected {expected}"
                            ),
                        )),
                    }
                }
            }
            Err(e) => out.anomalies.push(Anomaly::at(a, None, e.to_string())),
        }
    }
    out
}

fn tz_pairs(field: &Field, c: &Coeffs) -> Vec<(Elem, Elem)> {
    let size = field.size() as u32;
    if field.n() <= TZ_EXHAUSTIVE_MAX_N {
        return (1..size)
            .flat_map(|a| (1..size).map(move |b| (Elem(a), Elem(b))))
            .collect();
    }
    let code = c.encode(field.n());
    let seed = (code as u64) ^ ((code >> 64) as u64);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Elem, Elem)> = (0..TZ_SAMPLE_PAIRS)
        .map(|_| (Elem(rng.random_range(1..size)), Elem(rng.random_range(1..size))))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn tz_checks(
    field: &Field,
    cache: &StructureCache,
    bases: &[Option<TauNuBase>],
    bct_rows: Option<&[Vec<u32>]>,
    anomalies: &mut Vec<Anomaly>,
) {
    let found: Vec<Anomaly> = tz_pairs(field, &cache.coeffs)
        .into_par_iter()
        .filter_map(|(a, b)| {
            let lookup = |z: Elem| {
                bases[z.0 as usize]
                    .as_ref()
                    .map(std::borrow::Cow::Borrowed)
                    .ok_or_else(|| Error::Precondition(format!("no parameters at z = {z}")))
            };
            let outcome = match tz_outcome(field, cache, a, b, lookup) {
                Ok(o) => o,
                Err(e) => return Some(Anomaly::at(a, Some(b), e.to_string())),
            };
            let mut msgs = outcome.reduction_failures.clone();
            let zeros = outcome.zero_delta_traces();
            if zeros != 1 && zeros != 3 {
                msgs.push(format!("{zeros} vanishing delta traces on the orbit"));
            }
            if zeros == 3 && outcome.tz.iter().any(|&t| t != 1) {
                msgs.push(format!("T_z = {:?} with all delta traces zero", outcome.tz));
            }
            if let Some(rows) = bct_rows {
                let s = rows[a.0 as usize][b.0 as usize];
                if s != outcome.predicted_s {
                    msgs.push(format!("S(a, b) = {s}, orbit prediction {}", outcome.predicted_s));
                }
            }
            (!msgs.is_empty()).then(|| Anomaly::at(a, Some(b), msgs.join("; ")))
        })
        .collect();
    anomalies.extend(found);
}

/// Agreement of [`lemma_core_criteria`] with [`lemma_core_oracle`] over the
/// given pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaAgreement {
    pub checked: u64,
    pub agree: u64,
    pub count_histogram: [u64; 5],
    pub first_mismatch: Option<(Elem, Elem, u32, u32)>,
}

impl LemmaAgreement {
    pub fn all_agree(&self) -> bool {
        self.checked == self.agree
    }
}

pub fn lemma_core_agreement(
    field: &Field,
    pairs: impl IntoParallelIterator<Item = (Elem, Elem)>,
) -> LemmaAgreement {
    type Row = (Elem, Elem, std::result::Result<u32, String>, u32, bool);
    let results: Vec<Row> = pairs
        .into_par_iter()
        .map(|(tau, nu)| {
            let oracle = lemma_core_oracle(field, tau, nu);
            let sols_ok = oracle
                .solutions
                .as_ref()
                .is_some_and(|s| s.iter().all(|&x| lemma_core_eval(field, tau, nu, x).is_zero()));
            let crit = lemma_core_criteria(field, tau, nu);
            let closed_ok = match &crit {
                Ok(v) => v.solutions.as_ref().is_none_or(|s| Some(s) == oracle.solutions.as_ref()),
                Err(_) => false,
            };
            (
                tau,
                nu,
                crit.map(|v| v.count).map_err(|e| e.to_string()),
                oracle.count,
                sols_ok && closed_ok,
            )
        })
        .collect();
    let mut out = LemmaAgreement::default();
    for (tau, nu, crit, oracle, extra_ok) in results {
        out.checked += 1;
        out.count_histogram[(oracle as usize).min(4)] += 1;
        let crit_count = crit.unwrap_or(u32::MAX);
        if crit_count == oracle && extra_ok && matches!(oracle, 0 | 2 | 4) {
            out.agree += 1;
        } else if out.first_mismatch.is_none() {
            out.first_mismatch = Some((tau, nu, crit_count, oracle));
        }
    }
    out
}
