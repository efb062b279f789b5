//! The quadrinomial family and its coefficient classes.
//!
//! For `c = (c0, c1, c2, c3)` the theta vector is
//!
//! ```text
//! t1 = c0 c0b + c1 c1b + c2 c2b + c3 c3b      t2 = c0b c1 + c2b c3
//! t3 = c0 c2b + c1 c3b                        t4 = c1 c1b + c2 c2b
//! ```
//!
//! and `c` is in Gamma iff `t1 != 0`, `Tr_1^m(t4/t1) = 1` and
//! `(t2/t1)^(2^k) = t3b/t1`. Gamma splits by `i = Tr_1^m(t2 t2b / t1^2)`.
//!
//! `t4` is `c1 c1b + c2 c2b`: with any other pair of norms the identity
//! `t2 t2b + t3 t3b = t4 (t1 + t4)` fails, and everything downstream relies
//! on it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeffs(pub [Elem; 4]);

impl Coeffs {
    pub const ZERO: Coeffs = Coeffs([Elem::ZERO; 4]);

    pub fn new(c0: Elem, c1: Elem, c2: Elem, c3: Elem) -> Self {
        Coeffs([c0, c1, c2, c3])
    }

    pub fn from_bits(bits: [u32; 4]) -> Self {
        Coeffs(bits.map(Elem))
    }

    /// Packs the tuple into one integer, `c0` in the most significant limb.
    /// Used as the canonical ordering of campaign records.
    pub fn encode(&self, n: u32) -> u128 {
        self.0
            .iter()
            .fold(0u128, |acc, c| (acc << n) | c.0 as u128)
    }

    pub fn decode(code: u128, n: u32) -> Self {
        let mask = (1u128 << n) - 1;
        let mut out = [Elem::ZERO; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = Elem(((code >> (n * (3 - i as u32))) & mask) as u32);
        }
        Coeffs(out)
    }

    /// Scales all coefficients by `u` (Gamma is invariant under this).
    pub fn scale(&self, field: &Field, u: Elem) -> Self {
        Coeffs(self.0.map(|c| field.mul(c, u)))
    }

    pub fn in_field(&self, field: &Field) -> bool {
        self.0.iter().all(|&c| field.contains(c))
    }
}

impl fmt::Display for Coeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}:{b}:{c}:{d}")
    }
}

impl FromStr for Coeffs {
    type Err = Error;

    /// Parses `"c0:c1:c2:c3"`, four hex field elements.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "coefficient tuple must be c0:c1:c2:c3, got {s:?}"
            )));
        }
        let mut out = [Elem::ZERO; 4];
        for (slot, p) in out.iter_mut().zip(parts) {
            *slot = Elem::from_hex(p)?;
        }
        Ok(Coeffs(out))
    }
}

impl Serialize for Coeffs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coeffs {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `f_c(x)` with an explicit Frobenius exponent `k` (any `k`, including the
/// even exponents handled by [`even_k_reduce`]).
pub fn eval_with_k(field: &Field, c: &Coeffs, k: u32, x: Elem) -> Elem {
    let xb = field.conj(x);
    let xk = field.frob(x, k);
    let xbk = field.frob(xb, k);
    let [c0, c1, c2, c3] = c.0;
    field.mul(c0, field.mul(xbk, xb))
        + field.mul(c1, field.mul(xbk, x))
        + field.mul(c2, field.mul(xb, xk))
        + field.mul(c3, field.mul(xk, x))
}

/// `f_c(x)` for the field's own `k`.
pub fn eval_f(field: &Field, c: &Coeffs, x: Elem) -> Elem {
    eval_with_k(field, c, field.k(), x)
}

/// The four monomials of the family tabulated over the whole field, so that
/// `f_c(x) = sum c_i * mono_i[x]`.
#[derive(Clone, Debug)]
pub struct FamilyBasis {
    pub k: u32,
    pub mono: [Vec<Elem>; 4],
}

impl FamilyBasis {
    pub fn new(field: &Field, k: u32) -> Self {
        let mut mono: [Vec<Elem>; 4] = Default::default();
        for x in field.elements() {
            let xb = field.conj(x);
            let xk = field.frob(x, k);
            let xbk = field.frob(xb, k);
            mono[0].push(field.mul(xbk, xb));
            mono[1].push(field.mul(xbk, x));
            mono[2].push(field.mul(xb, xk));
            mono[3].push(field.mul(xk, x));
        }
        FamilyBasis { k, mono }
    }

    #[inline]
    pub fn eval(&self, field: &Field, c: &Coeffs, x: Elem) -> Elem {
        let i = x.0 as usize;
        (0..4).fold(Elem::ZERO, |acc, j| acc + field.mul(c.0[j], self.mono[j][i]))
    }

    pub fn table(&self, field: &Field, c: &Coeffs) -> Vec<Elem> {
        field.elements().map(|x| self.eval(field, c, x)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Thetas {
    pub t1: Elem,
    pub t2: Elem,
    pub t3: Elem,
    pub t4: Elem,
}

impl Thetas {
    pub fn compute(field: &Field, c: &Coeffs) -> Thetas {
        let [c0, c1, c2, c3] = c.0;
        let [b0, b1, b2, b3] = c.0.map(|x| field.conj(x));
        let n1 = field.mul(c1, b1);
        let n2 = field.mul(c2, b2);
        Thetas {
            t1: field.mul(c0, b0) + n1 + n2 + field.mul(c3, b3),
            t2: field.mul(b0, c1) + field.mul(b2, c3),
            t3: field.mul(c0, b2) + field.mul(c1, b3),
            t4: n1 + n2,
        }
    }

    /// `M(a) = t1 a ab + t2b ab^2 + t2 a^2`.
    pub fn big_m(&self, field: &Field, a: Elem) -> Elem {
        let ab = field.conj(a);
        field.mul(self.t1, field.mul(a, ab))
            + field.mul(field.conj(self.t2), field.square(ab))
            + field.mul(self.t2, field.square(a))
    }

    /// `t2 t2b + t3 t3b == t4 (t1 + t4)`, a polynomial identity in the
    /// coefficients.
    pub fn norm_balance_holds(&self, field: &Field) -> bool {
        field.norm(self.t2) + field.norm(self.t3) == field.mul(self.t4, self.t1 + self.t4)
    }
}

pub fn compute_thetas(field: &Field, c: &Coeffs) -> Thetas {
    Thetas::compute(field, c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    NotGamma,
    Gamma0,
    Gamma1,
}

impl Verdict {
    pub fn is_gamma(self) -> bool {
        self != Verdict::NotGamma
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NotGamma => "NotGamma",
            Verdict::Gamma0 => "Gamma0",
            Verdict::Gamma1 => "Gamma1",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Condition tags attached to a classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// `t1 = 0` (the other conditions are then undefined).
    Theta1Zero,
    /// `Tr_1^m(t4/t1) = 0`.
    TraceTheta4,
    /// `(t2/t1)^(2^k) != t3b/t1`.
    Theta23Link,
    /// Member of Gamma; the verdict carries the branch.
    GammaBranch,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Theta1Zero => "theta1_zero",
            Reason::TraceTheta4 => "trace_theta4",
            Reason::Theta23Link => "theta23_link",
            Reason::GammaBranch => "gamma_branch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaClass {
    pub verdict: Verdict,
    pub reasons: Vec<Reason>,
}

/// Allocation-free classification from a precomputed theta vector. Returns
/// the verdict and the failed-condition bitmask (bit i = `Reason` i).
#[inline]
pub fn classify_thetas(field: &Field, t: &Thetas) -> (Verdict, u8) {
    if t.t1.is_zero() {
        return (Verdict::NotGamma, 1 << Reason::Theta1Zero as u8);
    }
    let mut failed = 0u8;
    if field.subfield_trace_unchecked(field.div(t.t4, t.t1)) != 1 {
        failed |= 1 << Reason::TraceTheta4 as u8;
    }
    // (t2/t1)^(2^k) = t3b/t1  <=>  t2^(2^k) = t3b * t1^(2^k - 1)
    let lhs = field.frob_k(field.div(t.t2, t.t1));
    let rhs = field.div(field.conj(t.t3), t.t1);
    if lhs != rhs {
        failed |= 1 << Reason::Theta23Link as u8;
    }
    if failed != 0 {
        return (Verdict::NotGamma, failed);
    }
    let branch = field.subfield_trace_unchecked(field.div(field.norm(t.t2), field.square(t.t1)));
    let v = if branch == 0 { Verdict::Gamma0 } else { Verdict::Gamma1 };
    (v, 0)
}

#[inline]
pub fn classify_verdict(field: &Field, c: &Coeffs) -> Verdict {
    classify_thetas(field, &Thetas::compute(field, c)).0
}

pub fn classify(field: &Field, c: &Coeffs) -> GammaClass {
    let (verdict, failed) = classify_thetas(field, &Thetas::compute(field, c));
    let reasons = if verdict.is_gamma() {
        vec![Reason::GammaBranch]
    } else {
        [Reason::Theta1Zero, Reason::TraceTheta4, Reason::Theta23Link]
            .into_iter()
            .filter(|r| failed & (1 << *r as u8) != 0)
            .collect()
    };
    GammaClass { verdict, reasons }
}

/// The root of `xi^(2^k) + xi = t4/t1` with the smaller encoding. Checks
/// `xi + xib = 1`.
pub fn compute_xi(field: &Field, t: &Thetas) -> Result<Elem> {
    if t.t1.is_zero() {
        return Err(Error::Precondition("xi needs t1 != 0".into()));
    }
    let roots = field.solve_artin_schreier(field.div(t.t4, t.t1), field.k())?;
    let xi = *roots.first().ok_or_else(|| {
        Error::Consistency("xi^(2^k) + xi = t4/t1 has no root for a Gamma member".into())
    })?;
    if xi + field.conj(xi) != Elem::ONE {
        return Err(Error::Consistency(format!("xi + conj(xi) != 1 for xi = {xi}")));
    }
    Ok(xi)
}

/// Per-tuple constants shared by the structural analysis of a Gamma member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureCache {
    pub coeffs: Coeffs,
    pub thetas: Thetas,
    pub verdict: Verdict,
    pub xi: Elem,
    /// `t2b / t1`.
    pub s: Elem,
}

impl StructureCache {
    pub fn new(field: &Field, c: &Coeffs) -> Result<Self> {
        let thetas = Thetas::compute(field, c);
        let (verdict, _) = classify_thetas(field, &thetas);
        if !verdict.is_gamma() {
            return Err(Error::Precondition(format!("{c} is not in Gamma")));
        }
        let xi = compute_xi(field, &thetas)?;
        Ok(StructureCache {
            coeffs: *c,
            thetas,
            verdict,
            xi,
            s: field.div(field.conj(thetas.t2), thetas.t1),
        })
    }

    /// Same cache with the other root `xi + 1`.
    pub fn with_other_root(&self) -> Self {
        StructureCache {
            xi: self.xi + Elem::ONE,
            ..self.clone()
        }
    }

    pub fn big_m(&self, field: &Field, a: Elem) -> Elem {
        self.thetas.big_m(field, a)
    }

    /// `eta(a) = xi a + (t2b/t1) ab`.
    #[inline]
    pub fn eta(&self, field: &Field, a: Elem) -> Elem {
        field.mul(self.xi, a) + field.mul(self.s, field.conj(a))
    }

    /// `{a, eta(a), eta(eta(a))}` in that order.
    pub fn orbit(&self, field: &Field, a: Elem) -> [Elem; 3] {
        let e1 = self.eta(field, a);
        [a, e1, self.eta(field, e1)]
    }
}

pub fn big_m(field: &Field, cache: &StructureCache, a: Elem) -> Elem {
    cache.big_m(field, a)
}

pub fn eta(field: &Field, cache: &StructureCache, a: Elem) -> Elem {
    cache.eta(field, a)
}

pub fn orbit(field: &Field, cache: &StructureCache, a: Elem) -> Result<[Elem; 3]> {
    if a.is_zero() {
        return Err(Error::Precondition("orbit of 0 is not defined".into()));
    }
    Ok(cache.orbit(field, a))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub tag: String,
    pub pass: bool,
}

fn check(tag: &str, pass: bool) -> IdentityCheck {
    IdentityCheck {
        tag: tag.to_string(),
        pass,
    }
}

/// The coefficient relations that hold for every tuple: the theta norm
/// balance and the four linear relations between `c_i` and the thetas.
pub fn coefficient_relations(field: &Field, c: &Coeffs, t: &Thetas) -> Vec<IdentityCheck> {
    let [c0, c1, c2, c3] = c.0;
    let (t1, t2, t3, t4) = (t.t1, t.t2, t.t3, t.t4);
    let t2b = field.conj(t2);
    let t3b = field.conj(t3);
    let mul = |x, y| field.mul(x, y);
    vec![
        check("norm_balance", t.norm_balance_holds(field)),
        check("c0_relation", (mul(c0, t4) + mul(c1, t2b) + mul(c2, t3)).is_zero()),
        check("c1_relation", (mul(c0, t2) + mul(c1, t1 + t4) + mul(c3, t3)).is_zero()),
        check("c2_relation", (mul(c0, t3b) + mul(c2, t1 + t4) + mul(c3, t2b)).is_zero()),
        check("c3_relation", (mul(c1, t3b) + mul(c2, t2) + mul(c3, t4)).is_zero()),
    ]
}

/// `eta2(z)^(2^k) (c2 conj(eta z) + c3 eta z) + conj(eta2 z)^(2^k) (c0 conj(eta z) + c1 eta z)`,
/// which reproduces `f_c(z)` on Gamma0.
pub fn eta_reconstruction(field: &Field, cache: &StructureCache, z: Elem) -> Elem {
    let [c0, c1, c2, c3] = cache.coeffs.0;
    let [_, e1, e2] = cache.orbit(field, z);
    let e1b = field.conj(e1);
    field.mul(
        field.frob_k(e2),
        field.mul(c2, e1b) + field.mul(c3, e1),
    ) + field.mul(
        field.frob_k(field.conj(e2)),
        field.mul(c0, e1b) + field.mul(c1, e1),
    )
}

/// Evaluates the Gamma identities for `c`: the coefficient relations, the
/// xi-branch formula `t2 t2b / t1^2 = xib + xi^2 + Tr_1^m(t2 t2b / t1^2)`, and
/// on Gamma0 the eta reconstruction of `f_c` at each point in `z_points`.
pub fn identity_suite(field: &Field, c: &Coeffs, z_points: &[Elem]) -> Result<Vec<IdentityCheck>> {
    let cache = StructureCache::new(field, c)?;
    let t = &cache.thetas;
    let mut out = coefficient_relations(field, c, t);

    let ratio = field.div(field.norm(t.t2), field.square(t.t1));
    let tr = field.subfield_trace_unchecked(ratio);
    let xi = cache.xi;
    let rhs = field.conj(xi) + field.square(xi) + Elem(tr as u32);
    out.push(check("xi_branch", ratio == rhs));

    if cache.verdict == Verdict::Gamma0 {
        let ok = z_points
            .iter()
            .filter(|z| !z.is_zero())
            .all(|&z| eta_reconstruction(field, &cache, z) == eval_f(field, c, z));
        out.push(check("eta_reconstruction", ok));
    }
    Ok(out)
}

/// Rewrites `f_c` with even `k` as a family member with odd exponent
/// `k' = m - k (mod n)`: `f_c(x)^(2^k') = f_{c'}(x)` with
/// `c' = (c2, c0, c3, c1)^(2^k')`.
pub fn even_k_reduce(field: &Field, c: &Coeffs, k: u32) -> Result<(Coeffs, u32)> {
    let m = field.m() as i64;
    let n = field.n() as i64;
    if !k.is_multiple_of(2) {
        return Err(Error::Precondition(format!("even_k_reduce needs even k, got {k}")));
    }
    let g = {
        let (mut a, mut b) = (m as u64, k as u64);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    if g != 1 {
        return Err(Error::Precondition(format!("gcd(m, k) must be 1, got gcd({m}, {k}) = {g}")));
    }
    let kp = (m - k as i64).rem_euclid(n) as u32;
    let [c0, c1, c2, c3] = c.0;
    let p = |x| field.frob(x, kp);
    Ok((Coeffs([p(c2), p(c0), p(c3), p(c1)]), kp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: u32) -> Elem {
        Elem(v)
    }

    fn gf64() -> Field {
        Field::new(3, 1).unwrap()
    }

    #[test]
    fn monomial_case_is_x17() {
        let f = gf64();
        let c = Coeffs::from_bits([0, 1, 0, 0]);
        for x in f.elements() {
            assert_eq!(eval_f(&f, &c, x), f.pow(x, 17));
        }
        let basis = FamilyBasis::new(&f, 1);
        assert_eq!(basis.table(&f, &c), f.elements().map(|x| f.pow(x, 17)).collect::<Vec<_>>());
    }

    #[test]
    fn eval_at_zero() {
        let f = gf64();
        let c = Coeffs::from_bits([0x13, 0x2a, 0x07, 0x3f]);
        assert_eq!(eval_f(&f, &c, Elem::ZERO), Elem::ZERO);
    }

    #[test]
    fn f_is_quadratic() {
        let f = gf64();
        let c = Coeffs::from_bits([0x13, 0x2a, 0x07, 0x3f]);
        for a in f.elements().step_by(7) {
            let h = |x| eval_f(&f, &c, x + a) + eval_f(&f, &c, x) + eval_f(&f, &c, a);
            for x in f.elements() {
                for y in f.elements().step_by(11) {
                    assert_eq!(h(x + y), h(x) + h(y));
                }
            }
        }
    }

    #[test]
    fn theta_examples() {
        let f = gf64();
        let t = Thetas::compute(&f, &Coeffs::from_bits([1, 0, 0, 0]));
        assert_eq!((t.t1, t.t2, t.t3, t.t4), (e(1), e(0), e(0), e(0)));
        let t = Thetas::compute(&f, &Coeffs::from_bits([0, 1, 0, 0]));
        assert_eq!((t.t1, t.t2, t.t3, t.t4), (e(1), e(0), e(0), e(1)));
        let t = Thetas::compute(&f, &Coeffs::from_bits([1, 1, 1, 1]));
        assert_eq!(t.t1, Elem::ZERO);
    }

    #[test]
    fn classify_examples() {
        let f = gf64();
        let g = classify(&f, &Coeffs::from_bits([1, 0, 0, 0]));
        assert_eq!(g.verdict, Verdict::NotGamma);
        assert_eq!(g.reasons, vec![Reason::TraceTheta4]);
        let g = classify(&f, &Coeffs::from_bits([0, 1, 0, 0]));
        assert_eq!(g.verdict, Verdict::Gamma0);
        let g = classify(&f, &Coeffs::from_bits([1, 1, 1, 1]));
        assert_eq!(g.reasons, vec![Reason::Theta1Zero]);
        let json = serde_json::to_string(&classify(&f, &Coeffs::from_bits([1, 0, 0, 0]))).unwrap();
        assert_eq!(json, r#"{"verdict":"NotGamma","reasons":["trace_theta4"]}"#);
    }

    #[test]
    fn xi_for_monomial() {
        let f = gf64();
        let cache = StructureCache::new(&f, &Coeffs::from_bits([0, 1, 0, 0])).unwrap();
        let xi = cache.xi;
        assert_eq!(f.square(xi) + xi, Elem::ONE);
        assert!(!f.in_subfield(xi));
        assert_eq!(f.conj(xi), xi + Elem::ONE);
        for a in f.nonzero_elements() {
            assert_eq!(cache.big_m(&f, a), f.norm(a));
            assert_eq!(cache.eta(&f, a), f.mul(xi, a));
            let mut orb = cache.orbit(&f, a).to_vec();
            orb.sort();
            let mut want = vec![a, f.mul(xi, a), f.mul(xi + Elem::ONE, a)];
            want.sort();
            assert_eq!(orb, want);
        }
        assert_eq!(cache.eta(&f, Elem::ZERO), Elem::ZERO);
    }

    #[test]
    fn identity_suite_on_monomial() {
        let f = gf64();
        let zs: Vec<Elem> = f.nonzero_elements().collect();
        let checks = identity_suite(&f, &Coeffs::from_bits([0, 1, 0, 0]), &zs).unwrap();
        assert_eq!(checks.len(), 7);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        assert!(identity_suite(&f, &Coeffs::from_bits([1, 0, 0, 0]), &zs).is_err());
    }

    #[test]
    fn norm_balance_everywhere_and_only_for_the_right_t4() {
        // The other candidates for the second norm in t4 (c0, c3, c1) break
        // the identity.
        let f = gf64();
        let mut wrong_fails = [false; 3];
        for code in (0u32..1 << 24).step_by(997) {
            let c = Coeffs::decode(code as u128, 6);
            let t = Thetas::compute(&f, &c);
            assert!(t.norm_balance_holds(&f), "{c}");
            let n: Vec<Elem> = c.0.iter().map(|&x| f.norm(x)).collect();
            for (i, alt) in [n[1] + n[0], n[1] + n[3], Elem::ZERO].into_iter().enumerate() {
                let tt = Thetas { t4: alt, ..t };
                wrong_fails[i] |= !tt.norm_balance_holds(&f);
            }
        }
        assert!(wrong_fails.iter().all(|&x| x));
    }

    #[test]
    fn tuple_parsing() {
        let c: Coeffs = "0:1:0:0".parse().unwrap();
        assert_eq!(c, Coeffs::from_bits([0, 1, 0, 0]));
        let c: Coeffs = "3f:a:0:12".parse().unwrap();
        assert_eq!(c.to_string(), "3f:a:0:12");
        assert!("1:2:3".parse::<Coeffs>().is_err());
        assert!("1:2:3:x".parse::<Coeffs>().is_err());
        assert_eq!(Coeffs::decode(c.encode(6), 6), c);
    }

    #[test]
    fn even_k_examples() {
        let f = gf64();
        let (cp, kp) = even_k_reduce(&f, &Coeffs::from_bits([0, 1, 0, 0]), 2).unwrap();
        assert_eq!(kp, 1);
        assert_eq!(cp, Coeffs::from_bits([0, 0, 0, 1]));
        for x in f.elements() {
            let lhs = f.frob(eval_with_k(&f, &Coeffs::from_bits([0, 1, 0, 0]), 2, x), kp);
            assert_eq!(lhs, eval_with_k(&f, &cp, kp, x));
        }
        assert!(even_k_reduce(&f, &Coeffs::ZERO, 1).is_err());
        assert!(even_k_reduce(&f, &Coeffs::ZERO, 6).is_err());
    }
}
