//! Arithmetic in GF(2^n) with n = 2m, m odd.
//!
//! Elements use the polynomial basis: bit `i` of [`Elem`] is the coefficient
//! of `x^i`. The modulus is the numerically smallest irreducible polynomial of
//! degree `n`. Multiplication goes through log/antilog tables when `n <= 20`
//! and falls back to carry-less multiplication otherwise; the carry-less path
//! also builds and cross-checks the tables.
//!
//! The subfield GF(2^m) is the fixed field of the conjugation
//! `x -> x^(2^m)`, applied through a precomputed GF(2) matrix.

use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{AffineSpace, LinearSystem};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 24;
const MAX_TABLE_DEGREE: u32 = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Lowercase hex, most significant nibble first, no padding.
    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Elem> {
        let t = s.trim();
        let t = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        u32::from_str_radix(t, 16)
            .map(Elem)
            .map_err(|_| Error::Parse(format!("invalid hex field element {s:?}")))
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

// addition in characteristic 2 is XOR
impl Add for Elem {
    type Output = Elem;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Elem) -> Elem {
        Elem(self.0 ^ rhs.0)
    }
}

impl AddAssign for Elem {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Elem) {
        self.0 ^= rhs.0;
    }
}

impl Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Elem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Elem::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Polynomials over GF(2) packed in a u64
// ---------------------------------------------------------------------------

fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn clmul(a: u64, b: u64) -> u64 {
    let mut r = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    r
}

fn poly_rem(mut a: u64, p: u64) -> u64 {
    let dp = degree(p);
    while a != 0 && degree(a) >= dp {
        a ^= p << (degree(a) - dp);
    }
    a
}

fn poly_mulmod(a: u64, b: u64, p: u64) -> u64 {
    poly_rem(clmul(a, b), p)
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test: `p` of degree `d` is irreducible iff
/// `gcd(x^(2^i) - x mod p, p) = 1` for `i = 1..=d/2`.
pub fn is_irreducible(p: u64) -> bool {
    let d = degree(p);
    if d < 1 {
        return false;
    }
    let mut xp = 0b10u64; // x
    for _ in 1..=d / 2 {
        xp = poly_mulmod(xp, xp, p);
        if poly_gcd(p, xp ^ 0b10) != 1 {
            return false;
        }
    }
    true
}

/// Numerically smallest irreducible polynomial of exact degree `n`.
pub fn smallest_irreducible(n: u32) -> u64 {
    let lo = 1u64 << n;
    (lo..lo << 1)
        .find(|&p| is_irreducible(p))
        .expect("an irreducible polynomial exists in every degree")
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(d);
            while v.is_multiple_of(d) {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo `modulus` via the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, modulus: u64) -> Option<u64> {
    let (mut r0, mut r1) = (modulus as i128, (a % modulus) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(modulus as i128) as u64)
}

#[derive(Clone, Debug)]
struct LogTables {
    log: Vec<u32>,
    // doubled so that log x + log y never needs a reduction
    exp: Vec<u32>,
}

/// Description of a field instance as it appears in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub m: u32,
    pub k: u32,
    pub n: u32,
    pub modulus_hex: String,
    pub generator: String,
    pub tables: bool,
}

/// GF(2^n), n = 2m, together with the Frobenius exponent `k` used by the
/// quadrinomial family. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Field {
    m: u32,
    k: u32,
    k_input: u32,
    n: u32,
    modulus: u64,
    order: u64,
    generator: Elem,
    tables: Option<LogTables>,
    conj_cols: Vec<u32>,
    trace_mask: u32,
    inv_2k_minus_1: u64,
}

impl Field {
    /// Validates `m` odd, `k` odd and `gcd(m, k) = 1`, then builds the field.
    pub fn new(m: u32, k: u32) -> Result<Field> {
        if m == 0 || m.is_multiple_of(2) {
            return Err(Error::Params(format!("m must be odd and positive, got {m}")));
        }
        if 2 * m > MAX_DEGREE {
            return Err(Error::Params(format!(
                "n = 2m = {} exceeds the supported maximum {MAX_DEGREE}",
                2 * m
            )));
        }
        if k == 0 || k.is_multiple_of(2) {
            return Err(Error::Params(format!(
                "k must be odd, got {k}; for even k with gcd(m, k) = 1 rewrite f with k' = m - k \
                 (see `even_k_reduce`)"
            )));
        }
        let g = gcd_u64(m as u64, k as u64);
        if g != 1 {
            return Err(Error::Params(format!("gcd(m, k) must be 1, got gcd({m}, {k}) = {g}")));
        }
        Ok(Field::build(m, k))
    }

    fn build(m: u32, k_input: u32) -> Field {
        let n = 2 * m;
        let k = k_input % n;
        let modulus = smallest_irreducible(n);
        let order = (1u64 << n) - 1;

        let clpow = |base: u64, mut e: u64| {
            let mut r = 1u64;
            let mut b = base;
            while e > 0 {
                if e & 1 == 1 {
                    r = poly_mulmod(r, b, modulus);
                }
                b = poly_mulmod(b, b, modulus);
                e >>= 1;
            }
            r
        };

        let factors = prime_factors(order);
        let generator = (2u64..=order)
            .find(|&g| factors.iter().all(|&p| clpow(g, order / p) != 1))
            .map(|g| Elem(g as u32))
            .unwrap_or(Elem::ONE); // n = 1 never happens since m >= 1

        let tables = (n <= MAX_TABLE_DEGREE).then(|| {
            let size = 1usize << n;
            let mut log = vec![0u32; size];
            let mut exp = vec![0u32; 2 * size];
            let mut v = 1u64;
            for i in 0..order as usize {
                exp[i] = v as u32;
                exp[i + order as usize] = v as u32;
                log[v as usize] = i as u32;
                v = poly_mulmod(v, generator.0 as u64, modulus);
            }
            LogTables { log, exp }
        });

        let conj_cols: Vec<u32> = (0..n)
            .map(|i| clpow(1u64 << i, 1u64 << m) as u32)
            .collect();

        let mut field = Field {
            m,
            k,
            k_input,
            n,
            modulus,
            order,
            generator,
            tables,
            conj_cols,
            trace_mask: 0,
            inv_2k_minus_1: mod_inverse((1u64 << k) - 1, order)
                .expect("gcd(2^k - 1, 2^n - 1) = 2^gcd(k, n) - 1 = 1"),
        };
        field.trace_mask = (0..n)
            .filter(|&i| field.trace_by_definition(Elem(1 << i)) == Elem::ONE)
            .fold(0u32, |acc, i| acc | (1 << i));
        field
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Frobenius exponent reduced modulo `n`.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Frobenius exponent as supplied by the caller.
    pub fn k_input(&self) -> u32 {
        self.k_input
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Field size `2^n`.
    pub fn size(&self) -> usize {
        1usize << self.n
    }

    /// Modulus bitmask, including the `x^n` term.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn info(&self) -> FieldInfo {
        FieldInfo {
            m: self.m,
            k: self.k_input,
            n: self.n,
            modulus_hex: format!("{:x}", self.modulus),
            generator: self.generator.to_hex(),
            tables: self.has_tables(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..1u32 << self.n).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..1u32 << self.n).map(Elem)
    }

    pub fn contains(&self, x: Elem) -> bool {
        (x.0 as u64) >> self.n == 0
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        x + y
    }

    /// Carry-less product reduced modulo the field polynomial.
    pub fn mul_reference(&self, x: Elem, y: Elem) -> Elem {
        Elem(poly_mulmod(x.0 as u64, y.0 as u64, self.modulus) as u32)
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        match &self.tables {
            Some(t) => {
                if x.0 == 0 || y.0 == 0 {
                    Elem::ZERO
                } else {
                    Elem(t.exp[(t.log[x.0 as usize] + t.log[y.0 as usize]) as usize])
                }
            }
            None => self.mul_reference(x, y),
        }
    }

    #[inline]
    pub fn square(&self, x: Elem) -> Elem {
        self.mul(x, x)
    }

    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if x.is_zero() {
            return Elem::ZERO;
        }
        if let Some(t) = &self.tables {
            let l = t.log[x.0 as usize] as u64;
            let idx = (l as u128 * (e % self.order) as u128 % self.order as u128) as usize;
            return Elem(t.exp[idx]);
        }
        let mut r = Elem::ONE;
        let mut b = x;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse, computed as `x^(2^n - 2)`.
    pub fn inv(&self, x: Elem) -> Result<Elem> {
        if x.is_zero() {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        Ok(self.pow(x, self.order - 1))
    }

    /// `x / y`; panics on `y = 0`. For hot paths where the divisor is known
    /// nonzero.
    #[inline]
    pub fn div(&self, x: Elem, y: Elem) -> Elem {
        assert!(!y.is_zero(), "division by zero in GF(2^{})", self.n);
        if x.is_zero() {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let l = t.log[x.0 as usize] + self.order as u32 - t.log[y.0 as usize];
                Elem(t.exp[l as usize])
            }
            None => self.mul(x, self.pow(y, self.order - 1)),
        }
    }

    /// `x^(2^j)` with `j` reduced modulo `n`.
    #[inline]
    pub fn frob(&self, x: Elem, j: u32) -> Elem {
        let j = j % self.n;
        if j == 0 || x.is_zero() {
            return x;
        }
        match &self.tables {
            Some(t) => {
                let l = ((t.log[x.0 as usize] as u64) << j) % self.order;
                Elem(t.exp[l as usize])
            }
            None => (0..j).fold(x, |acc, _| self.mul(acc, acc)),
        }
    }

    /// `x^(2^k)` for the field's Frobenius exponent.
    #[inline]
    pub fn frob_k(&self, x: Elem) -> Elem {
        self.frob(x, self.k)
    }

    /// `x -> x^(2^m)`, the involution fixing GF(2^m).
    #[inline]
    pub fn conj(&self, x: Elem) -> Elem {
        let mut v = x.0;
        let mut out = 0u32;
        let mut i = 0;
        while v != 0 {
            if v & 1 == 1 {
                out ^= self.conj_cols[i];
            }
            v >>= 1;
            i += 1;
        }
        Elem(out)
    }

    /// `x * conj(x)`, the norm down to GF(2^m).
    #[inline]
    pub fn norm(&self, x: Elem) -> Elem {
        self.mul(x, self.conj(x))
    }

    pub fn sqrt(&self, x: Elem) -> Elem {
        self.frob(x, self.n - 1)
    }

    pub fn in_subfield(&self, x: Elem) -> bool {
        self.conj(x) == x
    }

    fn trace_by_definition(&self, x: Elem) -> Elem {
        (0..self.n).fold(Elem::ZERO, |acc, i| acc + self.frob(x, i))
    }

    /// Absolute trace `Tr_1^n(x)` as a bit.
    #[inline]
    pub fn abs_trace(&self, x: Elem) -> u8 {
        ((x.0 & self.trace_mask).count_ones() & 1) as u8
    }

    /// Relative trace `Tr_1^m(x)` of a subfield element.
    pub fn subfield_trace(&self, x: Elem) -> Result<u8> {
        if !self.in_subfield(x) {
            return Err(Error::Domain(format!(
                "{x} is not in the subfield GF(2^{})",
                self.m
            )));
        }
        Ok(self.subfield_trace_unchecked(x))
    }

    /// `Tr_1^m` without the membership check; the result is only meaningful
    /// for subfield elements.
    #[inline]
    pub fn subfield_trace_unchecked(&self, x: Elem) -> u8 {
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.m {
            acc += y;
            y = self.square(y);
        }
        (acc.0 & 1) as u8
    }

    /// The unique `y` with `y^(2^k - 1) = x`.
    pub fn root_2k_minus_1(&self, x: Elem) -> Elem {
        self.pow(x, self.inv_2k_minus_1)
    }

    /// Inverse of `2^k - 1` modulo `2^n - 1`.
    pub fn inv_2k_minus_1(&self) -> u64 {
        self.inv_2k_minus_1
    }

    /// Column images `L(x^i)` of a GF(2)-linear map.
    pub fn linear_columns(&self, map: impl Fn(Elem) -> Elem) -> Vec<u32> {
        (0..self.n).map(|i| map(Elem(1 << i)).0).collect()
    }

    /// Evaluates the linearized polynomial `sum coeffs[j] * x^(2^j)`.
    pub fn eval_linearized(&self, coeffs: &[(u32, Elem)], x: Elem) -> Elem {
        coeffs
            .iter()
            .fold(Elem::ZERO, |acc, &(j, c)| acc + self.mul(c, self.frob(x, j)))
    }

    /// All solutions of `sum coeffs[j] * x^(2^j) = rhs`, as an affine space.
    /// `None` means no solution. The all-zero operator with `rhs = 0` yields
    /// the whole field (check [`AffineSpace::is_whole_space`] before
    /// enumerating).
    pub fn solve_linearized(&self, coeffs: &[(u32, Elem)], rhs: Elem) -> Option<AffineSpace> {
        let cols = self.linear_columns(|x| self.eval_linearized(coeffs, x));
        LinearSystem::from_columns(&cols).solve(rhs)
    }

    /// All roots of `x^2 + a x + b`, sorted.
    pub fn solve_quadratic(&self, a: Elem, b: Elem) -> Vec<Elem> {
        if a.is_zero() {
            return vec![self.sqrt(b)];
        }
        self.solve_linearized(&[(1, Elem::ONE), (0, a)], b)
            .map(|s| s.to_sorted_vec())
            .unwrap_or_default()
    }

    /// All roots of `x^(2^j) + x = a`, sorted. Requires `gcd(j, n) = 1`.
    pub fn solve_artin_schreier(&self, a: Elem, j: u32) -> Result<Vec<Elem>> {
        if gcd_u64(j as u64, self.n as u64) != 1 {
            return Err(Error::Precondition(format!(
                "Artin-Schreier exponent needs gcd(k, n) = 1, got gcd({j}, {})",
                self.n
            )));
        }
        Ok(self
            .solve_linearized(&[(j, Elem::ONE), (0, Elem::ONE)], a)
            .map(|s| s.to_sorted_vec())
            .unwrap_or_default())
    }
}
