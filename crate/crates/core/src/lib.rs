//! Construction and analysis of the quadrinomial S-box family
//!
//! ```text
//! f_c(x) = c0 xb^(2^k+1) + c1 xb^(2^k) x + c2 xb x^(2^k) + c3 x^(2^k+1),   xb = x^(2^m)
//! ```
//!
//! over GF(2^2m) with `m`, `k` odd and `gcd(m, k) = 1`.
//!
//! * [`field`]: GF(2^n) arithmetic, traces, linearized and Artin-Schreier solvers.
//! * [`family`]: theta vectors, the Gamma / Gamma0 / Gamma1 classification, the
//!   structural constant xi, `M(a)`, the order-3 map eta and its orbits.
//! * [`sbox`]: lookup tables, permutation test, DDT and BCT (two independent methods).
//! * [`machinery`]: the difference-equation reduction and per-tuple theorem verdicts.
//! * [`search`]: exhaustive and sampled campaigns, baselines, JSONL reports.
//! * [`suites`]: self-check suites behind `quadbct verify`.

pub mod error;
pub mod family;
pub mod field;
pub mod gf2;
pub mod machinery;
pub mod sbox;
pub mod search;
pub mod suites;

pub use error::{Error, Result};
pub use family::{classify, Coeffs, GammaClass, StructureCache, Thetas, Verdict};
pub use field::{Elem, Field};
pub use gf2::AffineSpace;
pub use sbox::{BctMethod, BctSummary, DdtSummary, SboxTable};
