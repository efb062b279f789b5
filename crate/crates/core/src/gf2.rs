//! Linear algebra over GF(2) on bit-packed vectors of length at most 32.
//!
//! A linear map `GF(2)^n -> GF(2)^n` is given by its column images
//! `cols[i] = L(e_i)`. Elimination keeps, for every pivot, the combination of
//! input basis vectors that produced it, so both preimages and the kernel fall
//! out of a single pass.

use crate::field::Elem;

/// The solution set `offset + span(basis)` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub offset: Elem,
    pub basis: Vec<Elem>,
    n: u32,
}

impl AffineSpace {
    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    /// Number of points, `2^dim`.
    pub fn len(&self) -> u64 {
        1u64 << self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when the space is all of GF(2)^n (the zero operator with zero rhs).
    pub fn is_whole_space(&self) -> bool {
        self.dim() == self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.len()).map(move |mask| {
            let mut v = self.offset.0;
            for (i, b) in self.basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    v ^= b.0;
                }
            }
            Elem(v)
        })
    }

    /// All points, sorted ascending by integer encoding.
    pub fn to_sorted_vec(&self) -> Vec<Elem> {
        let mut v: Vec<Elem> = self.iter().collect();
        v.sort_unstable();
        v
    }
}

/// Row-reduced form of a linear map on GF(2)^n.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    n: u32,
    // (pivot image, input combination), pivot keyed by its highest set bit
    pivots: Vec<Option<(u32, u32)>>,
    kernel: Vec<Elem>,
}

impl LinearSystem {
    pub fn from_columns(cols: &[u32]) -> Self {
        let n = cols.len() as u32;
        let mut pivots: Vec<Option<(u32, u32)>> = vec![None; 32];
        let mut kernel = Vec::new();
        for (i, &col) in cols.iter().enumerate() {
            let mut v = col;
            let mut comb = 1u32 << i;
            while v != 0 {
                let hb = 31 - v.leading_zeros();
                match pivots[hb as usize] {
                    Some((pv, pc)) => {
                        v ^= pv;
                        comb ^= pc;
                    }
                    None => {
                        pivots[hb as usize] = Some((v, comb));
                        break;
                    }
                }
            }
            if v == 0 {
                kernel.push(Elem(comb));
            }
        }
        LinearSystem { n, pivots, kernel }
    }

    pub fn rank(&self) -> u32 {
        self.n - self.kernel.len() as u32
    }

    pub fn kernel(&self) -> &[Elem] {
        &self.kernel
    }

    /// Preimage of `rhs`, or `None` when `rhs` is outside the image.
    pub fn solve(&self, rhs: Elem) -> Option<AffineSpace> {
        let mut v = rhs.0;
        let mut comb = 0u32;
        while v != 0 {
            let hb = 31 - v.leading_zeros();
            let (pv, pc) = self.pivots[hb as usize]?;
            v ^= pv;
            comb ^= pc;
        }
        Some(AffineSpace {
            offset: Elem(comb),
            basis: self.kernel.clone(),
            n: self.n,
        })
    }
}
