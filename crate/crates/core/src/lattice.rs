//! Truncated Fourier lattice `{ k ∈ ℤ^d : |k|_∞ ≤ N }` with a fixed
//! lexicographic enumeration.
//!
//! Wave vectors are stored as `[i32; 3]` with trailing components zero in
//! two dimensions. The enumeration is a pure function of `(dim, N)`:
//! components run from `-N` to `N`, the first component varying slowest.
//! Under that order `k` precedes `-k` exactly when `k` is lexicographically
//! negative, which gives a canonical split of the nonzero modes into a
//! stored half and a conjugate-derived half (see [`crate::field`]).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Wave vector; in 2D the third component is always zero.
pub type WaveVec = [i32; 3];

/// Truncated lattice descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedLattice {
    dim: usize,
    n: i32,
}

impl TruncatedLattice {
    /// A lattice in `dim` dimensions (2 or 3) with max-norm cutoff `n >= 1`.
    pub fn new(dim: usize, n: i32) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDim(dim));
        }
        if n < 1 {
            return Err(Error::InvalidConfig(format!(
                "lattice cutoff must be >= 1, got {n}"
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> i32 {
        self.n
    }

    /// Points per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    /// Total number of lattice points including `k = 0`.
    pub fn box_len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    /// Number of stored coefficient slots: the zero mode plus one
    /// representative of every `{k, -k}` pair.
    pub fn half_len(&self) -> usize {
        (self.box_len() - 1) / 2 + 1
    }

    /// Rank of `k` in the lexicographic enumeration of the full box.
    fn box_rank(&self, k: WaveVec) -> usize {
        let side = self.side();
        let mut rank = 0usize;
        for d in 0..self.dim {
            rank = rank * side + (k[d] + self.n) as usize;
        }
        rank
    }

    /// Inverse of [`Self::box_rank`].
    fn unrank(&self, mut rank: usize) -> WaveVec {
        let side = self.side();
        let mut k = [0i32; 3];
        for d in (0..self.dim).rev() {
            k[d] = (rank % side) as i32 - self.n;
            rank /= side;
        }
        k
    }

    /// Whether `k` lies inside the cutoff (trailing components must be zero
    /// in 2D).
    pub fn contains(&self, k: WaveVec) -> bool {
        let mut inside = true;
        for d in 0..3 {
            if d < self.dim {
                inside &= k[d].abs() <= self.n;
            } else {
                inside &= k[d] == 0;
            }
        }
        inside
    }

    /// Signed offset of `k` from the zero mode in the lexicographic order.
    /// Zero for `k = 0`, positive for the stored half, negative for the
    /// conjugate-derived half; `None` outside the lattice.
    ///
    /// Because the enumeration is symmetric, `offset(-k) = -offset(k)`.
    pub fn offset(&self, k: WaveVec) -> Option<isize> {
        if !self.contains(k) {
            return None;
        }
        let center = (self.box_len() - 1) / 2;
        Some(self.box_rank(k) as isize - center as isize)
    }

    /// Wave vector of a stored slot: slot 0 is `k = 0`, slots `1..half_len`
    /// enumerate the lexicographically positive half in order.
    pub fn slot_wavevec(&self, slot: usize) -> WaveVec {
        let center = (self.box_len() - 1) / 2;
        self.unrank(center + slot)
    }

    /// Iterate the full lattice in lexicographic order.
    pub fn iter_box(&self) -> impl Iterator<Item = WaveVec> + '_ {
        (0..self.box_len()).map(|r| self.unrank(r))
    }

    /// Iterate the stored slots (`k = 0` first, then the positive half).
    pub fn iter_slots(&self) -> impl Iterator<Item = (usize, WaveVec)> + '_ {
        (0..self.half_len()).map(|s| (s, self.slot_wavevec(s)))
    }

    /// `|k|²` as an exact integer.
    pub fn norm_sq(k: WaveVec) -> i64 {
        k.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }
}

/// Euclidean length `|k|`.
pub fn wavevec_len(k: WaveVec) -> f64 {
    (TruncatedLattice::norm_sq(k) as f64).sqrt()
}
