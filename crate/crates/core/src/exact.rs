//! Exact rank of integer vector systems by fraction-free elimination.
//!
//! Elimination first runs in checked `i128` arithmetic and restarts over
//! `BigInt` if any intermediate overflows, so results are always exact.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(len: usize) -> Self {
        IntVector(vec![BigInt::zero(); len])
    }

    pub fn from_i64s(vals: &[i64]) -> Self {
        IntVector(vals.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Unit vector `e_i` of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = IntVector::zeros(len);
        v.0[i] = BigInt::from(1);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn scaled(&self, c: i64) -> IntVector {
        IntVector(self.0.iter().map(|v| v * c).collect())
    }
}

trait Scalar: Clone + Sized {
    fn is_zero(&self) -> bool;
    fn one() -> Self;
    /// `(a d − b c) / p`, exact by the Bareiss identity.
    fn step(a: &Self, d: &Self, b: &Self, c: &Self, p: &Self) -> Option<Self>;
}

impl Scalar for i128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn one() -> Self {
        1
    }

    fn step(a: &Self, d: &Self, b: &Self, c: &Self, p: &Self) -> Option<Self> {
        let num = a.checked_mul(*d)?.checked_sub(b.checked_mul(*c)?)?;
        Some(num / p)
    }
}

impl Scalar for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn one() -> Self {
        BigInt::from(1)
    }

    fn step(a: &Self, d: &Self, b: &Self, c: &Self, p: &Self) -> Option<Self> {
        Some((a * d - b * c) / p)
    }
}

/// Bareiss elimination with first-nonzero pivoting; columns with no pivot
/// are skipped. Returns `None` on overflow.
fn bareiss_rank<T: Scalar>(mut rows: Vec<Vec<T>>, ncols: usize) -> Option<usize> {
    let m = rows.len();
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..ncols {
                row[j] = T::step(&pivot_row[c], &row[j], &lead, &pivot_row[j], &prev)?;
            }
            row[c] = T::step(&pivot_row[c], &row[c], &lead, &pivot_row[c], &prev)?;
        }
        prev = pivot_row[c].clone();
        r += 1;
    }
    Some(r)
}

fn check_dims(vectors: &[IntVector]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let n = first.len();
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch(v.len(), n));
        }
    }
    Ok(n)
}

/// Exact rank of the span of `vectors`.
pub fn rank(vectors: &[IntVector]) -> Result<usize> {
    let n = check_dims(vectors)?;
    let small: Option<Vec<Vec<i128>>> = vectors
        .iter()
        .map(|v| v.0.iter().map(ToPrimitive::to_i128).collect())
        .collect();
    if let Some(rows) = small {
        if let Some(r) = bareiss_rank(rows, n) {
            return Ok(r);
        }
    }
    let rows = vectors.iter().map(|v| v.0.clone()).collect();
    Ok(bareiss_rank(rows, n).expect("bigint elimination cannot overflow"))
}

/// Rank computed purely over `BigInt`, skipping the `i128` fast path.
pub fn rank_bigint(vectors: &[IntVector]) -> Result<usize> {
    let n = check_dims(vectors)?;
    let rows = vectors.iter().map(|v| v.0.clone()).collect();
    Ok(bareiss_rank(rows, n).expect("bigint elimination cannot overflow"))
}

/// True iff `v` lies in the rational span of `basis`.
pub fn in_span(v: &IntVector, basis: &[IntVector]) -> Result<bool> {
    if let Some(b) = basis.first() {
        if b.len() != v.len() {
            return Err(Error::DimensionMismatch(v.len(), b.len()));
        }
    }
    let mut all = basis.to_vec();
    let base = rank(&all)?;
    all.push(v.clone());
    Ok(rank(&all)? == base)
}
