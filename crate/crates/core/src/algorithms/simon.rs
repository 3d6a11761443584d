//! Simon's algorithm over `Z2^n`: sample vectors orthogonal to the hidden
//! mask until they span its orthogonal complement, then read the mask off
//! the nullspace.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::kernel::{hadamard_measure, simon_sample, SimonOracle, TwoTermState};

/// Recovered mask and the number of samples it took.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonResult {
    pub z: BitVector,
    pub samples: usize,
}

/// Draws vectors from `source` until they have rank `n - 1` or `budget`
/// draws are spent; returns the single nonzero nullspace vector.
pub(crate) fn recover_mask<R, F>(n: usize, budget: usize, stage: &'static str, mut source: F, rng: &mut R) -> Result<SimonResult>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<BitVector>,
{
    let needed = n - 1;
    let mut rows: Vec<BitVector> = Vec::with_capacity(n);
    let mut rank = 0;
    let mut samples = 0;
    while rank < needed {
        if samples == budget {
            return Err(Error::RankDeficit {
                stage,
                rank,
                needed,
                samples,
            });
        }
        let y = source(rng)?;
        samples += 1;
        if y.is_zero() {
            continue;
        }
        rows.push(y);
        let r = BitMatrix::from_rows(n, &rows)?.rank();
        if r == rank {
            rows.pop();
        }
        rank = r;
    }
    let basis = if rows.is_empty() {
        vec![BitVector::ones(n)]
    } else {
        BitMatrix::from_rows(n, &rows)?.null_space_basis()
    };
    match basis.as_slice() {
        [z] => Ok(SimonResult { z: z.clone(), samples }),
        _ => Err(Error::Inconsistent(stage)),
    }
}

/// Classic Simon with a budget of `n + slack` samples.
pub fn simon_z2n<R: Rng + ?Sized>(o: &SimonOracle, slack: usize, rng: &mut R) -> Result<SimonResult> {
    let n = o.n();
    recover_mask(n, n + slack, "simon", |rng| Ok(simon_sample(o, rng)), rng)
}

/// Recovers `t` from states `(|x⟩ + |x+t⟩)/√2` drawn from `states`, by
/// measuring each in the Hadamard basis.
pub fn simon_finish<R, F>(n: usize, budget: usize, mut states: F, rng: &mut R) -> Result<SimonResult>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<TwoTermState>,
{
    recover_mask(
        n,
        budget,
        "simon finish",
        |rng| {
            let st = states(rng)?;
            Ok(hadamard_measure(&st, rng))
        },
        rng,
    )
}
