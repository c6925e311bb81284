//! Random generation of [`Value`]s under a size budget.
//!
//! Rules, all deterministic in `(ir, seed, size)`:
//! - integers with both bounds finite are uniform over the whole range;
//!   otherwise the range is intersected with `[-8·size, 8·size]`, and when
//!   that is empty the draw anchors at the finite bound (`[lo, lo + 8·size]`);
//! - floats are uniform over the range clipped the same way, with a quarter
//!   of the mass on the special points `0`, `lo`, `hi` (when in range);
//!   open endpoints are redrawn a bounded number of times;
//! - list lengths are uniform over `[min_len, min(max_len, min_len + size)]`;
//! - enumerations and choices pick uniformly.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conform::float_in_range;
use crate::ir::{path_id, Bound, Scalar, TypeIr};
use crate::value::Value;

/// Magnitude scale per unit of size for unbounded numeric ranges.
pub const SCALE: i128 = 8;

const FLOAT_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenContext {
    pub seed: u64,
    size: u32,
}

impl GenContext {
    /// Sizes below 1 are raised to 1.
    pub fn new(seed: u64, size: u32) -> Self {
        GenContext {
            seed,
            size: size.max(1),
        }
    }

    pub fn size(&self) -> u32 {
        self.size
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("no value satisfies the range at {0}")]
    ContradictoryRange(String),
}

/// Draws one value conforming to `ir`.
pub fn generate(ir: &TypeIr, ctx: GenContext) -> Result<Value, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    Generator {
        rng: &mut rng,
        size: ctx.size as i128,
    }
    .value(ir, "root")
}

/// Size of the `i`-th test (1-based): grows by one per test up to the cap.
pub fn size_for_test(i: u64, max_size: u32) -> u32 {
    i.min(max_size as u64).max(1) as u32
}

/// Per-test seed: `splitmix64(run_seed ^ splitmix64(index))`, so a single
/// test can be replayed from the run seed and its index.
pub fn mix_seed(run_seed: u64, index: u64) -> u64 {
    splitmix64(run_seed ^ splitmix64(index))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Generator<'r> {
    rng: &'r mut ChaCha8Rng,
    size: i128,
}

impl Generator<'_> {
    fn value(&mut self, ir: &TypeIr, at: &str) -> Result<Value, GenError> {
        let empty = || GenError::ContradictoryRange(at.to_string());
        match ir {
            TypeIr::Scalar(Scalar::Integer { min, max, .. }) => {
                let (lo, hi) = self.int_range(*min, *max).ok_or_else(empty)?;
                Ok(Value::Int(self.rng.gen_range(lo..=hi)))
            }
            TypeIr::Scalar(Scalar::Float {
                min,
                max,
                min_open,
                max_open,
                ..
            }) => self
                .float(*min, *max, *min_open, *max_open)
                .map(Value::Float)
                .ok_or_else(empty),
            TypeIr::Scalar(Scalar::Boolean { .. }) => Ok(Value::Bool(self.rng.gen_bool(0.5))),
            TypeIr::Enumeration(values) => {
                if values.is_empty() {
                    return Err(empty());
                }
                let i = self.rng.gen_range(0..values.len());
                Ok(Value::Text(values[i].clone()))
            }
            TypeIr::ListOf {
                min_len,
                max_len,
                inner,
            } => {
                let cap = min_len.saturating_add(self.size as u64);
                let hi = max_len.finite().map_or(cap, |m| m.min(cap));
                if hi < *min_len {
                    return Err(empty());
                }
                let len = self.rng.gen_range(*min_len..=hi);
                let items = (0..len).map(|_| self.value(inner, at)).collect::<Result<Vec<_>, _>>()?;
                Ok(Value::List(items))
            }
            TypeIr::TupleOf(fields) => fields
                .iter()
                .map(|f| Ok((f.local_name.clone(), self.value(&f.ir, &path_id(f))?)))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Tuple),
            TypeIr::ChoiceOf(alts) => {
                if alts.is_empty() {
                    return Err(empty());
                }
                let i = self.rng.gen_range(0..alts.len());
                let inner = self.value(&alts[i].ir, &path_id(&alts[i]))?;
                Ok(Value::Choice(i, Box::new(inner)))
            }
        }
    }

    fn int_range(&self, min: Bound<i128>, max: Bound<i128>) -> Option<(i128, i128)> {
        let reach = self.size.saturating_mul(SCALE);
        let (lo, hi) = match (min, max) {
            (Bound::Finite(lo), Bound::Finite(hi)) => (lo, hi),
            (Bound::Infinite, Bound::Infinite) => (-reach, reach),
            (Bound::Finite(lo), Bound::Infinite) => {
                if lo <= reach {
                    (lo.max(-reach), reach)
                } else {
                    (lo, lo.saturating_add(reach))
                }
            }
            (Bound::Infinite, Bound::Finite(hi)) => {
                if hi >= -reach {
                    (-reach, hi.min(reach))
                } else {
                    (hi.saturating_sub(reach), hi)
                }
            }
        };
        (lo <= hi).then_some((lo, hi))
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    fn float(&mut self, min: Bound<f64>, max: Bound<f64>, min_open: bool, max_open: bool) -> Option<f64> {
        let reach = (self.size * SCALE) as f64;
        let (lo, hi) = match (min, max) {
            (Bound::Finite(lo), Bound::Finite(hi)) => {
                let (a, b) = (lo.max(-reach), hi.min(reach));
                if a <= b {
                    (a, b)
                } else if lo > reach {
                    (lo, (lo + reach).min(hi))
                } else {
                    ((hi - reach).max(lo), hi)
                }
            }
            (Bound::Infinite, Bound::Infinite) => (-reach, reach),
            (Bound::Finite(lo), Bound::Infinite) => {
                if lo <= reach {
                    (lo.max(-reach), reach)
                } else {
                    (lo, lo + reach)
                }
            }
            (Bound::Infinite, Bound::Finite(hi)) => {
                if hi >= -reach {
                    (-reach, hi.min(reach))
                } else {
                    (hi - reach, hi)
                }
            }
        };
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return None;
        }
        let admissible = |x: f64| float_in_range(x, min, max, min_open, max_open);
        let mut specials: Vec<f64> = Vec::new();
        for candidate in [Some(0.0), min.finite(), max.finite()].into_iter().flatten() {
            if admissible(candidate) && !specials.contains(&candidate) {
                specials.push(candidate);
            }
        }
        if !specials.is_empty() && self.rng.gen_bool(0.25) {
            return Some(specials[self.rng.gen_range(0..specials.len())]);
        }
        for _ in 0..FLOAT_RETRIES {
            let x = if (hi - lo).is_finite() {
                self.rng.gen_range(lo..=hi)
            } else {
                2.0 * self.rng.gen_range(lo / 2.0..=hi / 2.0)
            };
            if admissible(x) {
                return Some(x);
            }
        }
        // The clipped interval may have collapsed onto an exclusive bound
        // when the bound is large next to the size reach.
        [lo.next_up(), hi.next_down(), lo + (hi - lo) / 2.0]
            .into_iter()
            .find(|x| admissible(*x))
    }
}
