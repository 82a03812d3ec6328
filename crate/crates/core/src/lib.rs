//! Rigorous kernels for the repulsive family `f(x) = 1/(1 + x^a)`: interval
//! arithmetic, lattice energies and the optimal spacing, the interpolating
//! auxiliary function, branch-and-bound certificates and a periodic particle
//! relaxation.
#![no_std]
// `!(x > 0.0)` guards also reject NaN; `div` is fallible so it is not `Div`
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

extern crate alloc;

pub mod auxfn;
pub mod certify;
pub mod interval;
pub mod potential;
pub mod simulate;

pub use interval::{Interval, IntervalError};
pub use potential::{PotentialContext, PotentialError};
