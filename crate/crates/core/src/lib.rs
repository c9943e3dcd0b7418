//! Exact Gauss, Ramanujan and hyper-Kloosterman sums over `Z/nZ`, closed forms
//! for the Gauss sums of `GL_r(Z/nZ)` and `SL_r(Z/nZ)`, trace counts, and
//! brute-force enumeration oracles that check every closed form bit-exactly.
//!
//! ```
//! use cyclosum::closed_forms::{gl_gauss_closed, trace_count_thm6};
//! use cyclosum::{AddChar, MultChar};
//!
//! # fn main() -> cyclosum::Result<()> {
//! let chi = MultChar::from_index(3, 1)?;
//! let lambda = AddChar::new(3, 1)?;
//! let g = gl_gauss_closed(2, &chi, &lambda)?;
//! assert_eq!(g.value.as_integer(), Some((-9).into()));
//! assert_eq!(trace_count_thm6(2, 6, 3)?, 36.into());
//! # Ok(())
//! # }
//! ```

pub mod arith;
pub mod cli;
pub mod closed_forms;
pub mod cyclotomic;
mod error;
pub mod expsums;
pub mod matrix_groups;
pub mod residue_chars;

pub use cyclotomic::Cyclotomic;
pub use error::{Error, Result};
pub use residue_chars::{AddChar, MultChar};
