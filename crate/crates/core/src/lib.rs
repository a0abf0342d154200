//! Exact set algebra, character sums, regularization, equation counting
//! and covering numbers over the residue rings `Z/qZ`.

pub mod bits;
pub mod covering;
pub mod driver;
pub mod equations;
pub mod error;
pub mod group_action;
pub mod regularize;
pub mod report;
pub mod ring;
pub mod set;
pub mod set2d;
pub mod spectral;

pub use error::{Error, Result};
pub use report::{Verdict, VerificationReport};
pub use ring::RingCtx;
pub use set::SubsetZq;
pub use set2d::Subset2D;
