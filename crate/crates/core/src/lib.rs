//! Deligne representations of Weil groups with coefficients in `F_ell`-bar,
//! their semisimple tensor semiring, and the cycle-to-variable map.

pub mod checker;
pub mod cv_map;
pub mod deligne_algebra;
pub mod enumerate;
pub mod error;
pub mod expr;
pub mod field;
pub mod grothendieck;
pub mod lfactor;
pub mod linalg;
pub mod matrix_oracle;
pub mod poly;
pub mod weil_model;

pub use deligne_algebra::{Core, DeligneClass, Indec};
pub use error::{Error, Result};
pub use weil_model::{AtomId, WeilModel};
