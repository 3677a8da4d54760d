//! Spectral decimation on the Sierpinski gasket, fractal Sturm-Liouville
//! operators, the Sierpinski-lattice trace map, and the spectral zeta
//! functions built from them.

pub mod decimation;
pub mod error;
pub mod export;
pub mod jacobi;
pub mod lattice;
pub mod numerics;
pub mod sg;
pub mod sl;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
pub use numerics::{C64, Mat2C, ProjPoint1, ProjPoint2, Tolerances};
