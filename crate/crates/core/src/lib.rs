//! Algebra and dynamics of quadratic rational maps, up to holomorphic
//! conjugacy.
//!
//! The crate is `no_std` (it needs `alloc` for image buffers and tile
//! lists) and uses IEEE double precision throughout. It covers:
//!
//! * [`moduli`]: fixed points, multipliers, symmetric coordinates on the
//!   moduli space and the normal forms `(λ1 z + z²)/(λ2 z + 1)` and
//!   `z + B + 1/z`;
//! * [`dynamics`]: evaluation on the Riemann sphere, critical points, orbit
//!   fates and escape certificates for parabolic maps;
//! * [`classify`]: boundary pieces of the central hyperbolic component and
//!   the Julia-set connectivity ladder on the `Per1(1)` slice;
//! * [`twist`]: the multiplier sequence of a twist deformation and its limit;
//! * [`raster`]: deterministic pixel kernels, tiles and PPM encoding.
//!
//! Threads, files and the command line live in the `quadmod` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod classify;
pub mod complex;
pub mod cubic;
pub mod dynamics;
mod error;
pub mod mobius;
pub mod moduli;
pub mod raster;
pub mod rational;
pub mod sampler;
pub mod sphere;
pub mod twist;

pub use complex::C64;
pub use error::{ClassifyError, ModuliError, RasterError, TwistError};
pub use mobius::MobiusMap;
pub use moduli::{EigenvalueTriple, MapForm, ModuliPoint};
pub use sphere::SpherePoint;
