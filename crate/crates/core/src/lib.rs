//! Spherical needlet toolkit for HDR illumination maps.
//!
//! The crate is organised bottom-up:
//!
//! - [`sphgeom`]: directions, point sets, quadrature grids and panorama geometry.
//! - [`harmonics`]: real orthonormal spherical harmonics and direct transforms.
//! - [`needlet`]: window, frame, analysis and synthesis.
//! - [`sparse`]: Bayesian soft thresholding (and the hard-threshold baseline).
//! - [`transport`]: log-domain unbalanced Sinkhorn, the spherical transport
//!   loss and the spherical transport distance.
//! - [`pipeline`]: PFM and coefficient files, synthetic panoramas and the
//!   coefficient fitting demo used by the `needlet` binary.
//!
//! Spherical harmonics are real-valued throughout. The complex basis with its
//! conjugate is related to the real one by a fixed unitary change of basis, so
//! every identity used here (addition theorem, tight frame, Parseval) carries
//! over unchanged.

pub mod error;
pub mod harmonics;
pub mod needlet;
pub mod pipeline;
pub mod sparse;
pub mod sphgeom;
pub mod transport;

pub use error::{Error, Result};
pub use harmonics::SHCoeffs;
pub use needlet::{NeedletCoeffs, NeedletFrame, NeedletWindow};
pub use pipeline::EquirectMap;
pub use sphgeom::{CubatureBand, QuadGrid, Scheme, SphDir};
pub use transport::{TransportConfig, TransportResult};
