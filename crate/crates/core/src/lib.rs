//! Statistical device activity detection for OFDM-based massive grant-free
//! access under frequency-selective Rayleigh fading.
//!
//! The crate is organised bottom-up:
//!
//! - [`numeric`]: small dense complex linear algebra, Hermitian eigen
//!   decomposition, rank-update inverses and real polynomial roots.
//! - [`signal`]: pilots, effective pilot matrices, activity and channel
//!   draws, received signal synthesis and the sample covariance.
//! - [`prior`]: multivariate Bernoulli activity priors.
//! - [`detect`]: the six coordinate-descent detectors and the flat-fading
//!   baseline.
//! - [`bench`]: Monte Carlo experiments, threshold calibration and sweeps.
//! - [`checks`]: invariant checks shared by the test suites and the CLI
//!   self-test.
//!
//! The linear algebra and detectors are generic over the real scalar type
//! (`f32` or `f64`, see [`Real`]); the aliases below fix the scalar to `f64`,
//! which is what the experiment harness uses.

pub mod bench;
pub mod checks;
pub mod detect;
pub mod error;
pub mod numeric;
pub mod prior;
pub mod rng;
pub mod scalar;
pub mod signal;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type ComplexMatrix64 = numeric::ComplexMatrix<f64>;
pub type RealPolynomial64 = numeric::RealPolynomial<f64>;
pub type EigenPair64 = numeric::EigenPair<f64>;
pub type SystemConfig64 = signal::SystemConfig<f64>;
pub type PilotSet64 = signal::PilotSet<f64>;
pub type ChannelRealization64 = signal::ChannelRealization<f64>;
pub type SampleCovariance64 = signal::SampleCovariance<f64>;
pub type DetectorState64 = detect::DetectorState<f64>;
pub type DetectionOutput64 = detect::DetectionOutput<f64>;

pub type ComplexMatrix32 = numeric::ComplexMatrix<f32>;
pub type SystemConfig32 = signal::SystemConfig<f32>;
pub type PilotSet32 = signal::PilotSet<f32>;
