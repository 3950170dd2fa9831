//! Strong-field simulator for high-harmonic generation driven by circularly
//! polarized light whose perpendicular polarization component carries
//! non-Poissonian photon statistics (displaced squeezed vacuum or displaced
//! thermal states).
//!
//! In the classical limit such drivers reduce to Gaussian-weighted ensembles
//! of classical two-component fields. The crate computes, in atomic units
//! throughout:
//!
//! - weighted-average HHG spectra over the driver's field-amplitude marginal
//!   ([`spectrum::hhg_spectrum`]), their cutoffs and `g²(0)` statistics;
//! - the single-atom SFA dipole response behind each spectrum ([`sfa`]);
//! - the five-variable complex saddle-point system whose roots are the
//!   squeezing-enabled electron quantum orbits ([`orbits`]);
//! - driver-field statistics: ellipticity and its fluctuations from quantum
//!   Stokes operators, plus Lissajous-figure sampling ([`driver`]).
//!
//! The `hhg` binary exposes each capability as a subcommand
//! (`spectrum | orbits | lissajous | ellipticity | g2 | convergence`) driven
//! by a TOML run configuration; see [`cli`]. The `examples/` directory holds
//! one runnable example per capability.

pub mod cache;
pub mod cli;
pub mod driver;
pub mod orbits;
pub mod sfa;
pub mod spectrum;

pub use driver::{DriverConfig, FieldRealization, PolarizationState, Quadrature};
pub use sfa::{AtomSpec, DipoleSpectrum, DipoleTimeSeries, NumericsSpec, Window};
pub use spectrum::{GridSpec, SpectrumResult};
