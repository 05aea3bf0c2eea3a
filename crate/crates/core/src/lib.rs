//! Numerical toolkit for three nonlinear circuit-QED systems:
//!
//! * [`detector`]: a SQUID-terminated microwave cavity used as a displacement detector and
//!   back-action cooler for a mechanical resonator (Duffing mean field, bistability map,
//!   signal/noise spectra, effective back-action bath);
//! * [`hawking`]: a flux-biased dc-SQUID array transmission line whose travelling bias pulse
//!   forms an analogue event horizon;
//! * [`trilinear`]: the pump/signal/idler Hamiltonian `i(ab†c† − a†bc)` solved in four tiers,
//!   with diagnostics from [`info`].
//!
//! [`fock`] provides the truncated Fock-space linear algebra and [`numerics`] the special
//! functions, quadrature, ODE and root-finding kernels everything else is built on.

pub mod constants;
pub mod detector;
pub mod fock;
pub mod hawking;
pub mod info;
pub mod numerics;
pub mod trilinear;

#[cfg(doctest)]
mod guide;
