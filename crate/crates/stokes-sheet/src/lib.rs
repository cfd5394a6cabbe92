//! Boundary-integral simulation of a periodic interface between two viscous
//! fluids in quasistationary Stokes flow, driven by surface tension and
//! gravity.
//!
//! The interface is the graph `x2 = f(xi)` over one period `(-pi, pi]`. Its
//! velocity is obtained from a second-kind boundary integral equation for a
//! traction density `beta`, discretised by a spectrally accurate Nyström
//! method; the normal velocity drives the evolution `df/dt = Psi(f)`.

pub mod bie;
pub mod equilibria;
pub mod error;
pub mod evolution;
pub mod kernels;
pub mod layer;
pub mod operators;
pub mod params;
pub mod profile;
pub mod spectral;

pub use error::{Error, Result};
pub use params::FluidParams;
pub use profile::{GeometryBundle, InterfaceProfile};
