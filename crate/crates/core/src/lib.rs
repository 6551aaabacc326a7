//! Fifth-order finite-volume WENO solver toolkit.
//!
//! The crate provides the classic WENO-JS reconstruction of Jiang & Shu
//! together with a family of weight-mapping functions (WENO-M, WENO-IM,
//! WENO-PM6, WENO-PPM5, WENO-RM(260), WENO-MAIM1, WENO-ACM, MIP-WENO-ACMk).
//! Any mapped family can additionally be run through an order-preserving
//! weight transform that evaluates the mapping with the parameters of the
//! substencil whose ideal weight is nearest to the input weight; the
//! resulting schemes never reverse the ordering of the nonlinear weights
//! across substencils.
//!
//! Solvers are included for the 1D linear advection equation (periodic) and
//! the 2D compressible Euler equations (characteristic-wise,
//! dimension-by-dimension, global Lax-Friedrichs flux), both marched with a
//! three-stage SSP Runge-Kutta integrator.

pub mod advection;
pub mod euler;
pub mod grid;
pub mod mappings;
pub mod metrics;
pub mod op;
pub mod rk;
pub mod scheme;
pub mod weno;
