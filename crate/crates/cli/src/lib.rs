//! Experiment front end for the link model in the `mmv2v` crate:
//! configuration files, parameter sweeps over `lt`, `alpha`, `d_safe`, or
//! `epsilon`, and emission of CSV tables and SVG charts comparing the
//! analytic and simulated routes.

pub mod config;
pub mod emit;
pub mod sweep;
