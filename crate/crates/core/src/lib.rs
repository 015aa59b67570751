//! Two-unicast-Z linear network coding: finite fields, networks, destination
//! reduction, recursive alignment coding, single-unicast max-flow codes and
//! brute-force oracles.

pub mod coder;
pub mod gf;
pub mod io;
pub mod mfmc;
pub mod netgraph;
pub mod oracle;
pub mod reduction;
pub mod rng;
