//! Precoding-based network alignment for three-source three-destination
//! unicast networks with delays: exact GF(2^m) arithmetic, the cyclic-prefix
//! DFT transform that turns the delay channel into per-tone instantaneous
//! channels, precoder construction and alignment checks, randomized
//! feasibility testing, and a ground-truth time-domain simulator.

pub mod alignment;
pub mod feasibility;
pub mod fixtures;
pub mod galois;
pub mod netgraph;
pub mod simulator;
pub mod transform;
