//! Neural probabilistic decoding for stabilizer codes.
//!
//! A feedforward network is trained on `(syndrome, error)` pairs drawn from a
//! depolarizing channel and learns per-bit error marginals conditioned on the
//! syndrome. Decoding samples candidate errors from those marginals and
//! resamples the neighborhoods of violated checks until the candidate
//! reproduces the measured syndrome.
//!
//! The crate also carries the baselines the decoder is judged against
//! (minimum-weight perfect matching on the torus, brute-force minimum-weight
//! and exact maximum-likelihood decoding) and the evaluation harness.

pub mod code;
pub mod gf2;
pub mod noise;
pub mod nn;
pub mod reference;
pub mod sampler;
pub mod harness;
pub mod seed;
