//! Desk-scale laboratory for sums of Fourier coefficients of pairs of
//! newforms.
//!
//! The crate generates integer coefficients a(p) (and a(n)) for declared
//! newform pairs — by elliptic-curve point counting, by expanding the
//! discriminant q-series, or from cache files — computes the exact densities
//! delta(h) of the trace-sum-zero locus in the product mod-h matrix model,
//! and runs the empirical experiments comparing observed statistics of
//! a_f(p) + a_g(p) against those models: divisibility frequencies, joint
//! semicircle histograms, tail masses, largest-prime-factor thresholds, and
//! normal-order moments.
//!
//! Modules:
//! - [`arith`]: primes, factorization, omega / valuation / largest prime factor
//! - [`newforms`]: coefficient tables, point counting, pair sums, convolution
//! - [`galois`]: exact |A_h|, |C_h|, delta(h) counts in the product model
//! - [`stats`]: the experiments and their serialized reports
//! - [`config`]: experiment configuration (key=value files plus overrides)

pub mod arith;
pub mod config;
pub mod galois;
pub mod newforms;
pub mod stats;
