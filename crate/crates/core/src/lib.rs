//! Information reconciliation for high-dimensional quantum key distribution.
//!
//! Two families of protocols reconcile Alice's and Bob's q-ary strings over a
//! q-ary symmetric channel while accounting for every disclosed bit:
//!
//! * nonbinary LDPC syndrome coding over GF(q) with a log-domain FFT
//!   sum-product decoder and blind (interactive) rate adaptation
//!   ([`nbldpc`], [`decoder`], [`blind`]);
//! * Cascade, in its binary form and in the high-dimensional serial and
//!   parallel variants that exploit partner bits of the same symbol
//!   ([`cascade`]).
//!
//! Supporting modules cover field arithmetic ([`galois`]), the channel and
//! its entropy ([`channel`]), Monte-Carlo density evolution ([`mcde`]),
//! secret-key-length evaluation ([`keyrate`]) and experiment orchestration
//! ([`harness`]).
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix `f64`, which is what the CLI and experiments use.

pub mod blind;
pub mod cascade;
pub mod channel;
pub mod decoder;
pub mod error;
pub mod galois;
pub mod harness;
pub mod keyrate;
pub mod mcde;
pub mod nbldpc;
pub mod rng;
pub mod scalar;
pub mod transcript;

pub use error::{Error, Result};
pub use galois::{Gf, GfContext};
pub use scalar::Real;
pub use transcript::Transcript;

pub type ChannelParams = channel::ChannelParams<f64>;
pub type LlrVector = decoder::LlrVector<f64>;
pub type Decoder = decoder::Decoder<f64>;
pub type EnsembleSim = mcde::EnsembleSim<f64>;
pub type KeyRateInputs = keyrate::KeyRateInputs<f64>;
