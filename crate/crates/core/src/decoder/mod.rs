//! Log-domain FFT sum-product decoding of nonbinary LDPC syndromes.

mod fwht;
mod llr;
mod spa;

pub use fwht::{fwht_in_place, ifwht_in_place, inverse_walsh_hadamard, walsh_hadamard};
pub use llr::{gf_permute, llr_from_channel, LlrVector, PermuteMode, CLAMP, PROB_FLOOR};
pub use spa::{DecodeOutcome, Decoder, DecoderState, DEFAULT_MAX_ITERATIONS};
pub(crate) use llr::{llr_to_probs, normalize_in_place};
pub(crate) use spa::{check_update, Scratch as CheckScratch};
