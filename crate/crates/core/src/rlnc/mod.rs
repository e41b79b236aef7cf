//! Random linear network coding over GF(2^w).
//!
//! A source batch of `m` payloads is encoded into coded packets carrying a
//! coefficient vector and the matching linear combination of the payloads.
//! The decoder keeps its rows in reduced row-echelon form, so it knows
//! immediately whether a packet is innovative and, at full rank, the payload
//! rows are the sources.

mod decoder;
mod encoder;
mod field;
mod innovation;

pub use decoder::Decoder;
pub use encoder::{CodedPacket, Encoder};
pub use field::{reduction_polynomial, GaloisField, Symbol};
pub use innovation::{innovation_probability, nonsingular_probability, InnovationEstimate};

use alloc::vec::Vec;

use crate::RlncError;

/// Default payload length in field elements.
pub const DEFAULT_PAYLOAD_LEN: usize = 64;

/// Decodes one batch from exactly the given packets. `Ok(None)` when the
/// coefficient matrix is singular.
pub fn decode_batch(
    field: &GaloisField,
    coefficients: &[Vec<Symbol>],
    payloads: &[Vec<Symbol>],
) -> Result<Option<Vec<Vec<Symbol>>>, RlncError> {
    let m = coefficients.len();
    if m == 0 {
        return Err(RlncError::EmptyBatch);
    }
    if payloads.len() != m {
        return Err(RlncError::PayloadLength {
            expected: m,
            got: payloads.len(),
        });
    }
    let len = payloads[0].len();
    let mut dec = Decoder::new(field.clone(), m, len);
    for (c, p) in coefficients.iter().zip(payloads) {
        dec.ingest(&CodedPacket {
            coefficients: c.clone(),
            payload: p.clone(),
        })?;
    }
    Ok(dec.recovered())
}
