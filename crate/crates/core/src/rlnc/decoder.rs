use alloc::vec::Vec;

use super::encoder::CodedPacket;
use super::field::{GaloisField, Symbol};
use crate::RlncError;

/// Incremental Gaussian elimination. Rows are stored by pivot column and
/// kept fully reduced.
#[derive(Debug, Clone)]
pub struct Decoder {
    field: GaloisField,
    batch: usize,
    payload_len: usize,
    // pivots[c] = (coefficients, payload) of the row whose pivot is column c
    pivots: Vec<Option<(Vec<Symbol>, Vec<Symbol>)>>,
    rank: usize,
}

impl Decoder {
    pub fn new(field: GaloisField, batch: usize, payload_len: usize) -> Self {
        Self {
            field,
            batch,
            payload_len,
            pivots: alloc::vec![None; batch],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    pub fn is_complete(&self) -> bool {
        self.rank == self.batch
    }

    pub fn reset(&mut self) {
        self.pivots.iter_mut().for_each(|r| *r = None);
        self.rank = 0;
    }

    /// Returns whether the packet raised the rank.
    pub fn ingest(&mut self, pkt: &CodedPacket) -> Result<bool, RlncError> {
        if pkt.coefficients.len() != self.batch {
            return Err(RlncError::CoefficientLength {
                expected: self.batch,
                got: pkt.coefficients.len(),
            });
        }
        if pkt.payload.len() != self.payload_len {
            return Err(RlncError::PayloadLength {
                expected: self.payload_len,
                got: pkt.payload.len(),
            });
        }
        if self.is_complete() {
            return Ok(false);
        }
        let f = &self.field;
        let mut coef = pkt.coefficients.clone();
        let mut data = pkt.payload.clone();
        for c in 0..self.batch {
            if coef[c] == 0 {
                continue;
            }
            if let Some((rc, rd)) = &self.pivots[c] {
                let factor = coef[c];
                f.axpy(&mut coef, factor, rc);
                f.axpy(&mut data, factor, rd);
            }
        }
        let Some(pivot) = coef.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let inv = f.inv(coef[pivot]).expect("nonzero pivot");
        f.scale(&mut coef, inv);
        f.scale(&mut data, inv);
        // clear the new pivot column from the existing rows
        for row in self.pivots.iter_mut().flatten() {
            let factor = row.0[pivot];
            if factor != 0 {
                f.axpy(&mut row.0, factor, &coef);
                f.axpy(&mut row.1, factor, &data);
            }
        }
        self.pivots[pivot] = Some((coef, data));
        self.rank += 1;
        Ok(true)
    }

    /// The source payloads, once the rank is full.
    pub fn recovered(&self) -> Option<Vec<Vec<Symbol>>> {
        if !self.is_complete() {
            return None;
        }
        Some(self.pivots.iter().map(|r| r.as_ref().expect("full rank").1.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::super::encoder::Encoder;
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn identity_coefficients_recover_sources() {
        let f = GaloisField::new(8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let enc = Encoder::random_batch(f.clone(), 5, 12, &mut rng);
        let mut dec = Decoder::new(f, 5, 12);
        for j in 0..5 {
            let mut e = alloc::vec![0; 5];
            e[j] = 1;
            assert!(dec.ingest(&enc.encode_with(&e).unwrap()).unwrap());
        }
        assert_eq!(dec.rank(), 5);
        assert_eq!(dec.recovered().unwrap(), enc.sources());
    }

    #[test]
    fn duplicate_is_not_innovative() {
        let f = GaloisField::new(4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let enc = Encoder::random_batch(f.clone(), 3, 8, &mut rng);
        let p = enc.encode_with(&[3, 7, 1]).unwrap();
        let mut dec = Decoder::new(f, 3, 8);
        assert!(dec.ingest(&p).unwrap());
        assert!(!dec.ingest(&p).unwrap());
        assert_eq!(dec.rank(), 1);
    }

    #[test]
    fn random_packets_roundtrip_in_every_field() {
        for w in [1, 4, 8, 16] {
            let f = GaloisField::new(w).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(u64::from(w));
            for _ in 0..50 {
                let enc = Encoder::random_batch(f.clone(), 6, 10, &mut rng);
                let mut dec = Decoder::new(f.clone(), 6, 10);
                let mut last_rank = 0;
                for _ in 0..200 {
                    let innovative = dec.ingest(&enc.encode(&mut rng)).unwrap();
                    assert_eq!(dec.rank(), last_rank + usize::from(innovative));
                    last_rank = dec.rank();
                    if dec.is_complete() {
                        break;
                    }
                }
                assert_eq!(dec.recovered().unwrap(), enc.sources());
            }
        }
    }

    #[test]
    fn wrong_lengths_are_rejected() {
        let f = GaloisField::new(8).unwrap();
        let mut dec = Decoder::new(f, 3, 4);
        let bad = CodedPacket {
            coefficients: alloc::vec![1, 2],
            payload: alloc::vec![0; 4],
        };
        assert_eq!(dec.ingest(&bad), Err(RlncError::CoefficientLength { expected: 3, got: 2 }));
        let bad = CodedPacket {
            coefficients: alloc::vec![1, 2, 3],
            payload: alloc::vec![0; 5],
        };
        assert_eq!(dec.ingest(&bad), Err(RlncError::PayloadLength { expected: 4, got: 5 }));
    }
}
