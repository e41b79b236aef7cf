use alloc::vec::Vec;
use rand::Rng;

use super::field::{GaloisField, Symbol};
use crate::RlncError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    pub coefficients: Vec<Symbol>,
    pub payload: Vec<Symbol>,
}

/// Holds one source batch and emits random combinations of it.
#[derive(Debug, Clone)]
pub struct Encoder {
    field: GaloisField,
    sources: Vec<Vec<Symbol>>,
}

impl Encoder {
    pub fn new(field: GaloisField, sources: Vec<Vec<Symbol>>) -> Result<Self, RlncError> {
        let first = sources.first().ok_or(RlncError::EmptyBatch)?;
        let len = first.len();
        for s in &sources {
            if s.len() != len {
                return Err(RlncError::PayloadLength {
                    expected: len,
                    got: s.len(),
                });
            }
            if let Some(&x) = s.iter().find(|&&x| !field.contains(x.into())) {
                return Err(RlncError::ElementOutOfRange(x.into()));
            }
        }
        Ok(Self { field, sources })
    }

    /// A batch of `m` uniformly random payloads.
    pub fn random_batch<R: Rng + ?Sized>(field: GaloisField, m: usize, len: usize, rng: &mut R) -> Self {
        assert!(m >= 1);
        let mask = (field.order() - 1) as Symbol;
        let sources = (0..m)
            .map(|_| (0..len).map(|_| rng.random::<Symbol>() & mask).collect())
            .collect();
        Self { field, sources }
    }

    pub fn batch_size(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[Vec<Symbol>] {
        &self.sources
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Coded packet with uniformly random coefficients.
    pub fn encode<R: Rng + ?Sized>(&self, rng: &mut R) -> CodedPacket {
        let mask = (self.field.order() - 1) as Symbol;
        let coefficients: Vec<Symbol> = (0..self.sources.len()).map(|_| rng.random::<Symbol>() & mask).collect();
        self.combine(coefficients)
    }

    /// Coded packet with caller-chosen coefficients.
    pub fn encode_with(&self, coefficients: &[Symbol]) -> Result<CodedPacket, RlncError> {
        if coefficients.len() != self.sources.len() {
            return Err(RlncError::CoefficientLength {
                expected: self.sources.len(),
                got: coefficients.len(),
            });
        }
        if let Some(&x) = coefficients.iter().find(|&&x| !self.field.contains(x.into())) {
            return Err(RlncError::ElementOutOfRange(x.into()));
        }
        Ok(self.combine(coefficients.to_vec()))
    }

    fn combine(&self, coefficients: Vec<Symbol>) -> CodedPacket {
        let mut payload = alloc::vec![0; self.sources[0].len()];
        for (&c, src) in coefficients.iter().zip(&self.sources) {
            self.field.axpy(&mut payload, c, src);
        }
        CodedPacket { coefficients, payload }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn unit_coefficients_select_a_source() {
        let f = GaloisField::new(8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let enc = Encoder::random_batch(f, 4, 16, &mut rng);
        for j in 0..4 {
            let mut e = alloc::vec![0; 4];
            e[j] = 1;
            assert_eq!(enc.encode_with(&e).unwrap().payload, enc.sources()[j]);
        }
    }

    #[test]
    fn gf2_sum_is_xor() {
        let f = GaloisField::new(1).unwrap();
        let a = alloc::vec![1, 0, 1, 1, 0];
        let b = alloc::vec![1, 1, 0, 1, 0];
        let enc = Encoder::new(f, alloc::vec![a.clone(), b.clone()]).unwrap();
        let p = enc.encode_with(&[1, 1]).unwrap();
        let xor: Vec<Symbol> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        assert_eq!(p.payload, xor);
    }

    #[test]
    fn validation() {
        let f = GaloisField::new(4).unwrap();
        assert_eq!(Encoder::new(f.clone(), alloc::vec![]).unwrap_err(), RlncError::EmptyBatch);
        assert_eq!(
            Encoder::new(f.clone(), alloc::vec![alloc::vec![16]]).unwrap_err(),
            RlncError::ElementOutOfRange(16)
        );
        let enc = Encoder::new(f, alloc::vec![alloc::vec![1, 2], alloc::vec![3, 4]]).unwrap();
        assert!(matches!(enc.encode_with(&[1]), Err(RlncError::CoefficientLength { expected: 2, got: 1 })));
    }
}
