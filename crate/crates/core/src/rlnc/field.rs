//! GF(2^w) arithmetic through log/exp tables.

use alloc::vec::Vec;

use crate::RlncError;

/// Field elements; every supported width fits in 16 bits.
pub type Symbol = u16;

/// Primitive reduction polynomial for each supported width.
pub const fn reduction_polynomial(width: u32) -> Option<u32> {
    match width {
        1 => Some(0x3),
        4 => Some(0x13),
        8 => Some(0x11D),
        16 => Some(0x1_100B),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    width: u32,
    polynomial: u32,
    // exp is doubled so log a + log b never needs a reduction
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(width: u32) -> Result<Self, RlncError> {
        let polynomial = reduction_polynomial(width).ok_or(RlncError::UnsupportedWidth(width))?;
        let size = 1usize << width;
        let group = size - 1;
        let mut exp = alloc::vec![0; 2 * group];
        let mut log = alloc::vec![0; size];
        let mut x: u32 = 1;
        for i in 0..group {
            exp[i] = x as Symbol;
            exp[i + group] = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << width) != 0 {
                x ^= polynomial;
            }
        }
        Ok(Self {
            width,
            polynomial,
            exp,
            log,
        })
    }

    /// Field for `q = 2^w` elements.
    pub fn with_order(q: u64) -> Result<Self, RlncError> {
        if q.is_power_of_two() && q >= 2 {
            Self::new(q.trailing_zeros())
        } else {
            Err(RlncError::UnsupportedWidth(0))
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn polynomial(&self) -> u32 {
        self.polynomial
    }

    /// q = 2^w
    pub fn order(&self) -> u32 {
        1 << self.width
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.order()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            return None;
        }
        let group = self.order() - 1;
        Some(self.exp[((group - self.log[a as usize]) % group) as usize])
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Option<Symbol> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// `dst += c * src`
    pub fn axpy(&self, dst: &mut [Symbol], c: Symbol, src: &[Symbol]) {
        if c == 0 {
            return;
        }
        let lc = self.log[c as usize];
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[(lc + self.log[s as usize]) as usize];
            }
        }
    }

    /// `row *= c`
    pub fn scale(&self, row: &mut [Symbol], c: Symbol) {
        for x in row.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}
