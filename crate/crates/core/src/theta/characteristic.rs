use crate::error::{Error, Result};

/// Half-integer characteristic `[ε; δ]` with entries in `{0, 1/2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfCharacteristic {
    // entries stored as bits: true means 1/2
    eps: Vec<bool>,
    delta: Vec<bool>,
    parity: u8,
}

fn to_bits(v: &[f64]) -> Result<Vec<bool>> {
    v.iter()
        .map(|&x| {
            if x == 0.0 {
                Ok(false)
            } else if x == 0.5 {
                Ok(true)
            } else {
                Err(Error::InvalidCharacteristic)
            }
        })
        .collect()
}

impl HalfCharacteristic {
    pub fn new(eps: &[f64], delta: &[f64]) -> Result<Self> {
        if eps.len() != delta.len() {
            return Err(Error::DimensionMismatch { expected: eps.len(), got: delta.len() });
        }
        Ok(Self::from_bits(to_bits(eps)?, to_bits(delta)?))
    }

    pub fn from_bits(eps: Vec<bool>, delta: Vec<bool>) -> Self {
        let dot = eps.iter().zip(&delta).filter(|(a, b)| **a && **b).count();
        HalfCharacteristic { eps, delta, parity: (dot % 2) as u8 }
    }

    /// The zero characteristic of length `g`.
    pub fn zero(g: usize) -> Self {
        Self::from_bits(vec![false; g], vec![false; g])
    }

    /// Characteristic number `index` in the order of [`all_characteristics`].
    pub fn from_index(g: usize, index: usize) -> Self {
        let eps = (0..g).map(|j| (index >> j) & 1 == 1).collect();
        let delta = (0..g).map(|j| (index >> (g + j)) & 1 == 1).collect();
        Self::from_bits(eps, delta)
    }

    pub fn genus(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> Vec<f64> {
        self.eps.iter().map(|&b| if b { 0.5 } else { 0.0 }).collect()
    }

    pub fn delta(&self) -> Vec<f64> {
        self.delta.iter().map(|&b| if b { 0.5 } else { 0.0 }).collect()
    }

    /// `4 ε·δ mod 2`; 1 means odd.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity == 1
    }
}

/// Half-integer vector number `index` in binary order, `ε_1` least significant.
/// This is the component order of the Kummer vector.
pub fn eps_from_index(g: usize, index: usize) -> Vec<f64> {
    (0..g).map(|j| if (index >> j) & 1 == 1 { 0.5 } else { 0.0 }).collect()
}

/// All `4^g` characteristics; index bits `0..g` encode `ε`, bits `g..2g` encode `δ`.
pub fn all_characteristics(g: usize) -> Vec<HalfCharacteristic> {
    (0..1usize << (2 * g)).map(|k| HalfCharacteristic::from_index(g, k)).collect()
}

/// The `2^{g-1}(2^g + 1)` even characteristics, in the order of [`all_characteristics`].
pub fn even_characteristics(g: usize) -> Vec<HalfCharacteristic> {
    all_characteristics(g).into_iter().filter(|c| !c.is_odd()).collect()
}
