use crate::error::{Error, Result};
use crate::C64;

/// Highest total derivative order any identity in this crate needs is 4;
/// the cap leaves room for the Hessian-style data used by fitting.
pub const MAX_JET_ORDER: u32 = 6;

/// A product of directional derivatives `∂_{d_1}^{k_1} ⋯ ∂_{d_r}^{k_r}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DirectionalJet {
    parts: Vec<(Vec<C64>, u32)>,
}

impl DirectionalJet {
    /// No derivative: plain value.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(parts: Vec<(Vec<C64>, u32)>) -> Result<Self> {
        let jet = DirectionalJet { parts: parts.into_iter().filter(|p| p.1 > 0).collect() };
        let order = jet.order();
        if order > MAX_JET_ORDER {
            return Err(Error::JetTooDeep { order, max: MAX_JET_ORDER });
        }
        Ok(jet)
    }

    /// `∂_d^k`.
    pub fn along(direction: &[C64], order: u32) -> Self {
        Self::new(vec![(direction.to_vec(), order)]).expect("single direction jet within cap")
    }

    /// Append `∂_d^k`.
    pub fn then(mut self, direction: &[C64], order: u32) -> Result<Self> {
        if order > 0 {
            self.parts.push((direction.to_vec(), order));
        }
        let order = self.order();
        if order > MAX_JET_ORDER {
            return Err(Error::JetTooDeep { order, max: MAX_JET_ORDER });
        }
        Ok(self)
    }

    pub fn order(&self) -> u32 {
        self.parts.iter().map(|p| p.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[(Vec<C64>, u32)] {
        &self.parts
    }

    /// Same jet with all directions multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        DirectionalJet {
            parts: self
                .parts
                .iter()
                .map(|(d, o)| (d.iter().map(|x| x * k).collect(), *o))
                .collect(),
        }
    }

    pub fn check_dimension(&self, g: usize) -> Result<()> {
        for (d, _) in &self.parts {
            if d.len() != g {
                return Err(Error::DimensionMismatch { expected: g, got: d.len() });
            }
        }
        Ok(())
    }
}
