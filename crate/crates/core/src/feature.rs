//! Feature vectors tagged with the extractor that produced them.

use alloc::vec::Vec;
use core::fmt;

use crate::radon::RadonMode;
use crate::wavelet::Family;

/// Which stage produced a [`FeatureVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extractor {
    /// Wavelet-packet energies: leaves followed by the combined levels.
    WaveletPacket { family: Family, levels: u32 },
    /// Radon projection(s) along the principal axis, DFT magnitude when
    /// `spectrum` is set, raw resampled profile otherwise.
    Radon { mode: RadonMode, spectrum: bool },
    /// Projection into an LDA subspace of the given dimension.
    Lda { dim: usize },
    /// Hand-built vectors.
    Raw,
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extractor::WaveletPacket { family, levels } => write!(f, "packet({family}, {levels})"),
            Extractor::Radon { mode, spectrum } => {
                let kind = if *spectrum { "dft" } else { "raw" };
                write!(f, "radon({mode}, {kind})")
            }
            Extractor::Lda { dim } => write!(f, "lda({dim})"),
            Extractor::Raw => f.write_str("raw"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    extractor: Extractor,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, extractor: Extractor) -> Self {
        FeatureVector { values, extractor }
    }

    pub fn raw(values: Vec<f64>) -> Self {
        Self::new(values, Extractor::Raw)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn extractor(&self) -> Extractor {
        self.extractor
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
