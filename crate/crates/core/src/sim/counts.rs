use crate::error::{Error, Result};
use crate::sim::state::check_qubit_count;

/// Measurement-outcome histogram from repeated shots of one circuit.
///
/// Dense over all 2^n basis states; entry x counts the shots that read out
/// basis index x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    n: usize,
    shots: u64,
    histogram: Vec<u64>,
}

impl Counts {
    /// Wrap a dense histogram; the shot total is the sum of its entries.
    pub fn from_histogram(n: usize, histogram: Vec<u64>) -> Result<Self> {
        check_qubit_count(n)?;
        if histogram.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: histogram.len(),
            });
        }
        let shots = histogram.iter().sum();
        Ok(Self {
            n,
            shots,
            histogram,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    /// Total number of shots recorded.
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    pub fn get(&self, index: usize) -> u64 {
        self.histogram[index]
    }

    /// Copy with every bin multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        Self::from_histogram(self.n, self.histogram.iter().map(|c| c * factor).collect())
    }
}
