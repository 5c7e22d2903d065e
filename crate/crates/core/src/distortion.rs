//! Single-letter distortion measures `d: source x recon -> [0, inf)`.

use crate::error::{Error, Result};

/// A finite, nonnegative distortion matrix indexed by (source, recon) symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMeasure {
    source_card: usize,
    recon_card: usize,
    matrix: Vec<f64>,
}

impl DistortionMeasure {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let source_card = rows.len();
        let recon_card = rows.first().map_or(0, Vec::len);
        if source_card == 0 || recon_card == 0 {
            return Err(Error::InvalidDistortion("matrix is empty".into()));
        }
        if rows.iter().any(|r| r.len() != recon_card) {
            return Err(Error::InvalidDistortion("rows have different lengths".into()));
        }
        let matrix: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(bad) = matrix.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistortion(format!("entry {bad} is negative or not finite")));
        }
        Ok(Self {
            source_card,
            recon_card,
            matrix,
        })
    }

    /// `d(s, r) = [s != r]` on an alphabet of size `card`.
    pub fn hamming(card: usize) -> Self {
        let rows = (0..card)
            .map(|s| (0..card).map(|r| if s == r { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(rows).expect("hamming matrix is valid")
    }

    /// `d(s, r) = (a_s - b_r)^2` for symbol values `a` and reconstruction values `b`.
    pub fn squared_error(source_values: &[f64], recon_values: &[f64]) -> Result<Self> {
        Self::new(
            source_values
                .iter()
                .map(|a| recon_values.iter().map(|b| (a - b) * (a - b)).collect())
                .collect(),
        )
    }

    pub fn source_card(&self) -> usize {
        self.source_card
    }

    pub fn recon_card(&self) -> usize {
        self.recon_card
    }

    #[inline]
    pub fn get(&self, source: usize, recon: usize) -> f64 {
        self.matrix[source * self.recon_card + recon]
    }

    pub fn row(&self, source: usize) -> &[f64] {
        &self.matrix[source * self.recon_card..(source + 1) * self.recon_card]
    }

    pub fn max_entry(&self) -> f64 {
        self.matrix.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest expected distortion under `p_source` when the decoder knows
    /// the source exactly: `sum_s p(s) min_r d(s, r)`.
    pub fn full_information_floor(&self, p_source: &[f64]) -> f64 {
        p_source
            .iter()
            .enumerate()
            .map(|(s, p)| p * self.row(s).iter().copied().fold(f64::INFINITY, f64::min))
            .sum()
    }

    /// Expected distortion of the best constant reconstruction, i.e. the
    /// distortion reachable with no information at all.
    pub fn zero_rate_distortion(&self, p_source: &[f64]) -> f64 {
        (0..self.recon_card)
            .map(|r| p_source.iter().enumerate().map(|(s, p)| p * self.get(s, r)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_entries() {
        let d = DistortionMeasure::hamming(3);
        assert_eq!(d.get(1, 1), 0.0);
        assert_eq!(d.get(0, 2), 1.0);
        assert_eq!(d.max_entry(), 1.0);
        assert_eq!(d.full_information_floor(&[0.2, 0.3, 0.5]), 0.0);
        assert!((d.zero_rate_distortion(&[0.2, 0.3, 0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DistortionMeasure::new(vec![]).is_err());
        assert!(DistortionMeasure::new(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(DistortionMeasure::new(vec![vec![0.0, -1.0]]).is_err());
        assert!(DistortionMeasure::new(vec![vec![0.0, f64::NAN]]).is_err());
    }

    #[test]
    fn squared_error_grid() {
        let d = DistortionMeasure::squared_error(&[0.0, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(d.get(1, 1), 0.25);
        assert_eq!(d.full_information_floor(&[0.5, 0.5]), 0.0);
    }
}
