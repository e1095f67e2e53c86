//! Weight rows: uniform samples from the unit sphere S^(n-1) and their
//! 1/sqrt(n) scalings.

use std::io::{BufRead, Write};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// A unit vector of length n drawn uniformly from S^(n-1), with the seed it
/// was drawn from kept as provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub n: usize,
    pub theta: Vec<f64>,
    pub seed: u64,
}

impl WeightRow {
    /// Draw a row: n independent standard normals, normalized to unit length.
    /// The same seed always produces the bit-identical row.
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(GeoError::Config("weight row length must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut theta: Vec<f64> =
                (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let norm: f64 = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
            if norm > 0.0 {
                for t in &mut theta {
                    *t /= norm;
                }
                return Ok(WeightRow { n, theta, seed });
            }
        }
    }

    /// Wrap an explicitly given row, renormalizing it to unit length.
    pub fn fixed(theta: Vec<f64>, seed: u64) -> Result<Self> {
        if theta.is_empty() {
            return Err(GeoError::Config("weight row length must be >= 1".into()));
        }
        let norm: f64 = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(GeoError::Config("weight row must be a nonzero finite vector".into()));
        }
        let n = theta.len();
        let theta = theta.into_iter().map(|t| t / norm).collect();
        Ok(WeightRow { n, theta, seed })
    }

    /// Scaled weights alpha_i = theta_i / sqrt(n).
    pub fn scaled(&self) -> Vec<f64> {
        let s = 1.0 / (self.n as f64).sqrt();
        self.theta.iter().map(|t| t * s).collect()
    }

    pub fn norm(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// One CSV line: `seed,theta_1,...,theta_n`. Values round-trip bit-exactly.
    pub fn write_csv_line<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "{}", self.seed)?;
        for t in &self.theta {
            write!(w, ",{t}")?;
        }
        writeln!(w)
    }

    pub fn read_csv_line<R: BufRead>(r: &mut R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)
            .map_err(|e| GeoError::Config(format!("cannot read weight row: {e}")))?;
        let mut parts = line.trim().split(',');
        let seed: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GeoError::Config("weight row line must start with a seed".into()))?;
        let theta: Vec<f64> = parts
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| GeoError::Config(format!("bad weight value: {e}")))?;
        if theta.is_empty() {
            return Err(GeoError::Config("weight row line has no values".into()));
        }
        Ok(WeightRow { n: theta.len(), theta, seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn s0_row_is_a_sign() {
        for seed in 0..20 {
            let row = WeightRow::sample(1, seed).unwrap();
            assert!(row.theta[0] == 1.0 || row.theta[0] == -1.0);
        }
    }

    #[test]
    fn rows_have_unit_norm() {
        for (n, seed) in [(2, 0), (17, 1), (1000, 2), (100_000, 3)] {
            let row = WeightRow::sample(n, seed).unwrap();
            assert_abs_diff_eq!(row.norm(), 1.0, epsilon = 1e-12);
            let sq: f64 = row.theta.iter().map(|t| t * t).sum();
            assert_abs_diff_eq!(sq, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scaled_weights() {
        let row = WeightRow::fixed(vec![0.5, 0.5, 0.5, 0.5], 0).unwrap();
        assert_eq!(row.scaled(), vec![0.25, 0.25, 0.25, 0.25]);

        let mut e1 = vec![0.0; 9];
        e1[0] = 1.0;
        let row = WeightRow::fixed(e1, 0).unwrap();
        let alpha = row.scaled();
        assert_abs_diff_eq!(alpha[0], 1.0 / 3.0, epsilon = 1e-15);
        assert!(alpha[1..].iter().all(|&a| a == 0.0));

        // sum alpha_i^2 = 1/n after the scaling round trip
        let row = WeightRow::sample(257, 9).unwrap();
        let sq: f64 = row.scaled().iter().map(|a| a * a).sum();
        assert_abs_diff_eq!(sq, 1.0 / 257.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_length_rejected() {
        assert!(matches!(WeightRow::sample(0, 1), Err(GeoError::Config(_))));
    }

    #[test]
    fn determinism_and_csv_roundtrip() {
        let a = WeightRow::sample(100, 42).unwrap();
        let b = WeightRow::sample(100, 42).unwrap();
        assert_eq!(a, b);

        let mut buf = Vec::new();
        a.write_csv_line(&mut buf).unwrap();
        let back = WeightRow::read_csv_line(&mut buf.as_slice()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn large_row_max_coordinate_is_small() {
        // Gaussian-tail threshold 4.5 sqrt(2 log n) / sqrt(n) ~ 0.068 at n = 1e5;
        // the spec flags anything above 0.1.
        let row = WeightRow::sample(100_000, 7).unwrap();
        let max = row.theta.iter().map(|t| t.abs()).fold(0.0, f64::max);
        assert!(max <= 0.1, "max |theta_i| = {max}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        /// Cauchy-Schwarz prefix bound: sum_{i<=k} |theta_i| <= sqrt(k).
        #[test]
        fn prefix_l1_bound(seed in 0u64..10_000, n in 1usize..400) {
            let row = WeightRow::sample(n, seed).unwrap();
            let mut acc = 0.0;
            for (k, t) in row.theta.iter().enumerate() {
                acc += t.abs();
                prop_assert!(acc <= ((k + 1) as f64).sqrt() + 1e-12);
            }
        }
    }
}
