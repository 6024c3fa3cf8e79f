use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Where a sample set came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Exponential { rate: f64 },
    UserSupplied,
}

/// I.i.d. observations from a density on (0, ∞), plus the seed that
/// generated them (0 for external data).
#[derive(Debug, Clone, Serialize)]
pub struct SampleSet {
    observations: Vec<f64>,
    seed: u64,
    source: SampleSource,
}

impl SampleSet {
    /// Wraps user-supplied observations (all must be positive and finite).
    pub fn new(observations: Vec<f64>) -> Result<Self> {
        Self::with_provenance(observations, 0, SampleSource::UserSupplied)
    }

    pub fn with_provenance(
        observations: Vec<f64>,
        seed: u64,
        source: SampleSource,
    ) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::argument("sample set must be nonempty"));
        }
        if let Some(bad) = observations.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::argument(format!(
                "observations must be positive finite reals, got {bad}"
            )));
        }
        Ok(SampleSet {
            observations,
            seed,
            source,
        })
    }

    /// Draws `n` observations from Exponential(rate) by inverse transform.
    pub fn from_exponential(n: usize, rate: f64, seed: u64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::argument(format!("rate must be positive, got {rate}")));
        }
        if n == 0 {
            return Err(Error::argument("need n >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut obs = Vec::with_capacity(n);
        while obs.len() < n {
            let u: f64 = rng.random();
            let x = -(1.0 - u).ln() / rate;
            if x > 0.0 {
                obs.push(x);
            }
        }
        SampleSet::with_provenance(obs, seed, SampleSource::Exponential { rate })
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: nonempty
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> &SampleSource {
        &self.source
    }

    pub fn max(&self) -> f64 {
        self.observations.iter().copied().fold(0.0, f64::max)
    }

    /// A copy with every observation scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<SampleSet> {
        SampleSet::with_provenance(
            self.observations.iter().map(|x| c * x).collect(),
            self.seed,
            SampleSource::UserSupplied,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible() {
        let a = SampleSet::from_exponential(50, 1.0, 7).unwrap();
        let b = SampleSet::from_exponential(50, 1.0, 7).unwrap();
        assert_eq!(a.observations(), b.observations());
        let c = SampleSet::from_exponential(50, 1.0, 8).unwrap();
        assert_ne!(a.observations(), c.observations());
    }

    #[test]
    fn rejects_nonpositive_observations() {
        assert!(SampleSet::new(vec![]).is_err());
        assert!(SampleSet::new(vec![1.0, 0.0]).is_err());
        assert!(SampleSet::new(vec![1.0, -2.0]).is_err());
        assert!(SampleSet::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn exponential_mean_is_roughly_one_over_rate() {
        let s = SampleSet::from_exponential(20000, 2.0, 1).unwrap();
        let mean: f64 = s.observations().iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }
}
