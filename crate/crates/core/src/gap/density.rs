use rand::RngCore;

use crate::error::{Error, Result};
use crate::lse::{SampleSet, SampleSource};

/// A ground-truth density with enough analytic structure for the audits:
/// density, CDF, and derivatives of any order at a point.
pub trait TruthDensity: Sync {
    fn name(&self) -> String;
    fn density(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// `order`-th derivative of the density.
    fn density_deriv(&self, x: f64, order: usize) -> f64;
    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Result<SampleSet>;

    /// `(-1)^k g^{(k)}(x)` — positive everywhere for the harness's
    /// working assumptions to hold at x.
    fn signed_kth_deriv(&self, x: f64, k: usize) -> f64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.density_deriv(x, k)
    }
}

/// Exponential(rate): completely monotone, hence k-monotone for every k,
/// with `(-1)^k g^{(k)}(x) = rate^{k+1} e^{-rate·x} > 0` everywhere.
#[derive(Debug, Clone, Copy)]
pub struct Exponential {
    pub rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::argument(format!("rate must be positive, got {rate}")));
        }
        Ok(Exponential { rate })
    }
}

impl TruthDensity for Exponential {
    fn name(&self) -> String {
        format!("exponential({})", self.rate)
    }

    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            1.0 - (-self.rate * x).exp()
        }
    }

    fn density_deriv(&self, x: f64, order: usize) -> f64 {
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.rate.powi(order as i32) * self.density(x)
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Result<SampleSet> {
        if n == 0 {
            return Err(Error::argument("need n >= 1"));
        }
        let mut obs = Vec::with_capacity(n);
        while obs.len() < n {
            let u = uniform01(rng);
            let x = -(1.0 - u).ln() / self.rate;
            if x > 0.0 {
                obs.push(x);
            }
        }
        SampleSet::with_provenance(obs, 0, SampleSource::Exponential { rate: self.rate })
    }
}

/// Uniform draw in [0, 1) from 53 random bits.
pub(crate) fn uniform01(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_derivatives_alternate() {
        let d = Exponential::new(1.0).unwrap();
        for k in 1..=4 {
            assert!(d.signed_kth_deriv(1.0, k) > 0.0);
            let expect = (-1.0f64).exp();
            assert!((d.signed_kth_deriv(1.0, k) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_respects_the_rate() {
        let d = Exponential::new(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = d.sample(40000, &mut rng).unwrap();
        let mean: f64 = s.observations().iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.02);
    }
}
