//! Identical participation probabilities: closed-form means and variances.
//!
//! Bid moments are conditional on participating; bidder profit and both
//! revenue models are unconditional (a no-show earns and pays nothing).

use serde::Serialize;

use crate::equilibrium::EquilibriumProfile;
use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments<T> {
    pub mean: T,
    pub variance: T,
}

/// `n` bidders that each participate with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformCase<T> {
    n: usize,
    p: T,
}

impl<T: Scalar> UniformCase<T> {
    pub fn new(n: usize, p: T) -> Result<Self> {
        if n < 2 || !(p > T::zero() && p <= T::one()) {
            return Err(Error::InvalidUniformCase { n, p: p.to_f64_lossy() });
        }
        Ok(Self { n, p })
    }

    pub fn bidders(&self) -> usize {
        self.n
    }

    pub fn probability(&self) -> T {
        self.p
    }

    fn q_pow(&self, exp: usize) -> T {
        powi(T::one() - self.p, exp)
    }

    fn nf(&self) -> T {
        T::from_count(self.n)
    }

    /// `(1 - p)^(n-1)`.
    pub fn lambda(&self) -> T {
        self.q_pow(self.n - 1)
    }

    /// Bid of a participating bidder.
    pub fn bid_moments(&self) -> Moments<T> {
        let (n, p, one) = (self.nf(), self.p, T::one());
        let mean = (one - self.lambda() * (one + p * (n - one))) / (n * p);
        let two_n_1 = T::lit(2.0) * n - one;
        let tail = one - self.q_pow(self.n);
        let variance = (one - self.q_pow(2 * self.n - 1)) / (two_n_1 * p) - tail * tail / (n * n * p * p);
        Moments { mean, variance }
    }

    /// Realised profit of one bidder, no-shows included.
    pub fn bidder_profit(&self) -> Moments<T> {
        let (n, p, one) = (self.nf(), self.p, T::one());
        let two_n_1 = T::lit(2.0) * n - one;
        let mean = p * self.lambda();
        let variance =
            (n - one) / (n * two_n_1) - self.q_pow(self.n) / n + (p + one / two_n_1) * self.q_pow(2 * self.n - 1);
        Moments { mean, variance }
    }

    /// Sum of all submitted bids. The variance is that of the realised sum,
    /// `n (p E[b^2] - p^2 E[b]^2)`.
    pub fn sum_profit(&self) -> Moments<T> {
        let (n, p, one) = (self.nf(), self.p, T::one());
        let mean = one - self.lambda() * (one + p * (n - one));
        let bid = self.bid_moments();
        let second = bid.variance + bid.mean * bid.mean;
        let variance = n * (p * second - p * p * bid.mean * bid.mean);
        Moments { mean, variance }
    }

    /// `n p^2 Var[bid]`. This is not the variance of the realised sum of bids
    /// (see [`UniformCase::sum_profit`]); it omits the participation noise.
    pub fn participation_scaled_bid_variance(&self) -> T {
        self.nf() * self.p * self.p * self.bid_moments().variance
    }

    /// Winning bid (0 when nobody participates).
    pub fn max_profit(&self) -> Moments<T> {
        let (n, one) = (self.nf(), T::one());
        let two_n_1 = T::lit(2.0) * n - one;
        let three_n_2 = T::lit(3.0) * n - T::lit(2.0);
        let mean = n / two_n_1 + (n - one) / two_n_1 * self.q_pow(2 * self.n - 1) - self.q_pow(self.n - 1);
        let second = self.q_pow(2 * self.n - 2) - T::lit(2.0) * n * self.q_pow(self.n - 1) / two_n_1 + n / three_n_2
            - T::lit(2.0) * (n - one) * (n - one) * self.q_pow(3 * self.n - 2) / (three_n_2 * two_n_1);
        Moments { mean, variance: second - mean * mean }
    }

    /// The general equilibrium evaluated at the constant probability vector.
    pub fn equilibrium(&self) -> EquilibriumProfile<T> {
        EquilibriumProfile::from_probabilities(&vec![self.p; self.n]).expect("validated uniform case")
    }
}

/// All closed-form uniform quantities in one serialisable record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformReport<T> {
    pub bidders: usize,
    pub probability: T,
    pub lambda: T,
    pub bid: Moments<T>,
    pub bidder_profit: Moments<T>,
    pub sum_profit: Moments<T>,
    pub participation_scaled_bid_variance: T,
    pub max_profit: Moments<T>,
}

impl<T: Scalar> UniformReport<T> {
    pub fn new(case: &UniformCase<T>) -> Self {
        Self {
            bidders: case.bidders(),
            probability: case.probability(),
            lambda: case.lambda(),
            bid: case.bid_moments(),
            bidder_profit: case.bidder_profit(),
            sum_profit: case.sum_profit(),
            participation_scaled_bid_variance: case.participation_scaled_bid_variance(),
            max_profit: case.max_profit(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;

    fn case(n: usize, p: f64) -> UniformCase<f64> {
        UniformCase::new(n, p).unwrap()
    }

    #[test]
    fn validation() {
        assert!(UniformCase::new(1, 0.5).is_err());
        assert!(UniformCase::new(3, 0.0).is_err());
        assert!(UniformCase::new(3, 1.01).is_err());
    }

    #[test]
    fn bid_moments_examples() {
        assert!((case(2, 1.0).bid_moments().mean - 0.5).abs() < 1e-15);
        let m = case(3, 0.5).bid_moments();
        assert!((m.mean - 1.0 / 3.0).abs() < 1e-15);
        // exact value 17/360 from direct integration of the density
        assert!((m.variance - 17.0 / 360.0).abs() < 1e-15);
    }

    #[test]
    fn bidder_profit_examples() {
        assert!((case(3, 0.5).bidder_profit().mean - 0.125).abs() < 1e-15);
        for n in 2..8 {
            let m = case(n, 1.0).bidder_profit();
            let nf = n as f64;
            assert_eq!(m.mean, 0.0);
            assert!((m.variance - (nf - 1.0) / (nf * (2.0 * nf - 1.0))).abs() < 1e-15);
        }
        // grid argmax of the mean for n = 2 is p = 1/2
        let best = (1..=1000)
            .map(|t| t as f64 / 1000.0)
            .max_by(|a, b| case(2, *a).bidder_profit().mean.partial_cmp(&case(2, *b).bidder_profit().mean).unwrap())
            .unwrap();
        assert!((best - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sum_profit_examples() {
        assert_eq!(case(4, 1.0).sum_profit().mean, 1.0);
        let c = case(3, 0.5);
        assert!((c.sum_profit().mean - 0.5).abs() < 1e-15);
        assert!((c.participation_scaled_bid_variance() - 0.75 * 17.0 / 360.0).abs() < 1e-15);
        // n (p E[b^2] - p^2 E[b]^2) with E[b^2] = 17/360 + 1/9
        let e2 = 17.0 / 360.0 + 1.0 / 9.0;
        assert!((c.sum_profit().variance - 3.0 * (0.5 * e2 - 0.25 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn max_profit_examples() {
        for n in 2..8 {
            let nf = n as f64;
            assert!((case(n, 1.0).max_profit().mean - nf / (2.0 * nf - 1.0)).abs() < 1e-15);
        }
        let c = case(2, 0.5);
        let general = metrics::max_profit(&c.equilibrium());
        assert!((c.max_profit().mean - 5.0 / 24.0).abs() < 1e-15);
        assert!((general - 5.0 / 24.0).abs() < 1e-15);
        assert!(case(3, 1e-9).max_profit().mean.abs() < 1e-8);
    }

    #[test]
    fn table_variances_at_full_participation() {
        for n in 2..10 {
            let c = case(n, 1.0);
            let b = metrics::NoFailureBaseline::<f64>::new(n).unwrap();
            assert!((c.bid_moments().variance - b.expected_bid_variance).abs() < 1e-15);
            assert!((c.sum_profit().variance - b.sum_profit_variance).abs() < 1e-14);
            assert!((c.max_profit().variance - b.max_profit_variance).abs() < 1e-14);
        }
    }
}
