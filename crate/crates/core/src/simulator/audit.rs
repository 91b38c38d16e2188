use serde::Serialize;

use crate::equilibrium::EquilibriumProfile;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mixed strategies of all bidders together with the payoff they promise
/// each participating bidder.
pub trait StrategyProfile<T: Scalar> {
    fn bidder_count(&self) -> usize;
    /// 1-based rank.
    fn participation(&self, bidder: usize) -> T;
    fn cdf(&self, bidder: usize, x: T) -> T;
    fn promised_payoff(&self) -> T;
    /// Highest bid worth auditing.
    fn bid_ceiling(&self) -> T;
    /// Bids that must be on every audit grid.
    fn critical_bids(&self) -> Vec<T>;
}

impl<T: Scalar> StrategyProfile<T> for EquilibriumProfile<T> {
    fn bidder_count(&self) -> usize {
        EquilibriumProfile::bidder_count(self)
    }

    fn participation(&self, bidder: usize) -> T {
        self.probabilities()[bidder - 1]
    }

    fn cdf(&self, bidder: usize, x: T) -> T {
        self.distributions()[bidder - 1].cdf(x)
    }

    fn promised_payoff(&self) -> T {
        self.lambda()
    }

    fn bid_ceiling(&self) -> T {
        EquilibriumProfile::bid_ceiling(self)
    }

    fn critical_bids(&self) -> Vec<T> {
        self.breakpoints().to_vec()
    }
}

/// Expected profit of `bidder` deviating to the pure bid `x`.
pub fn deviation_payoff<T: Scalar, P: StrategyProfile<T> + ?Sized>(profile: &P, bidder: usize, x: T) -> T {
    let win = (1..=profile.bidder_count()).filter(|&j| j != bidder).fold(T::one(), |acc, j| {
        let p = profile.participation(j);
        acc * (p * profile.cdf(j, x) + T::one() - p)
    });
    win - x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditReport<T> {
    pub bidder: usize,
    pub grid_points: usize,
    pub promised_payoff: T,
    /// Expected payoff of the bidder's own mixed strategy against the others,
    /// summed over the grid cells.
    pub realised_payoff: T,
    pub max_payoff: T,
    pub argmax_bid: T,
    /// `max_payoff - realised_payoff`: what a pure deviation gains over
    /// playing the profile. At most rounding noise for an equilibrium.
    pub deviation_gain: T,
    /// `max_payoff - promised_payoff`.
    pub gain_over_promise: T,
}

/// Best pure-bid deviation for one bidder over an even grid on
/// `[0, ceiling]` merged with the profile's critical bids.
pub fn best_response_audit<T: Scalar, P: StrategyProfile<T> + ?Sized>(
    profile: &P,
    bidder: usize,
    grid_size: usize,
) -> Result<AuditReport<T>> {
    let n = profile.bidder_count();
    if bidder == 0 || bidder > n {
        return Err(Error::BidderOutOfRange { bidder, count: n });
    }
    if grid_size < 2 {
        return Err(Error::GridTooSmall(grid_size));
    }
    let ceiling = profile.bid_ceiling();
    let step = ceiling / T::from_count(grid_size - 1);
    let mut grid: Vec<T> = (0..grid_size)
        .map(|t| if t + 1 == grid_size { ceiling } else { step * T::from_count(t) })
        .chain(profile.critical_bids())
        .collect();
    let points = grid.len();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));

    let payoffs: Vec<T> = grid.iter().map(|&x| deviation_payoff(profile, bidder, x)).collect();
    let mut best = (T::neg_infinity(), T::zero());
    for (&x, &v) in grid.iter().zip(&payoffs) {
        if v > best.0 {
            best = (v, x);
        }
    }
    // Stieltjes sum of the payoff against the bidder's own CDF; the atom at
    // the bottom of the grid is weighted by its own payoff.
    let half = T::lit(0.5);
    let mut prev_cdf = profile.cdf(bidder, grid[0]);
    let mut realised = prev_cdf * payoffs[0];
    for j in 1..grid.len() {
        let cdf = profile.cdf(bidder, grid[j]);
        realised = realised + (cdf - prev_cdf) * half * (payoffs[j - 1] + payoffs[j]);
        prev_cdf = cdf;
    }

    let promised = profile.promised_payoff();
    Ok(AuditReport {
        bidder,
        grid_points: points,
        promised_payoff: promised,
        realised_payoff: realised,
        max_payoff: best.0,
        argmax_bid: best.1,
        deviation_gain: best.0 - realised,
        gain_over_promise: best.0 - promised,
    })
}

/// Audits every bidder.
pub fn audit_all<T: Scalar, P: StrategyProfile<T> + ?Sized>(
    profile: &P,
    grid_size: usize,
) -> Result<Vec<AuditReport<T>>> {
    (1..=profile.bidder_count()).map(|i| best_response_audit(profile, i, grid_size)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Equilibrium with bidder 1's distribution swapped for a uniform one on
    /// the same support.
    struct UniformFirstBidder(EquilibriumProfile<f64>);

    impl StrategyProfile<f64> for UniformFirstBidder {
        fn bidder_count(&self) -> usize {
            self.0.bidder_count()
        }
        fn participation(&self, bidder: usize) -> f64 {
            self.0.participation(bidder)
        }
        fn cdf(&self, bidder: usize, x: f64) -> f64 {
            if bidder == 1 {
                let d = &self.0.distributions()[0];
                let (lo, hi) = (d.support_floor(), d.support_ceiling());
                ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                StrategyProfile::cdf(&self.0, bidder, x)
            }
        }
        fn promised_payoff(&self) -> f64 {
            self.0.lambda()
        }
        fn bid_ceiling(&self) -> f64 {
            self.0.bid_ceiling()
        }
        fn critical_bids(&self) -> Vec<f64> {
            self.0.critical_bids()
        }
    }

    fn example() -> EquilibriumProfile<f64> {
        EquilibriumProfile::<f64>::from_probabilities(&[1.0 / 3.0, 0.5, 0.75, 1.0]).unwrap()
    }

    #[test]
    fn equilibrium_has_no_profitable_deviation() {
        let eq = example();
        for report in audit_all(&eq, 10_000).unwrap() {
            assert!(report.deviation_gain.abs() <= 1e-9, "{report:?}");
            assert!(report.gain_over_promise.abs() <= 1e-9, "{report:?}");
            assert_eq!(report.grid_points, 10_004);
        }
    }

    #[test]
    fn full_participation_has_zero_profit() {
        let eq = EquilibriumProfile::<f64>::from_probabilities(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(eq.lambda(), 0.0);
        for report in audit_all(&eq, 2_000).unwrap() {
            assert!(report.deviation_gain <= 1e-9);
        }
    }

    #[test]
    fn corrupted_profile_is_caught() {
        let bad = UniformFirstBidder(example());
        let worst = audit_all(&bad, 10_000).unwrap().iter().map(|r| r.deviation_gain).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst > 0.01, "{worst}");
        // nobody can beat the promised payoff; the damage is in what the
        // profile actually delivers
        for r in audit_all(&bad, 10_000).unwrap() {
            assert!(r.gain_over_promise <= 1e-9);
        }
    }

    #[test]
    fn validation() {
        let eq = example();
        assert_eq!(best_response_audit(&eq, 1, 1).unwrap_err(), Error::GridTooSmall(1));
        assert!(best_response_audit(&eq, 5, 10).is_err());
    }
}
