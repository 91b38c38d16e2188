//! Seeded Monte Carlo play of the equilibrium and grid best-response audits.
//!
//! Every trial owns its own ChaCha8 stream: the key is derived from the seed
//! and the stream id is the trial index. A trial first draws one uniform per
//! bidder (rank order) to decide participation, then one uniform per
//! participant (rank order) that is fed to that bidder's quantile function.
//! Trials are grouped into fixed chunks whose statistics are merged in chunk
//! order, so the report does not depend on the thread count.

mod audit;
mod stats;

pub use audit::{audit_all, best_response_audit, deviation_payoff, AuditReport, StrategyProfile};
pub use stats::{Accumulator, Estimate};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::AuctionConfig;
use crate::equilibrium::EquilibriumProfile;
use crate::error::{Error, Result};
use crate::metrics;
use crate::scalar::Scalar;
use crate::uniform::UniformCase;

const CHUNK: u64 = 8192;

/// Result of one auction. Vectors are indexed by rank - 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuctionOutcome<T> {
    pub participated: Vec<bool>,
    /// `None` for bidders that did not show up.
    pub bids: Vec<Option<T>>,
    /// 1-based ranks of the highest bidders.
    pub winners: Vec<usize>,
    pub utilities: Vec<T>,
    pub sum_revenue: T,
    pub max_revenue: T,
}

impl<T: Scalar> AuctionOutcome<T> {
    /// Settles an auction: the highest bidders split the unit prize, everyone
    /// who showed up pays their bid.
    pub fn from_bids(bids: Vec<Option<T>>) -> Self {
        let max = bids.iter().flatten().copied().fold(None, |m: Option<T>, b| Some(m.map_or(b, |m| m.max(b))));
        let winners: Vec<usize> = match max {
            Some(top) => bids.iter().enumerate().filter(|(_, b)| **b == Some(top)).map(|(i, _)| i + 1).collect(),
            None => Vec::new(),
        };
        let share = if winners.is_empty() { T::zero() } else { T::one() / T::from_count(winners.len()) };
        let utilities = bids
            .iter()
            .enumerate()
            .map(|(i, b)| match b {
                None => T::zero(),
                Some(b) if winners.contains(&(i + 1)) => share - *b,
                Some(b) => -*b,
            })
            .collect();
        Self {
            participated: bids.iter().map(Option::is_some).collect(),
            sum_revenue: bids.iter().flatten().fold(T::zero(), |acc, &b| acc + b),
            max_revenue: max.unwrap_or(T::zero()),
            winners,
            utilities,
            bids,
        }
    }
}

/// A config ready to be played repeatedly. A lone bidder always bids 0.
#[derive(Debug, Clone)]
pub struct Auction<T> {
    config: AuctionConfig<T>,
    equilibrium: Option<EquilibriumProfile<T>>,
}

impl<T: Scalar> Auction<T> {
    pub fn new(config: AuctionConfig<T>) -> Result<Self> {
        let equilibrium =
            if config.bidder_count() >= 2 { Some(EquilibriumProfile::new(config.clone())?) } else { None };
        Ok(Self { config, equilibrium })
    }

    pub fn config(&self) -> &AuctionConfig<T> {
        &self.config
    }

    pub fn equilibrium(&self) -> Option<&EquilibriumProfile<T>> {
        self.equilibrium.as_ref()
    }

    /// Equilibrium bid of `bidder` for the uniform level `u`.
    pub fn bid(&self, bidder: usize, u: T) -> Result<T> {
        match &self.equilibrium {
            Some(eq) => eq.quantile(bidder, u),
            None => {
                self.config.check_bidder(bidder)?;
                Ok(T::zero())
            }
        }
    }

    /// Replays an auction from explicit draws: `levels` holds one quantile
    /// level per participant, in rank order.
    pub fn replay(&self, participated: &[bool], levels: &[T]) -> Result<AuctionOutcome<T>> {
        let n = self.config.bidder_count();
        let shows = participated.iter().filter(|&&p| p).count();
        if participated.len() != n || levels.len() != shows {
            return Err(Error::DrawCountMismatch { expected: n, participants: shows, levels: levels.len() });
        }
        let mut next = levels.iter();
        let bids = participated
            .iter()
            .enumerate()
            .map(|(i, &shows)| if shows { self.bid(i + 1, *next.next().expect("counted")).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?;
        Ok(AuctionOutcome::from_bids(bids))
    }

    /// Plays one auction with fresh randomness.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> AuctionOutcome<T> {
        let participated: Vec<bool> =
            self.config.probabilities().iter().map(|&p| rng.random::<f64>() < p.to_f64_lossy()).collect();
        let levels: Vec<T> = participated.iter().filter(|&&p| p).map(|_| T::lit(rng.random::<f64>())).collect();
        self.replay(&participated, &levels).expect("draws match the config")
    }
}

/// Plays a single auction; builds the equilibrium on every call, so prefer
/// [`Auction`] for repeated play.
pub fn run_auction<T: Scalar, R: Rng + ?Sized>(config: &AuctionConfig<T>, rng: &mut R) -> Result<AuctionOutcome<T>> {
    Ok(Auction::new(config.clone())?.run(rng))
}

/// The random stream used by trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Default)]
struct Tally {
    participation: Vec<Accumulator>,
    bid: Vec<Accumulator>,
    zero_bid: Vec<Accumulator>,
    utility: Vec<Accumulator>,
    sum_revenue: Accumulator,
    max_revenue: Accumulator,
}

impl Tally {
    fn new(n: usize) -> Self {
        let v = vec![Accumulator::default(); n];
        Self { participation: v.clone(), bid: v.clone(), zero_bid: v.clone(), utility: v, ..Self::default() }
    }

    fn record<T: Scalar>(&mut self, outcome: &AuctionOutcome<T>) {
        for (i, bid) in outcome.bids.iter().enumerate() {
            self.participation[i].push(if bid.is_some() { 1.0 } else { 0.0 });
            if let Some(b) = bid {
                let b = b.to_f64_lossy();
                self.bid[i].push(b);
                self.zero_bid[i].push(if b == 0.0 { 1.0 } else { 0.0 });
            }
            self.utility[i].push(outcome.utilities[i].to_f64_lossy());
        }
        self.sum_revenue.push(outcome.sum_revenue.to_f64_lossy());
        self.max_revenue.push(outcome.max_revenue.to_f64_lossy());
    }

    fn merge(&self, other: &Self) -> Self {
        let zip = |a: &[Accumulator], b: &[Accumulator]| a.iter().zip(b).map(|(x, y)| x.merge(y)).collect();
        Self {
            participation: zip(&self.participation, &other.participation),
            bid: zip(&self.bid, &other.bid),
            zero_bid: zip(&self.zero_bid, &other.zero_bid),
            utility: zip(&self.utility, &other.utility),
            sum_revenue: self.sum_revenue.merge(&other.sum_revenue),
            max_revenue: self.max_revenue.merge(&other.max_revenue),
        }
    }
}

/// Empirical statistics of one bidder. Bid and zero-bid statistics are over
/// the trials in which the bidder showed up; utility is over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidderEstimates {
    pub rank: usize,
    pub caller_index: usize,
    pub probability: f64,
    pub participation: Estimate,
    pub bid: Estimate,
    pub zero_bid: Estimate,
    pub utility: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub trials: u64,
    pub bidders: Vec<BidderEstimates>,
    pub sum_revenue: Estimate,
    pub max_revenue: Estimate,
}

/// Runs `trials` auctions on the global rayon pool.
pub fn monte_carlo<T: Scalar>(config: &AuctionConfig<T>, trials: u64, seed: u64) -> Result<SimulationReport> {
    monte_carlo_with_threads(config, trials, seed, None)
}

/// Runs `trials` auctions on at most `threads` threads (`None`: rayon default).
/// The report is identical for every thread count.
pub fn monte_carlo_with_threads<T: Scalar>(
    config: &AuctionConfig<T>,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let auction = Auction::new(config.clone())?;
    let n = config.bidder_count();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = trials.div_ceil(CHUNK);
    let run_chunk = |c: u64| {
        let mut tally = Tally::new(n);
        for trial in c * CHUNK..((c + 1) * CHUNK).min(trials) {
            let mut rng = base.clone();
            rng.set_stream(trial);
            tally.record(&auction.run(&mut rng));
        }
        tally
    };
    let tallies: Vec<Tally> = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?
            .install(|| (0..chunks).into_par_iter().map(run_chunk).collect()),
        None => (0..chunks).into_par_iter().map(run_chunk).collect(),
    };
    let total = tallies.iter().fold(Tally::new(n), |acc, t| acc.merge(t));

    let bidders = (0..n)
        .map(|i| BidderEstimates {
            rank: i + 1,
            caller_index: config.user_order()[i],
            probability: config.probabilities()[i].to_f64_lossy(),
            participation: total.participation[i].estimate(),
            bid: total.bid[i].estimate(),
            zero_bid: total.zero_bid[i].estimate(),
            utility: total.utility[i].estimate(),
        })
        .collect();
    Ok(SimulationReport {
        seed,
        trials,
        bidders,
        sum_revenue: total.sum_revenue.estimate(),
        max_revenue: total.max_revenue.estimate(),
    })
}

/// An empirical mean or variance next to its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub analytic: f64,
    pub empirical: f64,
    pub standard_error: f64,
    /// Distance in standard errors.
    pub z: f64,
}

impl Check {
    pub fn mean(estimate: &Estimate, analytic: f64) -> Self {
        Self {
            analytic,
            empirical: estimate.mean,
            standard_error: estimate.standard_error,
            z: estimate.mean_z(analytic),
        }
    }

    pub fn variance(estimate: &Estimate, analytic: f64) -> Self {
        Self {
            analytic,
            empirical: estimate.variance,
            standard_error: estimate.variance_standard_error,
            z: estimate.variance_z(analytic),
        }
    }

    pub fn within(&self, standard_errors: f64) -> bool {
        self.z <= standard_errors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidderChecks {
    pub rank: usize,
    pub caller_index: usize,
    pub expected_bid: Check,
    pub utility: Check,
    pub zero_bid: Check,
    /// Only when all probabilities are equal.
    pub bid_variance: Option<Check>,
    pub utility_variance: Option<Check>,
}

/// Simulation results set against the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub bidders: Vec<BidderChecks>,
    pub sum_revenue: Check,
    pub max_revenue: Check,
    pub sum_revenue_variance: Option<Check>,
    pub max_revenue_variance: Option<Check>,
}

impl Comparison {
    pub fn new<T: Scalar>(report: &SimulationReport, eq: &EquilibriumProfile<T>) -> Self {
        let p = eq.probabilities();
        let n = p.len();
        let f = |x: T| x.to_f64_lossy();
        let uniform = if p.iter().all(|&x| x == p[0]) { UniformCase::new(n, p[0]).ok() } else { None };
        let bidders = report
            .bidders
            .iter()
            .map(|b| {
                let i = b.rank;
                BidderChecks {
                    rank: i,
                    caller_index: b.caller_index,
                    expected_bid: Check::mean(&b.bid, f(metrics::expected_bid(eq, i).expect("rank in range"))),
                    utility: Check::mean(&b.utility, f(p[i - 1] * eq.lambda())),
                    zero_bid: Check::mean(&b.zero_bid, if i == n { f(eq.atom_n()) } else { 0.0 }),
                    bid_variance: uniform.map(|u| Check::variance(&b.bid, f(u.bid_moments().variance))),
                    utility_variance: uniform.map(|u| Check::variance(&b.utility, f(u.bidder_profit().variance))),
                }
            })
            .collect();
        Self {
            bidders,
            sum_revenue: Check::mean(&report.sum_revenue, f(metrics::sum_profit(eq))),
            max_revenue: Check::mean(&report.max_revenue, f(metrics::max_profit(eq))),
            sum_revenue_variance: uniform.map(|u| Check::variance(&report.sum_revenue, f(u.sum_profit().variance))),
            max_revenue_variance: uniform.map(|u| Check::variance(&report.max_revenue, f(u.max_profit().variance))),
        }
    }

    /// Every check, labelled.
    pub fn checks(&self) -> Vec<(String, Check)> {
        let mut out = Vec::new();
        for b in &self.bidders {
            out.push((format!("bidder {} expected bid", b.rank), b.expected_bid));
            out.push((format!("bidder {} utility", b.rank), b.utility));
            out.push((format!("bidder {} zero-bid frequency", b.rank), b.zero_bid));
            if let Some(c) = b.bid_variance {
                out.push((format!("bidder {} bid variance", b.rank), c));
            }
            if let Some(c) = b.utility_variance {
                out.push((format!("bidder {} utility variance", b.rank), c));
            }
        }
        out.push(("sum revenue".into(), self.sum_revenue));
        out.push(("max revenue".into(), self.max_revenue));
        if let Some(c) = self.sum_revenue_variance {
            out.push(("sum revenue variance".into(), c));
        }
        if let Some(c) = self.max_revenue_variance {
            out.push(("max revenue variance".into(), c));
        }
        out
    }
}

/// A simulation together with its comparison (absent for a lone bidder).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifiedSimulation {
    pub simulation: SimulationReport,
    pub comparison: Option<Comparison>,
}

pub fn simulate_and_compare<T: Scalar>(
    config: &AuctionConfig<T>,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<VerifiedSimulation> {
    let simulation = monte_carlo_with_threads(config, trials, seed, threads)?;
    let comparison = if config.bidder_count() >= 2 {
        Some(Comparison::new(&simulation, &EquilibriumProfile::new(config.clone())?))
    } else {
        None
    };
    Ok(VerifiedSimulation { simulation, comparison })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nobody_shows_up() {
        let o = AuctionOutcome::<f64>::from_bids(vec![None, None]);
        assert!(o.winners.is_empty());
        assert_eq!(o.utilities, vec![0.0, 0.0]);
        assert_eq!((o.sum_revenue, o.max_revenue), (0.0, 0.0));
    }

    #[test]
    fn single_participant() {
        let o = AuctionOutcome::<f64>::from_bids(vec![None, Some(0.3), None]);
        assert_eq!(o.winners, vec![2]);
        assert!((o.utilities[1] - 0.7).abs() < 1e-15);
        assert_eq!((o.sum_revenue, o.max_revenue), (0.3, 0.3));
    }

    #[test]
    fn ties_split_the_prize() {
        let o = AuctionOutcome::<f64>::from_bids(vec![Some(0.2), Some(0.4), Some(0.4)]);
        assert_eq!(o.winners, vec![2, 3]);
        assert_eq!(o.utilities[0], -0.2);
        assert!((o.utilities[1] - 0.1).abs() < 1e-15 && o.utilities[1] == o.utilities[2]);
        assert!((o.sum_revenue - 1.0).abs() < 1e-15);
    }

    #[test]
    fn forced_draws() {
        let auction = Auction::new(AuctionConfig::<f64>::new(&[0.5, 1.0]).unwrap()).unwrap();
        let o = auction.replay(&[true, true], &[0.9, 0.9]).unwrap();
        // F_1(x) = 2x and F_2(x) = 1/2 + x on [0, 1/2]
        let (b1, b2) = (0.45, 0.4);
        let bids: Vec<f64> = o.bids.iter().map(|b| b.unwrap()).collect();
        assert!((bids[0] - b1).abs() < 1e-15 && (bids[1] - b2).abs() < 1e-15);
        assert_eq!(o.winners, vec![1]);
        assert!((o.utilities[0] - (1.0 - b1)).abs() < 1e-15);
        assert_eq!(o.utilities[1], -bids[1]);
        assert!(auction.replay(&[true, false], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn lone_bidder_bids_zero() {
        let auction = Auction::new(AuctionConfig::<f64>::new(&[0.7]).unwrap()).unwrap();
        let o = auction.replay(&[true], &[0.99]).unwrap();
        assert_eq!(o.bids, vec![Some(0.0)]);
        assert_eq!(o.utilities, vec![1.0]);
        let r = monte_carlo(auction.config(), 5000, 3).unwrap();
        assert!(r.bidders[0].utility.mean_z(0.7) < 4.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let config = AuctionConfig::<f64>::new(&[0.5, 0.5]).unwrap();
        assert_eq!(monte_carlo(&config, 0, 1).unwrap_err(), Error::NoTrials);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let config = AuctionConfig::<f64>::new(&[0.3, 0.6, 0.9]).unwrap();
        let one = monte_carlo_with_threads(&config, 20_000, 11, Some(1)).unwrap();
        let four = monte_carlo_with_threads(&config, 20_000, 11, Some(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.seed, 11);
        assert_eq!(one.trials, 20_000);
    }

    #[test]
    fn trial_streams_differ() {
        let a: u64 = trial_rng(5, 0).random();
        let b: u64 = trial_rng(5, 1).random();
        let c: u64 = trial_rng(6, 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, trial_rng(5, 0).random::<u64>());
    }
}
