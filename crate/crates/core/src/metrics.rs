//! Closed-form expected bids and auctioneer revenue, with quadrature
//! cross-checks and the no-failure baseline.

use serde::Serialize;

use crate::equilibrium::EquilibriumProfile;
use crate::error::{Error, Result};
use crate::quadrature::integrate_pieces;
use crate::scalar::{powi, Scalar};

const QUADRATURE_TOLERANCE: f64 = 1e-11;

/// Expected bid of a participating bidder.
pub fn expected_bid<T: Scalar>(eq: &EquilibriumProfile<T>, bidder: usize) -> Result<T> {
    eq.config().check_bidder(bidder)?;
    let n = eq.bidder_count();
    if bidder == n {
        let p = eq.probabilities();
        return Ok(p[n - 2] / p[n - 1] * expected_bid(eq, n - 1)?);
    }
    let p = eq.probabilities();
    let prefix = eq.prefix_products();
    let nf = T::from_count(n);
    let mut total = T::one() / nf;
    for k in 1..=bidder {
        // (1-p_k)^(n-k) * prod_{j=1}^{k}(1-p_j) / ((n-k)(n-k+1))
        let term = powi(T::one() - p[k - 1], n - k) * prefix[k + 1];
        total = total + term / (T::from_count(n - k) * T::from_count(n - k + 1));
    }
    let own = powi(T::one() - p[bidder - 1], n - bidder) * prefix[bidder + 1];
    total = total - own / T::from_count(n - bidder) - p[bidder - 1] * eq.lambda();
    Ok(total / p[bidder - 1])
}

/// Expected bids of all bidders in rank order.
pub fn expected_bids<T: Scalar>(eq: &EquilibriumProfile<T>) -> Vec<T> {
    (1..=eq.bidder_count()).map(|i| expected_bid(eq, i).expect("rank in range")).collect()
}

/// Revenue of an auctioneer that keeps every submitted bid:
/// `1 - lambda * (1 + p_1 + .. + p_{n-1})`.
pub fn sum_profit<T: Scalar>(eq: &EquilibriumProfile<T>) -> T {
    let p = eq.probabilities();
    let n = p.len();
    let weight = p[..n - 1].iter().fold(T::one(), |acc, &x| acc + x);
    T::one() - eq.lambda() * weight
}

/// CDF of the winning bid (0 when nobody shows up).
pub fn winning_bid_cdf<T: Scalar>(eq: &EquilibriumProfile<T>, x: T) -> T {
    if x < T::zero() {
        return T::zero();
    }
    match eq.piece_index_at(x) {
        None => T::one(),
        Some(k) => {
            let piece = &eq.pieces()[k - 1];
            let d = T::from_count(piece.degree);
            ((eq.lambda() + x).powf((d + T::one()) / d) / piece.prefix_product.powf(T::one() / d)).clamp_unit()
        }
    }
}

/// Density of the continuous part of the winning bid, assembled by the
/// product rule from the individual bid densities.
pub fn winning_bid_density<T: Scalar>(eq: &EquilibriumProfile<T>, x: T) -> T {
    let dists = eq.distributions();
    let factors: Vec<T> = dists.iter().map(|d| d.probability * d.cdf(x) + T::one() - d.probability).collect();
    dists.iter().enumerate().fold(T::zero(), |acc, (i, d)| {
        let others = factors.iter().enumerate().filter(|&(j, _)| j != i).fold(T::one(), |a, (_, &f)| a * f);
        acc + d.probability * d.continuous_density(x) * others
    })
}

/// Revenue of an auctioneer that keeps only the winning bid.
pub fn max_profit<T: Scalar>(eq: &EquilibriumProfile<T>) -> T {
    let p = eq.probabilities();
    let n = p.len();
    let prefix = eq.prefix_products();
    let nf = T::from_count(n);
    let mut total = nf / (T::lit(2.0) * nf - T::one()) - eq.lambda();
    for k in 1..n {
        let m = T::from_count(n - k);
        let num = powi(T::one() - p[k - 1], 2 * n - 2 * k - 1) * powi(prefix[k + 1], 2);
        total = total + num / (T::lit(4.0) * m * m - T::one());
    }
    total
}

fn support_edges<T: Scalar>(eq: &EquilibriumProfile<T>, floor: T) -> Vec<T> {
    let mut edges: Vec<T> = eq.breakpoints().iter().copied().filter(|&s| s >= floor).collect();
    edges.reverse();
    edges.dedup();
    edges
}

/// Expected bid by integrating `x f_i(x)` piece by piece.
pub fn expected_bid_by_quadrature<T: Scalar>(eq: &EquilibriumProfile<T>, bidder: usize) -> Result<T> {
    let dist = eq.distribution(bidder)?;
    let edges = support_edges(eq, dist.support_floor());
    Ok(integrate_pieces(|x| x * dist.continuous_density(x), &edges, T::lit(QUADRATURE_TOLERANCE)))
}

/// Max-profit revenue by integrating `x g(x)` piece by piece; the mass of the
/// winning bid at 0 contributes nothing.
pub fn max_profit_by_quadrature<T: Scalar>(eq: &EquilibriumProfile<T>) -> T {
    let edges = support_edges(eq, T::zero());
    integrate_pieces(|x| x * winning_bid_density(eq, x), &edges, T::lit(QUADRATURE_TOLERANCE))
}

/// Per-bidder line of a [`RevenueReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidderSummary<T> {
    pub rank: usize,
    pub caller_index: usize,
    pub probability: T,
    pub expected_bid: T,
    pub expected_utility: T,
    pub atom_at_zero: T,
    pub support: (T, T),
}

/// Everything the closed forms say about one auction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueReport<T> {
    pub lambda: T,
    pub breakpoints: Vec<T>,
    pub atom_n: T,
    pub sum_profit: T,
    pub max_profit: T,
    /// Rank order.
    pub bidders: Vec<BidderSummary<T>>,
    /// Caller order; dropped bidders read 0.
    pub expected_bids_by_caller: Vec<T>,
    pub expected_utilities_by_caller: Vec<T>,
    pub dropped: Vec<usize>,
}

impl<T: Scalar> RevenueReport<T> {
    pub fn new(eq: &EquilibriumProfile<T>) -> Self {
        let config = eq.config();
        let bids = expected_bids(eq);
        let utilities: Vec<T> = config.probabilities().iter().map(|&p| p * eq.lambda()).collect();
        let bidders = eq
            .distributions()
            .iter()
            .map(|d| BidderSummary {
                rank: d.bidder,
                caller_index: config.user_order()[d.bidder - 1],
                probability: d.probability,
                expected_bid: bids[d.bidder - 1],
                expected_utility: utilities[d.bidder - 1],
                atom_at_zero: d.atom_at_zero,
                support: (d.support_floor(), d.support_ceiling()),
            })
            .collect();
        Self {
            lambda: eq.lambda(),
            breakpoints: eq.breakpoints().to_vec(),
            atom_n: eq.atom_n(),
            sum_profit: sum_profit(eq),
            max_profit: max_profit(eq),
            bidders,
            expected_bids_by_caller: config.to_caller_order(&bids, T::zero()),
            expected_utilities_by_caller: config.to_caller_order(&utilities, T::zero()),
            dropped: config.dropped().to_vec(),
        }
    }
}

/// Expected values and variances when every bidder surely participates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoFailureBaseline<T> {
    pub bidders: usize,
    pub expected_bid: T,
    pub expected_bid_variance: T,
    pub bidder_utility: T,
    pub bidder_utility_variance: T,
    pub sum_profit: T,
    pub sum_profit_variance: T,
    pub max_profit: T,
    pub max_profit_variance: T,
}

impl<T: Scalar> NoFailureBaseline<T> {
    pub fn new(bidders: usize) -> Result<Self> {
        if bidders < 2 {
            return Err(Error::DegenerateAuction(bidders));
        }
        let n = T::from_count(bidders);
        let one = T::one();
        let two_n_1 = T::lit(2.0) * n - one;
        let three_n_2 = T::lit(3.0) * n - T::lit(2.0);
        Ok(Self {
            bidders,
            expected_bid: one / n,
            expected_bid_variance: one / two_n_1 - one / (n * n),
            bidder_utility: T::zero(),
            bidder_utility_variance: (n - one) / (n * two_n_1),
            sum_profit: one,
            sum_profit_variance: n / two_n_1 - one / n,
            max_profit: n / two_n_1,
            max_profit_variance: n * (n - one) * (n - one) / (three_n_2 * two_n_1 * two_n_1),
        })
    }
}
