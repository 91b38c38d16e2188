//! The symmetric equilibrium: breakpoints, per-bidder piecewise bid
//! distributions and the payoff of a unilateral bid.
//!
//! Write `q_k = 1 - p_k` with a dummy bidder `p_0 = 0`, `P_k = q_0 * .. * q_{k-1}`
//! and `lambda = q_1 * .. * q_{n-1}`. On the k-th interval `[s_k, s_{k-1})`
//! every bidder that is active there mixes so that the common term
//! `p_i F_i(x) + 1 - p_i` equals `H_k(x) = ((lambda + x) / P_k)^(1/(n-k))`.
//! Bidder `i` is active on intervals `1..=min(i, n-1)`; the most reliable
//! bidder copies bidder `n-1` and keeps the leftover mass as an atom at 0.

use serde::Serialize;

use crate::config::AuctionConfig;
use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

/// One interval `[lower, upper)` of the equilibrium together with the closed
/// form of the common term on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece<T> {
    /// Interval index k, `1..=n-1`.
    pub index: usize,
    /// `s_k`.
    pub lower: T,
    /// `s_{k-1}`.
    pub upper: T,
    /// `P_k`, product of the failure probabilities of bidders `0..k`.
    pub prefix_product: T,
    /// Number of bidders active on the interval, `n - k`.
    pub degree: usize,
    /// `1 - p_k`: value of the common term at `lower`.
    pub level_low: T,
    /// `1 - p_{k-1}`: value of the common term at `upper`.
    pub level_high: T,
}

impl<T: Scalar> Piece<T> {
    pub fn is_empty(&self) -> bool {
        self.lower >= self.upper
    }

    /// Pieces whose prefix product vanishes are never reached.
    pub fn is_used(&self) -> bool {
        self.prefix_product > T::zero()
    }

    pub fn contains(&self, x: T) -> bool {
        self.lower <= x && x < self.upper
    }

    /// `H_k(x)`.
    pub fn level(&self, lambda: T, x: T) -> T {
        ((lambda + x) / self.prefix_product).powf(T::one() / T::from_count(self.degree))
    }

    /// `dH_k/dx`.
    pub fn level_slope(&self, lambda: T, x: T) -> T {
        let d = T::from_count(self.degree);
        (lambda + x).powf((T::one() - d) / d) / (d * self.prefix_product.powf(T::one() / d))
    }

    /// Bid at which the common term equals `level`.
    pub fn bid_at_level(&self, lambda: T, level: T) -> T {
        powi(level, self.degree) * self.prefix_product - lambda
    }
}

/// One bidder's equilibrium bid distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidDistribution<T> {
    /// 1-based rank.
    pub bidder: usize,
    pub probability: T,
    pub lambda: T,
    /// Non-empty, used pieces of the support in increasing k (decreasing bids).
    pub pieces: Vec<Piece<T>>,
    pub atom_at_zero: T,
}

impl<T: Scalar> BidDistribution<T> {
    /// Lowest bid in the support, ignoring the atom.
    pub fn support_floor(&self) -> T {
        self.pieces.last().map_or(T::zero(), |p| p.lower)
    }

    /// Highest bid, `1 - lambda`.
    pub fn support_ceiling(&self) -> T {
        self.pieces.first().map_or(T::zero(), |p| p.upper)
    }

    fn piece_at(&self, x: T) -> Option<&Piece<T>> {
        self.pieces.iter().find(|p| p.lower <= x)
    }

    pub fn cdf(&self, x: T) -> T {
        if x >= self.support_ceiling() {
            return T::one();
        }
        if x < self.support_floor() || x < T::zero() {
            return T::zero();
        }
        if x == T::zero() && self.atom_at_zero > T::zero() {
            return self.atom_at_zero;
        }
        match self.piece_at(x) {
            Some(piece) => {
                let p = self.probability;
                ((piece.level(self.lambda, x) + p - T::one()) / p).clamp_unit()
            }
            None => T::zero(),
        }
    }

    /// Density of the continuous part; at the atom this is the right limit.
    pub(crate) fn continuous_density(&self, x: T) -> T {
        if x >= self.support_ceiling() || x < self.support_floor() || x < T::zero() {
            return T::zero();
        }
        match self.piece_at(x) {
            Some(piece) => piece.level_slope(self.lambda, x) / self.probability,
            None => T::zero(),
        }
    }

    pub fn pdf(&self, x: T) -> Result<T> {
        if x == T::zero() && self.atom_at_zero > T::zero() {
            return Err(Error::AtomHasNoDensity);
        }
        Ok(self.continuous_density(x))
    }

    /// Inverse CDF. Levels inside the atom map to 0; otherwise the bid solves
    /// `F(x) = u` on the piece whose common-term range contains
    /// `p * u + 1 - p`.
    pub fn quantile(&self, u: T) -> Result<T> {
        if !(u >= T::zero() && u <= T::one()) {
            return Err(Error::LevelOutOfRange(u.to_f64_lossy()));
        }
        if self.atom_at_zero > T::zero() && u <= self.atom_at_zero {
            return Ok(T::zero());
        }
        let level = self.probability * u + T::one() - self.probability;
        let piece = self
            .pieces
            .iter()
            .find(|p| p.level_low <= level)
            .or(self.pieces.last())
            .expect("a bidder always has at least one piece");
        let x = piece.bid_at_level(self.lambda, level);
        Ok(x.max(piece.lower).min(piece.upper).max(T::zero()))
    }
}

/// The symmetric equilibrium of an auction with at least two bidders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumProfile<T> {
    config: AuctionConfig<T>,
    lambda: T,
    breakpoints: Vec<T>,
    prefix_products: Vec<T>,
    atom_n: T,
    pieces: Vec<Piece<T>>,
    distributions: Vec<BidDistribution<T>>,
}

impl<T: Scalar> EquilibriumProfile<T> {
    pub fn new(config: AuctionConfig<T>) -> Result<Self> {
        let n = config.bidder_count();
        if n < 2 {
            return Err(Error::DegenerateAuction(n));
        }
        let p = config.probabilities();
        // padded[k] = p_k with the dummy p_0 = 0
        let padded: Vec<T> = std::iter::once(T::zero()).chain(p.iter().copied()).collect();

        let mut prefix_products = Vec::with_capacity(n + 1);
        prefix_products.push(T::one());
        for k in 1..=n {
            let prev = prefix_products[k - 1];
            prefix_products.push(prev * (T::one() - padded[k - 1]));
        }
        let lambda = config.lambda();

        let mut breakpoints = Vec::with_capacity(n);
        breakpoints.push(T::one() - lambda);
        for k in 1..n {
            let raw = powi(T::one() - padded[k], n - k) * prefix_products[k] - lambda;
            let prev = breakpoints[k - 1];
            breakpoints.push(raw.min(prev).max(T::zero()));
        }
        let last = powi(T::one() - padded[n - 1], 1) * prefix_products[n - 1] - lambda;
        debug_assert!(last.abs() <= T::snap_tolerance(), "s_(n-1) = {last} is not zero");
        breakpoints[n - 1] = T::zero();

        let pieces: Vec<Piece<T>> = (1..n)
            .map(|k| Piece {
                index: k,
                lower: breakpoints[k],
                upper: breakpoints[k - 1],
                prefix_product: prefix_products[k],
                degree: n - k,
                level_low: T::one() - padded[k],
                level_high: T::one() - padded[k - 1],
            })
            .collect();

        let atom_n = T::one() - p[n - 2] / p[n - 1];
        let distributions = (1..=n)
            .map(|i| {
                let active = i.min(n - 1);
                BidDistribution {
                    bidder: i,
                    probability: p[i - 1],
                    lambda,
                    pieces: pieces[..active].iter().copied().filter(|pc| !pc.is_empty() && pc.is_used()).collect(),
                    atom_at_zero: if i == n { atom_n } else { T::zero() },
                }
            })
            .collect();

        Ok(Self { config, lambda, breakpoints, prefix_products, atom_n, pieces, distributions })
    }

    pub fn from_probabilities(raw: &[T]) -> Result<Self> {
        Self::new(AuctionConfig::new(raw)?)
    }

    pub fn config(&self) -> &AuctionConfig<T> {
        &self.config
    }

    pub fn bidder_count(&self) -> usize {
        self.config.bidder_count()
    }

    pub fn probabilities(&self) -> &[T] {
        self.config.probabilities()
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `[s_0, s_1, .., s_{n-1}]`, nonincreasing, `s_0 = 1 - lambda`, `s_{n-1} = 0`.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Entry k is `P_k`, k = 0..=n.
    pub fn prefix_products(&self) -> &[T] {
        &self.prefix_products
    }

    /// Atom of the most reliable bidder at 0: `1 - p_{n-1}/p_n`.
    pub fn atom_n(&self) -> T {
        self.atom_n
    }

    /// All intervals k = 1..n-1, empty and unused ones included.
    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// Highest bid anyone places: `s_0`.
    pub fn bid_ceiling(&self) -> T {
        self.breakpoints[0]
    }

    pub fn distribution(&self, bidder: usize) -> Result<&BidDistribution<T>> {
        self.config.check_bidder(bidder)?;
        Ok(&self.distributions[bidder - 1])
    }

    pub fn distributions(&self) -> &[BidDistribution<T>] {
        &self.distributions
    }

    /// `H_k(x)`.
    pub fn h_value(&self, piece: usize, x: T) -> Result<T> {
        let last = self.bidder_count() - 1;
        if piece == 0 || piece > last {
            return Err(Error::PieceOutOfRange { piece, last });
        }
        let pc = &self.pieces[piece - 1];
        if !pc.is_used() {
            return Err(Error::UnusedPiece(piece));
        }
        if self.lambda + x < T::zero() {
            return Err(Error::BidOutOfRange {
                bid: x.to_f64_lossy(),
                low: (-self.lambda).to_f64_lossy(),
                high: f64::INFINITY,
            });
        }
        Ok(pc.level(self.lambda, x))
    }

    /// Interval index k with `s_k <= x < s_{k-1}`, skipping empty intervals.
    /// `None` outside `[0, s_0)`.
    pub fn piece_index_at(&self, x: T) -> Option<usize> {
        if x < T::zero() || x >= self.bid_ceiling() {
            return None;
        }
        let above = self.breakpoints[1..].partition_point(|&s| s > x);
        Some(above + 1)
    }

    pub fn cdf(&self, bidder: usize, x: T) -> Result<T> {
        Ok(self.distribution(bidder)?.cdf(x))
    }

    pub fn pdf(&self, bidder: usize, x: T) -> Result<T> {
        self.distribution(bidder)?.pdf(x)
    }

    pub fn quantile(&self, bidder: usize, u: T) -> Result<T> {
        self.distribution(bidder)?.quantile(u)
    }

    pub fn atom_at_zero(&self, bidder: usize) -> Result<T> {
        Ok(self.distribution(bidder)?.atom_at_zero)
    }

    /// Expected profit of `bidder` bidding `x` while everyone else follows the
    /// equilibrium: `prod_{j != i}(p_j F_j(x) + 1 - p_j) - x`.
    pub fn payoff(&self, bidder: usize, x: T) -> Result<T> {
        self.config.check_bidder(bidder)?;
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::BidOutOfRange { bid: x.to_f64_lossy(), low: 0.0, high: 1.0 });
        }
        let win = self
            .distributions
            .iter()
            .filter(|d| d.bidder != bidder)
            .fold(T::one(), |acc, d| acc * (d.probability * d.cdf(x) + T::one() - d.probability));
        Ok(win - x)
    }

    /// Unconditional expected utility `p_i * lambda`.
    pub fn expected_utility(&self, bidder: usize) -> Result<T> {
        Ok(self.config.probability(bidder)? * self.lambda)
    }

    /// Expected utility of a caller position; 0 for a dropped bidder.
    pub fn expected_utility_for_caller(&self, caller_index: usize) -> T {
        self.config.rank_of(caller_index).map_or(T::zero(), |rank| self.config.probabilities()[rank - 1] * self.lambda)
    }
}
