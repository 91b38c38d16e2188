//! Best bid for a bidder that has secretly lowered a rival's participation
//! probability while everyone else keeps playing the announced equilibrium.

use serde::Serialize;

use crate::equilibrium::EquilibriumProfile;
use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

/// Saboteur `saboteur` has pushed `target`'s real participation probability
/// down to `true_probability`. Ranks are 1-based in the announced order.
#[derive(Debug, Clone, Copy)]
pub struct SabotageScenario<'a, T> {
    eq: &'a EquilibriumProfile<T>,
    saboteur: usize,
    target: usize,
    true_probability: T,
}

/// Where inside its interval a candidate bid sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// Stationary point strictly inside the interval.
    Interior,
    /// Upper edge `s_{k-1}`.
    UpperEdge,
    /// Lower edge `s_k`.
    LowerEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SabotageCandidate<T> {
    pub piece: usize,
    pub kind: CandidateKind,
    pub bid: T,
    pub profit: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SabotagePlan<T> {
    pub saboteur: usize,
    pub target: usize,
    pub saboteur_caller_index: usize,
    pub target_caller_index: usize,
    pub announced_probability: T,
    pub true_probability: T,
    pub lambda: T,
    pub candidates: Vec<SabotageCandidate<T>>,
    /// Position of the chosen candidate in `candidates`.
    pub chosen: usize,
    pub bid: T,
    pub expected_profit: T,
}

impl<'a, T: Scalar> SabotageScenario<'a, T> {
    pub fn new(eq: &'a EquilibriumProfile<T>, saboteur: usize, target: usize, true_probability: T) -> Result<Self> {
        eq.config().check_bidder(saboteur)?;
        eq.config().check_bidder(target)?;
        if saboteur == target {
            return Err(Error::SelfSabotage(saboteur));
        }
        let announced = eq.probabilities()[target - 1];
        if !(true_probability >= T::zero() && true_probability < announced) {
            return Err(Error::NotASabotage {
                actual: true_probability.to_f64_lossy(),
                announced: announced.to_f64_lossy(),
            });
        }
        Ok(Self { eq, saboteur, target, true_probability })
    }

    pub fn saboteur(&self) -> usize {
        self.saboteur
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn announced_probability(&self) -> T {
        self.eq.probabilities()[self.target - 1]
    }

    fn check_bid(&self, x: T) -> Result<()> {
        if !(x >= T::zero() && x <= self.eq.bid_ceiling()) {
            return Err(Error::BidOutOfRange {
                bid: x.to_f64_lossy(),
                low: 0.0,
                high: self.eq.bid_ceiling().to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Saboteur's expected profit from bidding `x`, by the product formula over
    /// the announced equilibrium CDFs with the target's real probability.
    pub fn payoff(&self, x: T) -> Result<T> {
        self.check_bid(x)?;
        Ok(payoff_with_target_probability(self.eq, self.saboteur, self.target, self.true_probability, x))
    }

    /// The same payoff from the per-region closed forms: both bidders active,
    /// only one of them active, or neither.
    pub fn closed_form_payoff(&self, x: T) -> Result<T> {
        self.check_bid(x)?;
        let eq = self.eq;
        let (i, r) = (self.saboteur, self.target);
        let p = eq.probabilities();
        let lam = eq.lambda();
        let (p_i, p_r, p_true) = (p[i - 1], p[r - 1], self.true_probability);
        let k = eq.piece_index_at(x).unwrap_or(1);
        let piece = &eq.pieces()[k - 1];
        let d = T::from_count(piece.degree);
        let mass = lam + x;
        let one = T::one();

        let value = if k <= i.min(r) {
            let gain = (p_r - p_true) / p_r;
            let lift = if mass > T::zero() { (piece.prefix_product / mass).powf(one / d) - one } else { T::zero() };
            gain * mass * lift + lam
        } else if k <= i {
            // target inactive here, saboteur active
            (p_r - p_true) / (one - p_r) * mass + lam
        } else if k <= r {
            // saboteur bids below its own support, target active
            let ratio = p_true / p_r;
            mass / (one - p_i) * (ratio * piece.level(lam, x) - ratio + p_i) + lam
        } else {
            let scale = (one - p_true) / ((one - p_i) * (one - p_r));
            mass * (scale * piece.level(lam, x) - one) + lam
        };
        Ok(value)
    }

    /// Candidate-per-interval search over the intervals where both bidders
    /// are active; returns the most profitable candidate.
    pub fn optimal_bid(&self) -> SabotagePlan<T> {
        let eq = self.eq;
        let n = eq.bidder_count();
        let p = eq.probabilities();
        let lam = eq.lambda();
        let s = eq.breakpoints();
        let one = T::one();
        let p_r = p[self.target - 1];
        let gain = (p_r - self.true_probability) / p_r;
        // p_0 = 0
        let prob = |k: usize| if k == 0 { T::zero() } else { p[k - 1] };

        let mut candidates = Vec::new();
        for k in 1..=self.saboteur.min(self.target) {
            let piece = &eq.pieces()[k - 1];
            if piece.is_empty() || !piece.is_used() {
                continue;
            }
            let m = n - k;
            let c = piece.prefix_product;
            let t = one / T::from_count(m);
            let (lo_p, hi_p) = (prob(k - 1), prob(k));
            let (kind, bid, profit) = if lo_p <= t && t <= hi_p {
                let bid = powi(one - t, m) * c - lam;
                (CandidateKind::Interior, bid, t * powi(one - t, m - 1) * c * gain + lam)
            } else if t < lo_p {
                (CandidateKind::UpperEdge, s[k - 1], lo_p * powi(one - lo_p, m - 1) * c * gain + lam)
            } else {
                (CandidateKind::LowerEdge, s[k], hi_p * powi(one - hi_p, m - 1) * c * gain + lam)
            };
            let bid = bid.max(s[k]).min(s[k - 1]);
            candidates.push(SabotageCandidate { piece: k, kind, bid, profit });
        }

        let tie = T::snap_tolerance();
        let chosen = (0..candidates.len())
            .reduce(|best, idx| {
                let (b, c) = (&candidates[best], &candidates[idx]);
                if c.profit > b.profit + tie || ((c.profit - b.profit).abs() <= tie && c.bid < b.bid) {
                    idx
                } else {
                    best
                }
            })
            .expect("the top interval is never empty");
        let best = candidates[chosen];
        let config = eq.config();
        SabotagePlan {
            saboteur: self.saboteur,
            target: self.target,
            saboteur_caller_index: config.user_order()[self.saboteur - 1],
            target_caller_index: config.user_order()[self.target - 1],
            announced_probability: p_r,
            true_probability: self.true_probability,
            lambda: lam,
            candidates,
            chosen,
            bid: best.bid,
            expected_profit: best.profit,
        }
    }
}

/// Product-formula payoff of `saboteur` bidding `x` when `target` really
/// participates with `true_probability`; the equal-probability limit is the
/// plain equilibrium payoff.
pub fn payoff_with_target_probability<T: Scalar>(
    eq: &EquilibriumProfile<T>,
    saboteur: usize,
    target: usize,
    true_probability: T,
    x: T,
) -> T {
    let win = eq.distributions().iter().filter(|d| d.bidder != saboteur).fold(T::one(), |acc, d| {
        let p = if d.bidder == target { true_probability } else { d.probability };
        acc * (p * d.cdf(x) + T::one() - p)
    });
    win - x
}
