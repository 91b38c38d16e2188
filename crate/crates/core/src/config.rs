use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Validated participation probabilities, sorted ascending.
///
/// Bidders with probability zero never show up and are removed; their caller
/// positions are kept in `dropped`. `user_order[rank - 1]` is the caller
/// position (0-based) of the bidder with that 1-based rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuctionConfig<T> {
    probabilities: Vec<T>,
    user_order: Vec<usize>,
    dropped: Vec<usize>,
    caller_count: usize,
}

/// On-disk config format: `{"probabilities": [..]}`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub probabilities: Vec<f64>,
}

impl<T: Scalar> AuctionConfig<T> {
    pub fn new(raw: &[T]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyProbabilities);
        }
        for (index, &p) in raw.iter().enumerate() {
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::ProbabilityOutOfRange { index, value: p.to_f64_lossy() });
            }
        }
        let (kept, dropped): (Vec<usize>, Vec<usize>) = (0..raw.len()).partition(|&i| raw[i] > T::zero());
        if kept.is_empty() {
            return Err(Error::NoParticipants);
        }
        let mut user_order = kept;
        // stable, so equal probabilities keep caller order
        user_order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).expect("validated finite"));
        let probabilities = user_order.iter().map(|&i| raw[i]).collect();
        Ok(Self { probabilities, user_order, dropped, caller_count: raw.len() })
    }

    /// Parses the JSON config format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let raw: Vec<T> = file.probabilities.iter().map(|&p| T::from_f64(p).unwrap_or(T::nan())).collect();
        Self::new(&raw)
    }

    /// Number of retained bidders.
    pub fn bidder_count(&self) -> usize {
        self.probabilities.len()
    }

    /// Sorted participation probabilities p_1 <= ... <= p_n.
    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    /// Probability of the bidder with the given 1-based rank.
    pub fn probability(&self, bidder: usize) -> Result<T> {
        self.check_bidder(bidder)?;
        Ok(self.probabilities[bidder - 1])
    }

    pub fn user_order(&self) -> &[usize] {
        &self.user_order
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    /// Length of the list the config was built from, dropped entries included.
    pub fn caller_count(&self) -> usize {
        self.caller_count
    }

    /// 1-based rank of a caller position, or `None` for a dropped bidder.
    pub fn rank_of(&self, caller_index: usize) -> Option<usize> {
        self.user_order.iter().position(|&c| c == caller_index).map(|pos| pos + 1)
    }

    /// Caller position (0-based) of a 1-based rank.
    pub fn caller_index(&self, bidder: usize) -> Result<usize> {
        self.check_bidder(bidder)?;
        Ok(self.user_order[bidder - 1])
    }

    /// Expected profit of a participating bidder: the product of the failure
    /// probabilities of everyone except the most reliable bidder. Equals 1 for
    /// a lone bidder.
    pub fn lambda(&self) -> T {
        let n = self.bidder_count();
        self.probabilities[..n - 1].iter().fold(T::one(), |acc, &p| acc * (T::one() - p))
    }

    /// Reorders per-rank values into caller order, filling dropped bidders
    /// with `fill`.
    pub fn to_caller_order<V: Clone>(&self, by_rank: &[V], fill: V) -> Vec<V> {
        let mut out = vec![fill; self.caller_count];
        for (rank_pos, &caller) in self.user_order.iter().enumerate() {
            out[caller] = by_rank[rank_pos].clone();
        }
        out
    }

    pub(crate) fn check_bidder(&self, bidder: usize) -> Result<()> {
        if bidder == 0 || bidder > self.bidder_count() {
            return Err(Error::BidderOutOfRange { bidder, count: self.bidder_count() });
        }
        Ok(())
    }

    /// Same config with the probabilities converted to another scalar type.
    pub fn cast<U: Scalar>(&self) -> AuctionConfig<U> {
        AuctionConfig {
            probabilities: self.probabilities.iter().map(|&p| U::lit(p.to_f64_lossy())).collect(),
            user_order: self.user_order.clone(),
            dropped: self.dropped.clone(),
            caller_count: self.caller_count,
        }
    }

    /// Identical probabilities for `n` bidders.
    pub fn uniform(n: usize, p: T) -> Result<Self> {
        Self::new(&vec![p; n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_input_is_unchanged() {
        let c = AuctionConfig::<f64>::new(&[1.0 / 3.0, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(c.probabilities(), &[1.0 / 3.0, 0.5, 0.75, 1.0]);
        assert_eq!(c.user_order(), &[0, 1, 2, 3]);
        assert!(c.dropped().is_empty());
    }

    #[test]
    fn sorting_records_permutation() {
        let c = AuctionConfig::<f64>::new(&[1.0, 0.2]).unwrap();
        assert_eq!(c.probabilities(), &[0.2, 1.0]);
        assert_eq!(c.user_order(), &[1, 0]);
        assert_eq!(c.rank_of(0), Some(2));
        assert_eq!(c.caller_index(1).unwrap(), 1);
    }

    #[test]
    fn zeros_are_dropped() {
        let c = AuctionConfig::<f64>::new(&[0.0, 0.5, 0.5]).unwrap();
        assert_eq!(c.probabilities(), &[0.5, 0.5]);
        assert_eq!(c.dropped(), &[0]);
        assert_eq!(c.rank_of(0), None);
        assert_eq!(c.to_caller_order(&[1, 2], 0), vec![0, 1, 2]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(
            AuctionConfig::<f64>::new(&[0.5, 1.5]).unwrap_err(),
            Error::ProbabilityOutOfRange { index: 1, value: 1.5 }
        );
        assert!(matches!(
            AuctionConfig::<f64>::new(&[-0.1]).unwrap_err(),
            Error::ProbabilityOutOfRange { index: 0, .. }
        ));
        assert!(AuctionConfig::<f64>::new(&[f64::NAN]).is_err());
    }

    #[test]
    fn rejects_empty_and_all_zero() {
        assert_eq!(AuctionConfig::<f64>::new(&[]).unwrap_err(), Error::EmptyProbabilities);
        let err = AuctionConfig::<f64>::new(&[0.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::NoParticipants);
        assert_eq!(err.to_string(), "no potential participants");
    }

    #[test]
    fn lambda_values() {
        let c = AuctionConfig::<f64>::new(&[1.0 / 3.0, 0.5, 0.75, 1.0]).unwrap();
        assert!((c.lambda() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(AuctionConfig::<f64>::new(&[1.0, 1.0]).unwrap().lambda(), 0.0);
        assert_eq!(AuctionConfig::<f64>::new(&[0.5, 1.0]).unwrap().lambda(), 0.5);
        assert_eq!(AuctionConfig::<f64>::new(&[0.3]).unwrap().lambda(), 1.0);
    }

    #[test]
    fn lambda_ignores_most_reliable_bidder() {
        let a = AuctionConfig::<f64>::new(&[0.2, 0.4, 0.6]).unwrap();
        let b = AuctionConfig::<f64>::new(&[0.2, 0.4, 0.95]).unwrap();
        assert_eq!(a.lambda(), b.lambda());
    }

    #[test]
    fn parses_json() {
        let c = AuctionConfig::<f64>::from_json(r#"{"probabilities": [0.5, 0.25]}"#).unwrap();
        assert_eq!(c.probabilities(), &[0.25, 0.5]);
        assert!(matches!(AuctionConfig::<f64>::from_json("{}"), Err(Error::Parse(_))));
        assert!(matches!(
            AuctionConfig::<f64>::from_json(r#"{"probabilities": [2.0]}"#),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
    }
}
