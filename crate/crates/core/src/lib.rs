//! Exact symmetric equilibrium of common-value all-pay auctions in which every
//! bidder independently fails to show up with a known probability.
//!
//! The crate is organised around [`EquilibriumProfile`], which materialises the
//! piecewise bid distributions of every bidder. On top of it sit closed-form
//! revenue metrics ([`metrics`]), the identical-probability specialisation
//! ([`uniform`]), the optimal bid after secretly sabotaging a rival
//! ([`sabotage`]) and an independent verification engine ([`simulator`]).
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The
//! `*F64` aliases at the crate root are what most callers want.
//!
//! Bidders are addressed by their 1-based rank in ascending order of
//! participation probability, matching the ordering the equilibrium is built
//! on. [`AuctionConfig`] keeps the permutation back to the caller's order.
//!
//! ```
//! use allpay_core::{metrics, EquilibriumF64};
//!
//! let eq = EquilibriumF64::from_probabilities(&[0.5, 1.0])?;
//! assert_eq!(eq.lambda(), 0.5);
//! assert_eq!(eq.atom_n(), 0.5);
//! assert!((metrics::expected_bid(&eq, 1)? - 0.25).abs() < 1e-15);
//! assert!((metrics::sum_profit(&eq) - 0.25).abs() < 1e-15);
//! # Ok::<(), allpay_core::Error>(())
//! ```

pub mod config;
pub mod equilibrium;
pub mod error;
pub mod metrics;
pub mod quadrature;
pub mod report;
pub mod sabotage;
pub mod scalar;
pub mod simulator;
pub mod uniform;

pub use config::AuctionConfig;
pub use equilibrium::{BidDistribution, EquilibriumProfile, Piece};
pub use error::{Error, Result};
pub use metrics::{NoFailureBaseline, RevenueReport};
pub use sabotage::{SabotageCandidate, SabotagePlan, SabotageScenario};
pub use scalar::Scalar;
pub use simulator::{AuctionOutcome, AuditReport, SimulationReport};
pub use uniform::{Moments, UniformCase};

pub type AuctionConfigF64 = AuctionConfig<f64>;
pub type AuctionConfigF32 = AuctionConfig<f32>;
pub type EquilibriumF64 = EquilibriumProfile<f64>;
pub type EquilibriumF32 = EquilibriumProfile<f32>;
pub type BidDistributionF64 = BidDistribution<f64>;
pub type UniformCaseF64 = UniformCase<f64>;
pub type UniformCaseF32 = UniformCase<f32>;
pub type SabotagePlanF64 = SabotagePlan<f64>;
pub type RevenueReportF64 = RevenueReport<f64>;
