//! Plot-ready tables and CSV renderings of the report types.

use serde::Serialize;

use crate::equilibrium::EquilibriumProfile;
use crate::error::{Error, Result};
use crate::metrics::RevenueReport;
use crate::sabotage::SabotagePlan;
use crate::scalar::Scalar;
use crate::simulator::{AuditReport, Estimate, SimulationReport, VerifiedSimulation};
use crate::uniform::UniformReport;

/// Formats a number with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.11e}");
    let v: f64 = s.parse().expect("formatted float parses");
    format!("{v}")
}

/// One row of a distribution table. `pdf` is empty at an atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionRow<T> {
    pub bidder: usize,
    pub caller_index: usize,
    pub x: T,
    pub cdf: T,
    pub pdf: Option<T>,
}

/// CDF and density of every bidder on `points` evenly spaced bids covering
/// `[0, s_0]`, plus the breakpoints.
pub fn distribution_table<T: Scalar>(eq: &EquilibriumProfile<T>, points: usize) -> Result<Vec<DistributionRow<T>>> {
    if points < 2 {
        return Err(Error::GridTooSmall(points));
    }
    let top = eq.bid_ceiling();
    let mut xs: Vec<T> = (0..points).map(|t| top * T::from_count(t) / T::from_count(points - 1)).collect();
    xs.extend_from_slice(eq.breakpoints());
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    xs.dedup();
    let mut rows = Vec::with_capacity(xs.len() * eq.bidder_count());
    for d in eq.distributions() {
        let caller_index = eq.config().user_order()[d.bidder - 1];
        for &x in &xs {
            rows.push(DistributionRow { bidder: d.bidder, caller_index, x, cdf: d.cdf(x), pdf: d.pdf(x).ok() });
        }
    }
    Ok(rows)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

fn num<T: Scalar>(x: T) -> String {
    sig12(x.to_f64_lossy())
}

// Writes to an in-memory buffer cannot fail.
macro_rules! row {
    ($w:expr, $($cell:expr),+ $(,)?) => {
        $w.write_record([$(String::from($cell)),+]).expect("in-memory writer")
    };
}

pub fn distribution_table_csv<T: Scalar>(rows: &[DistributionRow<T>]) -> String {
    let mut w = writer();
    row!(w, "bidder", "caller_index", "x", "cdf", "pdf");
    for r in rows {
        row!(
            w,
            r.bidder.to_string(),
            r.caller_index.to_string(),
            num(r.x),
            num(r.cdf),
            r.pdf.map_or(String::new(), num)
        );
    }
    finish(w)
}

/// Long format: `quantity,bidder,value`, bidder empty for auction-wide rows.
pub fn revenue_report_csv<T: Scalar>(r: &RevenueReport<T>) -> String {
    let mut w = writer();
    row!(w, "quantity", "bidder", "value");
    row!(w, "lambda", "", num(r.lambda));
    for (k, &s) in r.breakpoints.iter().enumerate() {
        row!(w, format!("breakpoint_{k}"), "", num(s));
    }
    row!(w, "atom_n", "", num(r.atom_n));
    row!(w, "sum_profit", "", num(r.sum_profit));
    row!(w, "max_profit", "", num(r.max_profit));
    for b in &r.bidders {
        let id = b.rank.to_string();
        row!(w, "caller_index", id.clone(), b.caller_index.to_string());
        row!(w, "probability", id.clone(), num(b.probability));
        row!(w, "expected_bid", id.clone(), num(b.expected_bid));
        row!(w, "expected_utility", id.clone(), num(b.expected_utility));
        row!(w, "atom_at_zero", id.clone(), num(b.atom_at_zero));
        row!(w, "support_low", id.clone(), num(b.support.0));
        row!(w, "support_high", id, num(b.support.1));
    }
    finish(w)
}

fn estimate_cells(e: &Estimate) -> [String; 5] {
    [e.samples.to_string(), sig12(e.mean), sig12(e.standard_error), sig12(e.variance), sig12(e.variance_standard_error)]
}

/// One row per estimated quantity; seed and trial count on every row.
pub fn simulation_report_csv(r: &SimulationReport) -> String {
    let mut w = writer();
    w.write_record([
        "seed",
        "trials",
        "quantity",
        "bidder",
        "caller_index",
        "samples",
        "mean",
        "standard_error",
        "variance",
        "variance_standard_error",
    ])
    .expect("in-memory writer");
    let mut emit = |quantity: &str, bidder: String, caller: String, e: &Estimate| {
        let mut rec = vec![r.seed.to_string(), r.trials.to_string(), quantity.to_string(), bidder, caller];
        rec.extend(estimate_cells(e));
        w.write_record(&rec).expect("in-memory writer");
    };
    for b in &r.bidders {
        let (id, caller) = (b.rank.to_string(), b.caller_index.to_string());
        emit("participation", id.clone(), caller.clone(), &b.participation);
        emit("bid", id.clone(), caller.clone(), &b.bid);
        emit("zero_bid", id.clone(), caller.clone(), &b.zero_bid);
        emit("utility", id, caller, &b.utility);
    }
    emit("sum_revenue", String::new(), String::new(), &r.sum_revenue);
    emit("max_revenue", String::new(), String::new(), &r.max_revenue);
    finish(w)
}

/// Empirical values beside their closed forms.
pub fn comparison_csv(v: &VerifiedSimulation) -> String {
    let mut w = writer();
    row!(w, "seed", "trials", "quantity", "analytic", "empirical", "standard_error", "z");
    if let Some(c) = &v.comparison {
        for (label, check) in c.checks() {
            row!(
                w,
                v.simulation.seed.to_string(),
                v.simulation.trials.to_string(),
                label,
                sig12(check.analytic),
                sig12(check.empirical),
                sig12(check.standard_error),
                sig12(check.z),
            );
        }
    }
    finish(w)
}

pub fn sabotage_plan_csv<T: Scalar>(plan: &SabotagePlan<T>) -> String {
    let mut w = writer();
    row!(w, "piece", "kind", "bid", "profit", "chosen");
    for (idx, c) in plan.candidates.iter().enumerate() {
        let kind = serde_json::to_value(c.kind).expect("enum serialises");
        row!(
            w,
            c.piece.to_string(),
            kind.as_str().unwrap_or_default(),
            num(c.bid),
            num(c.profit),
            (idx == plan.chosen).to_string(),
        );
    }
    finish(w)
}

pub fn uniform_report_csv<T: Scalar>(r: &UniformReport<T>) -> String {
    let mut w = writer();
    row!(w, "quantity", "value");
    row!(w, "bidders", r.bidders.to_string());
    row!(w, "probability", num(r.probability));
    row!(w, "lambda", num(r.lambda));
    for (name, m) in
        [("bid", r.bid), ("bidder_profit", r.bidder_profit), ("sum_profit", r.sum_profit), ("max_profit", r.max_profit)]
    {
        row!(w, format!("{name}_mean"), num(m.mean));
        row!(w, format!("{name}_variance"), num(m.variance));
    }
    row!(w, "participation_scaled_bid_variance", num(r.participation_scaled_bid_variance));
    finish(w)
}

pub fn audit_csv<T: Scalar>(reports: &[AuditReport<T>]) -> String {
    let mut w = writer();
    row!(w, "bidder", "grid_points", "promised_payoff", "max_payoff", "argmax_bid", "deviation_gain");
    for r in reports {
        row!(
            w,
            r.bidder.to_string(),
            r.grid_points.to_string(),
            num(r.promised_payoff),
            num(r.max_payoff),
            num(r.argmax_bid),
            num(r.deviation_gain),
        );
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(0.25), "0.25");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-2.0 / 3.0e-7), "-6666666.66667");
        assert_eq!(sig12(1.234e-20), "0.00000000000000000001234");
    }

    #[test]
    fn table_marks_the_atom() {
        let eq = EquilibriumProfile::<f64>::from_probabilities(&[0.5, 1.0]).unwrap();
        let rows = distribution_table(&eq, 3).unwrap();
        assert_eq!(rows.len(), 6);
        let atom = rows.iter().find(|r| r.bidder == 2 && r.x == 0.0).unwrap();
        assert_eq!((atom.cdf, atom.pdf), (0.5, None));
        assert!(distribution_table(&eq, 1).is_err());
        let csv = distribution_table_csv(&rows);
        assert!(csv.starts_with("bidder,caller_index,x,cdf,pdf\n1,0,0,0,2\n"));
    }

    #[test]
    fn revenue_csv_has_expected_bids() {
        let eq = EquilibriumProfile::<f64>::from_probabilities(&[0.5, 1.0]).unwrap();
        let csv = revenue_report_csv(&RevenueReport::new(&eq));
        assert!(csv.contains("expected_bid,1,0.25\n"));
        assert!(csv.contains("expected_bid,2,0.125\n"));
    }
}
