//! Empirical check that the cardinality bounds leave nothing on the table.

use crate::error::{Error, Result};

use super::model::SourceModel;
use super::optimize::{optimize_region, two_way_cardinalities, TwoWayCards};
use super::search::SearchBudget;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub label: &'static str,
    pub cards: TwoWayCards,
    pub value: f64,
    /// Base value minus this value; positive means the larger alphabet
    /// found a better point.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub base_cards: TwoWayCards,
    pub base_value: f64,
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    pub fn max_gap(&self) -> f64 {
        self.rows.iter().map(|r| r.gap).fold(0.0, f64::max)
    }
}

/// Optimize the weighted sum at the default cardinalities and again with
/// each of `|U|`, `|V|`, `|W|` enlarged by one, using the same seed. This is
/// a numerical sanity check, not a proof. Limited to `|X|, |Y|, |Z| <= 3`.
pub fn cardinality_sufficiency_probe(
    model: &SourceModel,
    dx_max: f64,
    dz_max: f64,
    weights: [f64; 3],
    budget: &SearchBudget,
) -> Result<ProbeReport> {
    let sizes = [model.card_x(), model.card_y(), model.card_z()];
    if sizes.iter().any(|&c| c > 3) {
        return Err(Error::AlphabetsTooLarge(format!(
            "probe needs |X|, |Y|, |Z| <= 3 (got {sizes:?})"
        )));
    }
    let base_cards = two_way_cardinalities(model);
    let base_value = optimize_region(model, dx_max, dz_max, weights, budget, Some(base_cards))?.value;
    let variants = [
        ("U+1", TwoWayCards { u: base_cards.u + 1, ..base_cards }),
        ("V+1", TwoWayCards { v: base_cards.v + 1, ..base_cards }),
        ("W+1", TwoWayCards { w: base_cards.w + 1, ..base_cards }),
    ];
    let mut rows = Vec::with_capacity(3);
    for (label, cards) in variants {
        let value = optimize_region(model, dx_max, dz_max, weights, budget, Some(cards))?.value;
        rows.push(ProbeRow {
            label,
            cards,
            value,
            gap: base_value - value,
        });
    }
    Ok(ProbeReport {
        base_cards,
        base_value,
        rows,
    })
}
