//! M&A deals and their direction along the production chain.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{NetworkError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DealRecord {
    pub deal_id: String,
    pub year: i32,
    pub acquirer_firm_id: String,
    pub acquirer_industry: String,
    pub target_industry: String,
    pub status: String,
    #[serde(default)]
    pub tech_flag: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The target sits further from final demand than the acquirer.
    Backward,
    Forward,
    Horizontal,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Backward => "backward",
            Direction::Forward => "forward",
            Direction::Horizontal => "horizontal",
        }
    }

    /// The direction seen from the other side of the deal.
    pub fn reversed(self) -> Self {
        match self {
            Direction::Backward => Direction::Forward,
            Direction::Forward => Direction::Backward,
            Direction::Horizontal => Direction::Horizontal,
        }
    }
}

pub(crate) fn check_code(code: &str) -> Result<()> {
    if code.len() == 4 && code.bytes().all(|b| b.is_ascii_digit()) {
        Ok(())
    } else {
        Err(NetworkError::BadIndustryCode(code.to_string()))
    }
}

pub fn read_deals<R: Read>(reader: R) -> Result<Vec<DealRecord>> {
    let deals: Vec<DealRecord> = csv::Reader::from_reader(reader).deserialize().collect::<Result<_, _>>()?;
    for d in &deals {
        check_code(&d.acquirer_industry)?;
        check_code(&d.target_industry)?;
    }
    Ok(deals)
}

/// Identical codes are horizontal; otherwise the deal is backward when the
/// target is more upstream, forward when less, and horizontal on a tie.
pub fn classify(acquirer: &str, target: &str, ups: &BTreeMap<String, f64>) -> Result<Direction> {
    let lookup = |code: &str| ups.get(code).copied().ok_or_else(|| NetworkError::UnknownIndustry(code.to_string()));
    let (a, t) = (lookup(acquirer)?, lookup(target)?);
    if acquirer == target {
        return Ok(Direction::Horizontal);
    }
    Ok(match t.partial_cmp(&a) {
        Some(std::cmp::Ordering::Greater) => Direction::Backward,
        Some(std::cmp::Ordering::Less) => Direction::Forward,
        _ => Direction::Horizontal,
    })
}

pub fn classify_deal(deal: &DealRecord, ups: &BTreeMap<String, f64>) -> Result<Direction> {
    classify(&deal.acquirer_industry, &deal.target_industry, ups)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedDeal {
    pub deal: DealRecord,
    pub direction: Direction,
}

pub fn classify_all(deals: &[DealRecord], ups: &BTreeMap<String, f64>) -> Result<Vec<ClassifiedDeal>> {
    deals
        .iter()
        .map(|d| {
            Ok(ClassifiedDeal {
                deal: d.clone(),
                direction: classify_deal(d, ups)?,
            })
        })
        .collect()
}
