//! Production-network measures: input-output tables, industry
//! upstreamness, the direction of M&A deals along the supply chain and
//! upstreamness quartiles.

pub mod deals;
pub mod error;
pub mod io_table;
pub mod quartiles;
pub mod upstreamness;

pub use deals::{classify_deal, ClassifiedDeal, DealRecord, Direction};
pub use error::{NetworkError, Result};
pub use io_table::IoTable;
pub use quartiles::{upstream_quartiles, Quartile, Quartiles};
pub use upstreamness::{direct_requirements, sector_concordance, upstreamness, Method, UpstreamnessVector};
