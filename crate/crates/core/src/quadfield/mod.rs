//! Real quadratic fields `Q(sqrt(d))`: arithmetic in the maximal order,
//! Weil heights, fundamental units, prime ideal valuations and reduction of
//! heights by powers of the fundamental unit.

mod element;
mod ideal;
mod unit;

pub use element::{is_squarefree, quad_add, quad_conj, quad_mul, quad_norm, weil_height, QuadInt};
pub use ideal::{quad_valuation, splitting_type, IdealTag, IdealValuation, PrimeSplitting, SplitKind};
pub use unit::{fundamental_unit, reduce_height, reduce_height_with, UnitInfo};
