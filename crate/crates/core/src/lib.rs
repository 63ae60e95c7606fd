//! Exact computation with Schur rings over finite abelian groups.

pub mod arith;
pub mod closure;
pub mod error;
pub mod group;
pub mod enumeration;
pub mod iso;
pub mod json;
pub mod constructions;
pub mod products;
pub mod wl2;
pub mod sring;

pub use closure::{closure_of_partition, closure_of_sets, wielandt_closure};
pub use error::{Error, Result};
pub use group::{make_group, Group, GroupMap, QuotientMap, Section, Subgroup};
pub use sring::{group_ring, radical, rank_two, validate_partition, SRing};
