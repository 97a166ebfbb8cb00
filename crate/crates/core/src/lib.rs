//! Symmetric tensor categories built from representations of compact matrix
//! groups, their twisted variants glued over a simplicial base, and the
//! Doplicher–Roberts algebra of a special object.

pub mod basecech;
pub mod dralg;
pub mod glue;
pub mod groups;
pub mod linalg;
pub mod repcat;
