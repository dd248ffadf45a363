//! Word-level certificates for incompressible surfaces in cyclic covers of
//! tunnel-number-one knot exteriors.
//!
//! The crate is layered bottom-up: [`words`] (free-group words),
//! [`whitehead`] (Whitehead graphs and moves), [`covers`]
//! (Reidemeister-Schreier lifting), [`splittings`] (knot families, slopes,
//! weak reductions) and [`certify`] (pipelines, fixtures, reports).

pub mod certify;
pub mod covers;
pub mod splittings;
pub mod whitehead;
pub mod words;
