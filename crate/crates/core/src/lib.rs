//! Exact-arithmetic engine for formal group laws, theta structures on
//! formal groups, Weierstrass sigma q-expansions, and elliptic genera.
//!
//! Everything is computed as truncated multivariate power/Laurent series
//! over Q or a cyclotomic field Q(zeta_N); all equalities asserted by this
//! crate are exact within explicitly tracked truncation windows.  There is
//! no floating point anywhere.

pub mod chern;
pub mod coeff;
pub mod error;
pub mod fgl;
pub mod genus;
pub mod manifold;
pub mod series;
pub mod sigma;
pub mod symfun;
pub mod theta;
pub mod wire;

pub use coeff::{Coeff, Rat};
pub use error::{Error, Result};
pub use series::{MultiSeries, SeriesFraction, VarKind, VarSpec};
