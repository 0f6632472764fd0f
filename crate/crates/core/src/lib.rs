//! Exact-arithmetic realizations of differential operators on automorphic forms
//! on `U(n,n)`: the p-adic theta operator on vector-valued q-expansions, the
//! Maass-Shimura operators, and a symbolic Gauss-Manin / Kodaira-Spencer engine.

pub mod cmfield;
pub mod error;
pub mod gmks;
pub mod hermidx;
pub mod maass;
pub mod matrix;
pub mod poly;
pub mod qexp;
pub mod suite;
pub mod theta;
pub mod unitary;
pub mod weights;

pub use cmfield::{FieldElement, QuadField, Rational, SplitPrimeData, Valuation};
pub use error::{Error, Result};
pub use hermidx::HermitianIndex;
pub use matrix::Matrix;
pub use gmks::{DuForm, DuVector, HodgeFrame, PointOfHn, Section};
pub use maass::{NearlyHoloForm, ShimuraInput};
pub use poly::Poly;
pub use qexp::QExpansion;
pub use theta::{Projector, ProjectorKind};
pub use unitary::GroupElement;
pub use weights::{HighestWeight, TensorCoefficient, TensorWord};
