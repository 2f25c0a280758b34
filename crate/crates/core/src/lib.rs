//! Superselection-sector machinery for quantum systems whose configuration
//! space has a finite fundamental group.
//!
//! Every numerical type is generic over a [`Real`] scalar (`f32` or `f64`);
//! the aliases below fix it to `f64`.

pub mod algebra;
pub mod cli;
pub mod cover;
pub mod fixtures;
pub mod group;
pub mod linalg;
pub mod report;
pub mod rep;
pub mod rotor;
pub mod scalar;
pub mod superselection;

pub use algebra::AlgebraError;
pub use cover::CoverError;
pub use group::{ConjugacyStructure, FiniteGroup, GroupError};
pub use rep::RepError;
pub use rotor::RotorError;
pub use scalar::Real;
pub use superselection::ToyError;

pub type Irrep = rep::Irrep<f64>;
pub type IrrepSet = rep::IrrepSet<f64>;
pub type AlgebraElement = algebra::AlgebraElement<f64>;
pub type GroupAlgebra = algebra::GroupAlgebra<f64>;
pub type ToyModel = superselection::ToyModel<f64>;
pub type DiscreteCover = cover::DiscreteCover<f64>;
pub type RotorBlock = rotor::RotorBlock<f64>;
pub type CMat = scalar::CMat<f64>;
pub type CVec = scalar::CVec<f64>;
