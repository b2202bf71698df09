pub mod abelian;
pub mod error;
pub mod fusion;
pub mod group;
pub mod lattice;
pub mod library;
pub mod linalg;
pub mod modaction;
pub mod normarg;
pub mod offenders;
pub mod orbitlim;
pub mod parse;
pub mod perm;
pub mod quotient;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use group::Group;
pub use perm::Perm;
pub use ring::{IntegerRing, PivotRing, PrimePowerRing};

/// Residues modulo a prime power.
pub type Residue = PrimePowerRing;
/// The integers with machine-sized entries.
pub type Integers = IntegerRing<i128>;
