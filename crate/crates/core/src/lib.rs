//! Rank-2 Drinfeld modules over `F_q(T)`: finite fields, polynomial
//! arithmetic, heights, orbit divisibility sequences and their Zsigmondy sets.

pub mod gf;
pub mod polyring;
pub mod heights;
pub mod drinfeld;
pub mod zsigmondy;
pub mod cli;

pub use drinfeld::{DrinfeldModule, HeightEnclosure, OrbitTerm, TorsionVerdict};
pub use gf::{Embedding, Field, FieldDescriptor, FieldElement};
pub use heights::{Place, PlaceSet};
pub use polyring::{Polynomial, RationalFunction};
