//! Truncated non-commutative formal power series calculus for SISO
//! Chen-Fliess systems.
//!
//! The crate implements the shuffle algebra on series over the alphabet
//! {x0, x1}, the composition and mixed composition products, the two group
//! structures on affine series pairs together with the affine feedback
//! product, group commutators and the Lie bracket, and a numerical
//! iterated-integral simulator that cross-validates the algebraic
//! closed-loop series against Picard-iterated loop simulation.
//!
//! All algebraic operations are exact over the rationals and truncated at an
//! explicit degree; floating point enters only in the [`sim`] module.

pub mod format;
pub mod pair;
pub mod rational;
pub mod series;
pub mod sim;
pub mod verify;
pub mod words;

pub use pair::{AffinePair, TangentPair};
pub use rational::Rational;
pub use series::TruncatedSeries;
pub use words::{enumerate_words, Letter, Word};
