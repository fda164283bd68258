//! A type theory with controlled unfolding of definitions.
//!
//! Definitions elaborate into a core calculus where each definition guards
//! its body behind a proposition in a meet semilattice; unfolding a
//! definition amounts to assuming its proposition. The kernel decides
//! definitional equality by normalization relative to the propositions in
//! scope.

pub mod check;
pub mod elab;
pub mod error;
pub mod nbe;
pub mod oracle;
pub mod pretty;
pub mod prop;
pub mod surface;
pub mod term;
