//! Exact-arithmetic workbench for the bar complex of discrete groups.
//!
//! Chains live in the unnormalized bar complex `C_*(G; Q)` with the tuple
//! basis `G^k` and carry the l1-norm. On top of that the crate provides the
//! Eilenberg-Zilber / Alexander-Whitney products, cochains with the Kronecker
//! pairing, an exact rational simplex solver for l1-minimal fillings and
//! uniform boundary condition constants, and the mitosis machinery that turns
//! boundaries into explicitly bounded primitives.
//!
//! Every quantity is an exact rational; nothing in this crate uses floats.

pub mod chain;
pub mod cochain;
pub mod error;
pub mod fill;
pub mod groups;
pub mod homology;
pub mod io;
pub mod lp;
pub mod mitosis;
pub mod products;
pub mod rational;
pub mod tensor;

pub use chain::{Chain, Tuple};
pub use cochain::Cochain;
pub use fill::{FillCertificate, SupportPolicy, UbcConstant};
pub use tensor::TensorChain;
pub use error::{Error, Result};

pub use groups::{Element, Group, Homomorphism};
pub use rational::Q;

