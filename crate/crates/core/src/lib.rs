pub mod engine;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod scalar;
pub mod sysmodel;
pub mod wtree;

/// Exact probabilities used throughout the concrete API.
pub type Prob = num_rational::BigRational;
pub type FValue = sysmodel::FValue<Prob>;
pub type Coalgebra = sysmodel::Coalgebra<Prob>;
pub type Weights = wtree::WeightAssignment<u64>;
