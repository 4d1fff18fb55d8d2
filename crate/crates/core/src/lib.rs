//! Stochastic bipartite matching in the query-commit and
//! price-of-information models: exact LP machinery, permutation-distribution
//! construction, executable strategies, brute-force oracles, and a seeded
//! Monte Carlo harness.

pub mod decomp;
pub mod gen;
pub mod harness;
pub mod lp;
pub mod model;
pub mod oracles;
pub mod rational;
pub mod strategies;
