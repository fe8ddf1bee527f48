//! Exact computation of EKL-degrees (Eisenbud–Khimshiashvili–Levine local degrees)
//! and the Weyl-group coset counts used to predict them for quotient maps.

pub mod ekl;
pub mod gw;
pub mod localg;
pub mod poly;
pub mod quotmap;
pub mod scalar;
pub mod weyl;
