pub mod cli;
pub mod density;
pub mod error;
pub mod negativity;
pub mod quadrature;
pub mod special_fn;
pub mod states;
pub mod tfd;
pub mod truncation;
pub mod wigner;
