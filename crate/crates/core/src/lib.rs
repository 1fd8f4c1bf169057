pub mod airy;
pub mod cache;
pub mod error;
pub mod exact_dist;
pub mod fredholm;
pub mod montecarlo;
pub mod ode;
pub mod opuc;
pub mod painleve;
pub mod real;
pub mod symbols;
