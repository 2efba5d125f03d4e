pub mod basechange;
pub mod cache;
pub mod cli;
pub mod cobar;
pub mod comodule;
pub mod error;
pub mod gradedpoly;
pub mod hopf;
pub mod landweber;
pub mod localization;
pub mod ptypical;
pub mod scalar;
pub mod selftest;
