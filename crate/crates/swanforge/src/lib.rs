//! Swan and Artin conductor calculus for ramification-filtered finite groups.
//!
//! Everything is exact: rationals are big rationals, character values live
//! in a cyclotomic field whose conductor is fixed per group.

pub mod error;
pub mod exactnum;
pub mod groupcore;
pub mod charcalc;
pub mod ramfilt;
pub mod heisen;
pub mod conjlab;
pub mod dyadic;
pub mod g2case;
pub mod cli;
