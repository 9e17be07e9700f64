//! Error-rate models, scrambling, concatenation and HARQ for physical-layer secrecy over AWGN channels.

pub mod analytic;
pub mod channel;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod scrambler;
pub mod sim;
