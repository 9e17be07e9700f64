//! Closed-form error probabilities, HARQ recursions, complexity counts,
//! capacity and equivocation, and the security-gap solver.

pub mod bounded;
pub mod capacity;
pub mod complexity;
pub mod curve;
pub mod harq;
pub mod special;
pub mod unitary;

pub use bounded::{BoundedDistance, CodedRates};
pub use capacity::{bpsk_awgn_capacity, equivocation, CapacityConvention, EquivocationPoint};
pub use complexity::{ComplexityCost, ComplexityModel, TransmissionMode};
pub use curve::{grid, security_gap, CurvePoint, ErrorRateCurve, Provenance, SecurityGap, SecurityGapQuery};
pub use harq::{
    harq_fer_approx, harq_fer_exact_q2, harq_fer_exact_q2_success_form, harq_system_fer, ExactHarqIntegrand,
    HarqSpec,
};
pub use unitary::{
    concat_perfect_scrambling, concat_real_scrambling, concat_real_scrambling_closed, perfect_scrambling_unitary,
    scrambled_unitary_ber, uncoded_rates, OddSelection,
};
