//! Time-domain integrators: the discrete-mode cascade used to check the
//! closed-form amplitude, and the driven four-level pumping model.

pub mod cascade;
pub mod ode;
pub mod pump;

pub use cascade::{
    compare, integrate_cascade_markov, integrate_cascade_unitary, validate_run, CascadeOptions,
    CascadeRun, CascadeState, Populations, ValidationVerdict,
};
pub use ode::OdeOptions;
pub use pump::{effective_coupling, integrate_pump, Drive, EffectiveCoupling, PumpRoute, PumpRun};
