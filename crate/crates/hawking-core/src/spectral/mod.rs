//! Half-line operators, the φ/ψ functional calculus, kernels, sine-transform forms, thermal targets
//! and the vacuum generating-functional quadratic form.

pub mod appendix;
pub mod functional;
pub mod hawking;
pub mod kernels;
pub mod operator;
pub mod sine;
pub mod thermal;

pub use hawking::{hawking_report, hawking_target, mode_forms, HawkingReport, HawkingRow, HawkingSettings, ModeForms, SideTargets};
pub use functional::{Kind, SeriesValue, ThermalFunctional};
pub use kernels::{dirichlet_resolvent_apply, dx0_inverse_sq, resolvent_kernel, tridiagonal_resolvent_at_i};
pub use operator::{DiscreteOperator, Spectrum};
pub use sine::{sine_form, HalfLineSamples, SineDomain};
pub use thermal::{log_profile_convergence, log_profile_form, thermal_target, zero_temperature_energy, LineSamples, LogProfileSettings};
