//! Semiclassical actions, quantization and splitting formulas.

pub mod actions;
pub mod asymptotics;
pub mod ebk;
pub mod elliptic;
pub mod escape;
pub mod quadrature;
pub mod resonant;
pub mod splittings;

pub use actions::{
    action_allowed, action_forbidden, action_integral, pendulum_closed_forms, primitive, primitive_in, ActionPeriod,
    ActionTable, Landscape, Multiplicity, OrbitKind, Region,
};
pub use asymptotics::{asymptotic_actions, asymptotic_constants, energy_from_imaginary_time, AsymptoticConstants};
pub use ebk::{ebk_energy, Well};
pub use elliptic::{elliptic_e, elliptic_k};
pub use escape::{escape_rate, escape_rate_at_energy, island_area, sharp_island_action, EscapeRate};
pub use resonant::{
    coordinates, period_ratio_check, resonant_splitting_k, resonant_splitting_limit, resonant_splitting_limit_from,
    resonant_splitting_sum, resonant_splitting_sum_with, resonant_tables, PeriodRatioReport, ResonanceConfig,
    ResonantTables,
};
pub use splittings::{
    lambda_subtraction, pendulum_splitting_asymptotic, splitting_excited, splitting_ground_instanton,
    splitting_leading_order,
};
