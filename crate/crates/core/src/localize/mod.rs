//! Torus localization on toric surfaces and their Hilbert schemes of points.

pub mod characters;
pub mod integrands;
pub mod limit;
pub mod model;

pub use characters::{
    cohomology_character, e_class_character, euler_character_chi, tangent_character,
    twisted_tangent_character, v_class_character,
};
pub use integrands::{
    mochizuki_a, mochizuki_a_from_terms, mochizuki_a_integrand, mochizuki_splits, mochizuki_terms,
    q_class_factor, sum_terms, typeii_component_integral, typeii_term, typeii_terms, AuditRecord,
    AuditedTerm, MochizukiInput, PairPoint, PrefactorData, PrefactorVariant, TypeIIValue,
};
pub use limit::{limit_sum, EvalOptions, LimitRoute, LocalTerm};
pub use model::{Divisor, ToricSurfaceModel, TwistedBundleSpec, PRESETS};
