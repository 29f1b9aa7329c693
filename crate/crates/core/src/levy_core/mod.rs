//! Domain types, validation and the multivariate-time algebra.

mod projection;
mod time_algebra;
mod types;

pub use projection::{project_spec, IndexSet, Project};
pub use time_algebra::{
    compensation_vector, spacings, time_product_cov, time_product_drift, time_product_measure,
    Spacing,
};
pub use types::{
    validate_wvag, weak_pair_characteristics, BrownianSpec, FiniteAtomicMeasure, GammaRay,
    JumpAtom, MeasureDescription, PointMass, SubordinatorSpec, ThorinAtom, ThorinAtomicMeasure,
    VGParams, WVaGParams, WeakPairCharacteristics,
};
