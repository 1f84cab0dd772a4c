//! Non-parametric summary estimates, the theoretical `K` function of an
//! LGCP, minimum-contrast fitting and the fitted-model `J` check.

mod check;
mod empirical;
mod fit;
mod theory;

pub use crate::pattern::load_pattern;
pub use check::{max_discrepancy, model_check_j, ModelCheckReport};
pub use empirical::{estimate_f, estimate_g, estimate_j, estimate_k, DEFAULT_F_LATTICE};
pub use fit::{
    fit_min_contrast, FitResult, CONTRAST_EXPONENT, DEFAULT_RELATIVE_R_MAX, MIN_FIT_POINTS, RELATIVE_SCALE_BOUNDS, VARIANCE_BOUNDS,
};
pub use theory::theoretical_k;
