//! Hermite functions, the spaces `S_p` on a truncated basis, and
//! translation operators.

mod basis;
mod expansion;
mod functions;
mod quadrature;
mod translation;

pub use basis::{BasisLayout, MultiIndex};
pub use expansion::{basis_value, dual_pair, inner_p, norm_p, ExpansionDocument, ExpansionTerm, ExpansionVector};
pub use functions::{hermite_1d, hermite_eval, hermite_functions, PI_POW_NEG_QUARTER};
pub use quadrature::QuadratureRule;
pub use translation::{
    shift_matrix_1d, shift_matrix_1d_with_rule, tau_opnorm, tau_opnorm_profile, translate, translate_with_rule,
    translation_leakage, translation_matrix, TranslatedPairing, TranslationCache, DEFAULT_CACHE_CAPACITY,
};
