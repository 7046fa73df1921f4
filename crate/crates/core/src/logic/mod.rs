//! Modal mu-calculus with strong and weak modalities.

mod check;
mod formula;

pub use check::{check, check_table, evaluate, StateSet};
pub use formula::{classify, expand_macro_cycle, Formula, Fragment, LabelSet, ModLabel, Modality, Var};
