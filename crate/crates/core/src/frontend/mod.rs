//! Concrete syntax: process files, formula files, abstraction scripts and
//! subterm paths.

pub mod ccs;
mod lexer;
pub mod mu;
pub mod path;
pub mod print;
pub mod script;

pub use ccs::{parse_action_set, parse_ccs, parse_process, parse_relabelling, CcsSource};
pub use mu::{parse_mu, MuSource, Prop};
pub use path::Path;
pub use print::{print_family, print_process};
pub use script::{parse_script, print_script};
