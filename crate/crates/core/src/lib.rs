//! Morse presentations of knots and tangles, width computation, and
//! certified thinning moves for type-n diagram families.

pub mod error;
pub mod families;
pub mod harness;
pub mod morse;
pub mod tangle;
pub mod thinning;
pub mod trace;

pub use error::{Error, Result};
pub use families::{
    build_flanked, build_gen_g, build_gen_l, build_type_n, split_composite, FlankedParams,
    GenGParams, GenLSpec, TemplateDiagram, TemplateSpec, TypeNParams,
};
pub use morse::{
    bridge_presentation, CriticalEvent, EventKind, MorsePresentation, Owner, Width, WidthReport,
};
pub use thinning::{Hypothesis, ThinningOutcome};
pub use trace::{MoveKind, RewriteTrace};
