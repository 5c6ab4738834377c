//! Random term generation and executable checks of the metatheory: subject
//! reduction, progress, the confluence lemmas, strong normalization, and the
//! value lemmas.

mod gen;
mod minimize;
mod props;

pub use gen::{gen_term, inhabitant, random_type, GenConfig};
pub use minimize::minimize;
pub use props::{
    check_case, explore_reduction_graph, reachable, rule_coverage, rules_in_graph, run_property, CaseResult,
    Failure, GraphVerdict, Property, PropertyReport, CONFLUENCE_BUDGET, GRAPH_CAP, SN_GRAPH_MAX_SIZE,
};
