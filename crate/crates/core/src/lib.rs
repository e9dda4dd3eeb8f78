//! Requirement prioritization from binary survey responses.
//!
//! The analysis runs in stages, each in its own module:
//!
//! 1. [`survey`]: parse the 0/1 response CSV and count per-attribute support.
//! 2. [`apriori`]: mine frequent itemsets and association rules.
//! 3. [`reqmatrix`]: turn single-item rules into a requirement adjacency
//!    matrix and group linked requirements.
//! 4. [`correlation`]: weight linked requirement pairs by Pearson r.
//! 5. [`mst`]: keep the maximum-weight spanning forest of that graph.
//! 6. [`pipeline`]: chain the stages, rank features, render reports.

pub mod apriori;
pub mod correlation;
pub mod dsu;
pub mod mst;
pub mod pipeline;
pub mod reqmatrix;
pub mod survey;

pub use apriori::{
    derive_rules, find_frequent_itemsets, generate_candidates, itemset_support, AprioriError,
    AprioriParams, AssociationRule, CandidateSet, FrequentItemSet, ItemSet, SupportCounter,
};
pub use correlation::{
    build_correlation_graph, build_correlation_graph_lenient, pearson, CorrelationError,
    CorrelationGraph, EdgeSelection, SkippedEdge, WeightedEdge,
};
pub use dsu::DisjointSetUnion;
pub use mst::{maximum_spanning_forest, minimum_spanning_forest, total_weight, SpanningForest};
pub use pipeline::{
    analyze, export_dot, export_json, priority_ordering, render_text, report_json, run_pipeline,
    AnalysisOptions, OutputFormat, PipelineConfig, PipelineError, PriorityEntry, PriorityReport,
    RequirementScope,
};
pub use reqmatrix::{
    build_matrix, extract_groups, ReqMatrixError, RequirementGroup, RequirementMatrix,
};
pub use survey::{
    attribute_frequencies, parse_survey, select_top_requirements, AttributeId, FrequencyVector,
    ResponseMatrix, SurveyError,
};
