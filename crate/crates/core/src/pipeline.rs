//! End-to-end analysis: survey file to prioritized feature list, plus the
//! text, JSON and DOT renderings of the result.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::apriori::{
    derive_rules, find_frequent_itemsets, AprioriError, AprioriParams, AssociationRule,
    FrequentItemSet, ItemSet,
};
use crate::correlation::{
    build_correlation_graph_lenient, CorrelationError, CorrelationGraph, EdgeSelection, SkippedEdge,
};
use crate::mst::{maximum_spanning_forest, SpanningForest};
use crate::reqmatrix::{
    build_matrix, extract_groups, ReqMatrixError, RequirementGroup, RequirementMatrix,
};
use crate::survey::{
    attribute_frequencies, parse_survey, select_top_requirements, AttributeId, FrequencyVector,
    SurveyError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("ingest: {0}")]
    Survey(#[from] SurveyError),
    #[error("apriori: {0}")]
    Apriori(#[from] AprioriError),
    #[error("top-requirement threshold {0} must lie in [0, 1]")]
    InvalidThreshold(f64),
    #[error("requirement matrix: {0}")]
    ReqMatrix(#[from] ReqMatrixError),
    #[error("correlation: {0}")]
    Correlation(#[from] CorrelationError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl PipelineError {
    /// 1 for bad input or parameters, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

/// Which attributes enter the requirement matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RequirementScope {
    #[default]
    TopRequirements,
    AllAttributes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisOptions {
    pub params: AprioriParams,
    /// Defaults to `params.min_support` when unset.
    pub top_threshold: Option<f64>,
    pub edges: EdgeSelection,
    pub scope: RequirementScope,
}

impl AnalysisOptions {
    pub fn top_threshold(&self) -> f64 {
        self.top_threshold.unwrap_or(self.params.min_support)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub options: AnalysisOptions,
    pub format: OutputFormat,
    pub dot_path: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityEntry {
    pub attribute: AttributeId,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityReport {
    pub attribute_names: Vec<String>,
    pub options: AnalysisOptions,
    pub frequencies: FrequencyVector,
    pub top_requirements: Vec<AttributeId>,
    pub frequent_itemsets: Vec<FrequentItemSet>,
    pub rules: Vec<AssociationRule>,
    pub requirement_matrix: RequirementMatrix,
    pub groups: Vec<RequirementGroup>,
    pub correlation: CorrelationGraph,
    pub skipped_edges: Vec<SkippedEdge>,
    pub forest: SpanningForest,
    pub priority: Vec<PriorityEntry>,
}

impl PriorityReport {
    pub fn name(&self, id: AttributeId) -> &str {
        &self.attribute_names[id.0]
    }

    fn names(&self, items: &[AttributeId]) -> Vec<&str> {
        items.iter().map(|&i| self.name(i)).collect()
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PriorityReport, PipelineError> {
    let text = read_input(&config.input)?;
    analyze(&text, &config.options)
}

fn read_input(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Runs every stage on CSV text already in memory.
pub fn analyze(text: &str, options: &AnalysisOptions) -> Result<PriorityReport, PipelineError> {
    let params = options.params;
    params.validate()?;
    let threshold = options.top_threshold();
    if !(0.0..=1.0).contains(&threshold) {
        return Err(PipelineError::InvalidThreshold(threshold));
    }

    let matrix = parse_survey(text)?;
    let frequencies = attribute_frequencies(&matrix);
    let top_requirements = select_top_requirements(&frequencies, threshold);

    let mut requirements: Vec<AttributeId> = match options.scope {
        RequirementScope::TopRequirements => top_requirements.clone(),
        RequirementScope::AllAttributes => (0..matrix.attributes()).map(AttributeId).collect(),
    };
    requirements.sort();
    let in_scope: BTreeSet<AttributeId> = requirements.iter().copied().collect();

    let frequent_itemsets = find_frequent_itemsets(&matrix, &params);
    let scoped: Vec<FrequentItemSet> = frequent_itemsets
        .iter()
        .filter(|f| f.itemset.items().iter().all(|i| in_scope.contains(i)))
        .cloned()
        .collect();
    let rules = derive_rules(&scoped, &matrix, &params);

    let requirement_matrix = build_matrix(&rules, &requirements)?;
    let groups = extract_groups(&requirement_matrix);
    let (correlation, skipped_edges) =
        build_correlation_graph_lenient(&matrix, &requirement_matrix, options.edges)?;
    let forest = maximum_spanning_forest(&correlation);
    let priority = priority_ordering(&forest, &frequencies);

    let report = PriorityReport {
        attribute_names: matrix.attribute_names().to_vec(),
        options: options.clone(),
        frequencies,
        top_requirements,
        frequent_itemsets,
        rules,
        requirement_matrix,
        groups,
        correlation,
        skipped_edges,
        forest,
        priority,
    };
    check_consistency(&report)?;
    Ok(report)
}

fn check_consistency(report: &PriorityReport) -> Result<(), PipelineError> {
    let fail = |msg: String| Err(PipelineError::Invariant(msg));
    let reqs = report.requirement_matrix.requirements();

    if build_matrix(&report.rules, reqs)? != report.requirement_matrix {
        return fail("requirement matrix disagrees with the rule list".into());
    }
    if report.options.scope == RequirementScope::TopRequirements {
        let top: BTreeSet<_> = report.top_requirements.iter().collect();
        for r in &report.rules {
            if !r
                .antecedent
                .items()
                .iter()
                .chain(r.consequent.items())
                .all(|i| top.contains(i))
            {
                return fail(format!(
                    "rule {} => {} leaves the top requirements",
                    r.antecedent, r.consequent
                ));
            }
        }
    }
    for e in &report.forest.edges {
        if !report.correlation.edges.contains(e) {
            return fail(format!(
                "forest edge {}-{} is not a correlation edge",
                e.u, e.v
            ));
        }
    }
    let ordered: BTreeSet<_> = report.priority.iter().map(|p| p.attribute).collect();
    if report.priority.len() != reqs.len() || ordered != reqs.iter().copied().collect() {
        return fail("priority order is not a permutation of the requirements".into());
    }
    Ok(())
}

/// Scores each forest node by the summed weight of its incident forest edges.
/// Highest score first; ties go to the more frequent attribute, then the
/// lower index.
pub fn priority_ordering(forest: &SpanningForest, freqs: &FrequencyVector) -> Vec<PriorityEntry> {
    let mut entries: Vec<PriorityEntry> = forest
        .nodes
        .iter()
        .map(|&attribute| PriorityEntry {
            attribute,
            score: 0.0,
        })
        .collect();
    for e in &forest.edges {
        for end in [e.u, e.v] {
            if let Some(entry) = entries.iter_mut().find(|p| p.attribute == end) {
                entry.score += e.weight;
            }
        }
    }
    entries.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(freqs.count(b.attribute).cmp(&freqs.count(a.attribute)))
            .then(a.attribute.cmp(&b.attribute))
    });
    entries
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Undirected Graphviz rendering. Forest edges are bold; every edge carries
/// its weight to three decimals.
pub fn export_dot(graph: &CorrelationGraph, forest: &SpanningForest, names: &[String]) -> String {
    let label = |id: AttributeId| dot_quote(names.get(id.0).map_or("?", String::as_str));
    let mut out = String::from("graph G {\n");
    for &n in &graph.nodes {
        let _ = writeln!(out, "  {};", label(n));
    }
    for e in &graph.edges {
        let in_forest = forest.edges.iter().any(|f| (f.u, f.v) == (e.u, e.v));
        let _ = write!(
            out,
            "  {} -- {} [label=\"{:.3}\"",
            label(e.u),
            label(e.v),
            e.weight
        );
        if in_forest {
            out.push_str(", style=bold, penwidth=2");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

/// Rounds to 12 significant digits; non-finite values become null.
fn num(x: f64) -> Value {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn name_list(report: &PriorityReport, items: &ItemSet) -> Value {
    json!(report.names(items.items()))
}

fn edge_json(report: &PriorityReport, e: &crate::correlation::WeightedEdge) -> Value {
    let mut m = Map::new();
    m.insert("source".into(), json!(report.name(e.u)));
    m.insert("target".into(), json!(report.name(e.v)));
    m.insert("weight".into(), num(e.weight));
    Value::Object(m)
}

fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

pub fn report_json(report: &PriorityReport) -> Value {
    let freqs = &report.frequencies;
    let frequencies = (0..freqs.len())
        .map(AttributeId)
        .map(|id| {
            object(vec![
                ("attribute", json!(report.name(id))),
                ("index", json!(id.0)),
                ("count", json!(freqs.count(id))),
                ("support", num(freqs.support(id))),
            ])
        })
        .collect();
    let top = report
        .top_requirements
        .iter()
        .map(|&id| {
            object(vec![
                ("attribute", json!(report.name(id))),
                ("index", json!(id.0)),
                ("support", num(freqs.support(id))),
            ])
        })
        .collect();
    let itemsets = report
        .frequent_itemsets
        .iter()
        .map(|f| {
            object(vec![
                ("items", name_list(report, &f.itemset)),
                ("count", json!(f.count)),
                ("support", num(f.support)),
            ])
        })
        .collect();
    let rules = report
        .rules
        .iter()
        .map(|r| {
            object(vec![
                ("antecedent", name_list(report, &r.antecedent)),
                ("consequent", name_list(report, &r.consequent)),
                ("support", num(r.support)),
                ("confidence", num(r.confidence)),
                ("lift", num(r.lift)),
            ])
        })
        .collect();
    let matrix = object(vec![
        (
            "requirements",
            json!(report.names(report.requirement_matrix.requirements())),
        ),
        ("cells", json!(report.requirement_matrix.to_bits())),
    ]);
    let groups = report
        .groups
        .iter()
        .map(|g| {
            json!(g
                .members
                .iter()
                .map(|&m| report.name(m))
                .collect::<Vec<_>>())
        })
        .collect();
    let edges = report
        .correlation
        .edges
        .iter()
        .map(|e| edge_json(report, e))
        .collect();
    let forest = object(vec![
        (
            "edges",
            Value::Array(
                report
                    .forest
                    .edges
                    .iter()
                    .map(|e| edge_json(report, e))
                    .collect(),
            ),
        ),
        ("total_weight", num(report.forest.total_weight)),
        ("component_count", json!(report.forest.component_count)),
    ]);
    let priority = report
        .priority
        .iter()
        .enumerate()
        .map(|(rank, p)| {
            object(vec![
                ("rank", json!(rank + 1)),
                ("attribute", json!(report.name(p.attribute))),
                ("index", json!(p.attribute.0)),
                ("score", num(p.score)),
                ("support", num(freqs.support(p.attribute))),
            ])
        })
        .collect();

    object(vec![
        ("frequencies", Value::Array(frequencies)),
        ("top_requirements", Value::Array(top)),
        ("frequent_itemsets", Value::Array(itemsets)),
        ("rules", Value::Array(rules)),
        ("requirement_matrix", matrix),
        ("groups", Value::Array(groups)),
        ("correlation_edges", Value::Array(edges)),
        ("spanning_forest", forest),
        ("priority_order", Value::Array(priority)),
    ])
}

/// Pretty-printed JSON document followed by a newline.
pub fn export_json(report: &PriorityReport) -> String {
    let mut s =
        serde_json::to_string_pretty(&report_json(report)).expect("JSON values always serialize");
    s.push('\n');
    s
}

struct Style {
    color: bool,
}

impl Style {
    fn heading(&self, out: &mut String, title: &str) {
        if self.color {
            let _ = writeln!(out, "\n\x1b[1m{title}\x1b[0m");
        } else {
            let _ = writeln!(out, "\n{title}");
        }
    }
}

/// Human-readable report. Numbers are rounded to three decimals.
pub fn render_text(report: &PriorityReport, color: bool) -> String {
    let style = Style { color };
    let freqs = &report.frequencies;
    let p = &report.options.params;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Respondents: {}  Attributes: {}",
        freqs.respondents(),
        report.attribute_names.len()
    );
    let _ = writeln!(
        out,
        "Parameters: min support {:.2}, min confidence {:.2}, max rule length {}, min lift {:.2}, top threshold {:.2}",
        p.min_support,
        p.min_confidence,
        p.max_rule_length,
        p.min_lift,
        report.options.top_threshold()
    );

    let width = report
        .attribute_names
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(0);
    style.heading(&mut out, "Attribute frequencies");
    for id in (0..freqs.len()).map(AttributeId) {
        let _ = writeln!(
            out,
            "  {:<width$}  {:>3}/{}  {:.3}",
            report.name(id),
            freqs.count(id),
            freqs.respondents(),
            freqs.support(id)
        );
    }

    style.heading(&mut out, "Top requirements");
    for (i, &id) in report.top_requirements.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:>2}. {} ({:.3})",
            i + 1,
            report.name(id),
            freqs.support(id)
        );
    }

    style.heading(&mut out, "Frequent itemsets");
    for f in &report.frequent_itemsets {
        let _ = writeln!(
            out,
            "  {{{}}}  count {}  support {:.3}",
            report.names(f.itemset.items()).join(", "),
            f.count,
            f.support
        );
    }

    style.heading(&mut out, "Association rules");
    if report.rules.is_empty() {
        out.push_str("  (none)\n");
    }
    for r in &report.rules {
        let _ = writeln!(
            out,
            "  {} => {}  support {:.3}  confidence {:.3}  lift {:.3}",
            report.names(r.antecedent.items()).join(", "),
            report.names(r.consequent.items()).join(", "),
            r.support,
            r.confidence,
            r.lift
        );
    }

    let reqs = report.requirement_matrix.requirements();
    style.heading(&mut out, "Requirement matrix");
    for (i, &id) in reqs.iter().enumerate() {
        let _ = writeln!(out, "  R{} = {}", i + 1, report.name(id));
    }
    let labels: Vec<String> = (1..=reqs.len()).map(|i| format!("R{i}")).collect();
    let cell_w = labels.iter().map(String::len).max().unwrap_or(2);
    let _ = write!(out, "  {:cell_w$}", "");
    for l in &labels {
        let _ = write!(out, " {l:>cell_w$}");
    }
    out.push('\n');
    for (l, row) in labels.iter().zip(report.requirement_matrix.to_bits()) {
        let _ = write!(out, "  {l:cell_w$}");
        for b in row {
            let _ = write!(out, " {b:>cell_w$}");
        }
        out.push('\n');
    }

    style.heading(&mut out, "Requirement groups");
    for (i, g) in report.groups.iter().enumerate() {
        let members: Vec<&str> = g.members.iter().map(|&m| report.name(m)).collect();
        let _ = writeln!(out, "  G{}: {}", i + 1, members.join(", "));
    }

    style.heading(&mut out, "Correlation edges");
    if report.correlation.edges.is_empty() {
        out.push_str("  (none)\n");
    }
    for e in &report.correlation.edges {
        let _ = writeln!(
            out,
            "  {} -- {}  r = {:.3}",
            report.name(e.u),
            report.name(e.v),
            e.weight
        );
    }
    for s in &report.skipped_edges {
        let _ = writeln!(
            out,
            "  warning: skipped {} -- {} ({} is constant)",
            report.name(s.u),
            report.name(s.v),
            report.name(s.constant)
        );
    }

    style.heading(&mut out, "Maximum spanning forest");
    for e in &report.forest.edges {
        let _ = writeln!(
            out,
            "  {} -- {}  {:.3}",
            report.name(e.u),
            report.name(e.v),
            e.weight
        );
    }
    let _ = writeln!(
        out,
        "  total cost {:.3}, {} component(s)",
        report.forest.total_weight, report.forest.component_count
    );

    style.heading(&mut out, "Priority order");
    for (i, entry) in report.priority.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:>2}. {:<width$}  score {:.3}  support {:.3}",
            i + 1,
            report.name(entry.attribute),
            entry.score,
            freqs.support(entry.attribute)
        );
    }
    out
}
