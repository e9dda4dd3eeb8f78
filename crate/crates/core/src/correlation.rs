//! Pearson correlation between binary response columns and the weighted
//! requirement graph built from it.

use thiserror::Error;

use crate::reqmatrix::RequirementMatrix;
use crate::survey::{AttributeId, ResponseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationError {
    #[error("columns differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("column has zero variance (all values equal)")]
    DegenerateVariance,
    #[error("zero variance in column {} while correlating {} and {}", .constant, .pair.0, .pair.1)]
    DegeneratePair {
        pair: (AttributeId, AttributeId),
        constant: AttributeId,
    },
    #[error("requirement {0} is not a column of the response matrix")]
    UnknownAttribute(AttributeId),
}

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub u: AttributeId,
    pub v: AttributeId,
    pub weight: f64,
}

impl WeightedEdge {
    /// Orients the endpoints so that `u < v`.
    pub fn new(a: AttributeId, b: AttributeId, weight: f64) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        WeightedEdge { u, v, weight }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationGraph {
    pub nodes: Vec<AttributeId>,
    pub edges: Vec<WeightedEdge>,
}

/// Which requirement pairs receive an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeSelection {
    /// Pairs linked in the requirement matrix (either direction).
    #[default]
    Linked,
    /// Every pair of requirements.
    Complete,
}

/// A pair left out of the graph because one of its columns is constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkippedEdge {
    pub u: AttributeId,
    pub v: AttributeId,
    pub constant: AttributeId,
}

/// Raw-score Pearson coefficient:
///
/// `r = (N·Σxy − Σx·Σy) / sqrt((N·Σx² − (Σx)²)(N·Σy² − (Σy)²))`
///
/// The sums are exact integers, so the only rounding happens in the final
/// square root and division.
pub fn pearson(x: &[bool], y: &[bool]) -> Result<f64, CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len() as i128;
    let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for (&a, &b) in x.iter().zip(y) {
        let (a, b) = (i128::from(a), i128::from(b));
        sx += a;
        sy += b;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    let var_x = n * sxx - sx * sx;
    let var_y = n * syy - sy * sy;
    if var_x == 0 || var_y == 0 {
        return Err(CorrelationError::DegenerateVariance);
    }
    let numerator = n * sxy - sx * sy;
    Ok(numerator as f64 / ((var_x * var_y) as f64).sqrt())
}

fn edge_for(
    matrix: &ResponseMatrix,
    a: AttributeId,
    b: AttributeId,
) -> Result<WeightedEdge, CorrelationError> {
    let (xa, xb) = (matrix.column(a), matrix.column(b));
    let edge = WeightedEdge::new(a, b, 0.0);
    match pearson(&xa, &xb) {
        Ok(r) => Ok(WeightedEdge { weight: r, ..edge }),
        Err(CorrelationError::DegenerateVariance) => {
            let constant = if xa.iter().all(|&c| c == xa[0]) { a } else { b };
            Err(CorrelationError::DegeneratePair {
                pair: (edge.u, edge.v),
                constant,
            })
        }
        Err(e) => Err(e),
    }
}

fn candidate_pairs(
    reqmatrix: &RequirementMatrix,
    selection: EdgeSelection,
) -> Vec<(AttributeId, AttributeId)> {
    let reqs = reqmatrix.requirements();
    let mut pairs = Vec::new();
    for i in 0..reqs.len() {
        for j in i + 1..reqs.len() {
            if selection == EdgeSelection::Complete || reqmatrix.linked(i, j) {
                let e = WeightedEdge::new(reqs[i], reqs[j], 0.0);
                pairs.push((e.u, e.v));
            }
        }
    }
    pairs.sort();
    pairs
}

fn check_columns(
    matrix: &ResponseMatrix,
    reqmatrix: &RequirementMatrix,
) -> Result<(), CorrelationError> {
    match reqmatrix
        .requirements()
        .iter()
        .find(|r| r.0 >= matrix.attributes())
    {
        Some(&r) => Err(CorrelationError::UnknownAttribute(r)),
        None => Ok(()),
    }
}

/// One edge per linked requirement pair, weighted by Pearson r. Fails on the
/// first pair with a constant column.
pub fn build_correlation_graph(
    matrix: &ResponseMatrix,
    reqmatrix: &RequirementMatrix,
    selection: EdgeSelection,
) -> Result<CorrelationGraph, CorrelationError> {
    check_columns(matrix, reqmatrix)?;
    let edges = candidate_pairs(reqmatrix, selection)
        .into_iter()
        .map(|(u, v)| edge_for(matrix, u, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CorrelationGraph {
        nodes: reqmatrix.requirements().to_vec(),
        edges,
    })
}

/// Like [`build_correlation_graph`], but pairs with a constant column are
/// dropped and reported instead of failing the whole graph.
pub fn build_correlation_graph_lenient(
    matrix: &ResponseMatrix,
    reqmatrix: &RequirementMatrix,
    selection: EdgeSelection,
) -> Result<(CorrelationGraph, Vec<SkippedEdge>), CorrelationError> {
    check_columns(matrix, reqmatrix)?;
    let mut edges = Vec::new();
    let mut skipped = Vec::new();
    for (u, v) in candidate_pairs(reqmatrix, selection) {
        match edge_for(matrix, u, v) {
            Ok(e) => edges.push(e),
            Err(CorrelationError::DegeneratePair { constant, .. }) => {
                skipped.push(SkippedEdge { u, v, constant })
            }
            Err(e) => return Err(e),
        }
    }
    Ok((
        CorrelationGraph {
            nodes: reqmatrix.requirements().to_vec(),
            edges,
        },
        skipped,
    ))
}
