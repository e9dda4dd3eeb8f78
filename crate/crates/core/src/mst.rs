//! Kruskal's method over the correlation graph, taking the heaviest edges first.

use std::cmp::Ordering;

use crate::correlation::{CorrelationGraph, WeightedEdge};
use crate::dsu::DisjointSetUnion;
use crate::survey::AttributeId;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningForest {
    pub nodes: Vec<AttributeId>,
    pub edges: Vec<WeightedEdge>,
    pub total_weight: f64,
    pub component_count: usize,
}

pub fn total_weight(forest: &SpanningForest) -> f64 {
    forest.edges.iter().map(|e| e.weight).sum()
}

// Weights are finite by precondition; partial_cmp also equates 0.0 and -0.0.
fn by_weight(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

fn kruskal(graph: &CorrelationGraph, heaviest_first: bool) -> SpanningForest {
    let mut order: Vec<&WeightedEdge> = graph.edges.iter().collect();
    order.sort_by(|a, b| {
        let w = if heaviest_first {
            by_weight(b.weight, a.weight)
        } else {
            by_weight(a.weight, b.weight)
        };
        w.then((a.u, a.v).cmp(&(b.u, b.v)))
    });

    let slot = |id: AttributeId| {
        graph
            .nodes
            .iter()
            .position(|&n| n == id)
            .expect("edge endpoint must be a graph node")
    };
    let mut dsu = DisjointSetUnion::new(graph.nodes.len());
    let mut edges = Vec::new();
    for e in order {
        if dsu.union(slot(e.u), slot(e.v)) {
            edges.push(*e);
            if dsu.set_count() == 1 {
                break;
            }
        }
    }
    let mut forest = SpanningForest {
        nodes: graph.nodes.clone(),
        edges,
        total_weight: 0.0,
        component_count: dsu.set_count(),
    };
    forest.total_weight = total_weight(&forest);
    forest
}

/// Maximum-weight spanning forest. Edges are scanned in descending weight,
/// equal weights by ascending `(u, v)`; an edge is kept when it joins two
/// different components.
pub fn maximum_spanning_forest(graph: &CorrelationGraph) -> SpanningForest {
    kruskal(graph, true)
}

/// Minimum-weight counterpart with the same tie-breaking.
pub fn minimum_spanning_forest(graph: &CorrelationGraph) -> SpanningForest {
    kruskal(graph, false)
}
