//! Level-wise frequent itemset mining and association rule derivation.
//!
//! Each survey row is a transaction; attribute `j` belongs to the transaction
//! when the row holds a 1 in column `j`. Supports are tracked as integer row
//! counts and only divided by N when a fraction is reported or compared
//! against a threshold.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::survey::{AttributeId, ResponseMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AprioriError {
    #[error("attribute {item} is out of range for a matrix with {attributes} attributes")]
    ItemOutOfRange {
        item: AttributeId,
        attributes: usize,
    },
    #[error("candidate generation needs itemsets of one size; found sizes {expected} and {found}")]
    MixedSizes { expected: usize, found: usize },
    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParams {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// A set of attributes kept as a strictly increasing list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ItemSet(Vec<AttributeId>);

impl ItemSet {
    /// Sorts and deduplicates the given items.
    pub fn new(items: impl IntoIterator<Item = AttributeId>) -> Self {
        let mut v: Vec<AttributeId> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ItemSet(v)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        ItemSet::new(indices.iter().copied().map(AttributeId))
    }

    pub fn empty() -> Self {
        ItemSet(Vec::new())
    }

    pub fn items(&self) -> &[AttributeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: AttributeId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn union(&self, other: &ItemSet) -> ItemSet {
        ItemSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_disjoint(&self, other: &ItemSet) -> bool {
        self.0.iter().all(|i| !other.contains(*i))
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", item.0)?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequentItemSet {
    pub itemset: ItemSet,
    /// Rows containing every item.
    pub count: usize,
    pub support: f64,
}

/// Candidates of one size `k`, each with every `(k-1)`-subset frequent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSet {
    pub size: usize,
    pub candidates: Vec<ItemSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRule {
    pub antecedent: ItemSet,
    pub consequent: ItemSet,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AprioriParams {
    pub min_support: f64,
    pub min_confidence: f64,
    /// Upper bound on itemset size, and so on |antecedent| + |consequent|.
    pub max_rule_length: usize,
    pub min_lift: f64,
}

impl Default for AprioriParams {
    fn default() -> Self {
        AprioriParams {
            min_support: 0.5,
            min_confidence: 0.75,
            max_rule_length: 2,
            min_lift: 1.0,
        }
    }
}

impl AprioriParams {
    pub fn validate(&self) -> Result<(), AprioriError> {
        let unit = |name, value: f64| {
            if value > 0.0 && value <= 1.0 {
                Ok(())
            } else {
                Err(AprioriError::InvalidParams {
                    name,
                    value,
                    reason: "must lie in (0, 1]",
                })
            }
        };
        unit("min_support", self.min_support)?;
        unit("min_confidence", self.min_confidence)?;
        if self.max_rule_length < 2 {
            return Err(AprioriError::InvalidParams {
                name: "max_rule_length",
                value: self.max_rule_length as f64,
                reason: "must be at least 2",
            });
        }
        if !(self.min_lift >= 0.0 && self.min_lift.is_finite()) {
            return Err(AprioriError::InvalidParams {
                name: "min_lift",
                value: self.min_lift,
                reason: "must be a finite non-negative number",
            });
        }
        Ok(())
    }
}

/// Column-major bitsets for fast co-occurrence counting.
#[derive(Debug, Clone)]
pub struct SupportCounter {
    columns: Vec<Vec<u64>>,
    rows: usize,
}

impl SupportCounter {
    pub fn new(matrix: &ResponseMatrix) -> Self {
        let rows = matrix.respondents();
        let words = rows.div_ceil(64);
        let mut columns = vec![vec![0u64; words]; matrix.attributes()];
        for (r, row) in matrix.rows().iter().enumerate() {
            for (col, &cell) in columns.iter_mut().zip(row) {
                if cell {
                    col[r / 64] |= 1 << (r % 64);
                }
            }
        }
        SupportCounter { columns, rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn count(&self, itemset: &ItemSet) -> Result<usize, AprioriError> {
        let attributes = self.columns.len();
        if let Some(&item) = itemset.items().iter().find(|i| i.0 >= attributes) {
            return Err(AprioriError::ItemOutOfRange { item, attributes });
        }
        Ok(self.count_unchecked(itemset.items()))
    }

    fn count_unchecked(&self, items: &[AttributeId]) -> usize {
        let Some((first, rest)) = items.split_first() else {
            return self.rows;
        };
        let mut acc = self.columns[first.0].clone();
        for item in rest {
            for (a, b) in acc.iter_mut().zip(&self.columns[item.0]) {
                *a &= *b;
            }
        }
        acc.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn fraction(count: usize, total: usize) -> f64 {
    count as f64 / total as f64
}

/// Fraction of rows holding a 1 in every column of `itemset`.
pub fn itemset_support(matrix: &ResponseMatrix, itemset: &ItemSet) -> Result<f64, AprioriError> {
    let counter = SupportCounter::new(matrix);
    Ok(fraction(counter.count(itemset)?, counter.rows()))
}

/// Joins frequent k-itemsets that share their first k-1 items and keeps the
/// joins whose every k-subset is frequent.
pub fn generate_candidates(frequent_k: &[FrequentItemSet]) -> Result<CandidateSet, AprioriError> {
    let Some(first) = frequent_k.first() else {
        return Ok(CandidateSet::default());
    };
    let k = first.itemset.len();
    if let Some(bad) = frequent_k.iter().find(|f| f.itemset.len() != k) {
        return Err(AprioriError::MixedSizes {
            expected: k,
            found: bad.itemset.len(),
        });
    }
    if k == 0 {
        return Err(AprioriError::MixedSizes {
            expected: 1,
            found: 0,
        });
    }

    let mut level: Vec<&ItemSet> = frequent_k.iter().map(|f| &f.itemset).collect();
    level.sort();
    level.dedup();
    let known: HashSet<&ItemSet> = level.iter().copied().collect();

    let mut candidates = Vec::new();
    for (i, a) in level.iter().enumerate() {
        for b in &level[i + 1..] {
            // sorted input: once the prefix differs, no later b shares it
            if a.items()[..k - 1] != b.items()[..k - 1] {
                break;
            }
            let mut items = a.items().to_vec();
            items.push(b.items()[k - 1]);
            let joined = ItemSet(items);
            let all_subsets_frequent = (0..joined.len()).all(|skip| {
                let subset = ItemSet(
                    joined
                        .items()
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &x)| x)
                        .collect(),
                );
                known.contains(&subset)
            });
            if all_subsets_frequent {
                candidates.push(joined);
            }
        }
    }
    candidates.sort();
    Ok(CandidateSet {
        size: k + 1,
        candidates,
    })
}

/// All itemsets of size 1..=`max_rule_length` with support at least
/// `min_support`, ordered by size then lexicographically.
pub fn find_frequent_itemsets(
    matrix: &ResponseMatrix,
    params: &AprioriParams,
) -> Vec<FrequentItemSet> {
    let counter = SupportCounter::new(matrix);
    let n = counter.rows();
    let keep = |itemset: ItemSet| {
        let count = counter.count_unchecked(itemset.items());
        let support = fraction(count, n);
        (support >= params.min_support).then_some(FrequentItemSet {
            itemset,
            count,
            support,
        })
    };

    let mut level: Vec<FrequentItemSet> = (0..matrix.attributes())
        .filter_map(|j| keep(ItemSet(vec![AttributeId(j)])))
        .collect();
    let mut out = Vec::new();
    let mut size = 1;
    while !level.is_empty() {
        out.extend(level.iter().cloned());
        if size >= params.max_rule_length {
            break;
        }
        let candidates = generate_candidates(&level).expect("level holds itemsets of one size");
        level = candidates.candidates.into_iter().filter_map(keep).collect();
        size += 1;
    }
    out
}

/// Splits every frequent itemset of size 2..=`max_rule_length` into
/// antecedent/consequent pairs and keeps the rules that clear the confidence
/// and lift thresholds.
pub fn derive_rules(
    frequent: &[FrequentItemSet],
    matrix: &ResponseMatrix,
    params: &AprioriParams,
) -> Vec<AssociationRule> {
    let counter = SupportCounter::new(matrix);
    let n = counter.rows();
    let known: HashMap<&ItemSet, usize> = frequent.iter().map(|f| (&f.itemset, f.count)).collect();
    let count_of = |s: &ItemSet| {
        known
            .get(s)
            .copied()
            .unwrap_or_else(|| counter.count_unchecked(s.items()))
    };

    let mut rules = Vec::new();
    for z in frequent {
        let size = z.itemset.len();
        if size < 2 || size > params.max_rule_length {
            continue;
        }
        debug_assert!(size < usize::BITS as usize);
        for mask in 1..(1usize << size) - 1 {
            let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
            for (bit, &item) in z.itemset.items().iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    lhs.push(item);
                } else {
                    rhs.push(item);
                }
            }
            let (antecedent, consequent) = (ItemSet(lhs), ItemSet(rhs));
            let confidence = fraction(z.count, count_of(&antecedent));
            if confidence < params.min_confidence {
                continue;
            }
            let lift = confidence / fraction(count_of(&consequent), n);
            if lift < params.min_lift {
                continue;
            }
            rules.push(AssociationRule {
                antecedent,
                consequent,
                support: fraction(z.count, n),
                confidence,
                lift,
            });
        }
    }
    rules.sort_by(|a, b| (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent)));
    rules
}
