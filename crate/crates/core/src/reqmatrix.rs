//! Directed requirement adjacency built from single-item rules, and the
//! groups of requirements linked through it.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::apriori::AssociationRule;
use crate::dsu::DisjointSetUnion;
use crate::survey::AttributeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReqMatrixError {
    #[error("rule mentions attribute {0} which is not among the requirements")]
    UnknownRequirement(AttributeId),
    #[error("rule {antecedent} => {consequent} is not a single-item implication")]
    CompoundRule {
        antecedent: String,
        consequent: String,
    },
}

/// `cells[i][j]` is set when requirement `i` implies requirement `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementMatrix {
    requirements: Vec<AttributeId>,
    cells: Vec<Vec<bool>>,
}

impl RequirementMatrix {
    /// Builds a matrix from explicit cells. The diagonal is cleared.
    pub fn from_cells(requirements: Vec<AttributeId>, mut cells: Vec<Vec<bool>>) -> Self {
        let r = requirements.len();
        assert_eq!(
            cells.len(),
            r,
            "matrix must be square over the requirements"
        );
        for (i, row) in cells.iter_mut().enumerate() {
            assert_eq!(row.len(), r, "matrix must be square over the requirements");
            row[i] = false;
        }
        RequirementMatrix {
            requirements,
            cells,
        }
    }

    pub fn requirements(&self) -> &[AttributeId] {
        &self.requirements
    }

    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }

    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.cells[i][j]
    }

    pub fn cells(&self) -> &[Vec<bool>] {
        &self.cells
    }

    /// The 0/1 grid, row by row.
    pub fn to_bits(&self) -> Vec<Vec<u8>> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }

    pub fn position(&self, id: AttributeId) -> Option<usize> {
        self.requirements.iter().position(|&r| r == id)
    }

    /// Directed pairs `(from, to)` with a set cell, in row-major order.
    pub fn directed_pairs(&self) -> Vec<(AttributeId, AttributeId)> {
        let mut out = Vec::new();
        for (i, row) in self.cells.iter().enumerate() {
            for (j, &set) in row.iter().enumerate() {
                if set {
                    out.push((self.requirements[i], self.requirements[j]));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> RequirementMatrix {
        let r = self.len();
        let cells = (0..r)
            .map(|i| (0..r).map(|j| self.cells[j][i]).collect())
            .collect();
        RequirementMatrix {
            requirements: self.requirements.clone(),
            cells,
        }
    }

    /// True when `i` and `j` are linked in either direction.
    pub fn linked(&self, i: usize, j: usize) -> bool {
        self.cells[i][j] || self.cells[j][i]
    }
}

/// Requirements connected through the symmetrized matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementGroup {
    pub members: BTreeSet<AttributeId>,
}

pub fn build_matrix(
    rules: &[AssociationRule],
    requirements: &[AttributeId],
) -> Result<RequirementMatrix, ReqMatrixError> {
    let r = requirements.len();
    let mut cells = vec![vec![false; r]; r];
    let position = |id: AttributeId| {
        requirements
            .iter()
            .position(|&x| x == id)
            .ok_or(ReqMatrixError::UnknownRequirement(id))
    };
    for rule in rules {
        let (&[from], &[to]) = (rule.antecedent.items(), rule.consequent.items()) else {
            return Err(ReqMatrixError::CompoundRule {
                antecedent: rule.antecedent.to_string(),
                consequent: rule.consequent.to_string(),
            });
        };
        let (i, j) = (position(from)?, position(to)?);
        if i != j {
            cells[i][j] = true;
        }
    }
    Ok(RequirementMatrix {
        requirements: requirements.to_vec(),
        cells,
    })
}

/// Connected components of the symmetrized adjacency, singletons included,
/// ordered by their smallest member.
pub fn extract_groups(matrix: &RequirementMatrix) -> Vec<RequirementGroup> {
    let r = matrix.len();
    let mut dsu = DisjointSetUnion::new(r);
    for i in 0..r {
        for j in i + 1..r {
            if matrix.linked(i, j) {
                dsu.union(i, j);
            }
        }
    }
    let mut groups: Vec<BTreeSet<AttributeId>> = Vec::new();
    let mut slot_of_root = vec![usize::MAX; r];
    for i in 0..r {
        let root = dsu.find(i);
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = groups.len();
            groups.push(BTreeSet::new());
        }
        groups[slot_of_root[root]].insert(matrix.requirements()[i]);
    }
    groups.sort_by_key(|g| g.first().copied());
    groups
        .into_iter()
        .map(|members| RequirementGroup { members })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apriori::ItemSet;
    use proptest::prelude::*;

    fn rule(a: usize, b: usize) -> AssociationRule {
        AssociationRule {
            antecedent: ItemSet::from_indices(&[a]),
            consequent: ItemSet::from_indices(&[b]),
            support: 0.5,
            confidence: 1.0,
            lift: 1.0,
        }
    }

    fn ids(v: &[usize]) -> Vec<AttributeId> {
        v.iter().copied().map(AttributeId).collect()
    }

    #[test]
    fn empty_rules_give_zero_matrix() {
        let m = build_matrix(&[], &ids(&[0, 1, 2])).unwrap();
        assert_eq!(m.to_bits(), vec![vec![0; 3]; 3]);
        let groups = extract_groups(&m);
        assert_eq!(groups.len(), 3);
        assert!(groups.iter().all(|g| g.members.len() == 1));
    }

    #[test]
    fn single_rule_sets_one_cell() {
        let m = build_matrix(&[rule(0, 1)], &ids(&[0, 1])).unwrap();
        assert_eq!(m.to_bits(), vec![vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn full_matrix_is_one_group() {
        let reqs = ids(&[3, 5, 7, 9]);
        let cells = vec![vec![true; 4]; 4];
        let m = RequirementMatrix::from_cells(reqs.clone(), cells);
        assert!((0..4).all(|i| !m.cell(i, i)));
        let groups = extract_groups(&m);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].members, reqs.into_iter().collect());
    }

    #[test]
    fn errors() {
        assert_eq!(
            build_matrix(&[rule(0, 4)], &ids(&[0, 1])),
            Err(ReqMatrixError::UnknownRequirement(AttributeId(4)))
        );
        let compound = AssociationRule {
            antecedent: ItemSet::from_indices(&[0]),
            consequent: ItemSet::from_indices(&[1, 2]),
            support: 0.5,
            confidence: 1.0,
            lift: 1.0,
        };
        assert!(matches!(
            build_matrix(&[compound], &ids(&[0, 1, 2])),
            Err(ReqMatrixError::CompoundRule { .. })
        ));
    }

    #[test]
    fn groups_ordered_by_smallest_member() {
        // requirement order deliberately not sorted by attribute index
        let reqs = ids(&[8, 2, 6, 4]);
        let m = build_matrix(&[rule(8, 4), rule(6, 2)], &reqs).unwrap();
        let groups: Vec<Vec<usize>> = extract_groups(&m)
            .into_iter()
            .map(|g| g.members.into_iter().map(|a| a.0).collect())
            .collect();
        assert_eq!(groups, vec![vec![2, 6], vec![4, 8]]);
    }

    proptest! {
        #[test]
        fn groups_partition_and_ignore_direction(
            r in 1usize..8,
            pairs in proptest::collection::vec((0usize..8, 0usize..8), 0..20),
        ) {
            let reqs = ids(&(0..r).collect::<Vec<_>>());
            let rules: Vec<_> = pairs.iter().filter(|(a, b)| *a < r && *b < r).map(|&(a, b)| rule(a, b)).collect();
            let m = build_matrix(&rules, &reqs).unwrap();

            let expected: BTreeSet<_> = rules.iter()
                .filter(|x| x.antecedent != x.consequent)
                .map(|x| (x.antecedent.items()[0], x.consequent.items()[0]))
                .collect();
            let read_back: BTreeSet<_> = m.directed_pairs().into_iter().collect();
            prop_assert_eq!(read_back, expected);

            let groups = extract_groups(&m);
            let mut seen = BTreeSet::new();
            for g in &groups {
                prop_assert!(!g.members.is_empty());
                for &a in &g.members {
                    prop_assert!(seen.insert(a));
                }
            }
            prop_assert_eq!(seen, reqs.iter().copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(extract_groups(&m.transpose()), groups);
        }
    }
}
