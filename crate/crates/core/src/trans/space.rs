use std::collections::HashSet;

use super::Triple;
use crate::error::{Error, Result};
use crate::kg::{EntityId, KgBuilder, KnowledgeGraph, RelTriple};

/// Maps the entities of two graphs onto rows of one embedding table.
///
/// KG1 entity `i` starts on row `i` and KG2 entity `j` on row `n1 + j`. Merging a
/// pair points the KG2 entity at its partner's row, so the pair shares one vector.
/// Relations are never merged: KG2 relation `r` lives on row `r1 + r`.
#[derive(Debug, Clone)]
pub struct JointSpace {
    kg1_rows: Vec<usize>,
    kg2_rows: Vec<usize>,
    kg1_triples: Vec<RelTriple>,
    kg2_triples: Vec<RelTriple>,
    relation_offset: usize,
    relation_count: usize,
    triples: Vec<Triple>,
    triple_set: HashSet<Triple>,
    active: Vec<usize>,
}

impl JointSpace {
    pub fn new(kg1: &KnowledgeGraph, kg2: &KnowledgeGraph, merged: &[(EntityId, EntityId)]) -> Result<Self> {
        let n1 = kg1.entity_count();
        let mut space = JointSpace {
            kg1_rows: (0..n1).collect(),
            kg2_rows: (n1..n1 + kg2.entity_count()).collect(),
            kg1_triples: kg1.rel_triples().to_vec(),
            kg2_triples: kg2.rel_triples().to_vec(),
            relation_offset: kg1.relations().len(),
            relation_count: kg1.relations().len() + kg2.relations().len(),
            triples: Vec::new(),
            triple_set: HashSet::new(),
            active: Vec::new(),
        };
        space.merge(merged)?;
        Ok(space)
    }

    /// A space over a single graph.
    pub fn single(kg: &KnowledgeGraph) -> Self {
        JointSpace::new(kg, &KgBuilder::new().build(), &[]).expect("no pairs to merge")
    }

    /// Points every KG2 entity of `pairs` at its KG1 partner's row and rebuilds the triple set.
    pub fn merge(&mut self, pairs: &[(EntityId, EntityId)]) -> Result<()> {
        for &(a, b) in pairs {
            let row = *self.kg1_rows.get(a.index()).ok_or_else(|| Error::Lookup {
                kind: "kg1 entity",
                key: a.to_string(),
            })?;
            let slot = self.kg2_rows.get_mut(b.index()).ok_or_else(|| Error::Lookup {
                kind: "kg2 entity",
                key: b.to_string(),
            })?;
            *slot = row;
        }
        self.rebuild();
        Ok(())
    }

    fn rebuild(&mut self) {
        let mut triples = Vec::with_capacity(self.kg1_triples.len() + self.kg2_triples.len());
        let mut set = HashSet::with_capacity(triples.capacity());
        let sides = [
            (&self.kg1_triples, &self.kg1_rows, 0),
            (&self.kg2_triples, &self.kg2_rows, self.relation_offset),
        ];
        for (list, rows, offset) in sides {
            for t in list.iter() {
                let j = Triple::new(rows[t.head.index()], offset + t.relation.index(), rows[t.tail.index()]);
                if set.insert(j) {
                    triples.push(j);
                }
            }
        }
        let mut active: Vec<usize> = self.kg1_rows.iter().chain(&self.kg2_rows).copied().collect();
        active.sort_unstable();
        active.dedup();
        self.triples = triples;
        self.triple_set = set;
        self.active = active;
    }

    /// Rows allocated in the entity table, including rows orphaned by merges.
    pub fn row_count(&self) -> usize {
        self.kg1_rows.len() + self.kg2_rows.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }

    pub fn kg1_row(&self, e: EntityId) -> usize {
        self.kg1_rows[e.index()]
    }

    pub fn kg2_row(&self, e: EntityId) -> usize {
        self.kg2_rows[e.index()]
    }

    pub fn kg1_rows(&self) -> &[usize] {
        &self.kg1_rows
    }

    pub fn kg2_rows(&self) -> &[usize] {
        &self.kg2_rows
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triple_set.contains(t)
    }

    /// Rows that at least one entity maps to, ascending.
    pub fn active_rows(&self) -> &[usize] {
        &self.active
    }
}
