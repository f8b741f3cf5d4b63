use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::KnowledgeGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub entity_count: usize,
    pub relation_count: usize,
    pub attribute_count: usize,
    pub rel_triple_count: usize,
    pub attr_triple_count: usize,
    /// degree -> number of entities with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
}

pub fn dataset_stats(kg: &KnowledgeGraph) -> DatasetStats {
    let mut degree_histogram = BTreeMap::new();
    for &d in kg.degrees() {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    DatasetStats {
        entity_count: kg.entity_count(),
        relation_count: kg.relations().len(),
        attribute_count: kg.attributes().len(),
        rel_triple_count: kg.rel_triples().len(),
        attr_triple_count: kg.attr_triples().len(),
        degree_histogram,
    }
}
