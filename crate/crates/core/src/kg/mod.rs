//! Knowledge-graph data model.
//!
//! A [`KnowledgeGraph`] interns entity, relation, attribute and value strings into
//! dense integer ids (first-occurrence order) and stores deduplicated relation and
//! attribute triples. Once built it is immutable.

mod io;
mod seeds;
mod stats;

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexSet;

use crate::error::{Error, Result};

pub use io::{load_kg, load_links, write_attr_triples, write_links, write_rel_triples, Dataset};
pub use seeds::{split_seeds, SeedAlignment, Split, SplitRatios};
pub use stats::{dataset_stats, DatasetStats};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            fn from(i: usize) -> Self {
                $name(u32::try_from(i).expect("id overflow"))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Dense entity id within one knowledge graph.
    EntityId
);
id_type!(RelationId);
id_type!(AttributeId);
id_type!(ValueId);

/// A `head relation tail` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelTriple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
}

/// An `entity attribute value` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrTriple {
    pub entity: EntityId,
    pub attribute: AttributeId,
    pub value: ValueId,
}

/// Bijection between strings and dense ids, in first-insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    items: IndexSet<String>,
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, inserting it if unseen.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(i) = self.items.get_index_of(name) {
            return i;
        }
        self.items.insert_full(name.to_owned()).0
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.items.get_index_of(name)
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.items.get_index(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entities: Vocab,
    relations: Vocab,
    attributes: Vocab,
    values: Vocab,
    rel_triples: Vec<RelTriple>,
    attr_triples: Vec<AttrTriple>,
    rel_index: HashSet<RelTriple>,
    degrees: Vec<usize>,
}

impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.entities == other.entities
            && self.relations == other.relations
            && self.attributes == other.attributes
            && self.values == other.values
            && self.rel_triples == other.rel_triples
            && self.attr_triples == other.attr_triples
    }
}

impl KnowledgeGraph {
    pub fn entities(&self) -> &Vocab {
        &self.entities
    }

    pub fn relations(&self) -> &Vocab {
        &self.relations
    }

    pub fn attributes(&self) -> &Vocab {
        &self.attributes
    }

    pub fn values(&self) -> &Vocab {
        &self.values
    }

    pub fn rel_triples(&self) -> &[RelTriple] {
        &self.rel_triples
    }

    pub fn attr_triples(&self) -> &[AttrTriple] {
        &self.attr_triples
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn entity_id(&self, name: &str) -> Result<EntityId> {
        self.entities
            .get(name)
            .map(EntityId::from)
            .ok_or_else(|| Error::Lookup {
                kind: "entity",
                key: name.to_owned(),
            })
    }

    pub fn entity_name(&self, id: EntityId) -> Result<&str> {
        self.entities.name(id.index()).ok_or_else(|| Error::Lookup {
            kind: "entity id",
            key: id.to_string(),
        })
    }

    pub fn contains(&self, triple: &RelTriple) -> bool {
        self.rel_index.contains(triple)
    }

    /// Number of relation triples in which `entity` is head or tail.
    /// A self-loop counts twice. Attribute triples are not counted.
    pub fn degree(&self, entity: EntityId) -> Result<usize> {
        self.degrees
            .get(entity.index())
            .copied()
            .ok_or_else(|| Error::Lookup {
                kind: "entity id",
                key: entity.to_string(),
            })
    }

    /// Degrees of all entities, indexed by entity id.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }
}

/// Incremental constructor that interns names and drops duplicate triples.
#[derive(Debug, Default)]
pub struct KgBuilder {
    kg: KnowledgeGraph,
    attr_index: HashSet<AttrTriple>,
    duplicates: usize,
}

impl KgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_entity(&mut self, name: &str) -> EntityId {
        EntityId::from(self.kg.entities.intern(name))
    }

    /// Adds a relation triple; returns `false` if it was already present.
    pub fn add_rel(&mut self, head: &str, relation: &str, tail: &str) -> bool {
        let triple = RelTriple {
            head: self.add_entity(head),
            relation: RelationId::from(self.kg.relations.intern(relation)),
            tail: self.add_entity(tail),
        };
        if self.kg.rel_index.insert(triple) {
            self.kg.rel_triples.push(triple);
            true
        } else {
            self.duplicates += 1;
            false
        }
    }

    /// Adds an attribute triple; returns `false` if it was already present.
    pub fn add_attr(&mut self, entity: &str, attribute: &str, value: &str) -> bool {
        let triple = AttrTriple {
            entity: self.add_entity(entity),
            attribute: AttributeId::from(self.kg.attributes.intern(attribute)),
            value: ValueId::from(self.kg.values.intern(value)),
        };
        if self.attr_index.insert(triple) {
            self.kg.attr_triples.push(triple);
            true
        } else {
            self.duplicates += 1;
            false
        }
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn build(mut self) -> KnowledgeGraph {
        let mut degrees = vec![0usize; self.kg.entities.len()];
        for t in &self.kg.rel_triples {
            degrees[t.head.index()] += 1;
            degrees[t.tail.index()] += 1;
        }
        self.kg.degrees = degrees;
        self.kg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> KnowledgeGraph {
        let mut b = KgBuilder::new();
        b.add_rel("a", "r", "b");
        b.add_rel("b", "r", "c");
        b.build()
    }

    #[test]
    fn vocab_is_a_bijection() {
        let mut v = Vocab::new();
        assert_eq!(v.intern("x"), 0);
        assert_eq!(v.intern("y"), 1);
        assert_eq!(v.intern("x"), 0);
        assert_eq!(v.name(1), Some("y"));
        assert_eq!(v.get("y"), Some(1));
        assert_eq!(v.get("z"), None);
    }

    #[test]
    fn isolated_entity_has_degree_zero() {
        let mut b = KgBuilder::new();
        b.add_rel("a", "r", "b");
        b.add_attr("lonely", "name", "\"L\"");
        let kg = b.build();
        let e = kg.entity_id("lonely").unwrap();
        assert_eq!(kg.degree(e).unwrap(), 0);
    }

    #[test]
    fn degree_counts_head_and_tail_occurrences() {
        let mut b = KgBuilder::new();
        b.add_rel("e", "r", "x");
        b.add_rel("y", "r", "e");
        let kg = b.build();
        assert_eq!(kg.degree(kg.entity_id("e").unwrap()).unwrap(), 2);
    }

    #[test]
    fn self_loop_counts_twice() {
        let mut b = KgBuilder::new();
        b.add_rel("e", "r", "e");
        let kg = b.build();
        assert_eq!(kg.degree(EntityId(0)).unwrap(), 2);
    }

    #[test]
    fn unknown_entity_is_a_lookup_error() {
        let kg = chain();
        assert!(matches!(kg.degree(EntityId(99)), Err(Error::Lookup { .. })));
        assert!(matches!(kg.entity_id("nope"), Err(Error::Lookup { .. })));
    }

    #[test]
    fn duplicates_are_dropped_in_order() {
        let mut b = KgBuilder::new();
        assert!(b.add_rel("a", "r", "b"));
        assert!(!b.add_rel("a", "r", "b"));
        assert!(b.add_rel("b", "r", "a"));
        assert_eq!(b.duplicates(), 1);
        let kg = b.build();
        assert_eq!(kg.rel_triples().len(), 2);
        assert_eq!(kg.rel_triples()[0].head, EntityId(0));
    }

    #[test]
    fn degree_sum_is_twice_the_triple_count() {
        let kg = chain();
        let total: usize = kg.degrees().iter().sum();
        assert_eq!(total, 2 * kg.rel_triples().len());
    }
}
