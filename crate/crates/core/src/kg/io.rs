//! Tab-separated dataset files.
//!
//! Layout of a dataset directory:
//!
//! ```text
//! rel_triples_1   head \t relation \t tail
//! rel_triples_2
//! attr_triples_1  entity \t attribute \t value
//! attr_triples_2
//! ent_links       kg1_entity \t kg2_entity
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;

use super::{EntityId, KgBuilder, KnowledgeGraph};
use crate::error::{Error, Result};

pub const REL_TRIPLES_1: &str = "rel_triples_1";
pub const REL_TRIPLES_2: &str = "rel_triples_2";
pub const ATTR_TRIPLES_1: &str = "attr_triples_1";
pub const ATTR_TRIPLES_2: &str = "attr_triples_2";
pub const ENT_LINKS: &str = "ent_links";

fn for_each_record<const N: usize>(
    path: &Path,
    mut f: impl FnMut([&str; N]) -> Result<()>,
) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let record: [&str; N] = fields.as_slice().try_into().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected {N} tab-separated fields, found {}", fields.len()),
        })?;
        f(record)?;
    }
    Ok(())
}

/// Loads one knowledge graph from its relation and attribute triple files.
///
/// Ids are assigned in first-occurrence order, relation file first. Duplicate
/// triples are dropped and counted in the log.
pub fn load_kg(rel_triple_path: impl AsRef<Path>, attr_triple_path: impl AsRef<Path>) -> Result<KnowledgeGraph> {
    Ok(read_kg(rel_triple_path.as_ref(), attr_triple_path.as_ref())?.build())
}

fn read_kg(rel_triple_path: &Path, attr_triple_path: &Path) -> Result<KgBuilder> {
    let mut builder = KgBuilder::new();
    for_each_record::<3>(rel_triple_path, |[h, r, t]| {
        builder.add_rel(h, r, t);
        Ok(())
    })?;
    for_each_record::<3>(attr_triple_path, |[e, a, v]| {
        builder.add_attr(e, a, v);
        Ok(())
    })?;
    if builder.duplicates() > 0 {
        info!(
            "{}: dropped {} duplicate triples",
            rel_triple_path.display(),
            builder.duplicates()
        );
    }
    Ok(builder)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_rel_triples(kg: &KnowledgeGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for t in kg.rel_triples() {
        writeln!(
            w,
            "{}\t{}\t{}",
            kg.entities.name(t.head.index()).unwrap_or_default(),
            kg.relations.name(t.relation.index()).unwrap_or_default(),
            kg.entities.name(t.tail.index()).unwrap_or_default()
        )
        .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_attr_triples(kg: &KnowledgeGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for t in kg.attr_triples() {
        writeln!(
            w,
            "{}\t{}\t{}",
            kg.entities.name(t.entity.index()).unwrap_or_default(),
            kg.attributes.name(t.attribute.index()).unwrap_or_default(),
            kg.values.name(t.value.index()).unwrap_or_default()
        )
        .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads gold links and resolves both sides. Unknown names are reported together.
pub fn load_links(
    path: impl AsRef<Path>,
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
) -> Result<Vec<(EntityId, EntityId)>> {
    let mut links = Vec::new();
    let mut missing = Vec::new();
    for_each_record::<2>(path.as_ref(), |[a, b]| {
        match (kg1.entity_id(a), kg2.entity_id(b)) {
            (Ok(x), Ok(y)) => links.push((x, y)),
            (x, y) => {
                if x.is_err() {
                    missing.push(a.to_owned());
                }
                if y.is_err() {
                    missing.push(b.to_owned());
                }
            }
        }
        Ok(())
    })?;
    if !missing.is_empty() {
        return Err(Error::Missing {
            kind: "linked entities",
            keys: missing,
        });
    }
    Ok(links)
}

pub fn write_links(
    links: &[(EntityId, EntityId)],
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for &(a, b) in links {
        writeln!(w, "{}\t{}", kg1.entity_name(a)?, kg2.entity_name(b)?)
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Two knowledge graphs and the gold links between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kg1: KnowledgeGraph,
    pub kg2: KnowledgeGraph,
    pub links: Vec<(EntityId, EntityId)>,
}

impl Dataset {
    /// Linked entities without any triple are kept as isolated entities,
    /// numbered after everything named in the triple files.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut b1 = read_kg(&dir.join(REL_TRIPLES_1), &dir.join(ATTR_TRIPLES_1))?;
        let mut b2 = read_kg(&dir.join(REL_TRIPLES_2), &dir.join(ATTR_TRIPLES_2))?;
        for_each_record::<2>(&dir.join(ENT_LINKS), |[a, b]| {
            b1.add_entity(a);
            b2.add_entity(b);
            Ok(())
        })?;
        let (kg1, kg2) = (b1.build(), b2.build());
        let links = load_links(dir.join(ENT_LINKS), &kg1, &kg2)?;
        Ok(Dataset { kg1, kg2, links })
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_rel_triples(&self.kg1, dir.join(REL_TRIPLES_1))?;
        write_rel_triples(&self.kg2, dir.join(REL_TRIPLES_2))?;
        write_attr_triples(&self.kg1, dir.join(ATTR_TRIPLES_1))?;
        write_attr_triples(&self.kg2, dir.join(ATTR_TRIPLES_2))?;
        write_links(&self.links, &self.kg1, &self.kg2, dir.join(ENT_LINKS))?;
        Ok(dir.to_path_buf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn five_line_fixture_with_one_duplicate() {
        let dir = tempfile::tempdir().unwrap();
        let rel = dir.path().join("rel");
        let attr = dir.path().join("attr");
        fs::write(&rel, "a\tr1\tb\nb\tr1\tc\na\tr2\tc\na\tr1\tb\nc\tr2\ta\n").unwrap();
        fs::write(&attr, "").unwrap();
        let kg = load_kg(&rel, &attr).unwrap();
        assert_eq!(kg.rel_triples().len(), 4);
        assert_eq!(kg.entity_count(), 3);
        assert_eq!(kg.relations().len(), 2);
    }

    #[test]
    fn empty_files_give_an_empty_graph() {
        let dir = tempfile::tempdir().unwrap();
        let rel = dir.path().join("rel");
        let attr = dir.path().join("attr");
        fs::write(&rel, "").unwrap();
        fs::write(&attr, "").unwrap();
        let kg = load_kg(&rel, &attr).unwrap();
        assert_eq!(kg.entity_count(), 0);
        assert_eq!(kg.relations().len(), 0);
        assert_eq!(kg.rel_triples().len(), 0);
        assert_eq!(kg.attr_triples().len(), 0);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let rel = dir.path().join("rel");
        let attr = dir.path().join("attr");
        fs::write(&rel, "a\tr\tb\nbroken\tline\n").unwrap();
        fs::write(&attr, "").unwrap();
        match load_kg(&rel, &attr) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_kg(dir.path().join("nope"), dir.path().join("nope2")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn unknown_link_entities_are_listed() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = KgBuilder::new();
        b.add_rel("a", "r", "b");
        let kg = b.build();
        let links = dir.path().join("links");
        fs::write(&links, "a\ta\nx\tb\n").unwrap();
        match load_links(&links, &kg, &kg) {
            Err(Error::Missing { keys, .. }) => assert_eq!(keys, vec!["x".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn linked_entities_without_triples_survive_a_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut b1 = KgBuilder::new();
        b1.add_rel("a", "r", "b");
        let lonely1 = b1.add_entity("c");
        let mut b2 = KgBuilder::new();
        b2.add_rel("x", "r", "y");
        let lonely2 = b2.add_entity("z");
        let (kg1, kg2) = (b1.build(), b2.build());
        let data = Dataset {
            links: vec![(kg1.entity_id("a").unwrap(), kg2.entity_id("x").unwrap()), (lonely1, lonely2)],
            kg1,
            kg2,
        };
        data.write(dir.path()).unwrap();
        let back = Dataset::load(dir.path()).unwrap();
        assert_eq!(back, data);
        assert_eq!(back.kg1.degrees()[lonely1.index()], 0);
    }
}
