//! Low-name-bias dataset sampling.
//!
//! Linked pairs are binned by the degree of their KG1 entity. Every bin gets a
//! quota proportional to its size; candidates are drawn from the bin in random
//! order and each is dropped with probability `drop_scale * max(0, name_sim)`,
//! so pairs whose names already give them away are under-represented. The kept
//! pairs then induce the two sampled graphs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{Dataset, EntityId, KgBuilder, KnowledgeGraph};
use crate::matcher::{cosine, hits_at_k, similarity_matrix, SimMetric};

pub use crate::export::VectorTable as NameEmbeddingTable;

fn link_names<'a>(
    links: &[(EntityId, EntityId)],
    kg1: &'a KnowledgeGraph,
    kg2: &'a KnowledgeGraph,
) -> Result<(Vec<&'a str>, Vec<&'a str>)> {
    let mut a = Vec::with_capacity(links.len());
    let mut b = Vec::with_capacity(links.len());
    for &(x, y) in links {
        a.push(kg1.entity_name(x)?);
        b.push(kg2.entity_name(y)?);
    }
    Ok((a, b))
}

/// Cosine similarity of the name vectors of each linked pair, in link order.
pub fn pair_name_similarity(
    links: &[(EntityId, EntityId)],
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
    names1: &NameEmbeddingTable,
    names2: &NameEmbeddingTable,
) -> Result<Vec<f64>> {
    let (a, b) = link_names(links, kg1, kg2)?;
    let ma = names1.matrix(&a)?;
    let mb = names2.matrix(&b)?;
    if ma.ncols() != mb.ncols() && !links.is_empty() {
        return Err(Error::Shape(format!("name dims {} and {} differ", ma.ncols(), mb.ncols())));
    }
    Ok((0..links.len()).map(|i| cosine(ma.row(i), mb.row(i))).collect())
}

/// Hits@1 (percent) of matching each linked KG1 entity to its counterpart among
/// all linked KG2 entities by name-vector cosine alone.
pub fn name_nn_hits_at_1(
    links: &[(EntityId, EntityId)],
    kg1: &KnowledgeGraph,
    kg2: &KnowledgeGraph,
    names1: &NameEmbeddingTable,
    names2: &NameEmbeddingTable,
) -> Result<f64> {
    let (a, b) = link_names(links, kg1, kg2)?;
    let sim = similarity_matrix(names1.matrix(&a)?.view(), names2.matrix(&b)?.view(), SimMetric::Cosine)?;
    let gold: Vec<(usize, usize)> = (0..links.len()).map(|i| (i, i)).collect();
    hits_at_k(&sim, &gold, 1)
}

/// Equal-width degree bins over the KG1 side of `links`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeBins {
    pub min_degree: usize,
    pub max_degree: usize,
    /// link indices per bin, ascending
    pub members: Vec<Vec<usize>>,
}

impl DegreeBins {
    /// Half-open degree range `[lo, hi)` of bin `b`; the last bin is closed.
    pub fn range(&self, b: usize) -> (f64, f64) {
        let n = self.members.len() as f64;
        let w = (self.max_degree - self.min_degree) as f64 / n;
        let lo = self.min_degree as f64 + w * b as f64;
        (lo, lo + w)
    }
}

pub fn bin_by_degree(kg1: &KnowledgeGraph, links: &[(EntityId, EntityId)], num_bins: usize) -> Result<DegreeBins> {
    if num_bins == 0 {
        return Err(Error::Config("num_bins must be positive".into()));
    }
    let degrees = links
        .iter()
        .map(|&(e, _)| kg1.degree(e))
        .collect::<Result<Vec<_>>>()?;
    let min = degrees.iter().copied().min().unwrap_or(0);
    let max = degrees.iter().copied().max().unwrap_or(0);
    let width = (max - min) as f64 / num_bins as f64;
    let mut members = vec![Vec::new(); num_bins];
    for (i, &d) in degrees.iter().enumerate() {
        let b = if width > 0.0 {
            (((d - min) as f64 / width).floor() as usize).min(num_bins - 1)
        } else {
            0
        };
        members[b].push(i);
    }
    Ok(DegreeBins {
        min_degree: min,
        max_degree: max,
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub num_bins: usize,
    pub target_pair_count: usize,
    pub drop_scale: f64,
    pub rng_seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            num_bins: 10,
            target_pair_count: 15000,
            drop_scale: 1.0,
            rng_seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self, available: usize) -> Result<()> {
        if self.num_bins == 0 {
            return Err(Error::Config("num_bins must be positive".into()));
        }
        if self.target_pair_count == 0 {
            return Err(Error::Config("target_pair_count must be positive".into()));
        }
        if self.target_pair_count > available {
            return Err(Error::Config(format!(
                "target_pair_count {} exceeds the {available} available links",
                self.target_pair_count
            )));
        }
        if !(self.drop_scale > 0.0 && self.drop_scale <= 1.0) {
            return Err(Error::Config(format!("drop_scale must lie in (0, 1], got {}", self.drop_scale)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinProvenance {
    pub bin: usize,
    pub degree_lo: f64,
    pub degree_hi: f64,
    pub size: usize,
    pub quota: usize,
    pub drawn: usize,
    pub dropped: usize,
    pub retained: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    /// indices into the input links, ascending
    pub retained: Vec<usize>,
    pub bins: Vec<BinProvenance>,
    pub mean_similarity_before: f64,
    pub mean_similarity_after: f64,
}

/// One step of the splitmix64 generator, used to derive per-bin seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Samples linked pairs with a bias against high name similarity.
///
/// Bin `b` of size `n_b` gets quota `ceil(T * n_b / total)`. Its members are
/// visited in a random order drawn from the bin's own stream
/// (`ChaCha8(splitmix64(seed + b))`); each visited pair is dropped with probability
/// `clamp(drop_scale * max(0, sim), 0, 1)` until the quota is filled or the bin is
/// exhausted. If bins fell short and the total is below `T`, drawing continues
/// under the same rule from whichever bin has the most undrawn members until `T`
/// is reached. Because quotas are rounded up the result may exceed `T` by fewer
/// than `num_bins` pairs. Fails with [`Error::Shortfall`] when every bin is
/// exhausted below `T`.
pub fn sample_low_name_bias(
    kg1: &KnowledgeGraph,
    links: &[(EntityId, EntityId)],
    name_sims: &[f64],
    config: &SamplerConfig,
) -> Result<SampleOutcome> {
    config.validate(links.len())?;
    let outcome = sample_bins(kg1, links, name_sims, config)?;
    if outcome.retained.len() < config.target_pair_count {
        return Err(Error::Shortfall {
            requested: config.target_pair_count,
            retained: outcome.retained.len(),
        });
    }
    Ok(outcome)
}

/// The per-bin pass of [`sample_low_name_bias`] without the shortfall check.
fn sample_bins(
    kg1: &KnowledgeGraph,
    links: &[(EntityId, EntityId)],
    name_sims: &[f64],
    config: &SamplerConfig,
) -> Result<SampleOutcome> {
    if name_sims.len() != links.len() {
        return Err(Error::Shape(format!(
            "{} similarities for {} links",
            name_sims.len(),
            links.len()
        )));
    }
    let bins = bin_by_degree(kg1, links, config.num_bins)?;
    let total = links.len();
    let target = config.target_pair_count;
    let mut retained = Vec::with_capacity(target + config.num_bins);
    let mut provenance = Vec::with_capacity(config.num_bins);
    let mut streams = Vec::with_capacity(config.num_bins);
    let keep = |i: usize, rng: &mut ChaCha8Rng| {
        let p = (config.drop_scale * name_sims[i].max(0.0)).clamp(0.0, 1.0);
        rng.gen::<f64>() >= p
    };
    for (b, members) in bins.members.iter().enumerate() {
        let quota = (target * members.len()).div_ceil(total);
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(config.rng_seed.wrapping_add(b as u64)));
        let mut order = members.clone();
        order.shuffle(&mut rng);
        let (mut drawn, mut dropped, mut kept) = (0, 0, 0);
        for &i in &order {
            if kept == quota {
                break;
            }
            drawn += 1;
            if keep(i, &mut rng) {
                kept += 1;
                retained.push(i);
            } else {
                dropped += 1;
            }
        }
        let (lo, hi) = bins.range(b);
        provenance.push(BinProvenance {
            bin: b,
            degree_lo: lo,
            degree_hi: hi,
            size: members.len(),
            quota,
            drawn,
            dropped,
            retained: kept,
        });
        streams.push((rng, order));
    }
    while retained.len() < target {
        let Some(b) = (0..provenance.len())
            .filter(|&b| provenance[b].drawn < provenance[b].size)
            .max_by_key(|&b| (provenance[b].size - provenance[b].drawn, std::cmp::Reverse(b)))
        else {
            break;
        };
        let (rng, order) = &mut streams[b];
        let i = order[provenance[b].drawn];
        provenance[b].drawn += 1;
        if keep(i, rng) {
            provenance[b].retained += 1;
            retained.push(i);
        } else {
            provenance[b].dropped += 1;
        }
    }
    retained.sort_unstable();
    Ok(SampleOutcome {
        mean_similarity_before: mean(name_sims.iter().copied()),
        mean_similarity_after: mean(retained.iter().map(|&i| name_sims[i])),
        retained,
        bins: provenance,
    })
}

/// The subgraph on `keep`: entities in their original order, relation triples with
/// both ends kept, attribute triples of kept entities. Ids are re-assigned compactly.
pub fn induce_subgraph(kg: &KnowledgeGraph, keep: &[EntityId]) -> Result<KnowledgeGraph> {
    let mut kept = vec![false; kg.entity_count()];
    for &e in keep {
        *kept.get_mut(e.index()).ok_or_else(|| Error::Lookup {
            kind: "entity",
            key: e.to_string(),
        })? = true;
    }
    let name = |i: usize| kg.entities().name(i).expect("entity id in range");
    let mut b = KgBuilder::new();
    for i in (0..kg.entity_count()).filter(|&i| kept[i]) {
        b.add_entity(name(i));
    }
    for t in kg.rel_triples() {
        if kept[t.head.index()] && kept[t.tail.index()] {
            let r = kg.relations().name(t.relation.index()).expect("relation id in range");
            b.add_rel(name(t.head.index()), r, name(t.tail.index()));
        }
    }
    for t in kg.attr_triples() {
        if kept[t.entity.index()] {
            let a = kg.attributes().name(t.attribute.index()).expect("attribute id in range");
            let v = kg.values().name(t.value.index()).expect("value id in range");
            b.add_attr(name(t.entity.index()), a, v);
        }
    }
    Ok(b.build())
}

fn degree_histogram(kg: &KnowledgeGraph) -> BTreeMap<usize, f64> {
    let mut h = BTreeMap::new();
    for &d in kg.degrees() {
        *h.entry(d).or_insert(0.0) += 1.0;
    }
    let n = kg.entity_count().max(1) as f64;
    h.values_mut().for_each(|c| *c /= n);
    h
}

/// L1 distance between the normalized degree histograms of two graphs, in `[0, 2]`.
pub fn compare_degree_distributions(a: &KnowledgeGraph, b: &KnowledgeGraph) -> f64 {
    histogram_l1(&degree_histogram(a), &degree_histogram(b))
}

pub fn histogram_l1(a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>) -> f64 {
    let mut keys: Vec<usize> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum()
}

/// A sampled dataset together with what produced it.
#[derive(Debug, Clone)]
pub struct SampledDataset {
    pub dataset: Dataset,
    pub outcome: SampleOutcome,
    pub degree_l1_kg1: f64,
    pub degree_l1_kg2: f64,
}

/// Samples links from `source` and induces both graphs on the kept entities.
pub fn sample_dataset(
    source: &Dataset,
    names1: &NameEmbeddingTable,
    names2: &NameEmbeddingTable,
    config: &SamplerConfig,
) -> Result<SampledDataset> {
    let sims = pair_name_similarity(&source.links, &source.kg1, &source.kg2, names1, names2)?;
    let outcome = sample_low_name_bias(&source.kg1, &source.links, &sims, config)?;
    let keep1: Vec<EntityId> = outcome.retained.iter().map(|&i| source.links[i].0).collect();
    let keep2: Vec<EntityId> = outcome.retained.iter().map(|&i| source.links[i].1).collect();
    let kg1 = induce_subgraph(&source.kg1, &keep1)?;
    let kg2 = induce_subgraph(&source.kg2, &keep2)?;
    let remap = |from: &KnowledgeGraph, to: &KnowledgeGraph, e: EntityId| -> Result<EntityId> {
        to.entity_id(from.entity_name(e)?)
    };
    let links = outcome
        .retained
        .iter()
        .map(|&i| {
            let (a, b) = source.links[i];
            Ok((remap(&source.kg1, &kg1, a)?, remap(&source.kg2, &kg2, b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let degree_l1_kg1 = compare_degree_distributions(&source.kg1, &kg1);
    let degree_l1_kg2 = compare_degree_distributions(&source.kg2, &kg2);
    Ok(SampledDataset {
        dataset: Dataset { kg1, kg2, links },
        outcome,
        degree_l1_kg1,
        degree_l1_kg2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn star_and_chain() -> KnowledgeGraph {
        // degrees: hub 9, leaves 1, chain c0..c2 with 1,2,1
        let mut b = KgBuilder::new();
        for i in 0..9 {
            b.add_rel("hub", "r", &format!("leaf{i}"));
        }
        b.add_rel("c0", "r", "c1");
        b.add_rel("c1", "r", "c2");
        b.build()
    }

    #[test]
    fn loads_two_line_fixture() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "a\t1 0 0").unwrap();
        writeln!(f, "b\t0 1 0").unwrap();
        let t = NameEmbeddingTable::load(f.path()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("b").unwrap().to_vec(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn empty_file_is_an_empty_table() {
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(NameEmbeddingTable::load(f.path()).unwrap().is_empty());
    }

    #[test]
    fn ragged_line_names_its_number() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "a\t1 0").unwrap();
        writeln!(f, "b\t1 0 3").unwrap();
        match NameEmbeddingTable::load(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn write_then_load_round_trips() {
        let t = NameEmbeddingTable::from_rows(vec![("x".into(), vec![0.1, -2.5]), ("y".into(), vec![3.0, 1e-7])])
            .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        t.write(f.path()).unwrap();
        assert_eq!(NameEmbeddingTable::load(f.path()).unwrap(), t);
    }

    fn pair_graphs() -> (KnowledgeGraph, KnowledgeGraph) {
        let mut a = KgBuilder::new();
        let mut b = KgBuilder::new();
        for n in ["p", "q", "r"] {
            a.add_entity(&format!("a:{n}"));
            b.add_entity(&format!("b:{n}"));
        }
        (a.build(), b.build())
    }

    #[test]
    fn pair_similarities() {
        let (a, b) = pair_graphs();
        let t1 = NameEmbeddingTable::from_rows(vec![
            ("a:p".into(), vec![1.0, 0.0]),
            ("a:q".into(), vec![1.0, 0.0]),
            ("a:r".into(), vec![1.0, 1.0]),
        ])
        .unwrap();
        let t2 = NameEmbeddingTable::from_rows(vec![
            ("b:p".into(), vec![2.0, 0.0]),
            ("b:q".into(), vec![0.0, 1.0]),
            ("b:r".into(), vec![1.0, 0.0]),
        ])
        .unwrap();
        let links: Vec<_> = (0..3).map(|i| (EntityId(i), EntityId(i))).collect();
        let s = pair_name_similarity(&links, &a, &b, &t1, &t2).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
        assert!((s[2] - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn missing_name_vectors_are_listed() {
        let (a, b) = pair_graphs();
        let t1 = NameEmbeddingTable::from_rows(vec![("a:p".into(), vec![1.0])]).unwrap();
        let links: Vec<_> = (0..3).map(|i| (EntityId(i), EntityId(i))).collect();
        match pair_name_similarity(&links, &a, &b, &t1, &t1) {
            Err(Error::Missing { keys, .. }) => assert_eq!(keys, vec!["a:q", "a:r"]),
            other => panic!("{other:?}"),
        }
    }

    fn degree_fixture(degrees: &[usize]) -> (KnowledgeGraph, Vec<(EntityId, EntityId)>) {
        let mut b = KgBuilder::new();
        for (i, &d) in degrees.iter().enumerate() {
            for k in 0..d {
                b.add_rel(&format!("s{i}"), "r", &format!("x{i}_{k}"));
            }
        }
        let kg = b.build();
        let links = (0..degrees.len())
            .map(|i| (kg.entity_id(&format!("s{i}")).unwrap(), EntityId(i as u32)))
            .collect();
        (kg, links)
    }

    #[test]
    fn equal_width_bins() {
        let (kg, links) = degree_fixture(&[1, 2, 9, 10]);
        let bins = bin_by_degree(&kg, &links, 2).unwrap();
        assert_eq!(bins.members, vec![vec![0, 1], vec![2, 3]]);
        let one = bin_by_degree(&kg, &links, 1).unwrap();
        assert_eq!(one.members, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn bins_partition_links() {
        let kg = star_and_chain();
        let links: Vec<_> = (0..kg.entity_count()).map(|i| (EntityId(i as u32), EntityId(i as u32))).collect();
        for nb in 1..7 {
            let bins = bin_by_degree(&kg, &links, nb).unwrap();
            let mut all: Vec<usize> = bins.members.concat();
            all.sort();
            assert_eq!(all, (0..links.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn all_similar_names_fall_short_by_the_full_quota() {
        let (kg, links) = degree_fixture(&[1, 1, 2, 3, 3, 4]);
        let sims = vec![1.0; links.len()];
        let cfg = SamplerConfig {
            num_bins: 2,
            target_pair_count: 4,
            drop_scale: 1.0,
            rng_seed: 3,
        };
        match sample_low_name_bias(&kg, &links, &sims, &cfg) {
            Err(Error::Shortfall { requested, retained }) => assert_eq!((requested, retained), (4, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_bins_are_topped_up_from_the_others() {
        let degrees: Vec<usize> = (0..20).map(|i| if i < 10 { 1 } else { 10 }).collect();
        let (kg, links) = degree_fixture(&degrees);
        let sims: Vec<f64> = (0..20).map(|i| if i < 10 { 1.0 } else { 0.0 }).collect();
        let cfg = SamplerConfig {
            num_bins: 2,
            target_pair_count: 10,
            drop_scale: 1.0,
            rng_seed: 4,
        };
        let out = sample_low_name_bias(&kg, &links, &sims, &cfg).unwrap();
        assert_eq!(out.retained, (10..20).collect::<Vec<_>>());
        assert_eq!((out.bins[0].quota, out.bins[0].drawn, out.bins[0].retained), (5, 10, 0));
        assert_eq!((out.bins[1].quota, out.bins[1].drawn, out.bins[1].retained), (5, 10, 10));
        let more = SamplerConfig {
            target_pair_count: 11,
            ..cfg
        };
        assert!(matches!(
            sample_low_name_bias(&kg, &links, &sims, &more),
            Err(Error::Shortfall { requested: 11, retained: 10 })
        ));
    }

    #[test]
    fn tiny_drop_scale_is_a_stratified_sample() {
        let degrees: Vec<usize> = (0..60).map(|i| 1 + i % 6).collect();
        let (kg, links) = degree_fixture(&degrees);
        let sims: Vec<f64> = (0..60).map(|i| (i % 10) as f64 / 10.0).collect();
        let cfg = SamplerConfig {
            num_bins: 3,
            target_pair_count: 30,
            drop_scale: 1e-12,
            rng_seed: 1,
        };
        let out = sample_low_name_bias(&kg, &links, &sims, &cfg).unwrap();
        for b in &out.bins {
            assert_eq!(b.retained, b.quota);
            assert_eq!(b.dropped, 0);
            assert_eq!(b.quota, (30 * b.size).div_ceil(60));
        }
        assert!((out.mean_similarity_before - 0.45).abs() < 1e-12);
        assert!((out.mean_similarity_after - out.mean_similarity_before).abs() < 0.15);
    }

    #[test]
    fn sampling_is_deterministic() {
        let degrees: Vec<usize> = (0..80).map(|i| 1 + i % 7).collect();
        let (kg, links) = degree_fixture(&degrees);
        let sims: Vec<f64> = (0..80).map(|i| if i % 3 == 0 { 0.9 } else { 0.1 }).collect();
        let cfg = SamplerConfig {
            num_bins: 4,
            target_pair_count: 40,
            drop_scale: 1.0,
            rng_seed: 11,
        };
        let a = sample_low_name_bias(&kg, &links, &sims, &cfg).unwrap();
        let b = sample_low_name_bias(&kg, &links, &sims, &cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_low_name_bias(&kg, &links, &sims, &SamplerConfig { rng_seed: 12, ..cfg }).unwrap();
        assert_ne!(a.retained, c.retained);
    }

    #[test]
    fn bimodal_retention_matches_expected_rates() {
        // 100 pairs in one bin, half at 0.9 and half at 0.1; the quota covers the
        // whole bin so every pair is visited once and kept with 1 - sim * s
        let (kg, links) = degree_fixture(&[1; 100]);
        let sims: Vec<f64> = (0..100).map(|i| if i < 50 { 0.9 } else { 0.1 }).collect();
        let s = 0.5;
        let seeds = 1000u64;
        let (mut hi, mut lo, mut below) = (0usize, 0usize, 0u64);
        for seed in 0..seeds {
            let cfg = SamplerConfig {
                num_bins: 1,
                target_pair_count: 100,
                drop_scale: s,
                rng_seed: seed,
            };
            let out = sample_bins(&kg, &links, &sims, &cfg).unwrap();
            hi += out.retained.iter().filter(|&&i| i < 50).count();
            lo += out.retained.iter().filter(|&&i| i >= 50).count();
            if out.mean_similarity_after < out.mean_similarity_before {
                below += 1;
            }
        }
        let rate_hi = hi as f64 / (50 * seeds) as f64;
        let rate_lo = lo as f64 / (50 * seeds) as f64;
        assert!((rate_hi - (1.0 - 0.9 * s)).abs() < 0.01, "{rate_hi}");
        assert!((rate_lo - (1.0 - 0.1 * s)).abs() < 0.01, "{rate_lo}");
        assert_eq!(below, seeds);
    }

    #[test]
    fn induced_subgraph_by_hand() {
        let mut b = KgBuilder::new();
        b.add_rel("a", "r", "b");
        b.add_rel("b", "s", "c");
        b.add_rel("c", "r", "d");
        b.add_rel("d", "t", "e");
        b.add_rel("a", "t", "c");
        b.add_attr("d", "name", "D");
        b.add_attr("c", "name", "C");
        let kg = b.build();
        let keep: Vec<EntityId> = ["a", "b", "c"].iter().map(|n| kg.entity_id(n).unwrap()).collect();
        let sub = induce_subgraph(&kg, &keep).unwrap();
        let names: Vec<(String, String, String)> = sub
            .rel_triples()
            .iter()
            .map(|t| {
                (
                    sub.entity_name(t.head).unwrap().to_string(),
                    sub.relations().name(t.relation.index()).unwrap().to_string(),
                    sub.entity_name(t.tail).unwrap().to_string(),
                )
            })
            .collect();
        let want = [("a", "r", "b"), ("b", "s", "c"), ("a", "t", "c")];
        assert_eq!(names.len(), 3);
        for (got, w) in names.iter().zip(want) {
            assert_eq!((got.0.as_str(), got.1.as_str(), got.2.as_str()), w);
        }
        assert_eq!(sub.entity_count(), 3);
        assert_eq!(sub.attr_triples().len(), 1);
        assert_eq!(sub.relations().len(), 3);
    }

    #[test]
    fn keep_all_and_keep_one_endpoint() {
        let kg = star_and_chain();
        let all: Vec<EntityId> = (0..kg.entity_count()).map(|i| EntityId(i as u32)).collect();
        assert_eq!(induce_subgraph(&kg, &all).unwrap(), kg);
        let heads: Vec<EntityId> = ["hub", "c0"].iter().map(|n| kg.entity_id(n).unwrap()).collect();
        assert!(induce_subgraph(&kg, &heads).unwrap().rel_triples().is_empty());
    }

    #[test]
    fn degree_distribution_distances() {
        let kg = star_and_chain();
        assert_eq!(compare_degree_distributions(&kg, &kg), 0.0);
        let mut ones = KgBuilder::new();
        ones.add_rel("a", "r", "b");
        let mut twos = KgBuilder::new();
        twos.add_rel("a", "r", "b");
        twos.add_rel("b", "r", "c");
        twos.add_rel("c", "r", "a");
        assert_eq!(compare_degree_distributions(&ones.build(), &twos.build()), 2.0);
        let h1 = BTreeMap::from([(1, 0.5), (2, 0.5)]);
        let h2 = BTreeMap::from([(1, 0.25), (2, 0.75)]);
        assert!((histogram_l1(&h1, &h2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn splitmix_streams_differ() {
        assert_ne!(splitmix64(0), splitmix64(1));
        assert_eq!(splitmix64(7), splitmix64(7));
    }
}
