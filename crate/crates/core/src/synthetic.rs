//! Synthetic datasets with known answers.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kg::{Dataset, EntityId, KgBuilder, KnowledgeGraph};
use crate::lnb::NameEmbeddingTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwinConfig {
    pub entities: usize,
    pub relations: usize,
    /// extra random edges per entity on top of a random spanning tree
    pub extra_edges_per_entity: usize,
    pub attributes: usize,
    pub attributes_per_entity: usize,
    pub rng_seed: u64,
}

impl Default for TwinConfig {
    fn default() -> Self {
        TwinConfig {
            entities: 200,
            relations: 8,
            extra_edges_per_entity: 3,
            attributes: 40,
            attributes_per_entity: 3,
            rng_seed: 0,
        }
    }
}

/// Two copies of one random graph under different entity names.
///
/// KG2 renames `e{i}` to `twin:e{i}` and lists its triples in a shuffled order, so
/// entity ids differ between the sides. Attribute triples are copied unchanged.
/// Every entity is linked to its copy.
pub fn isomorphic_twin(config: &TwinConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let n = config.entities;
    let rel = |rng: &mut ChaCha8Rng| format!("r{}", rng.gen_range(0..config.relations.max(1)));
    let mut triples: Vec<(usize, String, usize)> = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let r = rel(&mut rng);
        if rng.gen_bool(0.5) {
            triples.push((i, r, j));
        } else {
            triples.push((j, r, i));
        }
    }
    if n > 1 {
        for _ in 0..n * config.extra_edges_per_entity {
            let h = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            while t == h {
                t = rng.gen_range(0..n);
            }
            let r = rel(&mut rng);
            triples.push((h, r, t));
        }
    }
    let mut attrs: Vec<(usize, String, String)> = Vec::new();
    if config.attributes > 0 {
        let names: Vec<usize> = (0..config.attributes).collect();
        for i in 0..n {
            for &a in names.choose_multiple(&mut rng, config.attributes_per_entity.min(config.attributes)) {
                attrs.push((i, format!("a{a}"), format!("v{}", rng.gen_range(0..5))));
            }
        }
    }

    let mut b1 = KgBuilder::new();
    for i in 0..n {
        b1.add_entity(&format!("e{i}"));
    }
    for (h, r, t) in &triples {
        b1.add_rel(&format!("e{h}"), r, &format!("e{t}"));
    }
    for (e, a, v) in &attrs {
        b1.add_attr(&format!("e{e}"), a, v);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    triples.shuffle(&mut rng);
    attrs.shuffle(&mut rng);
    let mut b2 = KgBuilder::new();
    for i in order {
        b2.add_entity(&format!("twin:e{i}"));
    }
    for (h, r, t) in &triples {
        b2.add_rel(&format!("twin:e{h}"), r, &format!("twin:e{t}"));
    }
    for (e, a, v) in &attrs {
        b2.add_attr(&format!("twin:e{e}"), a, v);
    }

    let kg1 = b1.build();
    let kg2 = b2.build();
    let links = (0..n)
        .map(|i| {
            (
                kg1.entity_id(&format!("e{i}")).expect("entity added"),
                kg2.entity_id(&format!("twin:e{i}")).expect("entity added"),
            )
        })
        .collect();
    Dataset { kg1, kg2, links }
}

/// A random tree grown by preferential attachment: node `i` attaches to an
/// existing node chosen with probability proportional to its degree.
pub fn preferential_attachment_tree(entities: usize, relations: usize, prefix: &str, rng: &mut impl Rng) -> KnowledgeGraph {
    let mut b = KgBuilder::new();
    // each node appears once per incident edge, plus once for itself
    let mut urn: Vec<usize> = Vec::with_capacity(3 * entities);
    b.add_entity(&format!("{prefix}0"));
    urn.push(0);
    for i in 1..entities {
        let j = urn[rng.gen_range(0..urn.len())];
        let r = format!("r{}", rng.gen_range(0..relations.max(1)));
        b.add_rel(&format!("{prefix}{i}"), &r, &format!("{prefix}{j}"));
        urn.extend([i, i, j]);
    }
    b.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NameBiasConfig {
    pub entities: usize,
    pub relations: usize,
    pub name_dim: usize,
    /// share of pairs whose names give them away
    pub similar_fraction: f64,
    /// name cosine of those pairs; all others get cosine 0
    pub similar_cosine: f64,
    pub rng_seed: u64,
}

impl Default for NameBiasConfig {
    fn default() -> Self {
        NameBiasConfig {
            entities: 1000,
            relations: 5,
            name_dim: 64,
            similar_fraction: 0.05,
            similar_cosine: 0.9,
            rng_seed: 0,
        }
    }
}

/// A linked graph pair with name vectors whose pair similarities are bimodal.
#[derive(Debug, Clone)]
pub struct NameBiasFixture {
    pub dataset: Dataset,
    pub names1: NameEmbeddingTable,
    pub names2: NameEmbeddingTable,
}

fn unit_gaussian(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        // Box-Muller
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// A preferential-attachment tree and its copy, with name vectors of exact pair
/// cosine `similar_cosine` for a `similar_fraction` share of pairs and 0 for the rest.
pub fn name_bias_fixture(config: &NameBiasConfig) -> Result<NameBiasFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let kg1 = preferential_attachment_tree(config.entities, config.relations, "e", &mut rng);
    let mut b2 = KgBuilder::new();
    for i in 0..config.entities {
        b2.add_entity(&format!("twin:e{i}"));
    }
    for t in kg1.rel_triples() {
        let h = kg1.entity_name(t.head)?;
        let tl = kg1.entity_name(t.tail)?;
        let r = kg1.relations().name(t.relation.index()).expect("relation id in range");
        b2.add_rel(&format!("twin:{h}"), r, &format!("twin:{tl}"));
    }
    let kg2 = b2.build();
    let links: Vec<(EntityId, EntityId)> = (0..config.entities)
        .map(|i| Ok((kg1.entity_id(&format!("e{i}"))?, kg2.entity_id(&format!("twin:e{i}"))?)))
        .collect::<Result<_>>()?;

    let similar = (config.similar_fraction * config.entities as f64).round() as usize;
    let mut order: Vec<usize> = (0..config.entities).collect();
    order.shuffle(&mut rng);
    let mut cos = vec![0.0; config.entities];
    for &i in &order[..similar] {
        cos[i] = config.similar_cosine;
    }
    let mut rows1 = Vec::with_capacity(config.entities);
    let mut rows2 = Vec::with_capacity(config.entities);
    for (i, &c) in cos.iter().enumerate() {
        let u = unit_gaussian(config.name_dim, &mut rng);
        // w: a unit vector orthogonal to u
        let mut w = unit_gaussian(config.name_dim, &mut rng);
        let d: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(&u).for_each(|(x, y)| *x -= d * y);
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= nw);
        let s = (1.0 - c * c).sqrt();
        let v: Vec<f64> = u.iter().zip(&w).map(|(a, b)| c * a + s * b).collect();
        rows1.push((format!("e{i}"), u));
        rows2.push((format!("twin:e{i}"), v));
    }
    Ok(NameBiasFixture {
        dataset: Dataset { kg1, kg2, links },
        names1: NameEmbeddingTable::from_rows(rows1)?,
        names2: NameEmbeddingTable::from_rows(rows2)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HubConfig {
    pub entities: usize,
    pub dim: usize,
    /// norm of the direction shared by every source
    pub shared_norm: f64,
    /// half-width of the uniform noise added to each target
    pub noise: f64,
    pub rng_seed: u64,
}

impl Default for HubConfig {
    fn default() -> Self {
        HubConfig {
            entities: 200,
            dim: 32,
            shared_norm: 3.3,
            noise: 1.5,
            rng_seed: 0,
        }
    }
}

/// Source vectors, their noisy counterparts, and the index of the planted hub.
#[derive(Debug, Clone)]
pub struct HubFixture {
    pub sources: Array2<f64>,
    pub targets: Array2<f64>,
    /// gold is `(i, i)` for every row; this target is the hub
    pub hub: usize,
}

/// Sources `c + a_i` share a direction `c`; target `i` is source `i` plus noise,
/// except target 0, which is `c` itself and so sits close to every source.
pub fn planted_hub(config: &HubConfig) -> HubFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let (n, d) = (config.entities, config.dim);
    let c = Array1::from(unit_gaussian(d, &mut rng)) * config.shared_norm;
    let mut sources = Array2::from_shape_simple_fn((n, d), || rng.gen_range(-1.0..1.0));
    sources.rows_mut().into_iter().for_each(|mut r| r += &c);
    let mut targets = &sources + &Array2::from_shape_simple_fn((n, d), || rng.gen_range(-config.noise..=config.noise));
    if n > 0 {
        targets.row_mut(0).assign(&c);
    }
    HubFixture { sources, targets, hub: 0 }
}
