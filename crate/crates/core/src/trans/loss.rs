//! Batch losses and their analytic gradients.
//!
//! Reduction order is positive-major: positives in the order given, and for each
//! positive its negatives in the order given. Hinges count as active only when
//! strictly positive.

use ndarray::Array2;

use super::{contrastive_loss, triplet_loss, EmbeddingTable, LossConfig, NegativeTriple, Norm, Objective, Triple};
use crate::error::{Error, Result};

/// Dense gradient buffers plus the rows written since the last [`clear`](Self::clear).
#[derive(Debug, Clone)]
pub struct TranslationGrad {
    pub entities: Array2<f64>,
    pub relations: Array2<f64>,
    touched_entities: Vec<usize>,
    touched_relations: Vec<usize>,
    entity_flags: Vec<bool>,
    relation_flags: Vec<bool>,
}

impl TranslationGrad {
    pub fn for_table(emb: &EmbeddingTable) -> Self {
        TranslationGrad {
            entities: Array2::zeros(emb.entities.raw_dim()),
            relations: Array2::zeros(emb.relations.raw_dim()),
            touched_entities: Vec::new(),
            touched_relations: Vec::new(),
            entity_flags: vec![false; emb.entities.nrows()],
            relation_flags: vec![false; emb.relations.nrows()],
        }
    }

    pub fn touched_entities(&self) -> &[usize] {
        &self.touched_entities
    }

    pub fn touched_relations(&self) -> &[usize] {
        &self.touched_relations
    }

    /// Zeroes the touched rows only.
    pub fn clear(&mut self) {
        for &r in &self.touched_entities {
            self.entities.row_mut(r).fill(0.0);
            self.entity_flags[r] = false;
        }
        for &r in &self.touched_relations {
            self.relations.row_mut(r).fill(0.0);
            self.relation_flags[r] = false;
        }
        self.touched_entities.clear();
        self.touched_relations.clear();
    }

    /// Adds `w * d` to the gradient of `||h + r - t||` where `d` is the derivative
    /// with respect to the residual.
    fn add(&mut self, t: &Triple, d: &[f64], w: f64) {
        for (row, sign) in [(t.head, 1.0), (t.tail, -1.0)] {
            if !self.entity_flags[row] {
                self.entity_flags[row] = true;
                self.touched_entities.push(row);
            }
            let mut g = self.entities.row_mut(row);
            for (gj, dj) in g.iter_mut().zip(d) {
                *gj += sign * w * dj;
            }
        }
        if !self.relation_flags[t.relation] {
            self.relation_flags[t.relation] = true;
            self.touched_relations.push(t.relation);
        }
        let mut g = self.relations.row_mut(t.relation);
        for (gj, dj) in g.iter_mut().zip(d) {
            *gj += w * dj;
        }
    }
}

/// Score of `t` and, in `d`, the derivative of the norm with respect to `h + r - t`.
fn score_with_direction(emb: &EmbeddingTable, t: &Triple, norm: Norm, d: &mut Vec<f64>) -> f64 {
    let h = emb.entities.row(t.head);
    let r = emb.relations.row(t.relation);
    let tl = emb.entities.row(t.tail);
    d.clear();
    d.extend((0..h.len()).map(|j| h[j] + r[j] - tl[j]));
    match norm {
        Norm::L2 => {
            let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 {
                d.iter_mut().for_each(|x| *x /= n);
            } else {
                d.iter_mut().for_each(|x| *x = 0.0);
            }
            n
        }
        Norm::L1 => {
            let n = d.iter().map(|x| x.abs()).sum();
            d.iter_mut().for_each(|x| {
                *x = if *x > 0.0 {
                    1.0
                } else if *x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            });
            n
        }
    }
}

fn check_inputs(
    emb: &EmbeddingTable,
    positives: &[Triple],
    negatives: &[Vec<NegativeTriple>],
    objective: Objective,
) -> Result<()> {
    for t in positives {
        emb.check(t)?;
    }
    if objective == Objective::Translation {
        return Ok(());
    }
    if negatives.len() != positives.len() {
        return Err(Error::Shape(format!(
            "{} negative lists for {} positives",
            negatives.len(),
            positives.len()
        )));
    }
    for (i, list) in negatives.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::Shape(format!("positive {i} has no negatives")));
        }
        for n in list {
            emb.check(&n.triple)?;
        }
    }
    Ok(())
}

/// Loss of one batch, accumulating its gradient into `grad`.
///
/// * `Translation`: `sum_pos f(pos)`; negatives are ignored and may be empty.
/// * `Triplet`: `sum_pos beta * sum_neg [gamma + f(pos) - f(neg)]+`.
/// * `Contrastive`: `sum_pos beta * sum_neg ([f(pos) - gamma1]+ + [gamma2 - f(neg)]+)`.
pub fn loss_and_gradient(
    emb: &EmbeddingTable,
    positives: &[Triple],
    negatives: &[Vec<NegativeTriple>],
    config: &LossConfig,
    objective: Objective,
    grad: &mut TranslationGrad,
) -> Result<f64> {
    accumulate(emb, positives, negatives, config, objective, Some(grad))
}

/// Loss of one batch without gradients.
pub fn epoch_loss(
    emb: &EmbeddingTable,
    positives: &[Triple],
    negatives: &[Vec<NegativeTriple>],
    config: &LossConfig,
    objective: Objective,
) -> Result<f64> {
    accumulate(emb, positives, negatives, config, objective, None)
}

fn accumulate(
    emb: &EmbeddingTable,
    positives: &[Triple],
    negatives: &[Vec<NegativeTriple>],
    config: &LossConfig,
    objective: Objective,
    mut grad: Option<&mut TranslationGrad>,
) -> Result<f64> {
    check_inputs(emb, positives, negatives, objective)?;
    let norm = config.norm;
    let mut dp = Vec::with_capacity(emb.dim());
    let mut dn = Vec::with_capacity(emb.dim());
    let mut total = 0.0;
    for (i, pos) in positives.iter().enumerate() {
        let fp = score_with_direction(emb, pos, norm, &mut dp);
        if objective == Objective::Translation {
            total += fp;
            if let Some(g) = grad.as_deref_mut() {
                g.add(pos, &dp, 1.0);
            }
            continue;
        }
        let mut per_positive = 0.0;
        for neg in &negatives[i] {
            let fn_ = score_with_direction(emb, &neg.triple, norm, &mut dn);
            let (l, wp, wn) = match objective {
                Objective::Triplet => {
                    let l = triplet_loss(fp, fn_, config.gamma);
                    let on = if l > 0.0 { 1.0 } else { 0.0 };
                    (l, on, -on)
                }
                Objective::Contrastive => {
                    let l = contrastive_loss(fp, fn_, config.gamma1, config.gamma2);
                    let wp = if fp > config.gamma1 { 1.0 } else { 0.0 };
                    let wn = if fn_ < config.gamma2 { -1.0 } else { 0.0 };
                    (l, wp, wn)
                }
                Objective::Translation => unreachable!(),
            };
            per_positive += l;
            if let Some(g) = grad.as_deref_mut() {
                if wp != 0.0 {
                    g.add(pos, &dp, config.beta * wp);
                }
                if wn != 0.0 {
                    g.add(&neg.triple, &dn, config.beta * wn);
                }
            }
        }
        total += config.beta * per_positive;
    }
    Ok(total)
}
