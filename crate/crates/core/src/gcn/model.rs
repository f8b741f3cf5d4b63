use ndarray::{Array2, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, x: &mut Array2<f64>) {
        if self == Activation::Relu {
            x.mapv_inplace(|v| v.max(0.0));
        }
    }

    /// Multiplies `grad` by the derivative at pre-activation `pre`.
    fn backprop(self, pre: &Array2<f64>, grad: &mut Array2<f64>) {
        if self == Activation::Relu {
            Zip::from(grad).and(pre).for_each(|g, &p| {
                if p <= 0.0 {
                    *g = 0.0;
                }
            });
        }
    }
}

/// Input node features of one channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    /// trainable free embeddings
    Dense(Array2<f64>),
    /// fixed sparse features
    Sparse(SparseMatrix),
}

impl Features {
    pub fn rows(&self) -> usize {
        match self {
            Features::Dense(m) => m.nrows(),
            Features::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Features::Dense(m) => m.ncols(),
            Features::Sparse(m) => m.cols(),
        }
    }

    fn times(&self, w: &Array2<f64>) -> Result<Array2<f64>> {
        match self {
            Features::Dense(m) => Ok(m.dot(w)),
            Features::Sparse(m) => m.dot(w.view()),
        }
    }
}

/// Weights and activations of a graph-convolution stack, applied as
/// `H_{l+1} = act_l(A (H_l W_l))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnParameters {
    pub weights: Vec<Array2<f64>>,
    pub activations: Vec<Activation>,
}

impl GcnParameters {
    /// Glorot-uniform weights for the layer sizes `dims[0] -> dims[1] -> ...`, ReLU
    /// on every layer but the last.
    pub fn glorot<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        let layers = dims.len().saturating_sub(1);
        let weights = dims
            .windows(2)
            .map(|w| {
                let bound = (6.0 / (w[0] + w[1]) as f64).sqrt();
                Array2::from_shape_simple_fn((w[0], w[1]), || rng.gen_range(-bound..=bound))
            })
            .collect();
        let activations = (0..layers)
            .map(|l| if l + 1 == layers { Activation::Identity } else { Activation::Relu })
            .collect();
        GcnParameters { weights, activations }
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|x| x.is_finite()))
    }

    fn check(&self, adj: &SparseMatrix, features: &Features) -> Result<()> {
        if self.weights.len() != self.activations.len() {
            return Err(Error::Shape(format!(
                "{} weight matrices but {} activations",
                self.weights.len(),
                self.activations.len()
            )));
        }
        if adj.rows() != adj.cols() || adj.cols() != features.rows() {
            return Err(Error::Shape(format!(
                "adjacency {}x{} with {} feature rows",
                adj.rows(),
                adj.cols(),
                features.rows()
            )));
        }
        let mut width = features.cols();
        for (l, w) in self.weights.iter().enumerate() {
            if w.nrows() != width {
                return Err(Error::Shape(format!(
                    "layer {l} expects {} inputs, gets {width}",
                    w.nrows()
                )));
            }
            width = w.ncols();
        }
        Ok(())
    }
}

/// Intermediate values kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// layer inputs `H_l` for `l >= 1` (the features are `H_0`)
    inputs: Vec<Array2<f64>>,
    /// pre-activations `A H_l W_l`
    pre: Vec<Array2<f64>>,
    pub output: Array2<f64>,
}

pub fn gcn_forward_cached(adj: &SparseMatrix, features: &Features, params: &GcnParameters) -> Result<ForwardCache> {
    params.check(adj, features)?;
    let mut inputs = Vec::with_capacity(params.weights.len());
    let mut pre = Vec::with_capacity(params.weights.len());
    let mut h: Option<Array2<f64>> = None;
    for (w, act) in params.weights.iter().zip(&params.activations) {
        let z = match &h {
            None => features.times(w)?,
            Some(h) => h.dot(w),
        };
        let p = adj.dot(z.view())?;
        let mut out = p.clone();
        act.apply(&mut out);
        pre.push(p);
        if let Some(prev) = h.replace(out) {
            inputs.push(prev);
        }
    }
    let output = h.unwrap_or_else(|| match features {
        Features::Dense(m) => m.clone(),
        Features::Sparse(m) => m.to_dense(),
    });
    Ok(ForwardCache { inputs, pre, output })
}

/// Output embeddings of the stack.
pub fn gcn_forward(adj: &SparseMatrix, features: &Features, params: &GcnParameters) -> Result<Array2<f64>> {
    Ok(gcn_forward_cached(adj, features, params)?.output)
}

/// Gradients of a scalar loss with respect to the weights and, for dense
/// features, the input features.
#[derive(Debug, Clone)]
pub struct GcnGradients {
    pub weights: Vec<Array2<f64>>,
    pub features: Option<Array2<f64>>,
}

/// Backpropagates `grad_output = dL/dH_L` through the stack. `adj_t` is the
/// transpose of the adjacency used in the forward pass.
pub fn gcn_backward(
    adj_t: &SparseMatrix,
    features: &Features,
    params: &GcnParameters,
    cache: &ForwardCache,
    grad_output: &Array2<f64>,
) -> Result<GcnGradients> {
    let layers = params.weights.len();
    let mut weights = vec![Array2::zeros((0, 0)); layers];
    let mut g = grad_output.clone();
    for l in (0..layers).rev() {
        params.activations[l].backprop(&cache.pre[l], &mut g);
        let dz = adj_t.dot(g.view())?;
        weights[l] = match l {
            0 => match features {
                Features::Dense(x) => x.t().dot(&dz),
                Features::Sparse(x) => x.transpose().dot(dz.view())?,
            },
            _ => cache.inputs[l - 1].t().dot(&dz),
        };
        if l > 0 || matches!(features, Features::Dense(_)) {
            g = dz.dot(&params.weights[l].t());
        }
    }
    let features = match features {
        Features::Dense(_) => Some(g),
        Features::Sparse(_) => None,
    };
    Ok(GcnGradients { weights, features })
}

fn l1_distance(emb: &Array2<f64>, a: usize, b: usize) -> f64 {
    emb.row(a).iter().zip(emb.row(b)).map(|(x, y)| (x - y).abs()).sum()
}

fn add_l1_grad(grad: &mut Array2<f64>, emb: &Array2<f64>, a: usize, b: usize, w: f64) {
    for j in 0..emb.ncols() {
        let d = emb[[a, j]] - emb[[b, j]];
        let s = if d > 0.0 {
            1.0
        } else if d < 0.0 {
            -1.0
        } else {
            0.0
        };
        grad[[a, j]] += w * s;
        grad[[b, j]] -= w * s;
    }
}

fn check_pairs(emb: &Array2<f64>, positives: &[(usize, usize)], negatives: &[Vec<(usize, usize)>]) -> Result<()> {
    if negatives.len() != positives.len() {
        return Err(Error::Shape(format!(
            "{} negative lists for {} positives",
            negatives.len(),
            positives.len()
        )));
    }
    let n = emb.nrows();
    let bad = positives
        .iter()
        .chain(negatives.iter().flatten())
        .find(|(a, b)| *a >= n || *b >= n);
    if let Some((a, b)) = bad {
        return Err(Error::Shape(format!("pair ({a}, {b}) outside {n} embedding rows")));
    }
    Ok(())
}

/// `sum_pos sum_neg [margin + |e1 - e2|_1 - |e1' - e2'|_1]+` over embedding rows.
pub fn margin_alignment_loss(
    emb: &Array2<f64>,
    positives: &[(usize, usize)],
    negatives: &[Vec<(usize, usize)>],
    margin: f64,
) -> Result<f64> {
    check_pairs(emb, positives, negatives)?;
    let mut total = 0.0;
    for (&(a, b), negs) in positives.iter().zip(negatives) {
        let dp = l1_distance(emb, a, b);
        for &(c, d) in negs {
            let l = margin + dp - l1_distance(emb, c, d);
            // NaN must not vanish in the hinge
            total += if l.is_nan() { l } else { l.max(0.0) };
        }
    }
    Ok(total)
}

/// The loss of [`margin_alignment_loss`] and its gradient with respect to `emb`.
pub fn margin_alignment_loss_grad(
    emb: &Array2<f64>,
    positives: &[(usize, usize)],
    negatives: &[Vec<(usize, usize)>],
    margin: f64,
) -> Result<(f64, Array2<f64>)> {
    check_pairs(emb, positives, negatives)?;
    let mut grad = Array2::zeros(emb.raw_dim());
    let mut total = 0.0;
    for (&(a, b), negs) in positives.iter().zip(negatives) {
        let dp = l1_distance(emb, a, b);
        for &(c, d) in negs {
            let l = margin + dp - l1_distance(emb, c, d);
            if l > 0.0 {
                total += l;
                add_l1_grad(&mut grad, emb, a, b, 1.0);
                add_l1_grad(&mut grad, emb, c, d, -1.0);
            } else if l.is_nan() {
                total = f64::NAN;
            }
        }
    }
    Ok((total, grad))
}
