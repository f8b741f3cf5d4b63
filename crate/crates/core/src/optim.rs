//! First-order optimizers over dense parameter matrices.

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OptimizerConfig {
    Sgd {
        learning_rate: f64,
    },
    Adam {
        learning_rate: f64,
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}

impl OptimizerConfig {
    pub fn sgd(learning_rate: f64) -> Self {
        OptimizerConfig::Sgd { learning_rate }
    }

    pub fn adam(learning_rate: f64) -> Self {
        OptimizerConfig::Adam {
            learning_rate,
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
        }
    }

    pub fn learning_rate(&self) -> f64 {
        match *self {
            OptimizerConfig::Sgd { learning_rate } | OptimizerConfig::Adam { learning_rate, .. } => learning_rate,
        }
    }
}

/// Optimizer state for one parameter matrix.
#[derive(Debug, Clone)]
pub struct ParamOptimizer {
    config: OptimizerConfig,
    m: Option<Array2<f64>>,
    v: Option<Array2<f64>>,
    /// per-row step counts, so row-sparse updates get correct bias correction
    steps: Vec<u32>,
}

impl ParamOptimizer {
    pub fn new(config: OptimizerConfig, shape: (usize, usize)) -> Self {
        let (m, v) = match config {
            OptimizerConfig::Sgd { .. } => (None, None),
            OptimizerConfig::Adam { .. } => (Some(Array2::zeros(shape)), Some(Array2::zeros(shape))),
        };
        ParamOptimizer {
            config,
            m,
            v,
            steps: vec![0; shape.0],
        }
    }

    /// Applies one update. With `rows = Some(..)` only those rows are touched.
    pub fn step(&mut self, param: &mut Array2<f64>, grad: &Array2<f64>, rows: Option<&[usize]>) {
        match rows {
            Some(rows) => {
                for &r in rows {
                    self.step_row(param, grad, r);
                }
            }
            None => match self.config {
                OptimizerConfig::Sgd { learning_rate } => {
                    Zip::from(param).and(grad).for_each(|p, &g| *p -= learning_rate * g);
                }
                OptimizerConfig::Adam { .. } => {
                    for r in 0..param.nrows() {
                        self.step_row(param, grad, r);
                    }
                }
            },
        }
    }

    fn step_row(&mut self, param: &mut Array2<f64>, grad: &Array2<f64>, r: usize) {
        match self.config {
            OptimizerConfig::Sgd { learning_rate } => {
                let g = grad.row(r);
                param.row_mut(r).zip_mut_with(&g, |p, &g| *p -= learning_rate * g);
            }
            OptimizerConfig::Adam {
                learning_rate,
                beta1,
                beta2,
                eps,
            } => {
                self.steps[r] += 1;
                let t = self.steps[r] as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                let m = self.m.as_mut().expect("adam state");
                let v = self.v.as_mut().expect("adam state");
                let mut p_row = param.row_mut(r);
                let g_row = grad.row(r);
                let mut m_row = m.row_mut(r);
                let mut v_row = v.row_mut(r);
                for j in 0..g_row.len() {
                    let g = g_row[j];
                    m_row[j] = beta1 * m_row[j] + (1.0 - beta1) * g;
                    v_row[j] = beta2 * v_row[j] + (1.0 - beta2) * g * g;
                    let mh = m_row[j] / c1;
                    let vh = v_row[j] / c2;
                    p_row[j] -= learning_rate * mh / (vh.sqrt() + eps);
                }
            }
        }
    }
}
