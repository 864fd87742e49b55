//! Fully connected networks with hand-written backpropagation and Adam.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::LearnerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputActivation {
    /// Logistic squashing to `(0, 1)`, used by actors.
    Sigmoid,
    /// Used by critics.
    Identity,
}

/// Weights are stored `inputs x outputs` so a batch is `x.dot(w) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// ReLU hidden layers followed by a linear layer and `output` activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
    pub output: OutputActivation,
}

/// Per-layer gradients, same shapes as [`Mlp::layers`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input of every layer.
    inputs: Vec<Array2<f64>>,
    /// Pre-activation of every layer.
    pre: Vec<Array2<f64>>,
    pub output: Array2<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Mlp {
    /// `sizes` lists every layer width, input first. Weights are drawn
    /// uniformly from `±1/sqrt(fan_in)`.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], output: OutputActivation, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "need at least an input and an output width");
        let layers = sizes
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                Dense {
                    weights: Array2::from_shape_simple_fn((w[0], w[1]), || rng.random_range(-bound..bound)),
                    bias: Array1::from_shape_simple_fn(w[1], || rng.random_range(-bound..bound)),
                }
            })
            .collect();
        Self { layers, output }
    }

    pub fn zeros(sizes: &[usize], output: OutputActivation) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| Dense {
                weights: Array2::zeros((w[0], w[1])),
                bias: Array1::zeros(w[1]),
            })
            .collect();
        Self { layers, output }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").weights.ncols()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.input_dim()];
        s.extend(self.layers.iter().map(|l| l.weights.ncols()));
        s
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<(), LearnerError> {
        if x.ncols() != self.input_dim() {
            return Err(LearnerError::ShapeMismatch {
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        Ok(())
    }

    /// Row-wise forward pass of a batch.
    pub fn forward(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, LearnerError> {
        self.check_input(&x)?;
        let last = self.layers.len() - 1;
        let mut h = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = h.dot(&layer.weights) + &layer.bias;
            if i < last {
                z.mapv_inplace(|v| v.max(0.0));
            } else if self.output == OutputActivation::Sigmoid {
                z.mapv_inplace(sigmoid);
            }
            h = z;
        }
        Ok(h)
    }

    pub fn forward_one(&self, x: &[f64]) -> Result<Vec<f64>, LearnerError> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        Ok(self.forward(view)?.into_raw_vec_and_offset().0)
    }

    pub fn forward_cached(&self, x: ArrayView2<f64>) -> Result<ForwardCache, LearnerError> {
        self.check_input(&x)?;
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = h.dot(&layer.weights) + &layer.bias;
            let a = if i < last {
                z.mapv(|v| v.max(0.0))
            } else {
                match self.output {
                    OutputActivation::Sigmoid => z.mapv(sigmoid),
                    OutputActivation::Identity => z.clone(),
                }
            };
            inputs.push(h);
            pre.push(z);
            h = a;
        }
        Ok(ForwardCache {
            inputs,
            pre,
            output: h,
        })
    }

    /// Gradients of `sum(grad_output * output)` with respect to the
    /// parameters and to the input batch.
    pub fn backward(&self, cache: &ForwardCache, grad_output: ArrayView2<f64>) -> (Gradients, Array2<f64>) {
        let last = self.layers.len() - 1;
        let mut delta = match self.output {
            OutputActivation::Sigmoid => {
                let mut d = grad_output.to_owned();
                Zip::from(&mut d).and(&cache.output).for_each(|g, y| *g *= y * (1.0 - y));
                d
            }
            OutputActivation::Identity => grad_output.to_owned(),
        };
        let mut grads = Vec::with_capacity(self.layers.len());
        for i in (0..=last).rev() {
            if i < last {
                Zip::from(&mut delta).and(&cache.pre[i]).for_each(|g, z| {
                    if *z <= 0.0 {
                        *g = 0.0;
                    }
                });
            }
            let dw = cache.inputs[i].t().dot(&delta);
            let db = delta.sum_axis(Axis(0));
            let next = delta.dot(&self.layers[i].weights.t());
            grads.push(Dense { weights: dw, bias: db });
            delta = next;
        }
        grads.reverse();
        (Gradients { layers: grads }, delta)
    }

    /// Input gradient only; same as the second half of [`Self::backward`].
    pub fn backward_input(&self, cache: &ForwardCache, grad_output: ArrayView2<f64>) -> Array2<f64> {
        let last = self.layers.len() - 1;
        let mut delta = grad_output.to_owned();
        if self.output == OutputActivation::Sigmoid {
            Zip::from(&mut delta).and(&cache.output).for_each(|g, y| *g *= y * (1.0 - y));
        }
        for i in (0..=last).rev() {
            if i < last {
                Zip::from(&mut delta).and(&cache.pre[i]).for_each(|g, z| {
                    if *z <= 0.0 {
                        *g = 0.0;
                    }
                });
            }
            delta = delta.dot(&self.layers[i].weights.t());
        }
        delta
    }

    /// `self <- rate * online + (1 - rate) * self`, elementwise.
    pub fn soft_update_from(&mut self, online: &Mlp, rate: f64) -> Result<(), LearnerError> {
        if self.sizes() != online.sizes() {
            return Err(LearnerError::ShapeMismatch {
                expected: self.n_params(),
                got: online.n_params(),
            });
        }
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            Zip::from(&mut t.weights)
                .and(&o.weights)
                .for_each(|t, o| *t = rate * o + (1.0 - rate) * *t);
            Zip::from(&mut t.bias)
                .and(&o.bias)
                .for_each(|t, o| *t = rate * o + (1.0 - rate) * *t);
        }
        Ok(())
    }

    /// Parameters flattened layer by layer, weights (row-major) then bias.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.n_params(), "parameter count");
        let mut it = params.iter();
        for l in &mut self.layers {
            for w in l.weights.iter_mut() {
                *w = *it.next().expect("length checked");
            }
            for b in l.bias.iter_mut() {
                *b = *it.next().expect("length checked");
            }
        }
    }
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Dense {
                    weights: Array2::zeros(l.weights.raw_dim()),
                    bias: Array1::zeros(l.bias.raw_dim()),
                })
                .collect(),
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.weights.iter().chain(l.bias.iter()).map(|g| g * g).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights.mapv_inplace(|g| g * factor);
            l.bias.mapv_inplace(|g| g * factor);
        }
    }

    /// Rescales to `max_norm` if the global norm exceeds it. Returns the
    /// norm before clipping.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.global_norm();
        if norm > max_norm && norm > 0.0 {
            self.scale(max_norm / norm);
        }
        norm
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|g| g.is_finite()))
    }
}

/// Adaptive moment estimation with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: i32,
    m: Gradients,
    v: Gradients,
}

impl Adam {
    pub fn new(net: &Mlp, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
        }
    }

    /// Applies one descent step along `grads`.
    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) {
        self.step += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let lr_t = self.learning_rate * (1.0 - b2.powi(self.step)).sqrt() / (1.0 - b1.powi(self.step));
        let eps = self.epsilon;
        let update = |p: &mut f64, g: &f64, m: &mut f64, v: &mut f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr_t * *m / (v.sqrt() + eps);
        };
        for (((layer, g), m), v) in net
            .layers
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.m.layers)
            .zip(&mut self.v.layers)
        {
            Zip::from(&mut layer.weights)
                .and(&g.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .for_each(update);
            Zip::from(&mut layer.bias)
                .and(&g.bias)
                .and(&mut m.bias)
                .and(&mut v.bias)
                .for_each(update);
        }
    }
}
