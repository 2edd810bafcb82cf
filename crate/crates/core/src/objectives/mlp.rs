//! Scalar-output feed-forward network under squared loss.
//!
//! Layer `l` computes `α⁽ˡ⁾ = σ_l(W⁽ˡ⁾ α⁽ˡ⁻¹⁾ / √m_{l−1})` with `α⁽⁰⁾ = x`;
//! the network output is the single entry of the last layer. Weights are
//! flattened layer-major, row-major within a layer.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};
use crate::objectives::{Dataset, Objective};
use crate::rng::RngStream;
use crate::tensor::{Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    /// Not differentiable at 0 and not covered by the convergence theory.
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Uniform lower bound `ρ` on `|σ'(z)|`, when one exists.
    pub fn rho(self) -> Option<f64> {
        match self {
            Activation::Identity => Some(1.0),
            Activation::Tanh | Activation::Relu => None,
        }
    }
}

/// Layer widths `m_0 … m_{L+1}` and activations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpArch {
    widths: Vec<usize>,
    hidden: Activation,
    output: Activation,
}

impl MlpArch {
    pub fn new(widths: Vec<usize>, hidden: Activation, output: Activation) -> Result<Self> {
        if widths.len() < 2 {
            return Err(invalid("network needs at least an input and an output layer"));
        }
        if widths.contains(&0) {
            return Err(invalid(format!("layer widths must be positive: {widths:?}")));
        }
        if *widths.last().unwrap() != 1 {
            return Err(invalid("the output layer must have width 1"));
        }
        Ok(MlpArch { widths, hidden, output })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn hidden(&self) -> Activation {
        self.hidden
    }

    pub fn output(&self) -> Activation {
        self.output
    }

    /// Number of weight layers (`L + 1`).
    pub fn depth(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1]).sum()
    }

    fn activation(&self, layer: usize) -> Activation {
        if layer + 1 == self.depth() {
            self.output
        } else {
            self.hidden
        }
    }

    /// Offsets of each `W⁽ˡ⁾` inside the flat weight vector.
    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.depth() + 1);
        let mut acc = 0;
        off.push(0);
        for w in self.widths.windows(2) {
            acc += w[0] * w[1];
            off.push(acc);
        }
        off
    }

    /// Weights with every entry drawn from N(0, 1).
    pub fn gaussian_weights(&self, rng: &mut RngStream) -> Vector {
        Vector::gaussian(self.param_count(), rng)
    }

    fn forward_cached(&self, w: &[f64], x: &[f64]) -> Tape {
        let offsets = self.offsets();
        let mut pre = Vec::with_capacity(self.depth());
        let mut act = Vec::with_capacity(self.depth() + 1);
        act.push(x.to_vec());
        for l in 0..self.depth() {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let scale = 1.0 / (fan_in as f64).sqrt();
            let wl = &w[offsets[l]..offsets[l + 1]];
            let prev = &act[l];
            let sigma = self.activation(l);
            let mut z = Vec::with_capacity(fan_out);
            for i in 0..fan_out {
                let row = &wl[i * fan_in..(i + 1) * fan_in];
                let s: f64 = row.iter().zip(prev).map(|(a, b)| a * b).sum();
                z.push(scale * s);
            }
            let a = z.iter().map(|&zi| sigma.apply(zi)).collect();
            pre.push(z);
            act.push(a);
        }
        Tape { pre, act, offsets }
    }

    fn output_value(&self, w: &[f64], x: &[f64]) -> f64 {
        self.forward_cached(w, x).act.last().unwrap()[0]
    }

    /// Adds `seed · ∇_w f(w; x)` into `grad`.
    fn backward(&self, w: &[f64], tape: &Tape, seed: f64, grad: &mut [f64]) {
        let depth = self.depth();
        // d(out)/d(α⁽ˡ⁾) for the current layer, starting at the output.
        let mut d_act = vec![seed];
        for l in (0..depth).rev() {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let scale = 1.0 / (fan_in as f64).sqrt();
            let sigma = self.activation(l);
            let delta: Vec<f64> = d_act
                .iter()
                .zip(&tape.pre[l])
                .map(|(d, &z)| d * sigma.derivative(z))
                .collect();
            let prev = &tape.act[l];
            let wl = &w[tape.offsets[l]..tape.offsets[l + 1]];
            let gl = &mut grad[tape.offsets[l]..tape.offsets[l + 1]];
            for i in 0..fan_out {
                let di = scale * delta[i];
                if di == 0.0 {
                    continue;
                }
                for (g, a) in gl[i * fan_in..(i + 1) * fan_in].iter_mut().zip(prev) {
                    *g += di * a;
                }
            }
            if l > 0 {
                let mut next = vec![0.0; fan_in];
                for i in 0..fan_out {
                    let di = scale * delta[i];
                    for (n, wij) in next.iter_mut().zip(&wl[i * fan_in..(i + 1) * fan_in]) {
                        *n += di * wij;
                    }
                }
                d_act = next;
            }
        }
    }

    fn check_weights(&self, w: &[f64]) -> Result<()> {
        check_dim(self.param_count(), w.len())
    }

    fn check_data(&self, d: &Dataset) -> Result<()> {
        check_dim(self.input_dim(), d.input_dim())
    }
}

struct Tape {
    pre: Vec<Vec<f64>>,
    act: Vec<Vec<f64>>,
    offsets: Vec<usize>,
}

/// Architecture plus a concrete weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub arch: MlpArch,
    pub weights: Vector,
}

impl MlpSpec {
    pub fn new(arch: MlpArch, weights: Vector) -> Result<Self> {
        arch.check_weights(&weights)?;
        Ok(MlpSpec { arch, weights })
    }

    pub fn gaussian(arch: MlpArch, rng: &mut RngStream) -> Self {
        let weights = arch.gaussian_weights(rng);
        MlpSpec { arch, weights }
    }

    /// The matrix `W⁽ˡ⁾` (`l` counted from 0).
    pub fn layer(&self, l: usize) -> Matrix {
        let off = self.arch.offsets();
        let (fan_in, fan_out) = (self.arch.widths[l], self.arch.widths[l + 1]);
        Matrix::new(fan_out, fan_in, self.weights[off[l]..off[l + 1]].to_vec())
            .expect("layer slice has the declared shape")
    }
}

pub fn mlp_forward(spec: &MlpSpec, x: &[f64]) -> Result<f64> {
    spec.arch.check_weights(&spec.weights)?;
    check_dim(spec.arch.input_dim(), x.len())?;
    Ok(spec.arch.output_value(&spec.weights, x))
}

/// `F(w) = (f(w; x_1), …, f(w; x_n))`.
pub fn network_outputs(spec: &MlpSpec, d: &Dataset) -> Result<Vector> {
    spec.arch.check_weights(&spec.weights)?;
    spec.arch.check_data(d)?;
    Ok(Vector::from_vec(
        d.inputs().iter().map(|x| spec.arch.output_value(&spec.weights, x)).collect(),
    ))
}

/// `½ Σ (f(w; x_i) − y_i)²`.
pub fn squared_loss(spec: &MlpSpec, d: &Dataset) -> Result<f64> {
    let f = network_outputs(spec, d)?;
    Ok(loss_from_outputs(&f, d.targets()))
}

fn loss_from_outputs(f: &[f64], y: &[f64]) -> f64 {
    0.5 * f.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

pub fn squared_loss_gradient(spec: &MlpSpec, d: &Dataset) -> Result<Vector> {
    spec.arch.check_weights(&spec.weights)?;
    spec.arch.check_data(d)?;
    Ok(loss_and_gradient(&spec.arch, &spec.weights, d).1)
}

fn loss_and_gradient(arch: &MlpArch, w: &[f64], d: &Dataset) -> (f64, Vector) {
    let mut grad = vec![0.0; arch.param_count()];
    let mut loss = 0.0;
    for (x, y) in d.inputs().iter().zip(d.targets()) {
        let tape = arch.forward_cached(w, x);
        let r = tape.act.last().unwrap()[0] - y;
        loss += 0.5 * r * r;
        if r != 0.0 {
            arch.backward(w, &tape, r, &mut grad);
        }
    }
    (loss, Vector::from_vec(grad))
}

/// `DF(w)`: row `i` is `∇_w f(w; x_i)`, one reverse pass per sample.
pub fn jacobian(spec: &MlpSpec, d: &Dataset) -> Result<Matrix> {
    spec.arch.check_weights(&spec.weights)?;
    spec.arch.check_data(d)?;
    let p = spec.arch.param_count();
    let mut data = vec![0.0; d.len() * p];
    for (i, x) in d.inputs().iter().enumerate() {
        let tape = spec.arch.forward_cached(&spec.weights, x);
        spec.arch.backward(&spec.weights, &tape, 1.0, &mut data[i * p..(i + 1) * p]);
    }
    Matrix::new(d.len(), p, data)
}

/// Squared loss of a fixed architecture over a fixed dataset, as a function of
/// the flat weight vector.
#[derive(Debug, Clone)]
pub struct MlpObjective {
    arch: MlpArch,
    data: Dataset,
}

impl MlpObjective {
    pub fn new(arch: MlpArch, data: Dataset) -> Result<Self> {
        arch.check_data(&data)?;
        Ok(MlpObjective { arch, data })
    }

    pub fn arch(&self) -> &MlpArch {
        &self.arch
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn spec_at(&self, w: &Vector) -> MlpSpec {
        MlpSpec { arch: self.arch.clone(), weights: w.clone() }
    }
}

impl Objective for MlpObjective {
    fn dim(&self) -> usize {
        self.arch.param_count()
    }

    fn value(&self, w: &Vector) -> f64 {
        let f: Vec<f64> =
            self.data.inputs().iter().map(|x| self.arch.output_value(w, x)).collect();
        loss_from_outputs(&f, self.data.targets())
    }

    fn gradient(&self, w: &Vector) -> Vector {
        loss_and_gradient(&self.arch, w, &self.data).1
    }

    fn value_and_gradient(&self, w: &Vector) -> (f64, Vector) {
        loss_and_gradient(&self.arch, w, &self.data)
    }
}
