//! Fixed-topology feed-forward network evaluated from a flat parameter
//! vector.
//!
//! The network is never trained by gradients; the swarm treats the flat
//! vector as its search space, so evaluation is a pure function of
//! `(architecture, parameters, x)`. Parameters are stored layer by layer:
//! each layer's weight matrix row-major (one row per output neuron),
//! followed by that layer's biases. This order is part of the public
//! contract because run records persist raw parameter vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{Grid, SampledFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum NetError {
    /// Scalar-in / scalar-out topology with at least one hidden layer.
    BadTopology(String),
    /// Parameter vector length does not match the architecture.
    ParamLength { expected: usize, got: usize },
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::BadTopology(msg) => write!(f, "bad topology: {msg}"),
            NetError::ParamLength { expected, got } => {
                write!(f, "parameter vector has {got} entries, architecture needs {expected}")
            }
        }
    }
}

impl std::error::Error for NetError {}

/// Hidden-layer activation. The output layer is always linear so the raw
/// network output is unbounded; boundary behaviour is handled by the
/// trial construction, not by the activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }
}

/// Layer widths plus the hidden activation. First and last widths are 1
/// (scalar input x, scalar raw output u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    layer_widths: Vec<usize>,
    activation: Activation,
}

impl MlpArchitecture {
    pub fn new(layer_widths: Vec<usize>, activation: Activation) -> Result<Self, NetError> {
        if layer_widths.len() < 3 {
            return Err(NetError::BadTopology(
                "need at least one hidden layer".into(),
            ));
        }
        if layer_widths.first() != Some(&1) || layer_widths.last() != Some(&1) {
            return Err(NetError::BadTopology(
                "input and output widths must both be 1".into(),
            ));
        }
        if layer_widths.iter().any(|&w| w == 0) {
            return Err(NetError::BadTopology("zero-width layer".into()));
        }
        Ok(MlpArchitecture {
            layer_widths,
            activation,
        })
    }

    pub fn layer_widths(&self) -> &[usize] {
        &self.layer_widths
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Total number of weights and biases: sum over layers of
    /// `(width_in + 1) * width_out`.
    pub fn param_count(&self) -> usize {
        self.layer_widths
            .windows(2)
            .map(|w| (w[0] + 1) * w[1])
            .sum()
    }

    fn max_width(&self) -> usize {
        *self.layer_widths.iter().max().expect("non-empty")
    }
}

/// Flat vector of weights and biases in the canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// One layer's parameters in structured form.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// Row-major `(width_out, width_in)` weight matrix.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Split a flat vector into per-layer weight/bias blocks.
pub fn unflatten(arch: &MlpArchitecture, params: &ParamVector) -> Result<Vec<LayerParams>, NetError> {
    check_len(arch, params.values())?;
    let mut layers = Vec::with_capacity(arch.layer_widths.len() - 1);
    let mut offset = 0;
    for w in arch.layer_widths.windows(2) {
        let (w_in, w_out) = (w[0], w[1]);
        let weights = params.0[offset..offset + w_in * w_out].to_vec();
        offset += w_in * w_out;
        let biases = params.0[offset..offset + w_out].to_vec();
        offset += w_out;
        layers.push(LayerParams { weights, biases });
    }
    Ok(layers)
}

/// Inverse of [`unflatten`].
pub fn flatten(layers: &[LayerParams]) -> ParamVector {
    let mut out = Vec::new();
    for layer in layers {
        out.extend_from_slice(&layer.weights);
        out.extend_from_slice(&layer.biases);
    }
    ParamVector(out)
}

fn check_len(arch: &MlpArchitecture, params: &[f64]) -> Result<(), NetError> {
    let expected = arch.param_count();
    if params.len() != expected {
        return Err(NetError::ParamLength {
            expected,
            got: params.len(),
        });
    }
    Ok(())
}

/// Evaluate the network at a single point.
pub fn forward(arch: &MlpArchitecture, params: &ParamVector, x: f64) -> Result<f64, NetError> {
    check_len(arch, params.values())?;
    let mut buf_a = vec![0.0; arch.max_width()];
    let mut buf_b = vec![0.0; arch.max_width()];
    Ok(forward_buffered(arch, params.values(), x, &mut buf_a, &mut buf_b))
}

/// Evaluate the network at every grid node. Equivalent to `m` independent
/// [`forward`] calls.
pub fn forward_grid(
    arch: &MlpArchitecture,
    params: &ParamVector,
    grid: &Grid,
) -> Result<SampledFunction, NetError> {
    check_len(arch, params.values())?;
    let mut buf_a = vec![0.0; arch.max_width()];
    let mut buf_b = vec![0.0; arch.max_width()];
    let values = grid
        .nodes()
        .iter()
        .map(|&x| forward_buffered(arch, params.values(), x, &mut buf_a, &mut buf_b))
        .collect();
    Ok(SampledFunction::new(grid.clone(), values).expect("lengths match by construction"))
}

/// Core affine-activation composition over scratch buffers. `params` must
/// already be validated against `arch`.
fn forward_buffered(
    arch: &MlpArchitecture,
    params: &[f64],
    x: f64,
    buf_a: &mut [f64],
    buf_b: &mut [f64],
) -> f64 {
    let widths = &arch.layer_widths;
    let n_layers = widths.len() - 1;
    buf_a[0] = x;
    let mut offset = 0;
    let mut in_width = 1;
    for (l, w) in widths.windows(2).enumerate() {
        let (w_in, w_out) = (w[0], w[1]);
        debug_assert_eq!(w_in, in_width);
        let weights = &params[offset..offset + w_in * w_out];
        offset += w_in * w_out;
        let biases = &params[offset..offset + w_out];
        offset += w_out;
        let last = l == n_layers - 1;
        for j in 0..w_out {
            let row = &weights[j * w_in..(j + 1) * w_in];
            let mut z = biases[j];
            for (wi, ai) in row.iter().zip(buf_a.iter()) {
                z += wi * ai;
            }
            buf_b[j] = if last { z } else { arch.activation().apply(z) };
        }
        buf_a[..w_out].copy_from_slice(&buf_b[..w_out]);
        in_width = w_out;
    }
    buf_a[0]
}
