//! Knowledge fusion: the transform gate and the fusion variants used for
//! ablations, with their backward passes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::tensor::{sigmoid, softmax, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// `e_s + e_l * g(e_s, e_l)`
    #[default]
    Gate,
    /// `e_s + e_l`
    DirectAddition,
    /// `tanh(W_f [e_s; e_l])`
    FcFusion,
    /// `e_s`; the knowledge path is ignored.
    NoKnowledge,
}

impl FusionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FusionMode::Gate => "gate",
            FusionMode::DirectAddition => "direct_addition",
            FusionMode::FcFusion => "fc_fusion",
            FusionMode::NoKnowledge => "no_knowledge",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gate" => Some(FusionMode::Gate),
            "direct_addition" => Some(FusionMode::DirectAddition),
            "fc_fusion" => Some(FusionMode::FcFusion),
            "no_knowledge" => Some(FusionMode::NoKnowledge),
            _ => None,
        }
    }

    pub fn uses_knowledge(self) -> bool {
        self != FusionMode::NoKnowledge
    }
}

/// Normaliser applied to the gate logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateActivation {
    /// Softmax across the `k` components.
    #[default]
    Softmax,
    /// Independent logistic per component.
    Sigmoid,
}

impl GateActivation {
    pub fn as_str(self) -> &'static str {
        match self {
            GateActivation::Softmax => "softmax",
            GateActivation::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "softmax" => Some(GateActivation::Softmax),
            "sigmoid" => Some(GateActivation::Sigmoid),
            _ => None,
        }
    }
}

/// Gate weight `W_g` (`k x 4k`).
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    pub wg: Matrix,
}

impl GateParams {
    pub fn zeros(k: usize) -> Self {
        GateParams {
            wg: Matrix::zeros(k, 4 * k),
        }
    }

    pub fn glorot<R: Rng>(k: usize, rng: &mut R) -> Self {
        GateParams {
            wg: Matrix::glorot(k, 4 * k, rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.wg.rows()
    }
}

/// Everything the fusion layer owns: the gate and the `k x 2k` weight of
/// the FC-fusion variant.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionParams {
    pub gate: GateParams,
    pub wf: Matrix,
    pub activation: GateActivation,
}

impl FusionParams {
    pub fn zeros(k: usize, activation: GateActivation) -> Self {
        FusionParams {
            gate: GateParams::zeros(k),
            wf: Matrix::zeros(k, 2 * k),
            activation,
        }
    }

    pub fn glorot<R: Rng>(k: usize, activation: GateActivation, rng: &mut R) -> Self {
        FusionParams {
            gate: GateParams::glorot(k, rng),
            wf: Matrix::glorot(k, 2 * k, rng),
            activation,
        }
    }
}

/// `[a; b; a - b; a * b]`
pub fn gate_features(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut f = Vec::with_capacity(4 * a.len());
    f.extend_from_slice(a);
    f.extend_from_slice(b);
    f.extend(a.iter().zip(b).map(|(x, y)| x - y));
    f.extend(a.iter().zip(b).map(|(x, y)| x * y));
    f
}

/// `Softmax(W_g [a; b; a - b; a * b])`
pub fn transform_gate(a: &[f64], b: &[f64], gp: &GateParams) -> Result<Vec<f64>> {
    transform_gate_with(a, b, gp, GateActivation::Softmax)
}

pub fn transform_gate_with(
    a: &[f64],
    b: &[f64],
    gp: &GateParams,
    activation: GateActivation,
) -> Result<Vec<f64>> {
    check_dim(gp.dim(), a.len())?;
    check_dim(gp.dim(), b.len())?;
    let logits = gp.wg.matvec(&gate_features(a, b));
    Ok(activate(&logits, activation))
}

fn activate(logits: &[f64], activation: GateActivation) -> Vec<f64> {
    match activation {
        GateActivation::Softmax => softmax(logits),
        GateActivation::Sigmoid => logits.iter().map(|&x| sigmoid(x)).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct GateTrace {
    pub features: Vec<f64>,
    pub gate: Vec<f64>,
}

pub fn gate_forward(
    a: &[f64],
    b: &[f64],
    gp: &GateParams,
    activation: GateActivation,
) -> GateTrace {
    let features = gate_features(a, b);
    let gate = activate(&gp.wg.matvec(&features), activation);
    GateTrace { features, gate }
}

/// Backward pass of the gate. Accumulates into `d_wg` and returns the
/// gradients with respect to `a` and `b`.
pub fn gate_backward(
    a: &[f64],
    b: &[f64],
    gp: &GateParams,
    activation: GateActivation,
    trace: &GateTrace,
    d_gate: &[f64],
    d_wg: &mut Matrix,
) -> (Vec<f64>, Vec<f64>) {
    let k = a.len();
    let s = &trace.gate;
    let d_logits: Vec<f64> = match activation {
        GateActivation::Softmax => {
            let inner: f64 = d_gate.iter().zip(s).map(|(g, p)| g * p).sum();
            d_gate.iter().zip(s).map(|(g, p)| p * (g - inner)).collect()
        }
        GateActivation::Sigmoid => d_gate
            .iter()
            .zip(s)
            .map(|(g, p)| g * p * (1.0 - p))
            .collect(),
    };
    d_wg.add_outer(1.0, &d_logits, &trace.features);
    let df = gp.wg.matvec_t(&d_logits);
    let da = (0..k)
        .map(|i| df[i] + df[2 * k + i] + df[3 * k + i] * b[i])
        .collect();
    let db = (0..k)
        .map(|i| df[k + i] - df[2 * k + i] + df[3 * k + i] * a[i])
        .collect();
    (da, db)
}

/// Final entity representation from its semantic features `es` and
/// transformed knowledge features `el`.
pub fn fuse(es: &[f64], el: &[f64], params: &FusionParams, mode: FusionMode) -> Result<Vec<f64>> {
    check_dim(es.len(), el.len())?;
    if mode != FusionMode::NoKnowledge {
        check_dim(params.gate.dim(), es.len())?;
    }
    Ok(fuse_forward(es, el, params, mode).output)
}

#[derive(Debug, Clone)]
pub struct FuseTrace {
    pub gate: Option<GateTrace>,
    pub concat: Option<Vec<f64>>,
    pub output: Vec<f64>,
}

pub fn fuse_forward(es: &[f64], el: &[f64], params: &FusionParams, mode: FusionMode) -> FuseTrace {
    match mode {
        FusionMode::Gate => {
            let gate = gate_forward(es, el, &params.gate, params.activation);
            let output = es
                .iter()
                .zip(el)
                .zip(&gate.gate)
                .map(|((s, l), g)| s + l * g)
                .collect();
            FuseTrace {
                gate: Some(gate),
                concat: None,
                output,
            }
        }
        FusionMode::DirectAddition => FuseTrace {
            gate: None,
            concat: None,
            output: es.iter().zip(el).map(|(s, l)| s + l).collect(),
        },
        FusionMode::FcFusion => {
            let mut concat = es.to_vec();
            concat.extend_from_slice(el);
            let output = params
                .wf
                .matvec(&concat)
                .into_iter()
                .map(f64::tanh)
                .collect();
            FuseTrace {
                gate: None,
                concat: Some(concat),
                output,
            }
        }
        FusionMode::NoKnowledge => FuseTrace {
            gate: None,
            concat: None,
            output: es.to_vec(),
        },
    }
}

/// Gradient accumulators for [`FusionParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct FusionGrads {
    pub wg: Matrix,
    pub wf: Matrix,
}

impl FusionGrads {
    pub fn zeros(k: usize) -> Self {
        FusionGrads {
            wg: Matrix::zeros(k, 4 * k),
            wf: Matrix::zeros(k, 2 * k),
        }
    }
}

/// Backward pass of [`fuse_forward`]; returns `(d_es, d_el)`.
pub fn fuse_backward(
    es: &[f64],
    el: &[f64],
    params: &FusionParams,
    mode: FusionMode,
    trace: &FuseTrace,
    d_out: &[f64],
    grads: &mut FusionGrads,
) -> (Vec<f64>, Vec<f64>) {
    let k = es.len();
    match mode {
        FusionMode::Gate => {
            let gt = trace.gate.as_ref().expect("gate trace");
            let d_gate: Vec<f64> = d_out.iter().zip(el).map(|(d, l)| d * l).collect();
            let (da, db) = gate_backward(
                es,
                el,
                &params.gate,
                params.activation,
                gt,
                &d_gate,
                &mut grads.wg,
            );
            let d_es = d_out.iter().zip(&da).map(|(d, a)| d + a).collect();
            let d_el = (0..k).map(|i| d_out[i] * gt.gate[i] + db[i]).collect();
            (d_es, d_el)
        }
        FusionMode::DirectAddition => (d_out.to_vec(), d_out.to_vec()),
        FusionMode::FcFusion => {
            let concat = trace.concat.as_ref().expect("concat trace");
            let dz: Vec<f64> = d_out
                .iter()
                .zip(&trace.output)
                .map(|(d, o)| d * (1.0 - o * o))
                .collect();
            grads.wf.add_outer(1.0, &dz, concat);
            let dc = params.wf.matvec_t(&dz);
            (dc[..k].to_vec(), dc[k..].to_vec())
        }
        FusionMode::NoKnowledge => (d_out.to_vec(), vec![0.0; k]),
    }
}
