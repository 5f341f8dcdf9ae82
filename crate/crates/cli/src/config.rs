//! Scenario configuration: one flat JSON document per experiment.

use backflow_core::correlations::{x_state, XStateBasis, XStateParams};
use backflow_core::pauli::symmetric_bell_projector;
use backflow_core::{DensityMatrix64, C64};
use serde::Deserialize;

use crate::Failure;

fn default_scan_depth() -> usize {
    backflow_core::dynamics::DIVISIBILITY_SCAN_DEPTH
}

fn default_bias() -> f64 {
    0.5
}

fn default_bound_stride() -> usize {
    50
}

fn default_grid() -> (usize, usize) {
    (24, 12)
}

/// One experiment. The `scenario` tag selects the kind; all parameters are
/// validated before any computation starts.
#[derive(Deserialize, Debug)]
#[serde(tag = "scenario", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScenarioConfig {
    /// Analytic vs Choi-based divisibility verdicts on a (p, delta/alpha)
    /// grid at fixed r. Columns: p, delta, P, CP, tensorP.
    DivisibilityScan {
        r: f64,
        p_min: f64,
        p_max: f64,
        p_steps: usize,
        ratio_steps: usize,
        #[serde(default = "default_scan_depth")]
        scan_depth: usize,
        output: String,
    },
    /// Eigenvalue trajectory of the discrete reduced dynamics, optionally
    /// with the qubit-chain (or two-qubit-chain) mutual information.
    DiscreteTrace {
        p0: f64,
        p: f64,
        r: f64,
        delta: f64,
        varphi: f64,
        n_max: usize,
        state: Option<StateSpec>,
        output: String,
    },
    /// Continuous-time trace: eigenvalues plus, when states are supplied,
    /// the two-qubit mutual information (kappa = 0 only) and the Helstrom
    /// norm of a biased pair under the doubled dynamics.
    CtimeTrace {
        gamma: f64,
        kappa: f64,
        t_max: f64,
        step: f64,
        state: Option<StateSpec>,
        helstrom_sigma: Option<StateSpec>,
        #[serde(default = "default_bias")]
        bias: f64,
        output: String,
    },
    /// Helstrom trajectory of a two-qubit pair under the doubled continuous
    /// dynamics with the quantumness bound sampled along it.
    Witness {
        gamma: f64,
        kappa: f64,
        rho: StateSpec,
        sigma: StateSpec,
        bias: f64,
        t_max: f64,
        step: f64,
        tau: f64,
        #[serde(default = "default_bound_stride")]
        bound_stride: usize,
        output: String,
    },
    /// The separable superactivation construction.
    SeparableDemo {
        a: f64,
        s: f64,
        t_max: f64,
        step: f64,
        output: String,
    },
    /// Oracle cross-check suite (also available as the `validate`
    /// subcommand).
    Validate {},
}

/// Named state presets.
#[derive(Deserialize, Debug, Clone)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    /// Projector onto the symmetric Bell vector (two qubits).
    P2plus,
    /// Maximally mixed state on one or two qubits.
    MaxMixed { qubits: usize },
    /// Computational-basis pure state on one or two qubits.
    Computational { qubits: usize, index: usize },
    /// X-shaped two-qubit state.
    XState {
        mu1: f64,
        mu2: f64,
        nu: f64,
        #[serde(default)]
        u_re: f64,
        #[serde(default)]
        u_im: f64,
        #[serde(default)]
        v_re: f64,
        #[serde(default)]
        v_im: f64,
        basis: XBasis,
    },
}

#[derive(Deserialize, Debug, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
pub enum XBasis {
    SigmaXPair,
    Computational,
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix64, Failure> {
        match self {
            StateSpec::P2plus => DensityMatrix64::from_matrix(symmetric_bell_projector())
                .map_err(|e| Failure::Config(e.to_string())),
            StateSpec::MaxMixed { qubits } => match qubits {
                1 => Ok(DensityMatrix64::maximally_mixed(2)),
                2 => Ok(DensityMatrix64::maximally_mixed(4)),
                q => Err(Failure::Config(format!(
                    "max-mixed supports 1 or 2 qubits, got {q}"
                ))),
            },
            StateSpec::Computational { qubits, index } => {
                let dim = match qubits {
                    1 => 2,
                    2 => 4,
                    q => {
                        return Err(Failure::Config(format!(
                            "computational supports 1 or 2 qubits, got {q}"
                        )))
                    }
                };
                DensityMatrix64::basis_projector(dim, *index)
                    .map_err(|e| Failure::Config(e.to_string()))
            }
            StateSpec::XState {
                mu1,
                mu2,
                nu,
                u_re,
                u_im,
                v_re,
                v_im,
                basis,
            } => {
                let params = XStateParams {
                    mu1: *mu1,
                    mu2: *mu2,
                    nu: *nu,
                    u: C64::new(*u_re, *u_im),
                    v: C64::new(*v_re, *v_im),
                };
                let basis = match basis {
                    XBasis::SigmaXPair => XStateBasis::SigmaXPair,
                    XBasis::Computational => XStateBasis::Computational,
                };
                x_state(&params, basis).map_err(|e| Failure::Config(e.to_string()))
            }
        }
    }
}

/// Quantumness optimiser grid shared by witness-style scenarios.
pub fn default_quantumness_settings() -> backflow_core::witness::QuantumnessSettings {
    let (azimuthal, polar) = default_grid();
    backflow_core::witness::QuantumnessSettings {
        azimuthal_steps: azimuthal,
        polar_steps: polar,
        refine_iterations: 200,
    }
}

pub fn parse(text: &str) -> Result<ScenarioConfig, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Config(e.to_string()))
}
