use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{covariant, damping, mix, pauli_channel, tensor, unitary_qubit, Channel};
use crate::approx::ProbabilityVector;
use crate::error::{Error, Result};
use crate::ComplexMatrix;

/// JSON channel description, tagged by `"kind"`.
///
/// ```json
/// {"kind":"unitary","alpha":0.0,"beta":0.5236,"delta":0.0}
/// {"kind":"pauli","p":[0.75,0.125,0.125,0.0]}
/// {"kind":"covariant","p":0.5}
/// {"kind":"damping","q":0.7,"gamma":0.5}
/// {"kind":"kraus","dim":2,"matrices":[[[1,0],[0,0],[0,0],[1,0]]]}
/// {"kind":"tensor","factors":[{"kind":"covariant","p":0.1},{"kind":"covariant","p":0.2}]}
/// {"kind":"mix","weights":[0.5,0.5],"channels":[...]}
/// ```
///
/// Kraus matrices are flat row-major lists of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Unitary {
        alpha: f64,
        beta: f64,
        delta: f64,
    },
    Pauli {
        p: Vec<f64>,
    },
    Covariant {
        p: f64,
        #[serde(default = "default_dim", skip_serializing_if = "is_qubit")]
        dim: usize,
    },
    Damping {
        q: f64,
        gamma: f64,
    },
    Kraus {
        dim: usize,
        matrices: Vec<Vec<[f64; 2]>>,
    },
    Tensor {
        factors: Vec<ChannelSpec>,
    },
    Mix {
        weights: Vec<f64>,
        channels: Vec<ChannelSpec>,
    },
}

fn default_dim() -> usize {
    2
}

fn is_qubit(d: &usize) -> bool {
    *d == 2
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Unitary { alpha, beta, delta } => unitary_qubit(*alpha, *beta, *delta),
            ChannelSpec::Pauli { p } => pauli_channel(&ProbabilityVector::new(p.clone())?),
            ChannelSpec::Covariant { p, dim } => covariant(*p, *dim),
            ChannelSpec::Damping { q, gamma } => damping(*q, *gamma),
            ChannelSpec::Kraus { dim, matrices } => {
                let kraus = matrices
                    .iter()
                    .map(|m| {
                        let entries = m.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                        ComplexMatrix::from_vec(*dim, *dim, entries)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Channel::new(*dim, kraus)
            }
            ChannelSpec::Tensor { factors } => {
                let (first, rest) = factors
                    .split_first()
                    .ok_or_else(|| Error::Parse("tensor needs at least one factor".into()))?;
                rest.iter()
                    .try_fold(first.build()?, |acc, f| Ok(tensor(&acc, &f.build()?)))
            }
            ChannelSpec::Mix { weights, channels } => {
                let chs = channels.iter().map(ChannelSpec::build).collect::<Result<Vec<_>>>()?;
                mix(&chs, &ProbabilityVector::new(weights.clone())?)
            }
        }
    }
}
