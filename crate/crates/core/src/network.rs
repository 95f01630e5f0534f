//! Feed-forward steering networks encoded as flat chromosomes, with an
//! optional odd-symmetry constraint on the weights.
//!
//! A constrained neuron's incoming weight row is antisymmetric: the first
//! half of the row is the additive inverse of the second half (reversed),
//! and the middle weight of an odd fan-in is pinned to zero. Only the free
//! first half is stored in the genome, so a fully constrained network needs
//! half the genes of an unconstrained one (for even fan-ins, exactly half).
//!
//! The payoff: reversing the input vector of a constrained layer negates its
//! pre-activations, and because the activation is odd, negation propagates
//! through every later layer whether or not it is constrained. A mirrored
//! rangefinder scan therefore yields an exactly mirrored steering command.
//! The forward pass accumulates constrained rows in paired form
//! `w_k * (x_k - x_{n-1-k})` so this holds bitwise in IEEE arithmetic, not
//! just to rounding error.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid network spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("genome length mismatch: spec wants {expected} genes, got {actual}")]
    GenomeLength { expected: usize, actual: usize },
    #[error("gene {index} is not finite")]
    NonFiniteGene { index: usize },
    #[error("input dimension mismatch: network takes {expected}, got {actual}")]
    InputDimension { expected: usize, actual: usize },
    #[error("chromosome file, line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, reason: impl Into<String>) -> NetworkError {
    NetworkError::Parse { line, reason: reason.into() }
}

/// Which layers carry the symmetry constraint when `symmetric` is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetricDepth {
    /// Only the input-to-hidden weights are constrained.
    FirstLayerOnly,
    /// Every weight layer is constrained (the default).
    AllLayers,
}

/// Network architecture: layer widths (including input and the two-neuron
/// output layer) plus the symmetry mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    layer_sizes: Vec<usize>,
    symmetric: bool,
    symmetric_depth: SymmetricDepth,
}

/// Defensive caps so hostile chromosome files cannot trigger overflow or
/// absurd allocations. Real configurations are nowhere near these.
const MAX_LAYERS: usize = 16;
const MAX_LAYER_SIZE: usize = 10_000;

impl NetworkSpec {
    pub fn new(
        layer_sizes: Vec<usize>,
        symmetric: bool,
        symmetric_depth: SymmetricDepth,
    ) -> Result<Self, NetworkError> {
        if layer_sizes.len() < 3 {
            return Err(NetworkError::InvalidSpec {
                reason: format!(
                    "need input, at least one hidden, and output layer; got {} sizes",
                    layer_sizes.len()
                ),
            });
        }
        if layer_sizes.len() > MAX_LAYERS {
            return Err(NetworkError::InvalidSpec {
                reason: format!("more than {MAX_LAYERS} layers"),
            });
        }
        if *layer_sizes.last().unwrap() != 2 {
            return Err(NetworkError::InvalidSpec {
                reason: format!(
                    "output layer must have exactly 2 neurons, got {}",
                    layer_sizes.last().unwrap()
                ),
            });
        }
        if let Some(&bad) = layer_sizes.iter().find(|&&n| n == 0 || n > MAX_LAYER_SIZE) {
            return Err(NetworkError::InvalidSpec {
                reason: format!("layer size {bad} out of range 1..={MAX_LAYER_SIZE}"),
            });
        }
        Ok(NetworkSpec { layer_sizes, symmetric, symmetric_depth })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn symmetric_depth(&self) -> SymmetricDepth {
        self.symmetric_depth
    }

    /// True if weight layer `layer` (0 = input-to-first-hidden) carries the
    /// antisymmetry constraint.
    pub fn layer_constrained(&self, layer: usize) -> bool {
        self.symmetric
            && (layer == 0 || self.symmetric_depth == SymmetricDepth::AllLayers)
    }

    /// Number of genes a chromosome for this spec must carry. Constrained
    /// neurons store only `floor(fan_in / 2)` free weights.
    pub fn genome_length(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let per_neuron = if self.layer_constrained(l) { w[0] / 2 } else { w[0] };
                w[1] * per_neuron
            })
            .sum()
    }
}

/// A flat gene vector paired with the spec that interprets it.
#[derive(Clone, Debug, PartialEq)]
pub struct Chromosome {
    genes: Vec<f64>,
    spec: NetworkSpec,
}

impl Chromosome {
    pub fn new(genes: Vec<f64>, spec: NetworkSpec) -> Result<Self, NetworkError> {
        let expected = spec.genome_length();
        if genes.len() != expected {
            return Err(NetworkError::GenomeLength { expected, actual: genes.len() });
        }
        if let Some(index) = genes.iter().position(|g| !g.is_finite()) {
            return Err(NetworkError::NonFiniteGene { index });
        }
        Ok(Chromosome { genes, spec })
    }

    pub fn genes(&self) -> &[f64] {
        &self.genes
    }

    pub fn into_genes(self) -> Vec<f64> {
        self.genes
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    /// Expands the genome into dense weight rows, materializing the mirrored
    /// halves of constrained rows.
    pub fn decode(&self) -> WeightMatrices {
        let sizes = self.spec.layer_sizes();
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        let mut cursor = 0;
        for (l, w) in sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let constrained = self.spec.layer_constrained(l);
            let mut rows = vec![0.0f64; fan_in * fan_out];
            for row in rows.chunks_exact_mut(fan_in) {
                if constrained {
                    for k in 0..fan_in / 2 {
                        let g = self.genes[cursor];
                        cursor += 1;
                        row[k] = g;
                        row[fan_in - 1 - k] = -g;
                    }
                    // odd fan-in: center weight stays exactly 0
                } else {
                    row.copy_from_slice(&self.genes[cursor..cursor + fan_in]);
                    cursor += fan_in;
                }
            }
            layers.push(LayerWeights { fan_in, fan_out, constrained, rows });
        }
        debug_assert_eq!(cursor, self.genes.len());
        WeightMatrices { layers }
    }

    /// Two-line text form: header (layer sizes + symmetry mode), then the
    /// genes space-separated with shortest round-trip float formatting.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for n in self.spec.layer_sizes() {
            write!(out, "{n} ").unwrap();
        }
        out.push_str(match (self.spec.symmetric, self.spec.symmetric_depth) {
            (false, _) => "unconstrained",
            (true, SymmetricDepth::AllLayers) => "symmetric all_layers",
            (true, SymmetricDepth::FirstLayerOnly) => "symmetric first_layer_only",
        });
        out.push('\n');
        let mut first = true;
        for g in &self.genes {
            if !first {
                out.push(' ');
            }
            write!(out, "{g}").unwrap();
            first = false;
        }
        out.push('\n');
        out
    }

    pub fn from_file_str(s: &str) -> Result<Self, NetworkError> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "missing header line"))?;
        let gene_line = lines.next().ok_or_else(|| parse_err(2, "missing gene line"))?;
        for (i, extra) in lines.enumerate() {
            if !extra.trim().is_empty() {
                return Err(parse_err(3 + i, "unexpected trailing content"));
            }
        }

        let tokens: Vec<&str> = header.split_whitespace().collect();
        let mut sizes = Vec::new();
        let mut rest = &tokens[..];
        while let Some((tok, tail)) = rest.split_first() {
            match tok.parse::<usize>() {
                Ok(n) => {
                    sizes.push(n);
                    rest = tail;
                }
                Err(_) => break,
            }
        }
        let (symmetric, depth) = match rest {
            ["unconstrained"] => (false, SymmetricDepth::AllLayers),
            ["symmetric", "all_layers"] => (true, SymmetricDepth::AllLayers),
            ["symmetric", "first_layer_only"] => (true, SymmetricDepth::FirstLayerOnly),
            _ => {
                return Err(parse_err(
                    1,
                    format!("expected symmetry mode after layer sizes, got {rest:?}"),
                ))
            }
        };
        let spec = NetworkSpec::new(sizes, symmetric, depth)
            .map_err(|e| parse_err(1, e.to_string()))?;

        let mut genes = Vec::new();
        for tok in gene_line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(2, format!("bad gene value `{tok}`")))?;
            genes.push(v);
        }
        Chromosome::new(genes, spec)
    }

    pub fn load(path: &Path) -> Result<Self, NetworkError> {
        Self::from_file_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), NetworkError> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

struct LayerWeights {
    fan_in: usize,
    fan_out: usize,
    constrained: bool,
    /// `fan_out` rows of `fan_in` weights, row-major. Constrained rows
    /// satisfy `rows[n-1-k] == -rows[k]` with an exactly-zero center.
    rows: Vec<f64>,
}

/// Decoded dense weights, ready for the forward pass.
pub struct WeightMatrices {
    layers: Vec<LayerWeights>,
}

impl WeightMatrices {
    pub fn input_size(&self) -> usize {
        self.layers[0].fan_in
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Weight row of `neuron` in weight layer `layer` (test/debug access).
    pub fn row(&self, layer: usize, neuron: usize) -> &[f64] {
        let l = &self.layers[layer];
        &l.rows[neuron * l.fan_in..(neuron + 1) * l.fan_in]
    }

    /// Reads the free genes back out of the dense rows; inverse of
    /// [`Chromosome::decode`].
    pub fn encode(&self) -> Vec<f64> {
        let mut genes = Vec::new();
        for layer in &self.layers {
            for row in layer.rows.chunks_exact(layer.fan_in) {
                if layer.constrained {
                    genes.extend_from_slice(&row[..layer.fan_in / 2]);
                } else {
                    genes.extend_from_slice(row);
                }
            }
        }
        genes
    }

    /// Runs the network. The activation is applied at every hidden and
    /// output neuron; returns `(out_left, out_right)`.
    ///
    /// Constrained layers accumulate in the paired form
    /// `sum_k w_k * (x_k - x_{n-1-k})`, which is bitwise-negated when the
    /// input slice is reversed.
    pub fn forward(&self, input: &[f64]) -> Result<(f64, f64), NetworkError> {
        let expected = self.input_size();
        if input.len() != expected {
            return Err(NetworkError::InputDimension { expected, actual: input.len() });
        }
        let mut cur = input.to_vec();
        let mut next: Vec<f64> = Vec::new();
        for layer in &self.layers {
            debug_assert_eq!(layer.rows.len(), layer.fan_in * layer.fan_out);
            next.clear();
            for row in layer.rows.chunks_exact(layer.fan_in) {
                let pre = if layer.constrained {
                    let mut acc = 0.0;
                    for k in 0..layer.fan_in / 2 {
                        acc += row[k] * (cur[k] - cur[layer.fan_in - 1 - k]);
                    }
                    acc
                } else {
                    let mut acc = 0.0;
                    for (w, x) in row.iter().zip(&cur) {
                        acc += w * x;
                    }
                    acc
                };
                next.push(activation(pre));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        debug_assert_eq!(cur.len(), 2);
        Ok((cur[0], cur[1]))
    }
}

/// Zero-centered sigmoid `1/(1+e^-x) - 0.5`, computed as `0.5*tanh(x/2)`
/// (the same function exactly). The tanh form inherits the platform's
/// bitwise-odd tanh, so `activation(-x) == -activation(x)` holds exactly;
/// range is `(-0.5, 0.5)` with `activation(0) == 0`.
pub fn activation(x: f64) -> f64 {
    0.5 * (0.5 * x).tanh()
}

/// Maps the two network outputs to a steering command in radians:
/// `(out_left - out_right)` scaled by `max_steer / 0.5` and clamped to
/// `[-max_steer, max_steer]`.
pub fn steering_command(out_left: f64, out_right: f64, max_steer: f64) -> f64 {
    ((out_left - out_right) * (max_steer / 0.5)).clamp(-max_steer, max_steer)
}
