//! Mixed-moment estimation with additive-Gaussian detector-noise removal.
//!
//! Readings q_k = a_k + ν_k carry independent zero-mean Gaussian noise ν_k.
//! Each mixed moment of the underlying a-distribution up to order three has
//! an unbiased per-sample estimator obtained by subtracting the known noise
//! moments (odd noise moments vanish, the third noise cumulant is zero):
//!
//!   ⟨a_k⟩        ← q_k
//!   ⟨a_k²⟩       ← q_k² − σ²
//!   ⟨a_k³⟩       ← q_k³ − 3σ² q_k
//!   ⟨a_k a_l⟩    ← q_k q_l
//!   ⟨a_k² a_l⟩   ← (q_k² − σ²) q_l
//!   ⟨a_k a_l a_m⟩← q_k q_l q_m
//!
//! The same code serves the quantum sampler and the classical ensembles;
//! the two callers only differ in the noise variance they pass in.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("moment order {0} not supported (max 3)")]
    OrderTooHigh(usize),
    #[error("step index {0} out of range for {1} steps")]
    StepOutOfRange(usize, usize),
}

/// Raw detector readings in a-units, one row of `n_steps` readings per
/// sample/trajectory, tagged with the coupling and seed that produced them.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    outcomes: Vec<f64>,
    n_steps: usize,
    g: f64,
    seed: u64,
}

impl SampleBatch {
    pub fn from_parts(outcomes: Vec<f64>, n_steps: usize, g: f64, seed: u64) -> Self {
        assert!(n_steps > 0 && outcomes.len().is_multiple_of(n_steps));
        SampleBatch {
            outcomes,
            n_steps,
            g,
            seed,
        }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.outcomes.chunks_exact(self.n_steps)
    }

    pub fn n_samples(&self) -> usize {
        self.outcomes.len() / self.n_steps
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One estimated mixed moment ⟨a_{k1}···a_{km}⟩ with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    /// Step indices, sorted, with repetition for powers (e.g. [0, 0, 2]).
    pub indices: Vec<usize>,
    pub value: f64,
    pub std_error: f64,
}

/// All mixed moments up to order three of a sample batch.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub n_samples: usize,
    pub entries: Vec<MomentEstimate>,
}

impl MomentTable {
    pub fn get(&self, indices: &[usize]) -> Option<&MomentEstimate> {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.iter().find(|e| e.indices == key)
    }
}

/// Enumerate sorted index multisets of sizes 1..=3 over `n_steps` steps.
fn multisets(n_steps: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..n_steps {
        out.push(vec![i]);
    }
    for i in 0..n_steps {
        for j in i..n_steps {
            out.push(vec![i, j]);
        }
    }
    for i in 0..n_steps {
        for j in i..n_steps {
            for k in j..n_steps {
                out.push(vec![i, j, k]);
            }
        }
    }
    out
}

/// Per-sample noise-corrected product for one index multiset.
#[inline]
fn corrected_product(row: &[f64], indices: &[usize], noise_var: f64) -> f64 {
    match indices {
        [k] => row[*k],
        [k, l] if k == l => row[*k] * row[*k] - noise_var,
        [k, l] => row[*k] * row[*l],
        [k, l, m] if k == l && l == m => {
            let q = row[*k];
            q * q * q - 3.0 * noise_var * q
        }
        [k, l, m] if k == l => (row[*k] * row[*k] - noise_var) * row[*m],
        [k, l, m] if l == m => (row[*l] * row[*l] - noise_var) * row[*k],
        [k, l, m] => row[*k] * row[*l] * row[*m],
        _ => unreachable!("multisets are sized 1..=3"),
    }
}

/// Estimate all mixed moments up to order three of the noise-free outcome
/// distribution from noisy readings (row-major samples × steps).
pub fn deconvolved_moments(
    outcomes: &[f64],
    n_steps: usize,
    noise_var: f64,
) -> Result<MomentTable, MomentError> {
    assert!(n_steps > 0 && outcomes.len().is_multiple_of(n_steps));
    let n = outcomes.len() / n_steps;
    if n < 2 {
        return Err(MomentError::TooFewSamples(n));
    }

    let sets = multisets(n_steps);
    let mut sums = vec![0.0f64; sets.len()];
    let mut sq_sums = vec![0.0f64; sets.len()];
    for row in outcomes.chunks_exact(n_steps) {
        for (s, set) in sets.iter().enumerate() {
            let y = corrected_product(row, set, noise_var);
            sums[s] += y;
            sq_sums[s] += y * y;
        }
    }

    let nf = n as f64;
    let entries = sets
        .into_iter()
        .enumerate()
        .map(|(s, indices)| {
            let mean = sums[s] / nf;
            let var = (sq_sums[s] / nf - mean * mean).max(0.0);
            MomentEstimate {
                indices,
                value: mean,
                std_error: (var / (nf - 1.0)).sqrt(),
            }
        })
        .collect();

    Ok(MomentTable {
        n_samples: n,
        entries,
    })
}
