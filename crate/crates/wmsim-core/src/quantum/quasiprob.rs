//! Joint outcome quasiprobability tables for sequential measurements.
//!
//! At g = 0 each step acts as the Jordan-product superoperator of the step
//! observable's spectral projectors and outcomes live on the eigenvalues.
//! At finite g a step decomposes the state in the observable's eigenbasis,
//! damps the (i, j) coherence by exp(−g²(λ_i − λ_j)²/8) and bins it at the
//! pair midpoint (λ_i + λ_j)/2. The final step always bins on eigenvalues:
//! the closing trace kills cross terms exactly, so nothing is lost.

use super::{DensityMatrix, Hamiltonian, MeasurementPlan, Observable, QuantumError};
use crate::linalg::{mat_mul, ComplexMatrix, C64};

/// Outcome values equal within this are merged into a single bin.
const OUTCOME_MERGE_TOL: f64 = 1e-9;

/// Union outcome axes plus both tables' weights scattered onto them.
pub type AlignedPair = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>);

/// Discrete signed joint distribution over outcome tuples.
#[derive(Debug, Clone)]
pub struct Quasiprobability {
    /// Per-step sorted outcome values.
    axes: Vec<Vec<f64>>,
    /// Dense row-major table over outcome tuples.
    weights: Vec<f64>,
}

impl Quasiprobability {
    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_steps(&self) -> usize {
        self.axes.len()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    #[inline]
    fn flat_index(&self, tuple: &[usize]) -> usize {
        let mut idx = 0;
        for (k, &i) in tuple.iter().enumerate() {
            idx = idx * self.axes[k].len() + i;
        }
        idx
    }

    pub fn weight(&self, tuple: &[usize]) -> f64 {
        assert_eq!(tuple.len(), self.axes.len());
        self.weights[self.flat_index(tuple)]
    }

    /// Mixed moment ⟨Π_k a_{step_k}⟩ for the listed steps (repeats allowed).
    pub fn moment(&self, steps: &[usize]) -> f64 {
        let dims: Vec<usize> = self.axes.iter().map(Vec::len).collect();
        let mut total = 0.0;
        let mut tuple = vec![0usize; dims.len()];
        for (flat, w) in self.weights.iter().enumerate() {
            let mut rem = flat;
            for k in (0..dims.len()).rev() {
                tuple[k] = rem % dims[k];
                rem /= dims[k];
            }
            let mut prod = *w;
            for &s in steps {
                prod *= self.axes[s][tuple[s]];
            }
            total += prod;
        }
        total
    }

    /// Scatter two tables onto the union of their outcome grids so they can
    /// be compared bin by bin; missing bins carry zero weight. Axis values
    /// are matched within 1e-9. Returns (union axes, self weights, other
    /// weights), both dense row-major over the union grid.
    pub fn aligned_with(&self, other: &Self) -> Result<AlignedPair, QuantumError> {
        if self.axes.len() != other.axes.len() {
            return Err(QuantumError::AxisMismatch);
        }
        let n = self.axes.len();
        let mut unions: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut map_a: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut map_b: Vec<Vec<usize>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut vals: Vec<f64> = self.axes[k]
                .iter()
                .chain(other.axes[k].iter())
                .copied()
                .collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup_by(|a, b| (*a - *b).abs() <= OUTCOME_MERGE_TOL);
            let locate = |v: f64| -> Result<usize, QuantumError> {
                vals.iter()
                    .position(|&u| (u - v).abs() <= OUTCOME_MERGE_TOL)
                    .ok_or(QuantumError::AxisMismatch)
            };
            map_a.push(self.axes[k].iter().map(|&v| locate(v)).collect::<Result<_, _>>()?);
            map_b.push(other.axes[k].iter().map(|&v| locate(v)).collect::<Result<_, _>>()?);
            unions.push(vals);
        }

        let udims: Vec<usize> = unions.iter().map(Vec::len).collect();
        let total: usize = udims.iter().product();
        let mut dense_a = vec![0.0f64; total.max(1)];
        let mut dense_b = vec![0.0f64; total.max(1)];
        let scatter = |table: &Quasiprobability, map: &[Vec<usize>], dense: &mut [f64]| {
            let dims: Vec<usize> = table.axes.iter().map(Vec::len).collect();
            let mut tuple = vec![0usize; dims.len()];
            for (flat, w) in table.weights.iter().enumerate() {
                let mut rem = flat;
                for k in (0..dims.len()).rev() {
                    tuple[k] = rem % dims[k];
                    rem /= dims[k];
                }
                let mut uidx = 0;
                for k in 0..dims.len() {
                    uidx = uidx * udims[k] + map[k][tuple[k]];
                }
                dense[uidx] += w;
            }
        };
        scatter(self, &map_a, &mut dense_a);
        scatter(other, &map_b, &mut dense_b);
        Ok((unions, dense_a, dense_b))
    }

    /// Largest |w_self − w_other| over the union of outcome grids; missing
    /// bins count as zero weight.
    pub fn aligned_max_diff(&self, other: &Self) -> Result<f64, QuantumError> {
        let (_, a, b) = self.aligned_with(other)?;
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    /// Reverse the step order of the table (used to align a reversed
    /// experiment's axes with the forward plan).
    fn reversed_axes(&self) -> Self {
        let n = self.axes.len();
        let dims: Vec<usize> = self.axes.iter().map(Vec::len).collect();
        let new_axes: Vec<Vec<f64>> = self.axes.iter().rev().cloned().collect();
        let new_dims: Vec<usize> = dims.iter().rev().copied().collect();
        let mut new_weights = vec![0.0f64; self.weights.len()];
        let mut tuple = vec![0usize; n];
        for (flat, w) in self.weights.iter().enumerate() {
            let mut rem = flat;
            for k in (0..n).rev() {
                tuple[k] = rem % dims[k];
                rem /= dims[k];
            }
            let mut idx = 0;
            for k in 0..n {
                idx = idx * new_dims[k] + tuple[n - 1 - k];
            }
            new_weights[idx] = *w;
        }
        Quasiprobability {
            axes: new_axes,
            weights: new_weights,
        }
    }
}

/// One branch of a measurement step: outcome value plus the projector
/// sandwich Σ c·P_i X P_j that routes weight into it.
struct Branch {
    outcome: f64,
    terms: Vec<(usize, usize, f64)>,
}

struct StepCtx {
    u_gap: ComplexMatrix,
    projectors: Vec<ComplexMatrix>,
    branches: Vec<Branch>,
}

fn build_branches(eigs: &[f64], g: f64, is_last: bool) -> Vec<Branch> {
    let n = eigs.len();
    if is_last {
        // Closing trace kills cross terms; bin directly on eigenvalues.
        return eigs
            .iter()
            .enumerate()
            .map(|(i, &lambda)| Branch {
                outcome: lambda,
                terms: vec![(i, i, 1.0)],
            })
            .collect();
    }
    if g == 0.0 {
        // Jordan product (P_i X + X P_i)/2 expanded in projector sandwiches.
        return eigs
            .iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let mut terms = vec![(i, i, 1.0)];
                for j in 0..n {
                    if j != i {
                        terms.push((i, j, 0.5));
                        terms.push((j, i, 0.5));
                    }
                }
                Branch {
                    outcome: lambda,
                    terms,
                }
            })
            .collect();
    }
    // Finite strength: damp coherences and bin at pair midpoints.
    let mut pairs: Vec<(f64, usize, usize, f64)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mid = 0.5 * (eigs[i] + eigs[j]);
            let gap = eigs[i] - eigs[j];
            let damp = (-g * g * gap * gap / 8.0).exp();
            pairs.push((mid, i, j, damp));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut branches: Vec<Branch> = Vec::new();
    for (mid, i, j, damp) in pairs {
        match branches.last_mut() {
            Some(b) if (mid - b.outcome).abs() <= OUTCOME_MERGE_TOL => {
                b.terms.push((i, j, damp));
            }
            _ => branches.push(Branch {
                outcome: mid,
                terms: vec![(i, j, damp)],
            }),
        }
    }
    branches
}

fn evolve_state(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let ux = mat_mul(u, x).expect("matching dims");
    mat_mul(&ux, &u.adjoint()).expect("matching dims")
}

fn walk(ctxs: &[StepCtx], x: &ComplexMatrix, prefix: usize, out: &mut [f64]) {
    let ctx = &ctxs[0];
    let evolved = evolve_state(&ctx.u_gap, x);
    let base = prefix * ctx.branches.len();
    if ctxs.len() == 1 {
        for (b, branch) in ctx.branches.iter().enumerate() {
            let mut w = 0.0;
            for &(i, _, c) in &branch.terms {
                w += c * mat_mul(&ctx.projectors[i], &evolved)
                    .expect("matching dims")
                    .trace()
                    .re;
            }
            out[base + b] = w;
        }
        return;
    }
    for (b, branch) in ctx.branches.iter().enumerate() {
        let mut xb = ComplexMatrix::zeros(evolved.dim());
        for &(i, j, c) in &branch.terms {
            let px = mat_mul(&ctx.projectors[i], &evolved).expect("matching dims");
            let pxp = mat_mul(&px, &ctx.projectors[j]).expect("matching dims");
            xb = xb.add(&pxp.scale(C64::new(c, 0.0)));
        }
        walk(&ctxs[1..], &xb, base + b, out);
    }
}

/// Quasiprobability with an individual coupling strength per step. Strength 0
/// encodes the weak limit for that step; the paper's "the last measurement
/// does not need to be weak" shows up here as the final strength being
/// irrelevant to the table.
pub fn quasiprob_with_strengths(
    steps: &[(f64, Observable)],
    strengths: &[f64],
    rho: &DensityMatrix,
    h: &Hamiltonian,
) -> Result<Quasiprobability, QuantumError> {
    // Route validation through the plan constructor.
    let plan = MeasurementPlan::new(steps.to_vec(), 0.0)?;
    if strengths.len() != steps.len() {
        return Err(QuantumError::StepOutOfRange(strengths.len(), steps.len()));
    }
    if let Some(&g) = strengths.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(QuantumError::BadStrength(g));
    }

    let n = plan.len();
    let mut ctxs = Vec::with_capacity(n);
    let mut prev_t = 0.0;
    for (k, (t, a)) in steps.iter().enumerate() {
        let spec = a.spectrum();
        ctxs.push(StepCtx {
            u_gap: h.propagator(t - prev_t),
            projectors: spec.projectors.clone(),
            branches: build_branches(&spec.eigenvalues, strengths[k], k == n - 1),
        });
        prev_t = *t;
    }

    let axes: Vec<Vec<f64>> = ctxs
        .iter()
        .map(|c| c.branches.iter().map(|b| b.outcome).collect())
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut weights = vec![0.0f64; total];
    walk(&ctxs, rho.matrix(), 0, &mut weights);

    let q = Quasiprobability { axes, weights };
    debug_assert!((q.sum() - 1.0).abs() < 1e-9, "table sum {}", q.sum());
    Ok(q)
}

/// Joint quasiprobability of the plan's outcome sequence (Born rule for a
/// single step; possibly negative for incompatible sequences).
pub fn quasiprob(
    plan: &MeasurementPlan,
    rho: &DensityMatrix,
    h: &Hamiltonian,
) -> Result<Quasiprobability, QuantumError> {
    let strengths = vec![plan.g(); plan.len()];
    quasiprob_with_strengths(plan.steps(), &strengths, rho, h)
}

/// Integrate out one measurement.
pub fn marginalize(
    q: &Quasiprobability,
    step_index: usize,
) -> Result<Quasiprobability, QuantumError> {
    let n = q.axes.len();
    if step_index >= n {
        return Err(QuantumError::StepOutOfRange(step_index, n));
    }
    let dims: Vec<usize> = q.axes.iter().map(Vec::len).collect();
    let new_axes: Vec<Vec<f64>> = q
        .axes
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != step_index)
        .map(|(_, a)| a.clone())
        .collect();
    let new_total: usize = new_axes.iter().map(Vec::len).product::<usize>().max(1);
    let mut new_weights = vec![0.0f64; new_total];
    let mut tuple = vec![0usize; n];
    for (flat, w) in q.weights.iter().enumerate() {
        let mut rem = flat;
        for k in (0..n).rev() {
            tuple[k] = rem % dims[k];
            rem /= dims[k];
        }
        let mut idx = 0;
        for k in 0..n {
            if k != step_index {
                idx = idx * dims[k] + tuple[k];
            }
        }
        new_weights[idx] += w;
    }
    Ok(Quasiprobability {
        axes: new_axes,
        weights: new_weights,
    })
}

/// First mixed moment of the weak-limit quasiprobability, computed directly
/// as Tr ρ {A₁(t₁),{…,{A_{n−1}(t_{n−1}), A_n(t_n)}…}}/2^{n−1}.
pub fn weak_moment(
    plan: &MeasurementPlan,
    rho: &DensityMatrix,
    h: &Hamiltonian,
) -> Result<f64, QuantumError> {
    let evolved: Vec<Observable> = plan
        .steps()
        .iter()
        .map(|(t, a)| super::heisenberg_evolve(a, h, *t))
        .collect::<Result<_, _>>()?;
    let mut nested = evolved.last().unwrap().matrix().clone();
    for a in evolved[..evolved.len() - 1].iter().rev() {
        nested = crate::linalg::jordan(a.matrix(), &nested)?;
    }
    Ok(mat_mul(rho.matrix(), &nested)?.trace().re)
}

/// Quasiprobability of the time-reversed experiment: conjugated state,
/// Hamiltonian and observables, reversed order, negated times. The output
/// axes are re-ordered to align with the forward plan for direct comparison.
pub fn time_reversed_quasiprob(
    plan: &MeasurementPlan,
    rho: &DensityMatrix,
    h: &Hamiltonian,
) -> Result<Quasiprobability, QuantumError> {
    let rev_steps: Vec<(f64, Observable)> = plan
        .steps()
        .iter()
        .rev()
        .map(|(t, a)| Ok((-*t, a.time_reversed()?)))
        .collect::<Result<_, QuantumError>>()?;
    let rev_plan = MeasurementPlan::new(rev_steps, plan.g())?;
    let q = quasiprob(&rev_plan, &rho.time_reversed()?, &h.time_reversed()?)?;
    Ok(q.reversed_axes())
}
