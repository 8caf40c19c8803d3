//! Storage-capacity experiments: stability of stored patterns under
//! increasing load, and the crosstalk statistics behind the transition.
//!
//! For Hebbian weights the normalized local field at a stored pattern splits
//! into a deterministic part `(1 - 1/n) * spin` and an interference term
//! `eta` whose variance grows as `(P - 1) / n`. Stored patterns stay stable
//! while the load factor `P / n` is below roughly 0.138; above that, neurons
//! start to misalign with their own fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{BinaryPattern, HopfieldError, HopfieldNetwork};

/// Stability measurements for one (n, P) setting, aggregated over trials.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    /// Number of neurons.
    pub neuron_count: usize,
    /// Number of stored patterns per trial.
    pub pattern_count: usize,
    /// Load factor P/n.
    pub load_factor: f64,
    /// Unstable-neuron fraction for every (trial, pattern) pair.
    pub per_pattern_unstable_fraction: Vec<f64>,
    /// Empirical variance of the interference term across neurons, patterns,
    /// and trials.
    pub crosstalk_variance_empirical: f64,
    /// Predicted interference variance (P-1)/n.
    pub crosstalk_variance_predicted: f64,
    /// Union bound on the probability that any neuron of a stored pattern
    /// misaligns: n * exp(-n / (2(P-1))). Zero when P = 1.
    pub union_bound_failure_prob: f64,
}

impl StabilityReport {
    pub fn mean_unstable_fraction(&self) -> f64 {
        if self.per_pattern_unstable_fraction.is_empty() {
            return 0.0;
        }
        self.per_pattern_unstable_fraction.iter().sum::<f64>()
            / self.per_pattern_unstable_fraction.len() as f64
    }
}

/// Theoretical pattern capacity n / (2 log2 n).
pub fn theoretical_capacity(n: usize) -> f64 {
    let nf = n as f64;
    nf / (2.0 * nf.log2())
}

/// Runs the stability experiment for each pattern count in `p_values`.
///
/// Each trial draws `P` uniform random patterns, trains a Hebbian network,
/// measures the unstable-neuron fraction of every stored pattern, and
/// accumulates the empirical variance of the interference term
/// `eta_i = h_i/n - (1 - 1/n) * spin_i` over all neurons and patterns.
/// Deterministic in `seed`.
pub fn analyze_capacity(
    n: usize,
    p_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<StabilityReport>, HopfieldError> {
    if n < 16 {
        return Err(HopfieldError::TooFewNeurons(n));
    }
    assert!(trials >= 1, "at least one trial required");
    assert!(
        p_values.iter().all(|&p| p >= 1),
        "pattern counts must be positive"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(p_values.len());
    for &p in p_values {
        let mut fractions = Vec::with_capacity(trials * p);
        let mut eta_sum = 0.0f64;
        let mut eta_sq_sum = 0.0f64;
        let mut eta_count = 0u64;
        for _ in 0..trials {
            let patterns: Vec<BinaryPattern> =
                (0..p).map(|_| BinaryPattern::random(n, &mut rng)).collect();
            let net = HopfieldNetwork::train_hebbian(&patterns, n)?;
            let det = 1.0 - 1.0 / n as f64;
            for pattern in &patterns {
                fractions.push(net.check_stability(pattern)?);
                for i in 0..n {
                    let h = net.local_field(pattern, i)? / n as f64;
                    let eta = h - det * f64::from(pattern.get(i));
                    eta_sum += eta;
                    eta_sq_sum += eta * eta;
                    eta_count += 1;
                }
            }
        }
        let mean = eta_sum / eta_count as f64;
        let variance = eta_sq_sum / eta_count as f64 - mean * mean;
        let union_bound = if p == 1 {
            0.0
        } else {
            n as f64 * (-(n as f64) / (2.0 * (p as f64 - 1.0))).exp()
        };
        reports.push(StabilityReport {
            neuron_count: n,
            pattern_count: p,
            load_factor: p as f64 / n as f64,
            per_pattern_unstable_fraction: fractions,
            crosstalk_variance_empirical: variance,
            crosstalk_variance_predicted: (p as f64 - 1.0) / n as f64,
            union_bound_failure_prob: union_bound,
        });
    }
    Ok(reports)
}
