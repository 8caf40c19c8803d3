//! Binary Hopfield network: Hebbian training, asynchronous energy-descent
//! recall, and stability/capacity analysis.
//!
//! Neurons are spins in {+1, -1}. Couplings are stored as exact integers
//! (accumulated outer products, unnormalized), so energies and local fields
//! are integer-valued whenever the thresholds are zero and all descent
//! comparisons are exact. The sign of a local field is invariant under
//! positive scaling, so the unnormalized weights drive the same dynamics as
//! the 1/N-normalized form; the normalization only matters for the crosstalk
//! statistics in [`capacity`].

pub mod capacity;
pub mod io;
pub mod ising;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors from pattern construction and network operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HopfieldError {
    #[error("pattern length {actual} does not match network size {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("cannot train on an empty pattern set")]
    EmptyPatternSet,
    #[error("network needs at least 2 neurons, got {0}")]
    TooFewNeurons(usize),
    #[error("neuron index {index} out of range for {len} neurons")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("spin value {0} is not +1 or -1")]
    InvalidSpin(i8),
    #[error("pattern must not be empty")]
    EmptyPattern,
    #[error("threshold vector length {actual} does not match network size {expected}")]
    ThresholdLength { expected: usize, actual: usize },
    #[error("weight matrix is not symmetric with zero diagonal")]
    MalformedWeights,
}

/// A fixed-length vector of spins, each exactly +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPattern {
    spins: Vec<i8>,
}

impl BinaryPattern {
    /// Validates that every element is +1 or -1 and that the pattern is
    /// non-empty.
    pub fn new(spins: Vec<i8>) -> Result<Self, HopfieldError> {
        if spins.is_empty() {
            return Err(HopfieldError::EmptyPattern);
        }
        for &s in &spins {
            if s != 1 && s != -1 {
                return Err(HopfieldError::InvalidSpin(s));
            }
        }
        Ok(Self { spins })
    }

    /// Builds a pattern from booleans, `true` mapping to +1.
    pub fn from_signs<I: IntoIterator<Item = bool>>(signs: I) -> Self {
        let spins: Vec<i8> = signs.into_iter().map(|b| if b { 1 } else { -1 }).collect();
        assert!(!spins.is_empty(), "pattern must not be empty");
        Self { spins }
    }

    /// Uniform random pattern of length `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_signs((0..n).map(|_| rng.random::<bool>()))
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn get(&self, i: usize) -> i8 {
        self.spins[i]
    }

    /// Copy of this pattern with spin `i` negated.
    pub fn flipped(&self, i: usize) -> Self {
        let mut spins = self.spins.clone();
        spins[i] = -spins[i];
        Self { spins }
    }

    /// Globally negated copy.
    pub fn negated(&self) -> Self {
        Self {
            spins: self.spins.iter().map(|&s| -s).collect(),
        }
    }

    /// Number of positions where the two patterns disagree.
    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.len(), other.len(), "hamming of unequal lengths");
        self.spins
            .iter()
            .zip(&other.spins)
            .filter(|(a, b)| a != b)
            .count()
    }

    fn check_len(&self, n: usize) -> Result<(), HopfieldError> {
        if self.len() != n {
            return Err(HopfieldError::DimensionMismatch {
                expected: n,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

/// Symmetric integer coupling matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl WeightMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0; n * n],
        }
    }

    /// Builds a matrix from row-major entries, rejecting asymmetry or a
    /// nonzero diagonal.
    pub fn from_entries(n: usize, entries: Vec<i64>) -> Result<Self, HopfieldError> {
        if entries.len() != n * n {
            return Err(HopfieldError::MalformedWeights);
        }
        let m = Self { n, entries };
        if !m.is_symmetric_zero_diagonal() {
            return Err(HopfieldError::MalformedWeights);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn is_symmetric_zero_diagonal(&self) -> bool {
        for i in 0..self.n {
            if self.get(i, i) != 0 {
                return false;
            }
            for j in (i + 1)..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Adds the outer product of `pattern` with itself, keeping the diagonal
    /// at zero.
    fn accumulate_outer(&mut self, pattern: &BinaryPattern) {
        let n = self.n;
        for i in 0..n {
            let si = i64::from(pattern.get(i));
            let row = &mut self.entries[i * n..(i + 1) * n];
            for (j, w) in row.iter_mut().enumerate() {
                *w += si * i64::from(pattern.get(j));
            }
        }
        for i in 0..n {
            self.entries[i * n + i] = 0;
        }
    }
}

/// Counts integer multiply-add work done by instrumented recall paths.
///
/// Every accumulated product counts as two operations (one multiply, one
/// add), so a full field evaluation over `n` couplings records `2n`.
#[derive(Debug, Default, Clone, Copy)]
pub struct OpCounter {
    ops: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_dot(&mut self, len: usize) {
        self.ops += 2 * len as u64;
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }
}

/// A trained Hopfield network. Immutable after construction; recall calls
/// own their state copy and PRNG stream, so sharing across threads is safe.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfieldNetwork {
    weights: WeightMatrix,
    thresholds: Vec<f64>,
    stored_count: usize,
}

/// Default cap on full sweeps before `recall_sweep` gives up.
pub const DEFAULT_SWEEP_CAP: usize = 100;

impl HopfieldNetwork {
    /// Hebbian training: couplings are the summed outer products of the
    /// stored patterns, diagonal forced to zero, thresholds all zero.
    pub fn train_hebbian(patterns: &[BinaryPattern], n: usize) -> Result<Self, HopfieldError> {
        if patterns.is_empty() {
            return Err(HopfieldError::EmptyPatternSet);
        }
        if n < 2 {
            return Err(HopfieldError::TooFewNeurons(n));
        }
        for p in patterns {
            p.check_len(n)?;
        }
        let mut weights = WeightMatrix::zeros(n);
        for p in patterns {
            weights.accumulate_outer(p);
        }
        Ok(Self {
            weights,
            thresholds: vec![0.0; n],
            stored_count: patterns.len(),
        })
    }

    /// Assembles a network from pre-built parts, validating the invariants.
    pub fn from_parts(
        weights: WeightMatrix,
        thresholds: Vec<f64>,
        stored_count: usize,
    ) -> Result<Self, HopfieldError> {
        if thresholds.len() != weights.n() {
            return Err(HopfieldError::ThresholdLength {
                expected: weights.n(),
                actual: thresholds.len(),
            });
        }
        if !weights.is_symmetric_zero_diagonal() {
            return Err(HopfieldError::MalformedWeights);
        }
        Ok(Self {
            weights,
            thresholds,
            stored_count,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn stored_count(&self) -> usize {
        self.stored_count
    }

    /// Energy of a state: minus the coupling sum over unordered pairs minus
    /// the threshold term. Integer-exact whenever thresholds are zero.
    pub fn energy(&self, state: &BinaryPattern) -> Result<f64, HopfieldError> {
        state.check_len(self.n())?;
        let pair = self.pair_energy_int(state.spins());
        let mut field_term = 0.0;
        for (tau, &s) in self.thresholds.iter().zip(state.spins()) {
            field_term += tau * f64::from(s);
        }
        Ok(-(pair as f64) - field_term)
    }

    /// Coupling sum over unordered pairs, in exact integer arithmetic.
    fn pair_energy_int(&self, spins: &[i8]) -> i128 {
        let n = self.n();
        let mut total: i128 = 0;
        for i in 0..n {
            let si = i64::from(spins[i]);
            let row = self.weights.row(i);
            let mut acc: i64 = 0;
            for j in (i + 1)..n {
                acc += row[j] * i64::from(spins[j]);
            }
            total += i128::from(si * acc);
        }
        total
    }

    fn field_int(&self, spins: &[i8], i: usize) -> i64 {
        // w_ii = 0, so summing over all j equals the j != i sum.
        self.weights
            .row(i)
            .iter()
            .zip(spins)
            .map(|(&w, &s)| w * i64::from(s))
            .sum()
    }

    /// Net input to neuron `i` under the unnormalized weights. Callers that
    /// need the 1/N-scaled form divide by `n`; the sign is unchanged.
    pub fn local_field(&self, state: &BinaryPattern, i: usize) -> Result<f64, HopfieldError> {
        state.check_len(self.n())?;
        self.check_index(i)?;
        Ok(self.field_int(state.spins(), i) as f64)
    }

    fn check_index(&self, i: usize) -> Result<(), HopfieldError> {
        if i >= self.n() {
            return Err(HopfieldError::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        Ok(())
    }

    // Update rule: +1 on a strictly positive margin, -1 otherwise. A net
    // input exactly equal to the threshold falls to -1.
    fn decide(field: i64, tau: f64) -> i8 {
        if field as f64 > tau {
            1
        } else {
            -1
        }
    }

    /// One asynchronous update of spin `i`; all other spins are unchanged.
    /// With zero thresholds the energy never increases.
    pub fn update_step(
        &self,
        state: &BinaryPattern,
        i: usize,
    ) -> Result<BinaryPattern, HopfieldError> {
        state.check_len(self.n())?;
        self.check_index(i)?;
        let mut spins = state.spins().to_vec();
        spins[i] = Self::decide(self.field_int(&spins, i), self.thresholds[i]);
        Ok(BinaryPattern { spins })
    }

    /// Asynchronous recall: `iterations` single-spin updates in seeded random
    /// order. Indices are drawn as back-to-back random permutations of
    /// 0..n-1, so any run of n consecutive updates visits every neuron while
    /// each draw stays uniformly distributed. Pure function of
    /// (weights, thresholds, initial, iterations, seed).
    pub fn recall(
        &self,
        initial: &BinaryPattern,
        iterations: usize,
        seed: u64,
    ) -> Result<BinaryPattern, HopfieldError> {
        let mut counter = OpCounter::new();
        self.recall_counted(initial, iterations, seed, &mut counter)
    }

    /// [`recall`](Self::recall) with an operation counter attached.
    pub fn recall_counted(
        &self,
        initial: &BinaryPattern,
        iterations: usize,
        seed: u64,
        counter: &mut OpCounter,
    ) -> Result<BinaryPattern, HopfieldError> {
        let n = self.n();
        initial.check_len(n)?;
        let mut spins = initial.spins().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut pos = n;
        for _ in 0..iterations {
            if pos == n {
                order.shuffle(&mut rng);
                pos = 0;
            }
            let i = order[pos];
            pos += 1;
            let field = self.field_int(&spins, i);
            counter.record_dot(n);
            spins[i] = Self::decide(field, self.thresholds[i]);
        }
        Ok(BinaryPattern { spins })
    }

    /// Deterministic full-sweep recall: updates indices 0..n-1 in order,
    /// repeating until a sweep changes nothing or the cap is hit. Returns
    /// the final state and whether a fixed point was reached.
    pub fn recall_sweep(
        &self,
        initial: &BinaryPattern,
    ) -> Result<(BinaryPattern, bool), HopfieldError> {
        let mut counter = OpCounter::new();
        self.recall_sweep_counted(initial, DEFAULT_SWEEP_CAP, &mut counter)
    }

    /// [`recall_sweep`](Self::recall_sweep) with an explicit sweep cap and
    /// operation counter.
    pub fn recall_sweep_counted(
        &self,
        initial: &BinaryPattern,
        max_sweeps: usize,
        counter: &mut OpCounter,
    ) -> Result<(BinaryPattern, bool), HopfieldError> {
        let n = self.n();
        initial.check_len(n)?;
        let mut spins = initial.spins().to_vec();
        for _ in 0..max_sweeps {
            let mut changed = false;
            for i in 0..n {
                let field = self.field_int(&spins, i);
                counter.record_dot(n);
                let next = Self::decide(field, self.thresholds[i]);
                if next != spins[i] {
                    spins[i] = next;
                    changed = true;
                }
            }
            if !changed {
                return Ok((BinaryPattern { spins }, true));
            }
        }
        Ok((BinaryPattern { spins }, false))
    }

    /// Fraction of neurons that do not strictly align with their own local
    /// field (`spin * field <= 0`; exact zeros count as unstable).
    pub fn check_stability(&self, pattern: &BinaryPattern) -> Result<f64, HopfieldError> {
        pattern.check_len(self.n())?;
        let spins = pattern.spins();
        let unstable = (0..self.n())
            .filter(|&i| i64::from(spins[i]) * self.field_int(spins, i) <= 0)
            .count();
        Ok(unstable as f64 / self.n() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(spins: &[i8]) -> BinaryPattern {
        BinaryPattern::new(spins.to_vec()).unwrap()
    }

    #[test]
    fn rejects_invalid_spins_and_empty_patterns() {
        assert_eq!(
            BinaryPattern::new(vec![1, 0, -1]),
            Err(HopfieldError::InvalidSpin(0))
        );
        assert_eq!(BinaryPattern::new(vec![]), Err(HopfieldError::EmptyPattern));
    }

    #[test]
    fn hebbian_single_pattern_outer_product() {
        let v = pattern(&[1, -1, 1]);
        let net = HopfieldNetwork::train_hebbian(&[v], 3).unwrap();
        let expected = [0, -1, 1, -1, 0, -1, 1, -1, 0];
        assert_eq!(net.weights().entries(), &expected);
        assert_eq!(net.stored_count(), 1);
        assert!(net.thresholds().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn hebbian_duplicate_pattern_doubles_entries() {
        let v = pattern(&[1, -1, 1, 1]);
        let once = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 4).unwrap();
        let twice = HopfieldNetwork::train_hebbian(&[v.clone(), v], 4).unwrap();
        for (a, b) in once
            .weights()
            .entries()
            .iter()
            .zip(twice.weights().entries())
        {
            assert_eq!(2 * a, *b);
        }
    }

    #[test]
    fn hebbian_orthogonal_pair_matches_outer_product_sum() {
        let a = pattern(&[1, 1, -1, -1]);
        let b = pattern(&[1, -1, 1, -1]);
        let net = HopfieldNetwork::train_hebbian(&[a.clone(), b.clone()], 4).unwrap();
        // Brute-force oracle: sum both outer products, zero the diagonal.
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j {
                    0
                } else {
                    i64::from(a.get(i)) * i64::from(a.get(j))
                        + i64::from(b.get(i)) * i64::from(b.get(j))
                };
                assert_eq!(net.weights().get(i, j), expect, "({i},{j})");
            }
        }
        assert_eq!(net.weights().get(0, 1), 0);
    }

    #[test]
    fn hebbian_rejects_bad_inputs() {
        let v = pattern(&[1, -1, 1]);
        assert_eq!(
            HopfieldNetwork::train_hebbian(&[], 3).unwrap_err(),
            HopfieldError::EmptyPatternSet
        );
        assert!(matches!(
            HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 4).unwrap_err(),
            HopfieldError::DimensionMismatch { .. }
        ));
        assert_eq!(
            HopfieldNetwork::train_hebbian(&[pattern(&[1])], 1).unwrap_err(),
            HopfieldError::TooFewNeurons(1)
        );
    }

    #[test]
    fn energy_of_stored_pattern_counts_all_pairs() {
        let v = pattern(&[1, -1, 1, -1]);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 4).unwrap();
        assert_eq!(net.energy(&v).unwrap(), -6.0);
        // Flipping one spin negates its 3 pair terms: -6 + 2*3 = 0.
        assert_eq!(net.energy(&v.flipped(2)).unwrap(), 0.0);
    }

    #[test]
    fn energy_of_zero_weights_is_zero() {
        let net = HopfieldNetwork::from_parts(WeightMatrix::zeros(5), vec![0.0; 5], 0).unwrap();
        let s = pattern(&[1, 1, -1, 1, -1]);
        assert_eq!(net.energy(&s).unwrap(), 0.0);
    }

    #[test]
    fn energy_is_invariant_under_global_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pats: Vec<_> = (0..3)
                .map(|_| BinaryPattern::random(16, &mut rng))
                .collect();
            let net = HopfieldNetwork::train_hebbian(&pats, 16).unwrap();
            let s = BinaryPattern::random(16, &mut rng);
            assert_eq!(net.energy(&s).unwrap(), net.energy(&s.negated()).unwrap());
        }
    }

    #[test]
    fn local_field_of_stored_pattern() {
        let v = pattern(&[1, -1, 1, -1, 1]);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 5).unwrap();
        for i in 0..5 {
            assert_eq!(net.local_field(&v, i).unwrap(), 4.0 * f64::from(v.get(i)));
        }
    }

    #[test]
    fn local_field_matches_brute_force_on_two_patterns() {
        let a = pattern(&[1, 1, -1, -1]);
        let b = pattern(&[1, -1, 1, -1]);
        let net = HopfieldNetwork::train_hebbian(&[a.clone(), b], 4).unwrap();
        for i in 0..4 {
            let oracle: i64 = (0..4)
                .filter(|&j| j != i)
                .map(|j| net.weights().get(i, j) * i64::from(a.get(j)))
                .sum();
            assert_eq!(net.local_field(&a, i).unwrap(), oracle as f64);
        }
    }

    #[test]
    fn local_field_rejects_out_of_range_index() {
        let v = pattern(&[1, -1]);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 2).unwrap();
        assert!(matches!(
            net.local_field(&v, 2).unwrap_err(),
            HopfieldError::IndexOutOfRange { index: 2, len: 2 }
        ));
    }

    #[test]
    fn update_step_follows_field_sign_and_tie_rule() {
        let net = HopfieldNetwork::from_parts(WeightMatrix::zeros(3), vec![0.0; 3], 0).unwrap();
        // Zero weights: field is exactly 0, the tie falls to -1.
        let s = pattern(&[1, 1, 1]);
        assert_eq!(net.update_step(&s, 0).unwrap().get(0), -1);

        let v = pattern(&[1, -1, 1, -1, 1, 1]);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 6).unwrap();
        // Stored pattern is a fixed point.
        for i in 0..6 {
            assert_eq!(net.update_step(&v, i).unwrap(), v);
        }
    }

    #[test]
    fn update_step_never_raises_energy_with_zero_thresholds() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let n = rng.random_range(2..24);
            let p = rng.random_range(1..5);
            let pats: Vec<_> = (0..p).map(|_| BinaryPattern::random(n, &mut rng)).collect();
            let net = HopfieldNetwork::train_hebbian(&pats, n).unwrap();
            let s = BinaryPattern::random(n, &mut rng);
            let i = rng.random_range(0..n);
            let before = net.energy(&s).unwrap();
            let after = net.energy(&net.update_step(&s, i).unwrap()).unwrap();
            assert!(after <= before, "energy rose: {before} -> {after}");
        }
    }

    #[test]
    fn recall_zero_iterations_is_identity() {
        let v = pattern(&[1, -1, 1, -1]);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 4).unwrap();
        let s = pattern(&[-1, -1, 1, 1]);
        assert_eq!(net.recall(&s, 0, 3).unwrap(), s);
    }

    #[test]
    fn recall_recovers_stored_pattern_from_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = BinaryPattern::random(100, &mut rng);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 100).unwrap();
        let mut corrupted = v.clone();
        for i in [3, 17, 42, 76, 99] {
            corrupted = corrupted.flipped(i);
        }
        let out = net.recall(&corrupted, 2000, 5).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn recall_complement_is_also_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = BinaryPattern::random(64, &mut rng);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 64).unwrap();
        let neg = v.negated();
        assert_eq!(net.recall(&neg, 1000, 1).unwrap(), neg);
        for i in 0..64 {
            assert_eq!(net.update_step(&neg, i).unwrap(), neg);
        }
    }

    #[test]
    fn recall_is_deterministic_in_the_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pats: Vec<_> = (0..4)
            .map(|_| BinaryPattern::random(50, &mut rng))
            .collect();
        let net = HopfieldNetwork::train_hebbian(&pats, 50).unwrap();
        let s = BinaryPattern::random(50, &mut rng);
        let a = net.recall(&s, 137, 77).unwrap();
        let b = net.recall(&s, 137, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn recall_visits_every_neuron_once_iterations_reach_n() {
        // A zero-weight network forces every visited spin to -1, so the
        // output exposes exactly which indices were touched.
        let n = 97;
        let net = HopfieldNetwork::from_parts(WeightMatrix::zeros(n), vec![0.0; n], 0).unwrap();
        let all_up = BinaryPattern::from_signs((0..n).map(|_| true));
        let out = net.recall(&all_up, n, 21).unwrap();
        assert!(out.spins().iter().all(|&s| s == -1));
    }

    #[test]
    fn recall_sweep_converges_and_reports_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let v = BinaryPattern::random(60, &mut rng);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 60).unwrap();
        let (out, converged) = net.recall_sweep(&v).unwrap();
        assert!(converged);
        assert_eq!(out, v);

        let (out, converged) = net.recall_sweep(&v.flipped(31)).unwrap();
        assert!(converged);
        assert_eq!(out, v);
    }

    #[test]
    fn recall_sweep_zero_weights_settles_all_down() {
        let net = HopfieldNetwork::from_parts(WeightMatrix::zeros(8), vec![0.0; 8], 0).unwrap();
        let s = pattern(&[1, -1, 1, 1, -1, 1, -1, 1]);
        let (out, converged) = net.recall_sweep(&s).unwrap();
        assert!(converged);
        assert!(out.spins().iter().all(|&x| x == -1));
    }

    #[test]
    fn stability_of_stored_and_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let v = BinaryPattern::random(40, &mut rng);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 40).unwrap();
        assert_eq!(net.check_stability(&v).unwrap(), 0.0);

        let zero = HopfieldNetwork::from_parts(WeightMatrix::zeros(40), vec![0.0; 40], 0).unwrap();
        assert_eq!(zero.check_stability(&v).unwrap(), 1.0);
    }

    #[test]
    fn hebbian_training_is_additive_over_pattern_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let a: Vec<_> = (0..3)
            .map(|_| BinaryPattern::random(20, &mut rng))
            .collect();
        let b: Vec<_> = (0..4)
            .map(|_| BinaryPattern::random(20, &mut rng))
            .collect();
        let mut both = a.clone();
        both.extend(b.iter().cloned());
        let net_a = HopfieldNetwork::train_hebbian(&a, 20).unwrap();
        let net_b = HopfieldNetwork::train_hebbian(&b, 20).unwrap();
        let net_ab = HopfieldNetwork::train_hebbian(&both, 20).unwrap();
        for idx in 0..400 {
            assert_eq!(
                net_ab.weights().entries()[idx],
                net_a.weights().entries()[idx] + net_b.weights().entries()[idx]
            );
        }
    }

    #[test]
    fn weight_bound_after_training() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pats: Vec<_> = (0..7)
            .map(|_| BinaryPattern::random(12, &mut rng))
            .collect();
        let net = HopfieldNetwork::train_hebbian(&pats, 12).unwrap();
        assert!(net.weights().is_symmetric_zero_diagonal());
        assert!(net.weights().entries().iter().all(|w| w.abs() <= 7));
    }

    #[test]
    fn op_counter_tracks_sweep_and_single_updates() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let v = BinaryPattern::random(32, &mut rng);
        let net = HopfieldNetwork::train_hebbian(std::slice::from_ref(&v), 32).unwrap();

        let mut counter = OpCounter::new();
        net.recall_sweep_counted(&v, DEFAULT_SWEEP_CAP, &mut counter)
            .unwrap();
        assert_eq!(counter.ops(), 2 * 32 * 32);

        let mut counter = OpCounter::new();
        net.recall_counted(&v, 1, 9, &mut counter).unwrap();
        assert_eq!(counter.ops(), 2 * 32);
    }
}
