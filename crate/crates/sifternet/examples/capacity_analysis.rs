//! Stability of stored patterns as the load factor crosses the transition
//! near 0.138: unstable-neuron fractions and crosstalk variance against the
//! (P-1)/n prediction.
//!
//! ```bash
//! cargo run --release --example capacity_analysis
//! ```

use sifternet::hopfield::capacity::{analyze_capacity, theoretical_capacity};

fn main() {
    let n = 500;
    let p_values = [10, 25, 50, 70, 100, 150];
    let trials = 5;
    println!(
        "n = {n}, trials = {trials}, theoretical capacity n/(2 log2 n) = {:.1}\n",
        theoretical_capacity(n)
    );
    println!(
        "{:>5} {:>7} {:>16} {:>14} {:>14} {:>12}",
        "P", "alpha", "unstable_frac", "var_empirical", "var_predicted", "union_bound"
    );
    let reports = analyze_capacity(n, &p_values, trials, 99).expect("analysis runs");
    for report in reports {
        println!(
            "{:>5} {:>7.3} {:>16.6} {:>14.6} {:>14.6} {:>12.3e}",
            report.pattern_count,
            report.load_factor,
            report.mean_unstable_fraction(),
            report.crosstalk_variance_empirical,
            report.crosstalk_variance_predicted,
            report.union_bound_failure_prob,
        );
    }
    println!("\npatterns destabilize as alpha = P/n passes ~0.138");
}
