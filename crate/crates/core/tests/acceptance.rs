use std::io::Write;
use std::time::{Duration, Instant};

use tranche_core::verify::*;
use tranche_core::Result;

struct Criterion {
    name: &'static str,
    /// Wall-clock budget, when the criterion states one.
    budget: Option<Duration>,
    run: fn(&VerifyOptions) -> Result<Vec<Check>>,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { name: "hausdorff_oracle", budget: Some(Duration::from_secs(10)), run: |o| Ok(hausdorff_oracle(o)) },
    Criterion { name: "metric_identities", budget: None, run: metric_identities },
    Criterion { name: "a_n_convergence", budget: None, run: |_| a_n_convergence() },
    Criterion { name: "tranche_gap_law", budget: None, run: |_| tranche_gap_law() },
    Criterion { name: "fiber_self_similarity", budget: None, run: |_| fiber_self_similarity() },
    Criterion { name: "depth_construction", budget: Some(Duration::from_secs(120)), run: depth_conditions },
    Criterion { name: "approximation_dichotomy", budget: None, run: approximation_dichotomy },
    Criterion { name: "symbolic_suite", budget: None, run: |_| symbolic_suite() },
    Criterion { name: "dynamics", budget: Some(Duration::from_secs(30)), run: |_| dynamics_suite() },
];

#[test]
fn acceptance() {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let t = Instant::now();
        let rows = (c.run)(&opts);
        let took = t.elapsed();
        let (ok, detail) = match &rows {
            Ok(rows) => {
                let bad: Vec<String> =
                    rows.iter().filter(|r| !r.passed()).map(|r| format!("{} {:.3e} > {:.3e}", r.condition, r.residual, r.tolerance)).collect();
                let slow = c.budget.is_some_and(|b| took > b);
                let mut d = format!("{}/{} rows", rows.len() - bad.len(), rows.len());
                if !bad.is_empty() {
                    d += &format!("; failing: {}", bad.join(", "));
                }
                if slow {
                    d += &format!("; over budget {:?}", c.budget.unwrap());
                }
                (bad.is_empty() && !slow, d)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        // straight to stdout so the lines survive the test harness capture
        let line = format!("{} {} ({detail}, {:.1} s)\n", if ok { "PASS" } else { "FAIL" }, c.name, took.as_secs_f64());
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        if !ok {
            failed.push(c.name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
