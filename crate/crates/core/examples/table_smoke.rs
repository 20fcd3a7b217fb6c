use retrodict::axioms::{build_table, canonical_strategies, InstanceSuite};

fn main() {
    let suite = InstanceSuite::default();
    let strategies = canonical_strategies();
    let refs: Vec<(&str, retrodict::Strategy)> =
        strategies.iter().map(|(k, s)| (*k, s.clone())).collect();
    let t0 = std::time::Instant::now();
    let report = build_table(&refs, &suite).unwrap();
    println!("{}", report.render_text());
    println!("elapsed: {:?}", t0.elapsed());
    for c in &report.cells {
        if c.matches == Some(false) {
            println!(
                "MISMATCH {} {} holds={} expected={:?} dev={:.3e}",
                c.strategy, c.axiom.label(), c.holds, c.expected, c.deviation
            );
        }
    }
    for o in &report.observed {
        println!(
            "observed {} {}: holds={} dev={:.3e}",
            o.strategy, o.axiom.label(), o.holds_within_tol, o.deviation
        );
    }
}
