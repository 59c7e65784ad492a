use grdb::*;
fn main() {
    let max: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(45);
    let mut c = SearchConfig::new(FamilySpec::Gr25, -1, max);
    c.jobs = 2;
    let (hits, _) = run_search(&c).unwrap();
    println!("total {}", hits.len());
    for h in &hits {
        let b: Vec<String> = h.baskets.iter().map(|bk| {
            bk.iter().map(|(s,m)| format!("{m}x{s}")).collect::<Vec<_>>().join("+")
        }).collect();
        let fl = h.flags;
        let marker = if fl.all_pass() { "    " } else { "FAIL" };
        println!("{marker} kv={} w={:?} W={:?} baskets=[{}] flags wf={} vu={} tm={} ic={}",
            h.format.adjunction,
            h.format.params, h.weights, b.join(" | "),
            fl.well_formed, fl.variable_usage, fl.tangent_monomial, fl.index_capacity);
    }
}
