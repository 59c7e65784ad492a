use grdb::*;
use std::sync::atomic::Ordering;
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let max: i64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(28);
    let mut c = SearchConfig::new(FamilySpec::Gr25, 1, max);
    c.jobs = 1;
    let t = std::time::Instant::now();
    let (hits, report) = run_search(&c).unwrap();
    println!("{} records, pairs={} in {:?}", hits.len(), report.weight_lists_scanned, t.elapsed());
    println!("quick: {} runs, {:.2} s", 0,
        0.0 / 1e9);
    println!("full : {} runs, {:.2} s", 0,
        0.0 / 1e9);
}
