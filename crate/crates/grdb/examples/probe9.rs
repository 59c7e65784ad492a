use grdb::*;
use std::sync::atomic::Ordering;
fn main() {
    let max: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(24);
    let mut c = SearchConfig::new(FamilySpec::Ogr510, 1, max);
    c.jobs = 1;
    let t = std::time::Instant::now();
    let (hits, report) = run_search(&c).unwrap();
    println!("{} records, pairs={} in {:?}", hits.len(), report.weight_lists_scanned, t.elapsed());
    let v: Vec<usize> = (0..6).map(|i| search::EX_STATS[i].load(Ordering::Relaxed)).collect();
    println!("calls={} sign_reject={} interval_reject={} dfs_calls={} cand_sum={} merged_sum={}",
        v[0], v[1], v[2], v[3], v[4], v[5]);
}
