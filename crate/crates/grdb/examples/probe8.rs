use grdb::*;
use std::sync::atomic::Ordering;
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let max: i64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(24);
    let fam = match args.get(2).map(|s| s.as_str()).unwrap_or("ogr") {
        "gr25" => FamilySpec::Gr25,
        _ => FamilySpec::Ogr510,
    };
    let mut c = SearchConfig::new(fam, 1, max);
    c.jobs = 1;
    let t = std::time::Instant::now();
    let (hits, report) = run_search(&c).unwrap();
    println!("{} records, pairs={} in {:?}", hits.len(), report.weight_lists_scanned, t.elapsed());
    let names = ["enumerate", "quick_res", "candidates", "matcher", "other"];
    for (i, n) in names.iter().enumerate() {
        println!("  {n}: {:.2} s", search::STAGE_NS[i].load(Ordering::Relaxed) as f64 / 1e9);
    }
}
