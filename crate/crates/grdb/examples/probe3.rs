use grdb::*;
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let max: i64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let k: i64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let fam = match args.get(3).map(|s| s.as_str()).unwrap_or("gr25") {
        "ci1" => FamilySpec::Ci { codim: 1 },
        "ci2" => FamilySpec::Ci { codim: 2 },
        "ogr" => FamilySpec::Ogr510,
        _ => FamilySpec::Gr25,
    };
    let mut c = SearchConfig::new(fam, k, max);
    c.jobs = 1;
    let t = std::time::Instant::now();
    let (hits, report) = run_search(&c).unwrap();
    println!("{} records ({} all-pass) k_last={:?} pairs={} formats={} in {:?}",
        hits.len(), report.all_flags_pass, report.k_last,
        report.weight_lists_scanned, report.formats_scanned, t.elapsed());
}
