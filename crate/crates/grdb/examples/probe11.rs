use grdb::*;
fn main() {
    let a: Vec<String> = std::env::args().collect();
    let codim: usize = a[1].parse().unwrap();
    let k: i64 = a[2].parse().unwrap();
    let max: i64 = a[3].parse().unwrap();
    let mut c = SearchConfig::new(FamilySpec::Ci { codim }, k, max);
    c.jobs = 2;
    let t = std::time::Instant::now();
    let (hits, report) = run_search(&c).unwrap();
    println!("ci{codim} k={k} <={max}: {} records ({} all-pass), k_last={:?}, {:?}",
        hits.len(), report.all_flags_pass, report.k_last, t.elapsed());
}
