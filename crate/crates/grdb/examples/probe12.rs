use grdb::*;
fn main() {
    let a: Vec<String> = std::env::args().collect();
    let codim: usize = a[1].parse().unwrap();
    let k: i64 = a[2].parse().unwrap();
    let max: i64 = a[3].parse().unwrap();
    let mut c = SearchConfig::new(FamilySpec::Ci { codim }, k, max);
    c.jobs = 2;
    let (hits, _) = run_search(&c).unwrap();
    for h in &hits {
        let b: Vec<String> = h.baskets.iter().map(|bk| {
            bk.iter().map(|(s,m)| format!("{m}x{s}")).collect::<Vec<_>>().join("+")
        }).collect();
        let fl = h.flags;
        let marker = if fl.all_pass() { "  ok" } else { "FAIL" };
        println!("{marker} d={:?} W={:?} B=[{}]", h.format.equation_degrees, h.weights, b.join(" | "));
    }
}
