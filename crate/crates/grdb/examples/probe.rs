use grdb::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("t1");
    match which {
        "t1" => {
            let mut c = SearchConfig::new(FamilySpec::Gr25, 1, 40);
            c.jobs = 2;
            let t = std::time::Instant::now();
            let (hits, report) = run_search(&c).unwrap();
            println!("gr25 k=1 <=40: {} records ({} all-pass), k_last={:?}, {:?}",
                hits.len(), report.all_flags_pass, report.k_last, t.elapsed());
            for h in &hits {
                if !h.flags.all_pass() {
                    println!("  FLAG FAIL: {:?} {:?} {:?}", h.format.params, h.weights, h.flags);
                }
            }
        }
        "t2" => {
            let mut c = SearchConfig::new(FamilySpec::Ogr510, 1, 40);
            c.jobs = 2;
            let t = std::time::Instant::now();
            let (hits, report) = run_search(&c).unwrap();
            println!("ogr510 k=1 <=40: {} records ({} all-pass), k_last={:?}, {:?}",
                hits.len(), report.all_flags_pass, report.k_last, t.elapsed());
            for h in &hits {
                println!("  {:?} W={:?} baskets={}", h.format.params, h.weights, h.baskets.len());
            }
        }
        "t95" => {
            let mut c = SearchConfig::new(FamilySpec::Ci { codim: 1 }, -1, 90);
            c.jobs = 2;
            let t = std::time::Instant::now();
            let (hits, report) = run_search(&c).unwrap();
            println!("ci1 k=-1 <=90: {} records ({} all-pass), k_last={:?}, {:?}",
                hits.len(), report.all_flags_pass, report.k_last, t.elapsed());
        }
        "t23" => {
            let mut c = SearchConfig::new(FamilySpec::Ci { codim: 1 }, 1, 85);
            c.jobs = 2;
            let t = std::time::Instant::now();
            let (hits, report) = run_search(&c).unwrap();
            println!("ci1 k=1 <=85: {} records ({} all-pass), k_last={:?}, {:?}",
                hits.len(), report.all_flags_pass, report.k_last, t.elapsed());
        }
        "t69" => {
            let mut c = SearchConfig::new(FamilySpec::Gr25, -1, 70);
            c.jobs = 2;
            let t = std::time::Instant::now();
            let (hits, report) = run_search(&c).unwrap();
            println!("gr25 k=-1 <=70: {} records ({} all-pass), k_last={:?}, {:?}",
                hits.len(), report.all_flags_pass, report.k_last, t.elapsed());
        }
        "hi" => {
            let mut c = SearchConfig::new(FamilySpec::Ci { codim: 2 }, 2, 53);
            c.min_weight = 5;
            c.jobs = 2;
            let t = std::time::Instant::now();
            let (hits, report) = run_search(&c).unwrap();
            println!("ci2 k=2 minw=5 <=53: {} records, k_last={:?}, {:?}",
                hits.len(), report.k_last, t.elapsed());
            for h in &hits {
                let b: Vec<String> = h.baskets[0].iter().map(|(s,m)| format!("{m}*{s}")).collect();
                println!("  {:?} W={:?} basket={:?} K3={}", h.format.params, h.weights, b, h.invariants[0].k3);
            }
        }
        _ => eprintln!("unknown probe"),
    }
}
