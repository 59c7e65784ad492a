use grdb::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let max: i64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let k: i64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    // sequential, per-format timing
    let mut formats = Vec::new();
    for p in 1..=max {
        formats.extend(enumerate_gradings(FamilySpec::Gr25, p, 3));
    }
    eprintln!("{} formats", formats.len());
    let config = SearchConfig::new(FamilySpec::Gr25, k, max);
    let t0 = std::time::Instant::now();
    for f in &formats {
        let t = std::time::Instant::now();
        let ws = enumerate_ambient_weights(f, 3, k, 1);
        let nw = ws.len();
        let mut nhits = 0;
        for w in ws {
            let p_x = hilbert_series(f, &w);
            let p_ini = initial_series(&p_x, k).unwrap();
            let cands = candidate_singularities(&w, config.sing_class, k);
            let (baskets, _) = match_baskets(&p_x, &p_ini, &cands, &config).unwrap();
            if !baskets.is_empty() { nhits += 1; }
        }
        let dt = t.elapsed();
        if dt.as_millis() > 500 {
            eprintln!("SLOW format {:?} kv={} : {} weights, {} hits, {:?}",
                f.params, f.adjunction, nw, nhits, dt);
        }
    }
    eprintln!("total {:?}", t0.elapsed());
}
