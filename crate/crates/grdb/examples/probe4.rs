use grdb::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let max: i64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(28);
    let phase: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut formats = Vec::new();
    for p in 1..=max {
        formats.extend(enumerate_gradings(FamilySpec::Gr25, p, 3));
    }
    let config = SearchConfig::new(FamilySpec::Gr25, 1, max);
    let t0 = Instant::now();
    let mut pairs = 0u64;
    let mut sum = 0i64;
    for f in &formats {
        for w in enumerate_ambient_weights(f, 3, 1, 1) {
            pairs += 1;
            if phase >= 1 {
                // expansions only
                let p_x = hilbert_series(f, &w);
                let p_ini = initial_series(&p_x, 1).unwrap();
                let a = p_x.expand(9);
                let b = p_ini.expand(9);
                sum += (a.coeff(9) - b.coeff(9)).bits() as i64;
            }
            if phase >= 2 {
                let c = candidate_singularities(&w, SingClass::Terminal, 1);
                sum += c.len() as i64;
            }
        }
    }
    println!("phase {phase}: {pairs} pairs in {:?} (checksum {sum})", t0.elapsed());
}
