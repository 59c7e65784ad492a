use grdb::*;
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lo: i64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let hi: i64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(28);
    for p in lo..=hi {
        let mut total = 0u64;
        let mut formats = 0u64;
        for f in enumerate_gradings(FamilySpec::Ogr510, p, 3) {
            formats += 1;
            total += enumerate_ambient_weights(&f, 3, 1, 1).len() as u64;
        }
        println!("param {p}: {formats} formats, {total} weight lists");
    }
}
