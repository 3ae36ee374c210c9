//! Regenerates `data/facebook_edges.csv`.
//!
//! The graph is a small ego network: hub 0 knows users 1..=150, users are
//! grouped into blocks of 20 with dense intra-block friendships, and the
//! remaining edges link neighbouring blocks. Each friendship is recorded
//! between one and five times (`{0, 1}` exactly three times), every record
//! is written in both directions, and a final unmirrored `7,0` row brings the
//! total to 4031.
//!
//! ```text
//! cargo run -p friendrec-core --example gen_edges > crates/core/data/facebook_edges.csv
//! ```

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const USERS: u64 = 400;
const BLOCK: u64 = 20;
const HUB_REACH: u64 = 150;
const MIRRORED_RECORDS: usize = 2015;
const MAX_REPEATS: usize = 5;

fn main() -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2021);
    let mut seen = BTreeSet::new();
    let mut order: Vec<(u64, u64, usize)> = Vec::new();
    let mut total = 0;
    let mut add = |a: u64, b: u64, order: &mut Vec<(u64, u64, usize)>| {
        let key = (a.min(b), a.max(b));
        if a != b && total < MIRRORED_RECORDS && seen.insert(key) {
            let repeats = if key == (0, 1) { 3 } else { rng_repeats(key) };
            let repeats = repeats.min(MIRRORED_RECORDS - total);
            total += repeats;
            order.push((key.0, key.1, repeats));
        }
    };

    for friend in 1..=HUB_REACH {
        add(0, friend, &mut order);
    }
    for block in 0..USERS / BLOCK {
        let lo = 1 + block * BLOCK;
        for a in lo..lo + BLOCK {
            for b in a + 1..lo + BLOCK {
                if rng.random_bool(0.22) {
                    add(a, b, &mut order);
                }
            }
        }
    }
    while order.iter().map(|e| e.2).sum::<usize>() < MIRRORED_RECORDS {
        let a = rng.random_range(1..=USERS);
        let hop = rng.random_range(1..=2 * BLOCK);
        let b = if rng.random_bool(0.5) { a + hop } else { a.saturating_sub(hop) };
        if (1..=USERS).contains(&b) {
            add(a, b, &mut order);
        }
    }

    let out = std::io::stdout();
    let mut out = out.lock();
    writeln!(out, "user,friend")?;
    for &(a, b, copies) in &order {
        for _ in 0..copies {
            writeln!(out, "{b},{a}")?;
            writeln!(out, "{a},{b}")?;
        }
    }
    writeln!(out, "7,0")?;
    Ok(())
}

/// Repeat count in `1..=MAX_REPEATS`, derived from the pair so that it does
/// not consume the structural RNG stream.
fn rng_repeats(key: (u64, u64)) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(key.0 * 100_003 + key.1);
    rng.random_range(1..=MAX_REPEATS)
}
