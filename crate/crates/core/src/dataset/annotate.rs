use std::collections::HashMap;

use rand::seq::SliceRandom;

use crate::catalog::BookCatalog;
use crate::error::{Error, Result};
use crate::UserId;

use super::EdgeRecord;

/// RNG stream reserved for book assignment.
pub(crate) const BOOK_STREAM: u64 = 0;

/// Annotates every edge with a book from `catalog`.
///
/// Edges are grouped into slots: the `i`-th occurrence of `(u, v)` and the
/// `i`-th occurrence of `(v, u)` share one slot, so mirrored records get the
/// same book while repeated pairs can still get different ones. Slots are
/// numbered in order of first appearance, the slot ids are permuted with a
/// Fisher-Yates shuffle driven by `ChaCha8Rng::seed_from_u64(seed)` (stream
/// 0), and slot `s` receives `catalog[perm[s] % catalog.len()]`.
pub fn assign_books(edges: &[EdgeRecord], catalog: &BookCatalog, seed: u64) -> Result<Vec<EdgeRecord>> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut occurrences: HashMap<(UserId, UserId), usize> = HashMap::new();
    let mut slot_of_key: HashMap<(UserId, UserId, usize), usize> = HashMap::new();
    let slots: Vec<usize> = edges
        .iter()
        .map(|e| {
            let seen = occurrences.entry((e.user, e.friend)).or_insert(0);
            let ordinal = *seen;
            *seen += 1;
            let key = (e.user.min(e.friend), e.user.max(e.friend), ordinal);
            let next = slot_of_key.len();
            *slot_of_key.entry(key).or_insert(next)
        })
        .collect();

    let mut perm: Vec<usize> = (0..slot_of_key.len()).collect();
    perm.shuffle(&mut super::split::seeded_rng(seed, BOOK_STREAM));

    Ok(edges
        .iter()
        .zip(slots)
        .map(|(e, slot)| {
            let label = catalog.labels()[perm[slot] % catalog.len()].clone();
            EdgeRecord::with_book(e.user, e.friend, label)
        })
        .collect())
}
