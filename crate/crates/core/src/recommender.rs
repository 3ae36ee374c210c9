//! Ranks candidate friends by book-profile similarity.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::BookCatalog;
use crate::dataset::{EdgeRecord, Profiles};
use crate::error::{Error, Result};
use crate::knn::euclidean_unchecked;
use crate::UserId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub candidate: UserId,
    /// `1 / (1 + distance)`, in `(0, 1]`.
    pub score: f64,
    pub distance: f64,
    pub shared_books: Vec<String>,
}

/// Undirected friendship: `u` knows `v` if either direction appears in the edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency(BTreeMap<UserId, BTreeSet<UserId>>);

impl Adjacency {
    pub fn from_edges(edges: &[EdgeRecord]) -> Self {
        let mut map: BTreeMap<UserId, BTreeSet<UserId>> = BTreeMap::new();
        for e in edges {
            map.entry(e.user).or_default().insert(e.friend);
            map.entry(e.friend).or_default().insert(e.user);
        }
        Self(map)
    }

    pub fn friends(&self, user: UserId) -> impl Iterator<Item = UserId> + '_ {
        self.0.get(&user).into_iter().flatten().copied()
    }

    pub fn are_friends(&self, a: UserId, b: UserId) -> bool {
        self.0.get(&a).is_some_and(|f| f.contains(&b))
    }

    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.0.keys().copied()
    }

    pub fn insert(&mut self, a: UserId, b: UserId) {
        self.0.entry(a).or_default().insert(b);
        self.0.entry(b).or_default().insert(a);
    }
}

/// True when `query`'s incidence vector is all zero.
pub fn cold_start_check(profiles: &Profiles, query: UserId) -> Result<bool> {
    profiles
        .get(&query)
        .map(|p| p.is_cold())
        .ok_or(Error::UnknownUser(query))
}

/// Up to `limit` candidates among the `k` profiles nearest to `query`.
///
/// Candidates are all profiled users except `query` and its friends. The
/// `k` nearest (ties by smaller id) are scored `1 / (1 + d)` and returned by
/// descending score, then ascending id. `k` larger than the candidate pool
/// takes the whole pool.
pub fn recommend(
    profiles: &Profiles,
    adjacency: &Adjacency,
    catalog: &BookCatalog,
    query: UserId,
    k: usize,
    limit: usize,
) -> Result<Vec<Recommendation>> {
    if k == 0 {
        return Err(Error::InvalidK { k, max: profiles.len() });
    }
    if limit == 0 {
        return Err(Error::InvalidLimit);
    }
    let me = profiles.get(&query).ok_or(Error::UnknownUser(query))?;

    let mut scored: Vec<(f64, UserId)> = profiles
        .values()
        .filter(|p| p.user != query && !adjacency.are_friends(query, p.user))
        .map(|p| {
            if p.incidence.len() != me.incidence.len() {
                return Err(Error::DimensionMismatch {
                    expected: me.incidence.len(),
                    found: p.incidence.len(),
                });
            }
            let a: Vec<f64> = me.incidence.iter().map(|&c| f64::from(c)).collect();
            let b: Vec<f64> = p.incidence.iter().map(|&c| f64::from(c)).collect();
            Ok((euclidean_unchecked(&a, &b), p.user))
        })
        .collect::<Result<_>>()?;

    let k = k.min(scored.len());
    if k < scored.len() {
        scored.select_nth_unstable_by(k, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.truncate(k);
    }

    let mut out: Vec<Recommendation> = scored
        .into_iter()
        .map(|(distance, candidate)| {
            let other = &profiles[&candidate];
            let shared_books = me
                .incidence
                .iter()
                .zip(&other.incidence)
                .enumerate()
                .filter(|(_, (&a, &b))| a > 0 && b > 0)
                .filter_map(|(i, _)| catalog.label(i).map(str::to_owned))
                .collect();
            Recommendation {
                candidate,
                score: 1.0 / (1.0 + distance),
                distance,
                shared_books,
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.candidate.cmp(&b.candidate)));
    out.truncate(limit);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::UserProfile;

    fn profiles(rows: &[(UserId, [u32; 3])]) -> Profiles {
        rows.iter()
            .map(|&(u, inc)| (u, UserProfile { user: u, incidence: inc.to_vec() }))
            .collect()
    }

    fn catalog() -> BookCatalog {
        BookCatalog::new(["B0", "B1", "B2"]).unwrap()
    }

    #[test]
    fn identical_profile_ranks_first_with_score_one() {
        let p = profiles(&[(1, [2, 1, 0]), (2, [0, 0, 9]), (3, [2, 1, 0]), (4, [9, 9, 9])]);
        let out = recommend(&p, &Adjacency::default(), &catalog(), 1, 3, 10).unwrap();
        assert_eq!(out[0].candidate, 3);
        assert_eq!(out[0].score, 1.0);
        assert_eq!(out[0].distance, 0.0);
        assert_eq!(out[0].shared_books, ["B0", "B1"]);
    }

    #[test]
    fn friends_and_self_excluded() {
        let p = profiles(&[(1, [1, 0, 0]), (2, [1, 0, 0])]);
        let mut adj = Adjacency::default();
        adj.insert(2, 1);
        let out = recommend(&p, &adj, &catalog(), 1, 1, 10).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn scores_follow_distance() {
        let p = profiles(&[(0, [0, 0, 0]), (1, [1, 0, 0]), (2, [0, 2, 0]), (3, [0, 0, 3])]);
        let out = recommend(&p, &Adjacency::default(), &catalog(), 0, 3, 10).unwrap();
        let got: Vec<_> = out.iter().map(|r| (r.candidate, r.score)).collect();
        assert_eq!(got, [(1, 0.5), (2, 1.0 / 3.0), (3, 0.25)]);
        assert!(out.iter().all(|r| r.shared_books.is_empty()));
    }

    #[test]
    fn k_and_limit_bound_the_result() {
        let p = profiles(&[(0, [0, 0, 0]), (1, [1, 0, 0]), (2, [0, 2, 0]), (3, [0, 0, 3])]);
        let adj = Adjacency::default();
        let out = recommend(&p, &adj, &catalog(), 0, 2, 10).unwrap();
        assert_eq!(out.iter().map(|r| r.candidate).collect::<Vec<_>>(), [1, 2]);
        let out = recommend(&p, &adj, &catalog(), 0, 3, 1).unwrap();
        assert_eq!(out.len(), 1);
        let out = recommend(&p, &adj, &catalog(), 0, 50, 50).unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn distance_ties_break_by_user_id() {
        let p = profiles(&[(5, [1, 0, 0]), (9, [0, 0, 0]), (3, [0, 0, 0]), (7, [2, 0, 0])]);
        let out = recommend(&p, &Adjacency::default(), &catalog(), 5, 2, 10).unwrap();
        assert_eq!(out.iter().map(|r| r.candidate).collect::<Vec<_>>(), [3, 7]);
    }

    #[test]
    fn errors() {
        let p = profiles(&[(1, [1, 0, 0])]);
        let adj = Adjacency::default();
        assert!(matches!(recommend(&p, &adj, &catalog(), 2, 1, 1), Err(Error::UnknownUser(2))));
        assert!(matches!(recommend(&p, &adj, &catalog(), 1, 0, 1), Err(Error::InvalidK { .. })));
        assert!(matches!(recommend(&p, &adj, &catalog(), 1, 1, 0), Err(Error::InvalidLimit)));
        assert!(recommend(&p, &adj, &catalog(), 1, 1, 1).unwrap().is_empty());
    }

    #[test]
    fn cold_start() {
        let p = profiles(&[(1, [0, 0, 0]), (2, [0, 1, 0])]);
        assert!(cold_start_check(&p, 1).unwrap());
        assert!(!cold_start_check(&p, 2).unwrap());
        assert!(matches!(cold_start_check(&p, 3), Err(Error::UnknownUser(3))));
    }

    #[test]
    fn adjacency_is_symmetric() {
        let adj = Adjacency::from_edges(&[EdgeRecord::new(1, 0), EdgeRecord::new(2, 1)]);
        assert!(adj.are_friends(0, 1));
        assert!(adj.are_friends(1, 2));
        assert!(!adj.are_friends(0, 2));
        assert_eq!(adj.friends(1).collect::<Vec<_>>(), [0, 2]);
    }
}
