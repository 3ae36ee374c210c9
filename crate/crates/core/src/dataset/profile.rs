use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::BookCatalog;
use crate::error::{Error, Result};
use crate::UserId;

use super::EdgeRecord;

/// Per-user book incidence counts, indexed by catalog position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user: UserId,
    pub incidence: Vec<u32>,
}

pub type Profiles = BTreeMap<UserId, UserProfile>;

impl UserProfile {
    pub fn empty(user: UserId, books: usize) -> Self {
        Self {
            user,
            incidence: vec![0; books],
        }
    }

    pub fn is_cold(&self) -> bool {
        self.incidence.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u64 {
        self.incidence.iter().map(|&c| u64::from(c)).sum()
    }

    /// Labels of books with a positive count, in catalog order.
    pub fn books<'a>(&'a self, catalog: &'a BookCatalog) -> impl Iterator<Item = &'a str> + 'a {
        self.incidence
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .filter_map(|(i, _)| catalog.label(i))
    }
}

/// One profile per distinct `user` field, counting the books on that user's edges.
pub fn build_profiles(edges: &[EdgeRecord], catalog: &BookCatalog) -> Result<Profiles> {
    let mut profiles = Profiles::new();
    for (index, edge) in edges.iter().enumerate() {
        let book = edge.book.as_deref().ok_or(Error::Unannotated { index })?;
        let position = catalog.position(book)?;
        profiles
            .entry(edge.user)
            .or_insert_with(|| UserProfile::empty(edge.user, catalog.len()))
            .incidence[position] += 1;
    }
    Ok(profiles)
}

/// `{"<user>": [counts...], ...}`
pub fn profiles_to_json(profiles: &Profiles) -> Result<String> {
    let map: BTreeMap<UserId, &[u32]> = profiles
        .iter()
        .map(|(&u, p)| (u, p.incidence.as_slice()))
        .collect();
    Ok(serde_json::to_string_pretty(&map)?)
}

pub fn profiles_from_json(text: &str, catalog: &BookCatalog) -> Result<Profiles> {
    let map: BTreeMap<UserId, Vec<u32>> = serde_json::from_str(text)?;
    map.into_iter()
        .map(|(user, incidence)| {
            if incidence.len() != catalog.len() {
                return Err(Error::DimensionMismatch {
                    expected: catalog.len(),
                    found: incidence.len(),
                });
            }
            Ok((user, UserProfile { user, incidence }))
        })
        .collect()
}
