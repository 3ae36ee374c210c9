//! Edge-list ingestion, book annotation, label encoding, profiles and splits.

mod annotate;
mod io;
mod profile;
mod split;

pub use annotate::assign_books;
pub use io::{load_annotated, load_edges, write_annotated, write_edges};
pub use profile::{build_profiles, profiles_from_json, profiles_to_json, Profiles, UserProfile};
pub use split::{split, split_with_validation, SplitDataset};

use crate::catalog::BookCatalog;
use crate::error::{Error, Result};
use crate::knn::FeatureVector;
use crate::{Label, UserId};

/// One directed `(user, friend)` row, optionally carrying a book label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeRecord {
    pub user: UserId,
    pub friend: UserId,
    pub book: Option<String>,
}

impl EdgeRecord {
    pub fn new(user: UserId, friend: UserId) -> Self {
        Self {
            user,
            friend,
            book: None,
        }
    }

    pub fn with_book(user: UserId, friend: UserId, book: impl Into<String>) -> Self {
        Self {
            user,
            friend,
            book: Some(book.into()),
        }
    }
}

/// An encoded edge: `[friend, book-code]` with the user as class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub features: FeatureVector,
    pub label: Label,
}

/// Turns annotated edges into classifier rows.
///
/// The friend id is used as-is and the book through its catalog code; the
/// user becomes the label.
pub fn encode_books(edges: &[EdgeRecord], catalog: &BookCatalog) -> Result<Vec<LabeledRow>> {
    edges
        .iter()
        .enumerate()
        .map(|(index, edge)| {
            let book = edge.book.as_deref().ok_or(Error::Unannotated { index })?;
            let code = catalog.code(book)?;
            Ok(LabeledRow {
                features: FeatureVector::new(vec![edge.friend as f64, f64::from(code)])?,
                label: edge.user,
            })
        })
        .collect()
}
