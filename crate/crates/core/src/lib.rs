//! Friend recommendation from book-annotated social edge lists.
//!
//! The pipeline has two paths that share one Euclidean metric:
//!
//! ```text
//! raw edge CSV ──load_edges──► EdgeRecord ──assign_books──► annotated edges
//!     │                                                         │
//!     │        encode_books ◄───────────────────────────────────┤
//!     │             │                                           │
//!     │      split (70/30) ──► KnnModel ──► sweep ──► EvaluationReport
//!     │                                                         │
//!     └── Adjacency ◄─────────── build_profiles ◄───────────────┘
//!              │                      │
//!              └────── recommend ◄────┘
//! ```
//!
//! The edge classifier (features `[friend, book-code]`, label `user`) is used
//! to measure accuracy over a range of `k`. Ranking uses per-user book
//! incidence vectors and scores candidates by `1 / (1 + distance)`.
//!
//! ```
//! use friendrec_core::{assign_books, encode_books, load_edges, split, sweep, BookCatalog};
//!
//! let csv = "1,0\n0,1\n2,0\n0,2\n3,0\n0,3\n2,1\n1,2\n3,1\n1,3\n";
//! let catalog = BookCatalog::default();
//! let edges = assign_books(&load_edges(csv.as_bytes()).unwrap(), &catalog, 42).unwrap();
//! let rows = encode_books(&edges, &catalog).unwrap();
//! let parts = split(&rows, 0.7, 42).unwrap();
//! let report = sweep(&parts, 1, 3).unwrap();
//! assert_eq!(report.entries.len(), 3);
//! ```

pub mod bundled;
pub mod catalog;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod knn;
pub mod persist;
pub mod recommender;

pub use catalog::BookCatalog;
pub use dataset::{
    assign_books, build_profiles, encode_books, load_annotated, load_edges, profiles_to_json,
    profiles_from_json, split, split_with_validation, write_annotated, write_edges, EdgeRecord, LabeledRow,
    Profiles, SplitDataset, UserProfile,
};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, default_k_range, evaluate_k, select_k, sweep, EvaluationEntry, EvaluationReport,
    KOutcome,
};
pub use knn::{
    classify, euclidean, nearest, sqrt_k_heuristic, FeatureVector, KnnModel, Metric, Neighbor,
    DEFAULT_K,
};
pub use recommender::{cold_start_check, recommend, Adjacency, Recommendation};

/// Identifier of a user in the social graph.
pub type UserId = u64;

/// Class label used by the edge classifier (the owning user's id).
pub type Label = u64;
