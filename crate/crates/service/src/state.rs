//! Application state: immutable snapshots swapped in by a single writer.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use friendrec_core::{
    assign_books, build_profiles, bundled, encode_books, load_annotated, load_edges,
    persist::write_atomic, profiles_from_json, profiles_to_json, split, write_annotated,
    Adjacency, BookCatalog, EdgeRecord, EvaluationReport, KnnModel, Profiles, SplitDataset,
};
use serde::{Deserialize, Serialize};

use crate::{Config, ServiceError};

/// Train fraction used by `/api/train` and `/api/evaluation`.
pub const SPLIT_RATIO: f64 = 0.7;

const META_FILE: &str = "meta.json";
const EDGES_FILE: &str = "edges.csv";
const PROFILES_FILE: &str = "profiles.json";
const MODEL_FILE: &str = "model.json";
const REPORT_FILE: &str = "report.json";

/// One immutable version of everything the API serves.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub version: u64,
    pub seed: u64,
    pub catalog: Arc<BookCatalog>,
    pub edges: Arc<Vec<EdgeRecord>>,
    pub profiles: Arc<Profiles>,
    pub adjacency: Arc<Adjacency>,
    pub model: Option<Arc<KnnModel>>,
    pub last_report: Option<Arc<EvaluationReport>>,
}

impl Snapshot {
    /// Encodes the current edges and splits them with the stored seed.
    pub fn split(&self) -> friendrec_core::Result<SplitDataset> {
        let rows = encode_books(&self.edges, &self.catalog)?;
        split(&rows, SPLIT_RATIO, self.seed)
    }

    pub fn train_len(&self) -> usize {
        (SPLIT_RATIO * self.edges.len() as f64).floor() as usize
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    seed: u64,
    version: u64,
    catalog: BookCatalog,
}

/// Flat-file persistence under the data directory.
#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn is_initialized(&self) -> bool {
        self.path(EDGES_FILE).is_file() && self.path(META_FILE).is_file()
    }

    fn load(&self) -> Result<Snapshot, ServiceError> {
        let meta: Meta = serde_json::from_str(&std::fs::read_to_string(self.path(META_FILE))?)
            .map_err(friendrec_core::Error::from)?;
        let edges = load_annotated(std::fs::File::open(self.path(EDGES_FILE))?, &meta.catalog)?;
        let profiles = match std::fs::read_to_string(self.path(PROFILES_FILE)) {
            Ok(text) => profiles_from_json(&text, &meta.catalog)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => build_profiles(&edges, &meta.catalog)?,
            Err(e) => return Err(e.into()),
        };
        let model = match self.path(MODEL_FILE) {
            p if p.is_file() => Some(Arc::new(KnnModel::load(p)?)),
            _ => None,
        };
        let last_report = match std::fs::read_to_string(self.path(REPORT_FILE)) {
            Ok(text) => Some(Arc::new(EvaluationReport::from_json(&text)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(e.into()),
        };
        Ok(Snapshot {
            version: meta.version,
            seed: meta.seed,
            adjacency: Arc::new(Adjacency::from_edges(&edges)),
            catalog: Arc::new(meta.catalog),
            edges: Arc::new(edges),
            profiles: Arc::new(profiles),
            model,
            last_report,
        })
    }

    fn save_meta(&self, snap: &Snapshot) -> Result<(), ServiceError> {
        let meta = Meta {
            seed: snap.seed,
            version: snap.version,
            catalog: (*snap.catalog).clone(),
        };
        let json = serde_json::to_string_pretty(&meta).map_err(friendrec_core::Error::from)?;
        write_atomic(self.path(META_FILE), json.as_bytes())?;
        Ok(())
    }

    fn save_edges(&self, edges: &[EdgeRecord]) -> Result<(), ServiceError> {
        let mut buf = Vec::new();
        write_annotated(&mut buf, edges)?;
        write_atomic(self.path(EDGES_FILE), &buf)?;
        Ok(())
    }

    fn save_profiles(&self, profiles: &Profiles) -> Result<(), ServiceError> {
        write_atomic(self.path(PROFILES_FILE), profiles_to_json(profiles)?.as_bytes())?;
        Ok(())
    }

    fn save_model(&self, model: &KnnModel) -> Result<(), ServiceError> {
        model.save(self.path(MODEL_FILE))?;
        Ok(())
    }

    fn save_report(&self, report: &EvaluationReport) -> Result<(), ServiceError> {
        write_atomic(self.path(REPORT_FILE), report.to_json()?.as_bytes())?;
        Ok(())
    }
}

/// What changed in a mutation, so only those files are rewritten.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Dirty {
    pub profiles: bool,
    pub model: bool,
    pub report: bool,
}

pub struct AppState {
    current: RwLock<Arc<Snapshot>>,
    writer: tokio::sync::Mutex<()>,
    training: AtomicBool,
    store: Store,
    static_dir: Option<PathBuf>,
}

impl AppState {
    /// Restores state from the data directory, or initialises it from the
    /// configured raw edge list (the bundled one by default).
    pub fn open(config: &Config) -> Result<Self, ServiceError> {
        let store = Store::new(&config.data_dir);
        std::fs::create_dir_all(store.dir())?;
        let snapshot = if store.is_initialized() {
            store.load()?
        } else {
            let catalog = match &config.catalog {
                Some(path) => BookCatalog::parse(&std::fs::read_to_string(path)?)?,
                None => BookCatalog::default(),
            };
            let raw = match &config.edges {
                Some(path) => load_edges(std::fs::File::open(path)?)?,
                None => bundled::edges(),
            };
            let edges = assign_books(&raw, &catalog, config.seed)?;
            let profiles = build_profiles(&edges, &catalog)?;
            let snap = Snapshot {
                version: 1,
                seed: config.seed,
                adjacency: Arc::new(Adjacency::from_edges(&edges)),
                catalog: Arc::new(catalog),
                edges: Arc::new(edges),
                profiles: Arc::new(profiles),
                model: None,
                last_report: None,
            };
            store.save_edges(&snap.edges)?;
            store.save_profiles(&snap.profiles)?;
            store.save_meta(&snap)?;
            snap
        };
        Ok(Self {
            current: RwLock::new(Arc::new(snapshot)),
            writer: tokio::sync::Mutex::new(()),
            training: AtomicBool::new(false),
            store,
            static_dir: config.static_dir.clone(),
        })
    }

    /// Pins the latest snapshot.
    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn static_dir(&self) -> Option<&Path> {
        self.static_dir.as_deref()
    }

    /// Applies `f` to the latest snapshot under the writer lock, persists the
    /// dirty parts, and publishes the result as the next version.
    pub(crate) async fn mutate<F, T, E>(&self, f: F) -> Result<(Arc<Snapshot>, T), E>
    where
        F: FnOnce(&Snapshot) -> Result<(Snapshot, Dirty, T), E>,
        E: From<ServiceError>,
    {
        let _guard = self.writer.lock().await;
        self.apply(f)
    }

    /// Same as [`AppState::mutate`] for callers already holding the writer lock.
    fn apply<F, T, E>(&self, f: F) -> Result<(Arc<Snapshot>, T), E>
    where
        F: FnOnce(&Snapshot) -> Result<(Snapshot, Dirty, T), E>,
        E: From<ServiceError>,
    {
        let current = self.snapshot();
        let (mut next, dirty, out) = f(&current)?;
        next.version = current.version + 1;
        if dirty.profiles {
            self.store.save_profiles(&next.profiles)?;
        }
        if dirty.model {
            if let Some(model) = &next.model {
                self.store.save_model(model)?;
            }
        }
        if dirty.report {
            if let Some(report) = &next.last_report {
                self.store.save_report(report)?;
            }
        }
        self.store.save_meta(&next)?;
        let next = Arc::new(next);
        *self.current.write().expect("snapshot lock poisoned") = next.clone();
        Ok((next, out))
    }

    /// Runs a training job: at most one at a time, holding the writer lock so
    /// other mutations queue behind it while reads continue.
    pub(crate) async fn train<F, E>(&self, job: F) -> Result<Arc<Snapshot>, E>
    where
        F: FnOnce(&Snapshot) -> Result<KnnModel, E> + Send + 'static,
        E: From<ServiceError> + Send + 'static,
    {
        if self
            .training
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .is_err()
        {
            return Err(ServiceError::TrainingInProgress.into());
        }
        let _reset = ResetOnDrop(&self.training);
        let _guard = self.writer.lock().await;
        let base = self.snapshot();
        let model = tokio::task::spawn_blocking(move || job(&base))
            .await
            .map_err(|e| ServiceError::Internal(e.to_string()))??;
        let (snap, ()) = self.apply(|cur| {
            let mut next = cur.clone();
            next.model = Some(Arc::new(model));
            Ok::<_, E>((next, Dirty { model: true, ..Dirty::default() }, ()))
        })?;
        Ok(snap)
    }

    pub fn is_training(&self) -> bool {
        self.training.load(Ordering::Acquire)
    }
}

struct ResetOnDrop<'a>(&'a AtomicBool);

impl Drop for ResetOnDrop<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}
