//! Session storage with optimistic concurrency.
//!
//! Every write names the version it was based on; the store refuses the
//! write when the stored version has moved on, then bumps the version.

use std::collections::HashMap;
use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::Utc;
use parking_lot::Mutex;

use crate::document::{load_session, save_session};
use crate::error::{Result, SessionError};
use crate::session::{Session, SessionId};

pub trait SessionStore: Send + Sync {
    /// Stores a new session at version 1.
    fn create(&self, session: &mut Session) -> Result<()>;

    fn load(&self, id: &SessionId) -> Result<Session>;

    /// Writes `session` if the stored version still equals
    /// `session.version`, then increments it.
    fn update(&self, session: &mut Session) -> Result<()>;
}

/// Keeps serialized documents in memory.
#[derive(Default)]
pub struct MemoryStore {
    docs: Mutex<HashMap<SessionId, (u64, String)>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SessionStore for MemoryStore {
    fn create(&self, session: &mut Session) -> Result<()> {
        let mut docs = self.docs.lock();
        if docs.contains_key(&session.session_id) {
            return Err(SessionError::VersionConflict { expected: 0, stored: docs[&session.session_id].0 });
        }
        session.version = 1;
        docs.insert(session.session_id.clone(), (1, save_session(session)));
        Ok(())
    }

    fn load(&self, id: &SessionId) -> Result<Session> {
        let docs = self.docs.lock();
        let (_, text) = docs.get(id).ok_or_else(|| SessionError::NotFound(id.to_string()))?;
        load_session(text)
    }

    fn update(&self, session: &mut Session) -> Result<()> {
        let mut docs = self.docs.lock();
        let slot =
            docs.get_mut(&session.session_id).ok_or_else(|| SessionError::NotFound(session.session_id.to_string()))?;
        if slot.0 != session.version {
            return Err(SessionError::VersionConflict { expected: session.version, stored: slot.0 });
        }
        session.version += 1;
        session.updated_at = Utc::now();
        *slot = (session.version, save_session(session));
        Ok(())
    }
}

/// One `session-<id>.json` file per session in a single directory. Writes
/// for the same id are serialized and land atomically via rename.
pub struct FileStore {
    dir: PathBuf,
    locks: Mutex<HashMap<SessionId, Arc<Mutex<()>>>>,
}

impl FileStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, locks: Mutex::new(HashMap::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, id: &SessionId) -> PathBuf {
        self.dir.join(format!("session-{id}.json"))
    }

    fn lock_for(&self, id: &SessionId) -> Arc<Mutex<()>> {
        self.locks.lock().entry(id.clone()).or_default().clone()
    }

    fn read(&self, id: &SessionId) -> Result<Session> {
        match fs::read_to_string(self.path_for(id)) {
            Ok(text) => load_session(&text),
            Err(e) if e.kind() == ErrorKind::NotFound => Err(SessionError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    fn write(&self, session: &Session) -> Result<()> {
        let path = self.path_for(&session.session_id);
        let tmp = path.with_extension("json.tmp");
        let mut file = fs::File::create(&tmp)?;
        file.write_all(save_session(session).as_bytes())?;
        file.sync_all()?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

impl SessionStore for FileStore {
    fn create(&self, session: &mut Session) -> Result<()> {
        let lock = self.lock_for(&session.session_id);
        let _guard = lock.lock();
        if self.path_for(&session.session_id).exists() {
            let stored = self.read(&session.session_id)?.version;
            return Err(SessionError::VersionConflict { expected: 0, stored });
        }
        session.version = 1;
        self.write(session)
    }

    fn load(&self, id: &SessionId) -> Result<Session> {
        self.read(id)
    }

    fn update(&self, session: &mut Session) -> Result<()> {
        let lock = self.lock_for(&session.session_id);
        let _guard = lock.lock();
        let stored = self.read(&session.session_id)?.version;
        if stored != session.version {
            return Err(SessionError::VersionConflict { expected: session.version, stored });
        }
        session.version += 1;
        session.updated_at = Utc::now();
        self.write(session)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttm_core::{ObjectSet, TournamentConfig};

    fn session() -> Session {
        Session::new(ObjectSet::numbered(3).unwrap(), TournamentConfig::default()).unwrap()
    }

    fn exercise(store: &dyn SessionStore) {
        let mut s = session();
        store.create(&mut s).unwrap();
        assert_eq!(s.version, 1);
        assert!(store.create(&mut s.clone()).is_err());

        let mut a = store.load(&s.session_id).unwrap();
        let mut b = store.load(&s.session_id).unwrap();
        a.start().unwrap();
        store.update(&mut a).unwrap();
        assert_eq!(a.version, 2);
        b.start().unwrap();
        assert!(matches!(store.update(&mut b), Err(SessionError::VersionConflict { expected: 1, stored: 2 })));

        let missing = SessionId::random();
        assert!(matches!(store.load(&missing), Err(SessionError::NotFound(_))));
    }

    #[test]
    fn memory_store() {
        exercise(&MemoryStore::new());
    }

    #[test]
    fn file_store() {
        let dir = tempfile::tempdir().unwrap();
        let store = FileStore::open(dir.path()).unwrap();
        exercise(&store);
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(files.len(), 1);
        assert!(files[0].to_string_lossy().starts_with("session-"));
    }
}
