use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use ragscope_core::analysis::AnnotationStore;
use ragscope_core::AugmentedExperiment;
use uuid::Uuid;

/// One uploaded experiment. Lives only in process memory.
#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub augmented: Arc<AugmentedExperiment>,
    /// Annotation writes within a session are serialized by this lock.
    pub annotations: Mutex<AnnotationStore>,
    pub created_at: Instant,
    /// Approximate memory footprint, used for the eviction budget.
    pub size_bytes: usize,
    last_access: Mutex<Instant>,
}

impl Session {
    pub fn last_access(&self) -> Instant {
        *self.last_access.lock().unwrap()
    }

    fn touch(&self, now: Instant) {
        *self.last_access.lock().unwrap() = now;
    }
}

/// Session table with idle expiry and a total memory budget. When the budget
/// is exceeded the least recently used sessions are dropped first.
#[derive(Debug)]
pub struct SessionStore {
    ttl: Duration,
    budget_bytes: usize,
    sessions: Mutex<HashMap<String, Arc<Session>>>,
}

impl SessionStore {
    pub fn new(ttl: Duration, budget_bytes: usize) -> Self {
        SessionStore {
            ttl,
            budget_bytes,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn insert(&self, augmented: AugmentedExperiment, size_bytes: usize) -> Arc<Session> {
        let now = Instant::now();
        let session = Arc::new(Session {
            id: Uuid::new_v4().simple().to_string(),
            augmented: Arc::new(augmented),
            annotations: Mutex::new(AnnotationStore::default()),
            created_at: now,
            size_bytes,
            last_access: Mutex::new(now),
        });
        let mut sessions = self.sessions.lock().unwrap();
        sessions.insert(session.id.clone(), session.clone());
        Self::enforce_budget(&mut sessions, self.budget_bytes, &session.id);
        session
    }

    fn enforce_budget(sessions: &mut HashMap<String, Arc<Session>>, budget: usize, keep: &str) {
        let mut total: usize = sessions.values().map(|s| s.size_bytes).sum();
        while total > budget {
            let victim = sessions
                .values()
                .filter(|s| s.id != keep)
                .min_by_key(|s| s.last_access())
                .map(|s| s.id.clone());
            let Some(victim) = victim else { break };
            if let Some(s) = sessions.remove(&victim) {
                tracing::info!(session = %victim, "evicted over memory budget");
                total -= s.size_bytes;
            }
        }
    }

    /// Looks up a live session and refreshes its idle timer.
    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        let now = Instant::now();
        let mut sessions = self.sessions.lock().unwrap();
        let session = sessions.get(id)?.clone();
        if now.duration_since(session.last_access()) > self.ttl {
            sessions.remove(id);
            return None;
        }
        session.touch(now);
        Some(session)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().remove(id).is_some()
    }

    /// Drops every session idle for longer than the ttl. Returns how many went.
    pub fn sweep(&self) -> usize {
        let now = Instant::now();
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, s| now.duration_since(s.last_access()) <= self.ttl);
        before - sessions.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_bytes(&self) -> usize {
        self.sessions
            .lock()
            .unwrap()
            .values()
            .map(|s| s.size_bytes)
            .sum()
    }
}
