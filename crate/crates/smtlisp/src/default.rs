//! The process-wide session used when no session is passed explicitly.

use std::sync::Mutex;

use crate::config::SessionConfig;
use crate::session::{Result, Session};

static DEFAULT: Mutex<Option<Session>> = Mutex::new(None);

/// Runs `f` on the default session, starting it on first use.
pub fn with_default<T>(f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
    let mut guard = DEFAULT.lock().unwrap_or_else(|e| e.into_inner());
    if guard.as_ref().is_none_or(Session::is_closed) {
        *guard = Some(Session::open(SessionConfig::default())?);
    }
    f(guard.as_mut().unwrap())
}

/// Replaces the default session with one opened from `config`.
pub fn init_default(config: SessionConfig) -> Result<()> {
    let session = Session::open(config)?;
    let mut guard = DEFAULT.lock().unwrap_or_else(|e| e.into_inner());
    *guard = Some(session);
    Ok(())
}

/// Closes the default session, if one is running.
pub fn close_default() {
    let mut guard = DEFAULT.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(mut s) = guard.take() {
        s.close();
    }
}
