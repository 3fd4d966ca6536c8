use rusqlite::Connection;

use super::emit::DdlScript;
use super::DdlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    /// One line per failed statement.
    pub diagnostics: Vec<String>,
}

fn open() -> Result<Connection, DdlError> {
    let conn = Connection::open_in_memory().map_err(|e| DdlError::Engine(e.to_string()))?;
    conn.execute_batch("PRAGMA foreign_keys = ON;").map_err(|e| DdlError::Engine(e.to_string()))?;
    Ok(conn)
}

/// Runs every statement in order on a fresh in-memory database with
/// foreign-key enforcement on. Execution stops at the first failure.
pub fn verify_executable(d: &DdlScript) -> Result<Verification, DdlError> {
    let conn = open()?;
    for (i, st) in d.statements.iter().enumerate() {
        if let Err(e) = conn.execute_batch(&st.sql) {
            return Ok(Verification {
                ok: false,
                diagnostics: vec![format!("statement {} (`{}`): {e}", i + 1, st.table)],
            });
        }
    }
    Ok(Verification { ok: true, diagnostics: Vec::new() })
}

/// Same check for a raw script.
pub fn verify_sql(sql: &str) -> Result<Verification, DdlError> {
    let conn = open()?;
    Ok(match conn.execute_batch(sql) {
        Ok(()) => Verification { ok: true, diagnostics: Vec::new() },
        Err(e) => Verification { ok: false, diagnostics: vec![e.to_string()] },
    })
}
