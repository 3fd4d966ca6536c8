//! Rule-based lowering of a [`Schema`] to `CREATE TABLE` statements and an
//! executability check against an in-memory SQLite database.

mod dialect;
mod emit;
mod verify;

use thiserror::Error;

pub use dialect::{Dialect, Sqlite};
pub use emit::{emit_ddl, emit_ddl_with, DdlScript, Statement};
pub use verify::{verify_executable, verify_sql, Verification};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdlError {
    #[error("schema is not valid:\n{0}")]
    InvalidSchema(String),
    #[error("SQLite engine unavailable: {0}")]
    Engine(String),
}
