//! C ABI over the schemaforge toolkit.
//!
//! Conventions:
//! - every fallible call returns an [`SfStatus`]; on failure a message is
//!   available from [`sf_last_error`] on the same thread;
//! - schemas live behind the opaque [`SfSchema`] handle, released with
//!   [`sf_schema_free`];
//! - strings handed out by the library are NUL-terminated UTF-8 and must be
//!   released with [`sf_string_free`];
//! - panics never cross the boundary, they surface as `SF_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schemaforge::ddl::{emit_ddl, verify_executable};
use schemaforge::eval::{evaluate, names_match, EvalReport, MatcherConfig};
use schemaforge::fd::{
    candidate_keys, is_dependency_preserving, is_lossless, minimal_cover, parse_fd_problem, synthesize_3nf,
};
use schemaforge::{deserialize_schema, serialize_schema, validate_schema, Schema};
use serde_json::json;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Input text could not be parsed (schema JSON, FD problem).
    ParseError = 3,
    /// The schema violates a structural rule.
    InvalidSchema = 4,
    /// A numeric argument is out of range.
    InvalidArgument = 5,
    /// SQLite or another engine failed.
    EngineError = 6,
    Panic = 99,
}

/// Opaque schema handle.
pub struct SfSchema(Schema);

/// Evaluation metrics, each in [0, 1].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SfMetrics {
    pub table_f1: f64,
    pub table_acc: f64,
    pub attr_f1: f64,
    pub attr_acc: f64,
    pub pk_acc: f64,
    pub fk_acc: f64,
    pub dt_acc: f64,
}

impl From<EvalReport> for SfMetrics {
    fn from(r: EvalReport) -> Self {
        Self {
            table_f1: r.table_f1,
            table_acc: r.table_acc,
            attr_f1: r.attr_f1,
            attr_acc: r.attr_acc,
            pk_acc: r.pk_acc,
            fk_acc: r.fk_acc,
            dt_acc: r.dt_acc,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SfStatus, String);

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SfStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(SfStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn schema<'a>(p: *const SfSchema, what: &str) -> Result<&'a Schema, Failure> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior NUL").into_raw()
}

fn matcher(delta0: f64, delta1: f64, string_only: bool) -> Result<MatcherConfig, Failure> {
    let base = if string_only { MatcherConfig::string_only() } else { MatcherConfig::default() };
    let cfg = MatcherConfig { delta0, delta1, ..base };
    cfg.validate().map_err(|e| Failure(SfStatus::InvalidArgument, e))?;
    Ok(cfg)
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses canonical schema JSON. The schema is not required to be valid;
/// see [`sf_schema_validate`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_schema_from_json(json: *const c_char, out: *mut *mut SfSchema) -> SfStatus {
    guard(|| {
        let text = text(json, "json")?;
        let s = deserialize_schema(text).map_err(|e| Failure(SfStatus::ParseError, e.to_string()))?;
        put(out, Box::into_raw(Box::new(SfSchema(s))), "out")
    })
}

/// # Safety
/// `s` must be null or a handle from [`sf_schema_from_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_schema_free(s: *mut SfSchema) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Canonical JSON of a valid schema.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_schema_to_json(s: *const SfSchema, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let text =
            serialize_schema(schema(s, "schema")?).map_err(|e| Failure(SfStatus::InvalidSchema, e.to_string()))?;
        put(out, owned(text), "out")
    })
}

/// Writes whether the schema is valid to `out_ok`. When `out_report` is not
/// null it receives the violation report (empty when valid).
///
/// # Safety
/// `s` must be a live handle; `out_ok` must be writable; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn sf_schema_validate(
    s: *const SfSchema,
    out_ok: *mut bool,
    out_report: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let report = validate_schema(schema(s, "schema")?);
        put(out_ok, report.is_ok(), "out_ok")?;
        if !out_report.is_null() {
            let text = if report.is_ok() { String::new() } else { report.to_string() };
            out_report.write(owned(text));
        }
        Ok(())
    })
}

/// SQLite DDL for a valid schema.
///
/// # Safety
/// `s` must be a live handle; `out_sql` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_schema_emit_ddl(s: *const SfSchema, out_sql: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let ddl = emit_ddl(schema(s, "schema")?).map_err(|e| Failure(SfStatus::InvalidSchema, e.to_string()))?;
        put(out_sql, owned(ddl.to_sql()), "out_sql")
    })
}

/// Emits the DDL and executes it on an in-memory SQLite database. A script
/// that fails to execute is not an error: `out_ok` is false and the
/// diagnostic is available from [`sf_last_error`].
///
/// # Safety
/// `s` must be a live handle; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_schema_verify_ddl(s: *const SfSchema, out_ok: *mut bool) -> SfStatus {
    guard(|| {
        let ddl = emit_ddl(schema(s, "schema")?).map_err(|e| Failure(SfStatus::InvalidSchema, e.to_string()))?;
        let v = verify_executable(&ddl).map_err(|e| Failure(SfStatus::EngineError, e.to_string()))?;
        if !v.ok {
            set_last_error(v.diagnostics.join("\n"));
        }
        put(out_ok, v.ok, "out_ok")
    })
}

/// Analyses an FD problem (`universe: A B C` then one `X, Y -> Z` per
/// line) and returns JSON with `candidate_keys`, `minimal_cover`,
/// `fragments`, `lossless` and `dependency_preserving`.
///
/// # Safety
/// `problem` must be a NUL-terminated string; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_normalize_fd_problem(problem: *const c_char, out_json: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let f =
            parse_fd_problem(text(problem, "problem")?).map_err(|e| Failure(SfStatus::ParseError, e.to_string()))?;
        let engine = |e: schemaforge::fd::FdError| Failure(SfStatus::EngineError, e.to_string());
        let keys = candidate_keys(&f).map_err(engine)?;
        let d = synthesize_3nf(&f).map_err(engine)?;
        let sets = d.attr_sets();
        let doc = json!({
            "candidate_keys": keys,
            "minimal_cover": minimal_cover(&f).fds().iter().map(|fd| fd.to_string()).collect::<Vec<_>>(),
            "fragments": d.fragments.iter().map(|fr| json!({"attrs": fr.attrs, "keys": fr.keys})).collect::<Vec<_>>(),
            "lossless": is_lossless(&f, &sets).map_err(engine)?,
            "dependency_preserving": is_dependency_preserving(&f, &sets).map_err(engine)?,
        });
        put(out_json, owned(doc.to_string()), "out_json")
    })
}

/// Scores `pred` against `gold`. `string_only` disables the bundled
/// synonym and similarity providers.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_evaluate(
    gold: *const SfSchema,
    pred: *const SfSchema,
    delta0: f64,
    delta1: f64,
    string_only: bool,
    out: *mut SfMetrics,
) -> SfStatus {
    guard(|| {
        let cfg = matcher(delta0, delta1, string_only)?;
        let r = evaluate(schema(gold, "gold")?, schema(pred, "pred")?, &cfg);
        put(out, r.into(), "out")
    })
}

/// Name-matching rule used by the evaluator.
///
/// # Safety
/// `predicted` and `gold` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_names_match(
    predicted: *const c_char,
    gold: *const c_char,
    delta0: f64,
    delta1: f64,
    string_only: bool,
    out: *mut bool,
) -> SfStatus {
    guard(|| {
        let cfg = matcher(delta0, delta1, string_only)?;
        let m = names_match(text(predicted, "predicted")?, text(gold, "gold")?, &cfg);
        put(out, m, "out")
    })
}
