use crate::schema::DataType;

/// The per-engine rules: type names and identifier quoting.
pub trait Dialect {
    fn name(&self) -> &'static str;
    fn type_name(&self, t: DataType) -> &'static str;
    fn quote(&self, ident: &str) -> String;
}

/// SQLite has no date or boolean storage class: DATETIME becomes TEXT
/// (ISO-8601 strings) and BOOL becomes INTEGER.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sqlite;

impl Dialect for Sqlite {
    fn name(&self) -> &'static str {
        "sqlite"
    }

    fn type_name(&self, t: DataType) -> &'static str {
        match t {
            DataType::Numeric => "NUMERIC",
            DataType::Text => "TEXT",
            DataType::Datetime => "TEXT",
            DataType::Binary => "BLOB",
            DataType::Bool => "INTEGER",
        }
    }

    fn quote(&self, ident: &str) -> String {
        format!("\"{}\"", ident.replace('"', "\"\""))
    }
}
