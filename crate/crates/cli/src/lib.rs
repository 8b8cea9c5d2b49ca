//! Front end for `qot`: specifier parsing, verification suites and the JSON-lines
//! report writer.

use std::io::Write;

use serde::Serialize;

pub mod parse;
pub mod suites;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {msg}")]
    Input { field: &'static str, msg: String },
    #[error(transparent)]
    Core(#[from] qot_core::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Input and computation errors both exit with 1.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Serializes one JSON object per line through a single locked writer.
pub struct Lines<W: Write> {
    out: W,
}

impl<W: Write> Lines<W> {
    pub fn new(out: W) -> Self {
        Lines { out }
    }

    pub fn emit<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer(&mut self.out, value).map_err(|e| CliError::Io(e.into()))?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }

    pub fn raw(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.out, "{line}")?;
        Ok(())
    }
}
