//! Output plumbing shared by every subcommand: the schema-versioned JSON
//! envelope, CSV emission with the resolved config echoed in a header
//! comment, config-file loading, and the failure type that carries the
//! process exit status.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Schema tag stamped on every JSON envelope.
pub const SCHEMA: &str = "fdd-lab/1";

/// A command failure, tagged with the exit status it maps to.
#[derive(Debug)]
pub enum Fault {
    /// Bad flags, config files, or input shapes (exit 2).
    Usage(String),
    /// The computation itself failed (exit 3).
    Numerical(String),
    /// A reproduction row landed outside its pinned window (exit 4).
    Mismatch(String),
}

impl Fault {
    pub fn code(&self) -> i32 {
        match self {
            Fault::Usage(_) => 2,
            Fault::Numerical(_) => 3,
            Fault::Mismatch(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Fault::Usage(m) | Fault::Numerical(m) | Fault::Mismatch(m) => m,
        }
    }
}

pub type CmdResult<T> = Result<T, Fault>;

pub fn usage(msg: impl Into<String>) -> Fault {
    Fault::Usage(msg.into())
}

/// Adapter for the compute phase: once flags and inputs have validated,
/// any library error is a numerical failure.
pub fn numerical(e: fdd_core::Error) -> Fault {
    Fault::Numerical(e.to_string())
}

/// Every structured result ships inside this envelope. `config` is the
/// fully-resolved configuration, so feeding it back through `--config`
/// reproduces the run (and therefore the output) byte for byte.
#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema: &'static str,
    config: &'a C,
    result: &'a R,
}

pub fn emit_json<C: Serialize, R: Serialize>(
    config: &C,
    result: &R,
    out: Option<&Path>,
) -> CmdResult<()> {
    let envelope = Envelope {
        schema: SCHEMA,
        config,
        result,
    };
    let text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Fault::Numerical(format!("serialization failed: {e}")))?;
    write_text(&format!("{text}\n"), out)
}

/// CSV artifacts echo the resolved config on a leading `#` comment line,
/// then the column header, then one line per row.
pub fn emit_csv<C: Serialize>(
    config: &C,
    header: &str,
    rows: &[String],
    out: Option<&Path>,
) -> CmdResult<()> {
    let cfg = serde_json::to_string(config)
        .map_err(|e| Fault::Numerical(format!("serialization failed: {e}")))?;
    let mut text = format!("# {SCHEMA} config={cfg}\n{header}\n");
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    write_text(&text, out)
}

pub fn write_text(text: &str, out: Option<&Path>) -> CmdResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Fault::Numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Start from `--config <path>` when given, otherwise from the type's
/// defaults; the caller then overrides individual fields with explicit
/// flags. Unknown fields in the file are rejected.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CmdResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("bad config {}: {e}", p.display())))
        }
    }
}

/// A flag given on the command line wins over the config file.
pub fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(value) = flag {
        *slot = value;
    }
}
