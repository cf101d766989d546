use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Invocation and seed, embedded in every output.
#[derive(Clone, Debug, Serialize)]
pub struct Audit {
    pub invocation: Vec<String>,
    pub seed: u64,
}

impl Audit {
    pub fn csv_header(&self) -> String {
        format!("# entcont {}\n# seed: {}\n", self.invocation.join(" "), self.seed)
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    #[serde(flatten)]
    audit: &'a Audit,
    command: &'a str,
    result: &'a T,
}

pub fn json_document<T: Serialize>(audit: &Audit, command: &str, result: &T) -> String {
    let doc = Document { audit, command, result };
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

/// A CSV table with optional `# key: value` notes before the header row.
pub struct Table {
    notes: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { notes: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, audit: &Audit) -> String {
        let mut out = audit.csv_header();
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    /// Shortest representation that round-trips, in exponent form for very
    /// small or large magnitudes.
    fn cell(&self) -> String {
        if self.is_finite() {
            serde_json::to_string(self).expect("finite float")
        } else {
            self.to_string()
        }
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

display_cell!(usize, u64, bool, &str, String);

pub fn cell(v: impl Cell) -> String {
    v.cell()
}

/// Writes `contents` through a temporary sibling and a rename, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name =
        path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Sends the rendered output to `out` or stdout.
pub fn emit(out: Option<&Path>, contents: &str) -> io::Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => io::stdout().write_all(contents.as_bytes()),
    }
}

/// `stem` with `suffix` appended to the file name.
pub fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}
