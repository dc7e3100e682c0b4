//! CSV tables with `#`-prefixed metadata lines.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{HarnessError, Result};

/// A CSV artifact: `# key: value` lines, a header row and data rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// A table whose first metadata line names the producing versions.
    pub fn new(command: &str, header: &[&str]) -> Self {
        let mut t = Table { header: header.iter().map(|s| s.to_string()).collect(), ..Table::default() };
        t.push_meta(
            "generator",
            format!("freudhc {} (freudhc-core {})", env!("CARGO_PKG_VERSION"), freudhc_core::VERSION),
        );
        t.push_meta("command", command);
        t
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        let io = |e| HarnessError::io("<output>", e);
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => write_file(p, self.to_csv_string().as_bytes()),
            None => self.write(std::io::stdout().lock()),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
        let mut reader = std::io::BufReader::new(file);
        let mut meta = Vec::new();
        let mut body = String::new();
        let mut line = String::new();
        loop {
            line.clear();
            if reader.read_line(&mut line).map_err(|e| HarnessError::io(path, e))? == 0 {
                break;
            }
            match line.strip_prefix('#') {
                Some(rest) if body.is_empty() => {
                    let rest = rest.trim();
                    let (k, v) = rest.split_once(':').unwrap_or((rest, ""));
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                _ => body.push_str(&line),
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r.records().map(|rec| rec.map(|r| r.iter().map(str::to_string).collect())).collect::<std::result::Result<_, _>>()?;
        Ok(Table { meta, header, rows })
    }
}

/// Creates parent directories and writes `bytes`.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

/// Shortest round-trip scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}
