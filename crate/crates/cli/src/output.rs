//! Report files: collected per command, then written to a directory or stdout.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Kv,
}

/// Ordered key/value report rendered as `key=value` lines or a two-line CSV.
#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn extend<K: Into<String>>(&mut self, items: impl IntoIterator<Item = (K, String)>) -> &mut Self {
        for (k, v) in items {
            self.entries.push((k.into(), v));
        }
        self
    }

    pub fn file_name(format: Format) -> &'static str {
        match format {
            Format::Csv => "report.csv",
            Format::Kv => "report.kv",
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Kv => self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect(),
            Format::Csv => {
                let keys: Vec<&str> = self.entries.iter().map(|(k, _)| k.as_str()).collect();
                let vals: Vec<&str> = self.entries.iter().map(|(_, v)| v.as_str()).collect();
                format!("{}\n{}\n", keys.join(","), vals.join(","))
            }
        }
    }
}

/// Destination for a command's files: a directory, or stdout when `None`.
pub struct Sink {
    dir: Option<PathBuf>,
    files: Vec<(&'static str, String)>,
}

impl Sink {
    pub fn new(out: &str) -> Self {
        let dir = (out != "-").then(|| PathBuf::from(out));
        Sink { dir, files: Vec::new() }
    }

    pub fn add(&mut self, name: &'static str, contents: String) {
        self.files.push((name, contents));
    }

    /// Writes every file. On stdout, several files are separated by `# <name>` lines.
    pub fn finish(self) -> io::Result<()> {
        match self.dir {
            Some(dir) => {
                fs::create_dir_all(&dir)?;
                for (name, contents) in &self.files {
                    fs::write(dir.join(name), contents)?;
                }
                Ok(())
            }
            None => {
                let stdout = io::stdout();
                let mut out = stdout.lock();
                let several = self.files.len() > 1;
                for (name, contents) in &self.files {
                    if several {
                        writeln!(out, "# {name}")?;
                    }
                    out.write_all(contents.as_bytes())?;
                }
                out.flush()
            }
        }
    }
}
