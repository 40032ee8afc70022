//! Sample input and CSV output.

use std::fs;
use std::path::{Path, PathBuf};

use sped::Sample;

use crate::error::{CliError, CliResult};

/// One value per line; blank lines and `#` comments are ignored.
pub fn read_sample(path: &Path) -> CliResult<Sample> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_sample(&text, path)
}

pub fn parse_sample(text: &str, path: &Path) -> CliResult<Sample> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::Data(format!(
                "{}:{}: not a number: {line:?}",
                path.display(),
                i + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(CliError::Data(format!(
                "{}:{}: value is not finite: {line:?}",
                path.display(),
                i + 1
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no observations",
            path.display()
        )));
    }
    Ok(Sample::new(values)?)
}

/// Shortest representation that round-trips.
pub fn exact(x: f64) -> String {
    format!("{x}")
}

/// Ten decimal places: criterion values that agree to about `1e-10` in
/// absolute terms print identically.
pub fn fixed10(x: f64) -> String {
    let s = format!("{x:.10}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        "0.0000000000".to_string()
    } else {
        s
    }
}

pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl CsvOut {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(|e| CliError::write(path, std::io::Error::other(e)))?;
        let mut out = Self {
            path: path.to_path_buf(),
            writer,
        };
        out.row(header)?;
        Ok(out)
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|e| CliError::write(&self.path, std::io::Error::other(e)))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer
            .flush()
            .map_err(|e| CliError::write(&self.path, e))
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::write(path, e))
}

/// `<path>.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let s = parse_sample("# header\n1.5\n\n -2 # inline\n3e-1\n", Path::new("x")).unwrap();
        assert_eq!(s.values(), &[1.5, -2.0, 0.3]);
    }

    #[test]
    fn names_the_bad_line() {
        let e = parse_sample("1\n2\nabc\n", Path::new("in.txt")).unwrap_err();
        assert!(e.to_string().contains("in.txt:3"));
        assert_eq!(e.exit_code(), 2);
        let e = parse_sample("1\nNaN\n", Path::new("in.txt")).unwrap_err();
        assert!(e.to_string().contains("in.txt:2"));
    }

    #[test]
    fn fixed10_rounds() {
        assert_eq!(fixed10(0.1 + 0.2), "0.3000000000");
        assert_eq!(fixed10(-1.23456789e-3), "-0.0012345679");
        assert_eq!(fixed10(-1e-13), "0.0000000000");
        assert_eq!(exact(0.1 + 0.2), "0.30000000000000004");
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("out/a.csv")),
            PathBuf::from("out/a.csv.manifest.json")
        );
    }
}
