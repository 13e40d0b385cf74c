use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::{Format, RunConfig, RunOutput};

/// RFC 4180 table with a header row and LF line endings.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit(cfg: &RunConfig, out: &RunOutput, stdout: &mut dyn Write) -> io::Result<()> {
    let json = out.envelope.render();
    match (&cfg.out, cfg.format) {
        (None, Format::Json) => stdout.write_all(json.as_bytes()),
        (None, Format::Csv) => stdout.write_all(out.csv.as_bytes()),
        (None, Format::Both) => {
            stdout.write_all(json.as_bytes())?;
            stdout.write_all(out.csv.as_bytes())
        }
        (Some(p), Format::Json) => write_atomic(p, &json),
        (Some(p), Format::Csv) => write_atomic(p, &out.csv),
        (Some(p), Format::Both) => {
            write_atomic(&with_ext(p, "json"), &json)?;
            write_atomic(&with_ext(p, "csv"), &out.csv)
        }
    }
}

fn with_ext(p: &Path, ext: &str) -> PathBuf {
    p.with_extension(ext)
}
