//! On-disk basis cache: one JSON-lines file per (label, genus, degree),
//! a header line followed by one basis vector per line. A lock file keeps
//! the directory single-writer.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

/// Bumped whenever the line format changes.
pub const FORMAT_VERSION: u32 = 1;

const LOCK_NAME: &str = ".mcgcalc.lock";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache directory {0} is locked by another writer")]
    Locked(PathBuf),
    #[error("cache i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed cache file {path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CacheError + '_ {
    move |source| CacheError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format_version: u32,
    pub g: usize,
    pub degree: usize,
    pub label: String,
    pub basis_count: usize,
}

/// Holds the directory lock for its lifetime.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    lock: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Cache, CacheError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let lock = dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Err(CacheError::Locked(dir.to_path_buf())),
            Err(e) => return Err(CacheError::Io { path: lock, source: e }),
        }
        Ok(Cache { dir: dir.to_path_buf(), lock })
    }

    pub fn path(&self, label: &str, g: usize, degree: usize) -> PathBuf {
        self.dir.join(format!("{label}-g{g}-d{degree}.jsonl"))
    }

    /// The cached rows, if a current-format file with a consistent count exists.
    pub fn load<T: for<'de> Deserialize<'de>>(&self, label: &str, g: usize, degree: usize) -> Option<(CacheHeader, Vec<T>)> {
        let path = self.path(label, g, degree);
        let file = File::open(&path).ok()?;
        let mut lines = BufReader::new(file).lines();
        let header: CacheHeader = serde_json::from_str(&lines.next()?.ok()?).ok()?;
        let want = CacheHeader { format_version: FORMAT_VERSION, g, degree, label: label.to_string(), basis_count: header.basis_count };
        if header != want {
            return None;
        }
        let rows: Vec<T> = lines.map(|l| serde_json::from_str(&l.ok()?).ok()).collect::<Option<_>>()?;
        (rows.len() == header.basis_count).then_some((header, rows))
    }

    /// Writes through a temporary file and renames it into place.
    pub fn store<T: Serialize>(&self, label: &str, g: usize, degree: usize, rows: &[T]) -> Result<CacheHeader, CacheError> {
        let path = self.path(label, g, degree);
        let tmp = path.with_extension("jsonl.tmp");
        let header =
            CacheHeader { format_version: FORMAT_VERSION, g, degree, label: label.to_string(), basis_count: rows.len() };
        let mut w = BufWriter::new(File::create(&tmp).map_err(io_err(&tmp))?);
        let malformed = |e: serde_json::Error| CacheError::Malformed { path: tmp.clone(), message: e.to_string() };
        serde_json::to_writer(&mut w, &header).map_err(malformed)?;
        writeln!(w).map_err(io_err(&tmp))?;
        for r in rows {
            serde_json::to_writer(&mut w, r).map_err(malformed)?;
            writeln!(w).map_err(io_err(&tmp))?;
        }
        w.flush().map_err(io_err(&tmp))?;
        drop(w);
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
        Ok(header)
    }
}

impl Drop for Cache {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Removal {
    pub file: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GcReport {
    pub dir: String,
    pub keep_versions: u32,
    pub quota_bytes: Option<u64>,
    pub removed: Vec<Removal>,
    pub kept: usize,
    pub bytes_kept: u64,
}

fn read_version(path: &Path) -> Option<u32> {
    let mut first = String::new();
    BufReader::new(File::open(path).ok()?).read_line(&mut first).ok()?;
    serde_json::from_str::<CacheHeader>(&first).ok().map(|h| h.format_version)
}

/// Removes cache files older than the newest `keep_versions` formats, then,
/// if a quota is given, the oldest remaining files until the quota holds.
pub fn gc(dir: &Path, keep_versions: u32, quota_bytes: Option<u64>) -> Result<GcReport, CacheError> {
    let mut report = GcReport {
        dir: dir.display().to_string(),
        keep_versions,
        quota_bytes,
        removed: Vec::new(),
        kept: 0,
        bytes_kept: 0,
    };
    if !dir.exists() {
        return Ok(report);
    }
    let cache = Cache::open(dir)?;
    let oldest_kept = (FORMAT_VERSION + 1).saturating_sub(keep_versions.max(1));
    let mut current: Vec<(SystemTime, u64, PathBuf)> = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    entries.sort();
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    for p in entries {
        let stale = match read_version(&p) {
            None => Some("unreadable header".to_string()),
            Some(v) if v < oldest_kept || v > FORMAT_VERSION => Some(format!("format version {v}")),
            Some(_) => None,
        };
        if let Some(reason) = stale {
            fs::remove_file(&p).map_err(io_err(&p))?;
            log::info!("cache gc: removed {} ({reason})", p.display());
            report.removed.push(Removal { file: name(&p), reason });
            continue;
        }
        let meta = fs::metadata(&p).map_err(io_err(&p))?;
        current.push((meta.modified().unwrap_or(SystemTime::UNIX_EPOCH), meta.len(), p));
    }
    let mut total: u64 = current.iter().map(|c| c.1).sum();
    if let Some(q) = quota_bytes {
        current.sort();
        let mut keep = Vec::new();
        for (t, size, p) in current {
            if total > q {
                fs::remove_file(&p).map_err(io_err(&p))?;
                total -= size;
                log::info!("cache gc: removed {} (over quota)", p.display());
                report.removed.push(Removal { file: name(&p), reason: "over quota".into() });
            } else {
                keep.push((t, size, p));
            }
        }
        current = keep;
    }
    report.kept = current.len();
    report.bytes_kept = total;
    drop(cache);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_lock() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        assert!(matches!(Cache::open(dir.path()), Err(CacheError::Locked(_))));
        let rows = vec![vec![1, 2], vec![3]];
        let h = c.store("lie", 2, 3, &rows).unwrap();
        assert_eq!(h.basis_count, 2);
        let (h2, back): (_, Vec<Vec<i32>>) = c.load("lie", 2, 3).unwrap();
        assert_eq!((h2, back), (h, rows));
        assert!(c.load::<Vec<i32>>("lie", 3, 3).is_none());
        drop(c);
        assert!(Cache::open(dir.path()).is_ok());
    }

    #[test]
    fn gc_cases() {
        let dir = tempfile::tempdir().unwrap();
        let empty = gc(dir.path(), 1, None).unwrap();
        assert!(empty.removed.is_empty() && empty.kept == 0);
        let c = Cache::open(dir.path()).unwrap();
        c.store("h", 2, 1, &[1, 2, 3]).unwrap();
        c.store("h", 2, 2, &[4]).unwrap();
        drop(c);
        let stale = dir.path().join("old-g2-d1.jsonl");
        fs::write(&stale, "{\"format_version\":0,\"g\":2,\"degree\":1,\"label\":\"old\",\"basis_count\":0}\n").unwrap();
        let r = gc(dir.path(), 1, None).unwrap();
        assert_eq!(r.removed.len(), 1);
        assert_eq!(r.removed[0].file, "old-g2-d1.jsonl");
        assert_eq!(r.kept, 2);
        assert!(!stale.exists());
        let r = gc(dir.path(), 1, Some(1 << 20)).unwrap();
        assert!(r.removed.is_empty() && r.kept == 2);
        let r = gc(dir.path(), 1, Some(0)).unwrap();
        assert_eq!((r.removed.len(), r.kept), (2, 0));
    }
}
