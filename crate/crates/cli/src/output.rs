//! Result files are staged in memory and only written once a command has
//! fully succeeded. A failed write removes whatever was already placed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let target = dir.join(name);
            let result = (|| -> Result<()> {
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                tmp.write_all(bytes)?;
                tmp.persist(&target)?;
                Ok(())
            })();
            if let Err(e) = result {
                for path in &written {
                    let _ = fs::remove_file(path);
                }
                return Err(e.context(format!("writing {}", target.display())));
            }
            written.push(target);
        }
        Ok(written)
    }
}

/// `spinf <version> seed=<seed> config=<hash>`, written as the first line of
/// every CSV. The hash covers every setting except the output directory.
pub fn provenance(canonical_config: &str, seed: u64) -> String {
    let digest = Sha256::digest(canonical_config.as_bytes());
    let hash: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("spinf {} seed={seed} config={hash}", env!("CARGO_PKG_VERSION"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::default();
        a.add("x.csv", "1\n");
        a.add("y.csv", "2\n");
        let out = a.commit(&dir.path().join("sub")).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(fs::read_to_string(dir.path().join("sub/y.csv")).unwrap(), "2\n");
    }

    #[test]
    fn provenance_is_stable() {
        assert_eq!(provenance("a", 1), provenance("a", 1));
        assert_ne!(provenance("a", 1), provenance("b", 1));
        assert!(provenance("a", 7).contains("seed=7"));
    }
}
