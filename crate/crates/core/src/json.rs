//! JSON forms of groups, S-rings and pair colorings.
//!
//! An S-ring is stored as `{"group": [factors], "classes": [[indices]]}`,
//! with elements given by their mixed-radix index (first factor most
//! significant). Catalog files hold one S-ring per line.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{make_group, Group};
use crate::sring::{validate_partition, SRing};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SRingJson {
    pub group: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl SRingJson {
    pub fn from_sring(a: &SRing) -> SRingJson {
        SRingJson {
            group: a.group().factors().to_vec(),
            classes: a.classes().to_vec(),
        }
    }

    /// Validates the partition over the named group.
    pub fn to_sring(&self) -> Result<SRing> {
        let g = group_from_factors(&self.group)?;
        self.to_sring_over(&g)
    }

    pub fn to_sring_over(&self, g: &Arc<Group>) -> Result<SRing> {
        if g.factors() != self.group.as_slice() {
            return Err(Error::InvalidInput(format!(
                "S-ring is over {:?}, expected {:?}",
                self.group,
                g.factors()
            )));
        }
        validate_partition(g, self.classes.clone())
    }
}

// an empty factor list is how the trivial group serializes
fn group_from_factors(factors: &[usize]) -> Result<Arc<Group>> {
    if factors.is_empty() {
        Ok(Arc::new(Group::trivial()))
    } else {
        make_group(factors)
    }
}

pub fn sring_to_json(a: &SRing) -> String {
    serde_json::to_string(&SRingJson::from_sring(a)).expect("plain data serializes")
}

pub fn sring_from_json(text: &str) -> Result<SRing> {
    let raw: SRingJson = serde_json::from_str(text)?;
    raw.to_sring()
}

pub fn read_sring_file(path: &Path) -> Result<SRing> {
    sring_from_json(&std::fs::read_to_string(path)?)
}

/// Reads a JSON-lines catalog; blank lines are skipped.
pub fn read_catalog(path: &Path) -> Result<Vec<SRing>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    let mut group: Option<Arc<Group>> = None;
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: SRingJson = serde_json::from_str(&line)?;
        let g = match &group {
            Some(g) if g.factors() == raw.group.as_slice() => g.clone(),
            _ => {
                let g = group_from_factors(&raw.group)?;
                group = Some(g.clone());
                g
            }
        };
        out.push(raw.to_sring_over(&g)?);
    }
    Ok(out)
}

pub fn write_catalog<W: Write>(out: &mut W, rings: &[SRing]) -> Result<()> {
    for a in rings {
        writeln!(out, "{}", sring_to_json(a))?;
    }
    Ok(())
}

/// Writes a catalog through a temporary file and an atomic rename.
pub fn write_catalog_atomic(path: &Path, rings: &[SRing]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_catalog(&mut tmp, rings)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
