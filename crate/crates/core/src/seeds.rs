//! Seed databases: known lattice values loaded from JSON.
//!
//! The file is an array of
//! `{"surface": {"c1d", "dd", "label"}, "sigma", "s", "value", "provenance"}`
//! objects. A copy of the shipped database is compiled in.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SeedEntry;
use crate::surface::{CellDomain, LatticeIndex, SurfaceClass};

pub const PAPER_SEEDS_JSON: &str = include_str!("../data/paper.json");

#[derive(Debug, Serialize, Deserialize)]
struct RawSeed {
    surface: SurfaceClass,
    sigma: i64,
    s: i64,
    value: i64,
    provenance: String,
}

#[derive(Clone, Debug)]
pub struct SeedDatabase {
    pub entries: Vec<SeedEntry>,
    pub source_path: String,
}

impl SeedDatabase {
    pub fn from_json(text: &str, source_path: impl Into<String>) -> Result<Self> {
        let raw: Vec<RawSeed> = serde_json::from_str(text)?;
        let mut seen = BTreeSet::new();
        let mut entries = Vec::with_capacity(raw.len());
        for r in raw {
            r.surface.validate()?;
            let idx = LatticeIndex::new(r.sigma, r.s);
            if r.surface.theta_domain(idx) != CellDomain::Valid {
                return Err(Error::InvalidSeed(format!(
                    "sigma={}, s={} is not a valid cell of {}",
                    r.sigma, r.s, r.surface
                )));
            }
            if r.provenance.trim().is_empty() {
                return Err(Error::InvalidSeed(format!(
                    "seed sigma={}, s={} of {} has no provenance",
                    r.sigma, r.s, r.surface
                )));
            }
            if !seen.insert((r.surface.clone(), idx)) {
                return Err(Error::InvalidSeed(format!(
                    "duplicate seed sigma={}, s={} for {}",
                    r.sigma, r.s, r.surface
                )));
            }
            entries.push(SeedEntry {
                cls: r.surface,
                sigma: r.sigma,
                s: r.s,
                value: BigInt::from(r.value),
                provenance: r.provenance,
            });
        }
        Ok(SeedDatabase {
            entries,
            source_path: source_path.into(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::SeedFile {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, path.display().to_string())
    }

    pub fn empty() -> Self {
        SeedDatabase {
            entries: Vec::new(),
            source_path: String::new(),
        }
    }

    /// Entries whose class matches `cls` exactly, label included.
    pub fn for_class(&self, cls: &SurfaceClass) -> Vec<SeedEntry> {
        self.entries.iter().filter(|e| e.cls == *cls).cloned().collect()
    }

    pub fn find(&self, cls: &SurfaceClass, sigma: i64, s: i64) -> Option<&SeedEntry> {
        self.entries
            .iter()
            .find(|e| e.cls == *cls && e.sigma == sigma && e.s == s)
    }
}

/// The compiled-in database.
pub fn paper_seeds() -> SeedDatabase {
    SeedDatabase::from_json(PAPER_SEEDS_JSON, "builtin:paper.json")
        .expect("embedded seed database is valid")
}
