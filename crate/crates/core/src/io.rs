//! File formats: prospects as headerless CSV, instances as JSON that
//! references prospect files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dmsim::read_matrix_csv;
use crate::error::{Error, Result};
use crate::instance::{EcdsPair, Instance};
use crate::prospect::Prospect;

/// Reads a prospect: `T` rows of `N` comma-separated numbers.
pub fn read_prospect_csv(path: impl AsRef<Path>) -> Result<Prospect> {
    let path = path.as_ref();
    Prospect::from_rows(&read_matrix_csv(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn prospect_to_csv(x: &Prospect) -> String {
    let mut out = String::new();
    for row in x.rows() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_prospect_csv(x: &Prospect, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, prospect_to_csv(x)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFiles {
    pub preferred: PathBuf,
    pub dominated: PathBuf,
}

/// On-disk instance description. Relative prospect paths are resolved
/// against the directory of the JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub lipschitz: f64,
    #[serde(default)]
    pub law_invariant: bool,
    pub w0: PathBuf,
    #[serde(default)]
    pub pairs: Vec<PairFiles>,
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let spec: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let read = |p: &Path| read_prospect_csv(dir.join(p));
    let pairs = spec
        .pairs
        .iter()
        .map(|p| {
            Ok(EcdsPair {
                preferred: read(&p.preferred)?,
                dominated: read(&p.dominated)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Instance::new(read(&spec.w0)?, pairs, spec.lipschitz, spec.law_invariant))
}

/// Writes `inst` as `instance.json` plus one CSV per prospect into `dir`.
pub fn save_instance(inst: &Instance, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let io = |source, p: &Path| Error::Io {
        path: p.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    write_prospect_csv(&inst.w0, dir.join("w0.csv"))?;
    let mut pairs = Vec::new();
    for (k, p) in inst.pairs.iter().enumerate() {
        let (w, y) = (format!("w{}.csv", k + 1), format!("y{}.csv", k + 1));
        write_prospect_csv(&p.preferred, dir.join(&w))?;
        write_prospect_csv(&p.dominated, dir.join(&y))?;
        pairs.push(PairFiles {
            preferred: w.into(),
            dominated: y.into(),
        });
    }
    let spec = InstanceFile {
        lipschitz: inst.lipschitz,
        law_invariant: inst.law_invariant,
        w0: "w0.csv".into(),
        pairs,
    };
    let path = dir.join("instance.json");
    let text = serde_json::to_string_pretty(&spec).expect("instance serializes") + "\n";
    std::fs::write(&path, text).map_err(|e| io(e, &path))?;
    Ok(path)
}
