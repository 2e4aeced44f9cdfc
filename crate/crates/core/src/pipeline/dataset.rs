//! Dataset ingestion: PH2-style case directories, DermIS/DermQuest-style
//! flat trees, and plain CSV manifests.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Ph2,
    Dermis,
    Dermquest,
    Custom,
}

impl std::str::FromStr for SourceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ph2" => Ok(SourceKind::Ph2),
            "dermis" => Ok(SourceKind::Dermis),
            "dermquest" => Ok(SourceKind::Dermquest),
            "custom" => Ok(SourceKind::Custom),
            other => Err(Error::InvalidConfig(format!("unknown source '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetRecord {
    pub id: String,
    pub image_path: PathBuf,
    pub truth_mask_path: Option<PathBuf>,
    pub label: Option<ClassLabel>,
    pub source: SourceKind,
}

/// Loads records from `root` according to the source layout. Records come
/// back sorted by id; an empty result is an error.
pub fn ingest(root: &Path, kind: SourceKind) -> Result<Vec<DatasetRecord>> {
    let mut records = match kind {
        SourceKind::Ph2 => ingest_ph2(root)?,
        SourceKind::Dermis | SourceKind::Dermquest => ingest_flat_tree(root, kind)?,
        SourceKind::Custom => ingest_manifest(&root.join("manifest.csv"))?,
    };
    records.sort_by(|a, b| a.id.cmp(&b.id));
    if records.is_empty() {
        return Err(Error::Dataset(format!(
            "no usable records under {}",
            root.display()
        )));
    }
    Ok(records)
}

fn is_image_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()),
        Some(ref e) if e == "png" || e == "bmp"
    )
}

/// PH2 layout: one directory per case holding
/// `<ID>_Dermoscopic_Image/<ID>.<ext>` and `<ID>_lesion/<ID>_lesion.<ext>`,
/// with diagnoses in a pipe-separated `PH2_dataset.txt` index (clinical
/// diagnosis 0/1 = nevus, 2 = melanoma).
fn ingest_ph2(root: &Path) -> Result<Vec<DatasetRecord>> {
    let images_root = ["PH2 Dataset images", "images"]
        .iter()
        .map(|d| root.join(d))
        .find(|p| p.is_dir())
        .unwrap_or_else(|| root.to_path_buf());
    let labels = read_ph2_index(root);

    let mut records = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&images_root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for case_dir in entries {
        if !case_dir.is_dir() {
            continue;
        }
        let id = match case_dir.file_name().and_then(|n| n.to_str()) {
            Some(n) => n.to_string(),
            None => continue,
        };
        let image = find_file(
            &case_dir.join(format!("{id}_Dermoscopic_Image")),
            &id.to_string(),
        );
        let mask = find_file(&case_dir.join(format!("{id}_lesion")), &format!("{id}_lesion"));
        match image {
            Some(image_path) => records.push(DatasetRecord {
                label: labels.as_ref().and_then(|m| m.get(&id).copied()),
                id,
                image_path,
                truth_mask_path: mask,
                source: SourceKind::Ph2,
            }),
            None => eprintln!("warning: skipping case '{id}': no dermoscopic image found"),
        }
    }
    Ok(records)
}

fn find_file(dir: &Path, stem: &str) -> Option<PathBuf> {
    for ext in ["bmp", "png"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.is_file() {
            return Some(p);
        }
    }
    None
}

fn read_ph2_index(root: &Path) -> Option<std::collections::BTreeMap<String, ClassLabel>> {
    let index = ["PH2_dataset.txt", "PH2_dataset .txt"]
        .iter()
        .map(|n| root.join(n))
        .find(|p| p.is_file())?;
    let text = std::fs::read_to_string(index).ok()?;
    let mut map = std::collections::BTreeMap::new();
    for line in text.lines() {
        let tokens: Vec<&str> = line
            .split('|')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .collect();
        let Some(id_pos) = tokens.iter().position(|t| t.starts_with("IMD")) else {
            continue;
        };
        // the first bare 0/1/2 after the id is the clinical diagnosis
        let diag = tokens[id_pos + 1..]
            .iter()
            .find_map(|t| match *t {
                "0" | "1" => Some(ClassLabel::NonMelanoma),
                "2" => Some(ClassLabel::Melanoma),
                _ => None,
            });
        if let Some(label) = diag {
            map.insert(tokens[id_pos].to_string(), label);
        }
    }
    Some(map)
}

/// DermIS/DermQuest-style tree: every readable image that is not a mask
/// becomes a record; `<stem>_lesion.*` or `<stem>_mask.*` next to it is
/// its ground truth, and a path component containing "melanoma" (without
/// "not"/"non") labels it malignant.
fn ingest_flat_tree(root: &Path, kind: SourceKind) -> Result<Vec<DatasetRecord>> {
    let mut records = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            if !is_image_file(&path) {
                continue;
            }
            let stem = match path.file_stem().and_then(|s| s.to_str()) {
                Some(s) => s.to_string(),
                None => continue,
            };
            if stem.ends_with("_lesion") || stem.ends_with("_mask") {
                continue;
            }
            let dir = path.parent().unwrap_or(root);
            let mask = find_file(dir, &format!("{stem}_lesion"))
                .or_else(|| find_file(dir, &format!("{stem}_mask")));
            let label = path.components().rev().find_map(|c| {
                let c = c.as_os_str().to_str()?.to_ascii_lowercase();
                if c.contains("melanoma") {
                    if c.contains("not") || c.contains("non") {
                        Some(ClassLabel::NonMelanoma)
                    } else {
                        Some(ClassLabel::Melanoma)
                    }
                } else {
                    None
                }
            });
            records.push(DatasetRecord {
                id: stem,
                image_path: path,
                truth_mask_path: mask,
                label,
                source: kind,
            });
        }
    }
    Ok(records)
}

/// CSV manifest with header `id,image,mask,label`; mask and label may be
/// empty. Relative paths resolve against the manifest's directory.
pub fn ingest_manifest(path: &Path) -> Result<Vec<DatasetRecord>> {
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Dataset(format!("cannot read {}: {e}", path.display())))?;

    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let row = row.map_err(|e| Error::Dataset(format!("line {line}: {e}")))?;
        let id = row
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Dataset(format!("line {line}: missing id")))?
            .to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::Dataset(format!("line {line}: duplicate id '{id}'")));
        }
        let image = row
            .get(1)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Dataset(format!("line {line} (id '{id}'): missing image path")))?;
        let image_path = resolve(&base, image);
        if !image_path.is_file() {
            return Err(Error::Dataset(format!(
                "line {line} (id '{id}'): image '{}' does not exist",
                image_path.display()
            )));
        }
        let truth_mask_path = match row.get(2).filter(|s| !s.is_empty()) {
            Some(m) => {
                let p = resolve(&base, m);
                if !p.is_file() {
                    return Err(Error::Dataset(format!(
                        "line {line} (id '{id}'): mask '{}' does not exist",
                        p.display()
                    )));
                }
                Some(p)
            }
            None => None,
        };
        let label = match row.get(3).filter(|s| !s.is_empty()) {
            Some(l) => Some(
                ClassLabel::parse(l)
                    .map_err(|e| Error::Dataset(format!("line {line} (id '{id}'): {e}")))?,
            ),
            None => None,
        };
        records.push(DatasetRecord {
            id,
            image_path,
            truth_mask_path,
            label,
            source: SourceKind::Custom,
        });
    }
    if records.is_empty() {
        return Err(Error::Dataset(format!(
            "manifest {} has no records",
            path.display()
        )));
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
