//! Class-per-directory dataset indexing: `<root>/<class>/<image files>`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const IMAGE_EXTENSIONS: &[&str] = &["png", "ppm"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub path: PathBuf,
    /// Index into [`DatasetIndex::classes`].
    pub label: usize,
}

/// Sorted listing of a dataset. Entries are ordered by (class, file name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetIndex {
    root: PathBuf,
    classes: Vec<String>,
    entries: Vec<DatasetEntry>,
}

impl DatasetIndex {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn entries(&self) -> &[DatasetEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.label).collect()
    }

    /// Entry path relative to the root, with `/` separators.
    pub fn relative_path(&self, entry: &DatasetEntry) -> String {
        let rel = entry.path.strip_prefix(&self.root).unwrap_or(&entry.path);
        rel.components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/")
    }
}

fn is_image_file(path: &Path) -> bool {
    let hidden = path
        .file_name()
        .map(|n| n.to_string_lossy().starts_with('.'))
        .unwrap_or(true);
    !hidden
        && path.is_file()
        && path
            .extension()
            .map(|e| {
                let e = e.to_string_lossy().to_ascii_lowercase();
                IMAGE_EXTENSIONS.contains(&e.as_str())
            })
            .unwrap_or(false)
}

fn sorted_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// Lists `<root>/<class>/*.{png,ppm}`. Fails on an empty root or an empty class directory.
pub fn index_dataset(root: impl AsRef<Path>) -> Result<DatasetIndex> {
    let root = root.as_ref();
    let class_dirs = sorted_dir(root)?
        .into_iter()
        .filter(|p| {
            p.is_dir()
                && !p
                    .file_name()
                    .map(|n| n.to_string_lossy().starts_with('.'))
                    .unwrap_or(true)
        })
        .collect::<Vec<_>>();
    if class_dirs.is_empty() {
        return Err(Error::Dataset {
            path: root.to_owned(),
            message: "no class subdirectories".into(),
        });
    }

    let mut classes = Vec::with_capacity(class_dirs.len());
    let mut entries = Vec::new();
    for (label, dir) in class_dirs.iter().enumerate() {
        let files = sorted_dir(dir)?
            .into_iter()
            .filter(|p| is_image_file(p))
            .collect::<Vec<_>>();
        if files.is_empty() {
            return Err(Error::Dataset {
                path: dir.clone(),
                message: "class directory contains no images".into(),
            });
        }
        classes.push(dir.file_name().unwrap().to_string_lossy().into_owned());
        entries.extend(files.into_iter().map(|path| DatasetEntry { path, label }));
    }

    Ok(DatasetIndex {
        root: root.to_owned(),
        classes,
        entries,
    })
}
