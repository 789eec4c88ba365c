use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// One labelled recording.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: String,
    /// Recording location or device, used by group-aware splitting.
    pub group_key: Option<String>,
}

/// Class names in ascending lexicographic order; a class index is its
/// position in that order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassIndexMap {
    names: Vec<String>,
}

impl ClassIndexMap {
    /// Deduplicates and sorts `names`.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Self {
            names: set.into_iter().collect(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    /// 64-bit FNV-1a over the newline-joined names.
    pub fn fingerprint(&self) -> u64 {
        crate::fnv1a64(self.names.join("\n").as_bytes())
    }
}

/// Parses a `path,label,group` CSV manifest. The `group` column is optional;
/// empty group cells become `None`.
pub fn parse_manifest(bytes: &[u8]) -> Result<(Vec<ManifestEntry>, ClassIndexMap), DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader.byte_headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name.as_bytes())
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    };
    let path_col = column("path")?;
    let label_col = column("label")?;
    let group_col = column("group").ok();

    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.byte_records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<String, DatasetError> {
            let raw = record.get(i).unwrap_or_default();
            String::from_utf8(raw.to_vec()).map_err(|_| DatasetError::UnknownLabelCharset { line })
        };
        let path = field(path_col)?;
        let label = field(label_col)?;
        if path.is_empty() || label.is_empty() {
            return Err(DatasetError::EmptyField { line });
        }
        let group_key = match group_col {
            Some(c) => Some(field(c)?).filter(|g| !g.is_empty()),
            None => None,
        };
        if !seen.insert(path.clone()) {
            return Err(DatasetError::DuplicatePath { path, line });
        }
        entries.push(ManifestEntry {
            path,
            label,
            group_key,
        });
    }
    let classes = ClassIndexMap::from_names(entries.iter().map(|e| e.label.clone()));
    Ok((entries, classes))
}

fn csv_error(err: csv::Error) -> DatasetError {
    let line = err.position().map_or(0, |p| p.line());
    match err.kind() {
        csv::ErrorKind::Utf8 { .. } => DatasetError::UnknownLabelCharset { line },
        _ => DatasetError::MalformedManifest(err.to_string()),
    }
}

/// Writes entries back in the manifest CSV format.
pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "label", "group"])
        .expect("in-memory csv");
    for e in entries {
        w.write_record([
            e.path.as_str(),
            e.label.as_str(),
            e.group_key.as_deref().unwrap_or(""),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only() {
        let (entries, classes) = parse_manifest(b"path,label,group\n").unwrap();
        assert!(entries.is_empty());
        assert!(classes.is_empty());
    }

    #[test]
    fn lexicographic_classes() {
        let text = b"path,label,group\na.wav,park,loc1\nb.wav,metro,\nc.wav,park,loc2\n";
        let (entries, classes) = parse_manifest(text).unwrap();
        assert_eq!(classes.names(), &["metro", "park"]);
        let idx: Vec<usize> = entries
            .iter()
            .map(|e| classes.index_of(&e.label).unwrap())
            .collect();
        assert_eq!(idx, vec![1, 0, 1]);
        assert_eq!(entries[0].group_key.as_deref(), Some("loc1"));
        assert_eq!(entries[1].group_key, None);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_manifest(b"file,label\na,b\n"),
            Err(DatasetError::MissingColumn(c)) if c == "path"
        ));
        assert!(matches!(
            parse_manifest(b"path,label\na,x\na,y\n"),
            Err(DatasetError::DuplicatePath { line: 3, .. })
        ));
        assert!(matches!(
            parse_manifest(b"path,label\na,\xff\xfe\n"),
            Err(DatasetError::UnknownLabelCharset { line: 2 })
        ));
        assert!(matches!(
            parse_manifest(b"path,label\n,x\n"),
            Err(DatasetError::EmptyField { .. })
        ));
    }

    #[test]
    fn group_column_optional_and_round_trip() {
        let (entries, _) = parse_manifest(b"label,path\nx,a.wav\n").unwrap();
        assert_eq!(entries[0].path, "a.wav");
        let text = write_manifest(&entries);
        assert_eq!(parse_manifest(text.as_bytes()).unwrap().0, entries);
    }
}
