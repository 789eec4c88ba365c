use std::collections::{BTreeMap, HashMap};

use super::{ClassIndexMap, DatasetError, ManifestEntry};
use crate::rng::AugmentRng;

/// Train / validation / test proportions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios([f64; 3]);

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, DatasetError> {
        let r = [train, val, test];
        let sum: f64 = r.iter().sum();
        if r.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::BadRatios { ratios: r, sum });
        }
        Ok(Self(r))
    }

    pub fn train(&self) -> f64 {
        self.0[0]
    }

    pub fn val(&self) -> f64 {
        self.0[1]
    }

    pub fn test(&self) -> f64 {
        self.0[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    /// Cut points `(round(n * train), round(n * (train + val)))`.
    pub fn cuts(&self, n: usize) -> (usize, usize) {
        let a = (n as f64 * self.0[0]).round() as usize;
        let b = (n as f64 * (self.0[0] + self.0[1])).round() as usize;
        (a.min(n), b.clamp(a.min(n), n))
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self([0.70, 0.15, 0.15])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPart {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitAssignment {
    pub train: Vec<ManifestEntry>,
    pub validation: Vec<ManifestEntry>,
    pub test: Vec<ManifestEntry>,
    pub seed: u64,
    pub ratios: SplitRatios,
}

impl SplitAssignment {
    pub fn part(&self, part: SplitPart) -> &[ManifestEntry] {
        match part {
            SplitPart::Train => &self.train,
            SplitPart::Validation => &self.validation,
            SplitPart::Test => &self.test,
        }
    }

    /// `(class, [train, val, test])` counts in class-index order.
    pub fn class_counts(&self, classes: &ClassIndexMap) -> Vec<(String, [usize; 3])> {
        let mut counts = vec![[0usize; 3]; classes.len()];
        for (p, part) in [&self.train, &self.validation, &self.test]
            .iter()
            .enumerate()
        {
            for e in part.iter() {
                if let Some(i) = classes.index_of(&e.label) {
                    counts[i][p] += 1;
                }
            }
        }
        classes.names().iter().cloned().zip(counts).collect()
    }

    pub fn to_split_file(&self) -> SplitFile {
        let paths = |v: &[ManifestEntry]| v.iter().map(|e| e.path.clone()).collect();
        SplitFile {
            seed: self.seed,
            ratios: self.ratios,
            train: paths(&self.train),
            validation: paths(&self.validation),
            test: paths(&self.test),
        }
    }
}

fn canonical(entries: &[ManifestEntry]) -> Vec<ManifestEntry> {
    let mut sorted = entries.to_vec();
    sorted.sort_by(|a, b| a.path.cmp(&b.path));
    sorted
}

fn check_class_sizes(
    entries: &[ManifestEntry],
) -> Result<BTreeMap<&str, Vec<&ManifestEntry>>, DatasetError> {
    let mut by_class: BTreeMap<&str, Vec<&ManifestEntry>> = BTreeMap::new();
    for e in entries {
        by_class.entry(e.label.as_str()).or_default().push(e);
    }
    for (label, members) in &by_class {
        if members.len() < 3 {
            return Err(DatasetError::ClassTooSmall {
                label: label.to_string(),
                count: members.len(),
            });
        }
    }
    Ok(by_class)
}

/// Per-class seeded split.
///
/// Entries are sorted by path, grouped by label in lexicographic order, and
/// each class is shuffled by one generator seeded with `seed` before being
/// cut at `round(n * r_train)` and `round(n * (r_train + r_val))`.
pub fn stratified_split(
    entries: &[ManifestEntry],
    ratios: SplitRatios,
    seed: u64,
) -> Result<SplitAssignment, DatasetError> {
    let sorted = canonical(entries);
    let by_class = check_class_sizes(&sorted)?;
    let mut rng = AugmentRng::new(seed);
    let mut out = SplitAssignment {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        seed,
        ratios,
    };
    for members in by_class.into_values() {
        let mut members: Vec<ManifestEntry> = members.into_iter().cloned().collect();
        rng.shuffle(&mut members);
        let (a, b) = ratios.cuts(members.len());
        let test = members.split_off(b);
        let val = members.split_off(a);
        out.train.extend(members);
        out.validation.extend(val);
        out.test.extend(test);
    }
    Ok(out)
}

/// Leakage-aware split: every group (entries sharing a `group_key`; entries
/// without one form singleton groups) lands in exactly one part.
///
/// Groups are shuffled as units and filled into train, then validation, then
/// test until each part reaches its cumulative target of the total entry
/// count. Per-class proportions are not guaranteed in this mode.
pub fn group_split(
    entries: &[ManifestEntry],
    ratios: SplitRatios,
    seed: u64,
) -> Result<SplitAssignment, DatasetError> {
    let sorted = canonical(entries);
    check_class_sizes(&sorted)?;
    let mut groups: BTreeMap<String, Vec<ManifestEntry>> = BTreeMap::new();
    for e in sorted {
        let key = match &e.group_key {
            Some(g) => format!("g:{g}"),
            None => format!("p:{}", e.path),
        };
        groups.entry(key).or_default().push(e);
    }
    let mut groups: Vec<Vec<ManifestEntry>> = groups.into_values().collect();
    let mut rng = AugmentRng::new(seed);
    rng.shuffle(&mut groups);
    let (t1, t2) = ratios.cuts(entries.len());
    let mut out = SplitAssignment {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        seed,
        ratios,
    };
    let mut count = 0;
    for g in groups {
        let n = g.len();
        if count < t1 {
            out.train.extend(g);
        } else if count < t2 {
            out.validation.extend(g);
        } else {
            out.test.extend(g);
        }
        count += n;
    }
    Ok(out)
}

/// On-disk split: a `seed=<u64> ratios=<r1>,<r2>,<r3>` header followed by
/// `[train]`, `[val]` and `[test]` sections of one path per line.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitFile {
    pub seed: u64,
    pub ratios: SplitRatios,
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl SplitFile {
    pub fn to_text(&self) -> String {
        let r = self.ratios.as_array();
        let mut s = format!("seed={} ratios={},{},{}\n", self.seed, r[0], r[1], r[2]);
        for (name, paths) in [
            ("train", &self.train),
            ("val", &self.validation),
            ("test", &self.test),
        ] {
            s.push_str(&format!("[{name}]\n"));
            for p in paths {
                s.push_str(p);
                s.push('\n');
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let bad = |line: usize, msg: &str| DatasetError::MalformedSplitFile {
            line,
            message: msg.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
        let mut seed = None;
        let mut ratios = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("seed", v)) => {
                    seed = Some(v.parse::<u64>().map_err(|_| bad(1, "seed is not a u64"))?)
                }
                Some(("ratios", v)) => {
                    let r: Vec<f64> = v
                        .split(',')
                        .map(|x| x.parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad(1, "ratios are not numbers"))?;
                    if r.len() != 3 {
                        return Err(bad(1, "expected three ratios"));
                    }
                    ratios = Some(SplitRatios::new(r[0], r[1], r[2])?);
                }
                _ => return Err(bad(1, "unknown header field")),
            }
        }
        let mut file = SplitFile {
            seed: seed.ok_or_else(|| bad(1, "missing seed"))?,
            ratios: ratios.ok_or_else(|| bad(1, "missing ratios"))?,
            train: Vec::new(),
            validation: Vec::new(),
            test: Vec::new(),
        };
        let mut current: Option<&mut Vec<String>> = None;
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            match line {
                "[train]" => current = Some(&mut file.train),
                "[val]" => current = Some(&mut file.validation),
                "[test]" => current = Some(&mut file.test),
                path => match current.as_deref_mut() {
                    Some(list) => list.push(path.to_string()),
                    None => return Err(bad(no, "path outside any section")),
                },
            }
        }
        Ok(file)
    }

    /// Maps the listed paths back onto manifest entries.
    pub fn resolve(&self, entries: &[ManifestEntry]) -> Result<SplitAssignment, DatasetError> {
        let by_path: HashMap<&str, &ManifestEntry> =
            entries.iter().map(|e| (e.path.as_str(), e)).collect();
        let lookup = |paths: &[String]| -> Result<Vec<ManifestEntry>, DatasetError> {
            paths
                .iter()
                .map(|p| {
                    by_path
                        .get(p.as_str())
                        .map(|e| (*e).clone())
                        .ok_or_else(|| DatasetError::UnknownPath(p.clone()))
                })
                .collect()
        };
        Ok(SplitAssignment {
            train: lookup(&self.train)?,
            validation: lookup(&self.validation)?,
            test: lookup(&self.test)?,
            seed: self.seed,
            ratios: self.ratios,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(label: &str, n: usize) -> Vec<ManifestEntry> {
        (0..n)
            .map(|i| ManifestEntry {
                path: format!("{label}/{i:05}.wav"),
                label: label.into(),
                group_key: Some(format!("{label}-loc{}", i % 7)),
            })
            .collect()
    }

    #[test]
    fn degenerate_ratios() {
        let e = entries("park", 10);
        let s = stratified_split(&e, SplitRatios::new(1.0, 0.0, 0.0).unwrap(), 1).unwrap();
        assert_eq!(s.train.len(), 10);
        assert!(s.validation.is_empty() && s.test.is_empty());
    }

    #[test]
    fn ten_classes_of_1440() {
        let e = entries("park", 1440);
        let s = stratified_split(&e, SplitRatios::default(), 7).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.len(), s.test.len()),
            (1008, 216, 216)
        );
    }

    #[test]
    fn input_order_does_not_matter() {
        let mut e = entries("a", 20);
        e.extend(entries("b", 13));
        let s1 = stratified_split(&e, SplitRatios::default(), 99).unwrap();
        e.reverse();
        let s2 = stratified_split(&e, SplitRatios::default(), 99).unwrap();
        assert_eq!(s1, s2);
        let s3 = stratified_split(&e, SplitRatios::default(), 100).unwrap();
        assert_ne!(s1.train, s3.train);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            SplitRatios::new(0.7, 0.2, 0.2),
            Err(DatasetError::BadRatios { .. })
        ));
        assert!(SplitRatios::new(-0.1, 0.6, 0.5).is_err());
        let e = entries("tiny", 2);
        assert!(matches!(
            stratified_split(&e, SplitRatios::default(), 0),
            Err(DatasetError::ClassTooSmall { count: 2, .. })
        ));
    }

    #[test]
    fn group_split_keeps_groups_whole() {
        let mut e = entries("a", 70);
        e.extend(entries("b", 70));
        let s = group_split(&e, SplitRatios::default(), 5).unwrap();
        let part_of = |g: &str| {
            [&s.train, &s.validation, &s.test]
                .iter()
                .enumerate()
                .filter(|(_, p)| p.iter().any(|x| x.group_key.as_deref() == Some(g)))
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        for i in 0..7 {
            assert_eq!(part_of(&format!("a-loc{i}")).len(), 1);
        }
        assert_eq!(s.train.len() + s.validation.len() + s.test.len(), 140);
    }

    #[test]
    fn split_file_round_trip() {
        let mut e = entries("a", 10);
        e.extend(entries("b", 10));
        let s = stratified_split(&e, SplitRatios::default(), 3).unwrap();
        let text = s.to_split_file().to_text();
        assert!(text.starts_with("seed=3 ratios=0.7,0.15,0.15\n[train]\n"));
        let parsed = SplitFile::parse(&text).unwrap();
        assert_eq!(parsed.resolve(&e).unwrap(), s);
        assert!(matches!(
            SplitFile::parse("seed=1 ratios=0.7,0.15,0.15\nstray.wav\n"),
            Err(DatasetError::MalformedSplitFile { line: 2, .. })
        ));
        let missing = SplitFile::parse("seed=1 ratios=1,0,0\n[train]\nnope.wav\n").unwrap();
        assert!(matches!(
            missing.resolve(&e),
            Err(DatasetError::UnknownPath(_))
        ));
    }
}
