use std::io::Write;
use std::path::Path;

use super::{DspError, Scale, Spectrogram};

/// Power floor before taking logarithms.
pub const AMIN: f64 = 1e-10;
/// Lowest decibel value kept; everything quieter clamps here.
pub const DB_FLOOR: f64 = -80.0;

/// Decibels relative to the loudest cell, clamped to `[DB_FLOOR, 0]`.
pub fn power_to_db(spec: &Spectrogram) -> Result<Spectrogram, DspError> {
    if !spec.scale.is_power() {
        return Err(DspError::WrongScale(spec.scale));
    }
    let p_max = spec.data.iter().copied().fold(0.0f64, f64::max);
    let reference = 10.0 * p_max.max(AMIN).log10();
    let data = spec
        .data
        .iter()
        .map(|&p| (10.0 * p.max(AMIN).log10() - reference).clamp(DB_FLOOR, 0.0))
        .collect();
    Ok(Spectrogram {
        data,
        scale: Scale::Decibel,
        ..spec.clone()
    })
}

/// 8-bit grayscale spectrogram, row-major `[n_bins x n_frames]` with bin 0
/// as the first row.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramImage {
    pixels: Vec<u8>,
    n_bins: usize,
    n_frames: usize,
    db_range: (f64, f64),
}

impl SpectrogramImage {
    pub fn new(
        pixels: Vec<u8>,
        n_bins: usize,
        n_frames: usize,
        db_range: (f64, f64),
    ) -> Result<Self, DspError> {
        if pixels.len() != n_bins * n_frames || n_bins == 0 || n_frames == 0 {
            return Err(DspError::ShapeMismatch {
                expected: n_bins * n_frames,
                actual: pixels.len(),
            });
        }
        if db_range.1.partial_cmp(&db_range.0) != Some(std::cmp::Ordering::Greater) {
            return Err(DspError::InvalidConfig(format!(
                "dB range {db_range:?} must be increasing"
            )));
        }
        Ok(Self {
            pixels,
            n_bins,
            n_frames,
            db_range,
        })
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn db_range(&self) -> (f64, f64) {
        self.db_range
    }

    pub fn get(&self, bin: usize, frame: usize) -> u8 {
        self.pixels[bin * self.n_frames + frame]
    }

    pub fn row(&self, bin: usize) -> &[u8] {
        &self.pixels[bin * self.n_frames..(bin + 1) * self.n_frames]
    }
}

/// Maps `[-80, 0]` dB linearly onto `[0, 255]`, rounding halves up.
pub fn to_grayscale(spec: &Spectrogram) -> Result<SpectrogramImage, DspError> {
    if spec.scale != Scale::Decibel {
        return Err(DspError::WrongScale(spec.scale));
    }
    let span = -DB_FLOOR;
    let pixels = spec
        .data
        .iter()
        .map(|&d| {
            let v = ((d - DB_FLOOR) / span * 255.0 + 0.5).floor();
            v.clamp(0.0, 255.0) as u8
        })
        .collect();
    SpectrogramImage::new(pixels, spec.n_bins, spec.n_frames, (DB_FLOOR, 0.0))
}

/// Binary PGM (`P5`, maxval 255). The highest frequency bin is written first
/// so bin 0 appears on the bottom row.
pub fn write_pgm(image: &SpectrogramImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.n_frames, image.n_bins).into_bytes();
    out.reserve(image.pixels.len());
    for b in (0..image.n_bins).rev() {
        out.extend_from_slice(image.row(b));
    }
    out
}

/// Parses a binary PGM written by [`write_pgm`]. The dB range is not stored
/// in the image and comes back as `[-80, 0]`.
pub fn read_pgm(bytes: &[u8]) -> Result<SpectrogramImage, DspError> {
    let bad = |m: &str| DspError::MalformedImage(m.to_string());
    let mut pos = 0;
    let mut token = || -> Result<String, DspError> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(bad("missing P5 magic"));
    }
    let parse = |s: String| {
        s.parse::<usize>()
            .map_err(|_| bad("non-numeric header field"))
    };
    let width = parse(token()?)?;
    let height = parse(token()?)?;
    let maxval = parse(token()?)?;
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let raster = bytes.get(pos..).unwrap_or_default();
    if raster.len() != width * height {
        return Err(bad(&format!(
            "expected {} raster bytes, found {}",
            width * height,
            raster.len()
        )));
    }
    let mut pixels = Vec::with_capacity(raster.len());
    for b in 0..height {
        let src_row = height - 1 - b;
        pixels.extend_from_slice(&raster[src_row * width..(src_row + 1) * width]);
    }
    SpectrogramImage::new(pixels, height, width, (DB_FLOOR, 0.0))
}

/// Ordered `key=value` provenance record written next to each image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sidecar {
    entries: Vec<(String, String)>,
}

impl Sidecar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(k);
            s.push('=');
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }

    pub fn write_to(&self, path: &Path) -> Result<(), DspError> {
        let mut f = std::fs::File::create(path).map_err(|source| DspError::Io {
            path: path.display().to_string(),
            source,
        })?;
        f.write_all(self.to_text().as_bytes())
            .map_err(|source| DspError::Io {
                path: path.display().to_string(),
                source,
            })
    }
}
