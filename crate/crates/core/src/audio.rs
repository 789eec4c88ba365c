//! WAV decoding, mono downmix and linear-interpolation resampling.

use std::io::Cursor;
use std::path::Path;

use thiserror::Error;

/// Default rate every clip is resampled to before spectrogram analysis.
pub const DEFAULT_SAMPLE_RATE: u32 = 22_050;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed WAV container: {0}")]
    MalformedContainer(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("audio contains no sample frames")]
    EmptyAudio,
    #[error("resampling would produce an empty clip")]
    DegenerateOutput,
    #[error("invalid sample rate {0}")]
    InvalidSampleRate(u32),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Mono audio at a known sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
    source_id: String,
}

impl AudioClip {
    /// Builds a clip, rejecting empty or non-finite sample buffers.
    pub fn new(
        samples: Vec<f64>,
        sample_rate: u32,
        source_id: impl Into<String>,
    ) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidSampleRate(sample_rate));
        }
        if samples.is_empty() {
            return Err(AudioError::EmptyAudio);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(AudioError::MalformedContainer(
                "non-finite sample value".into(),
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Same metadata, new samples. Callers guarantee the buffer is non-empty
    /// and finite.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(!samples.is_empty());
        Self {
            samples,
            sample_rate: self.sample_rate,
            source_id: self.source_id.clone(),
        }
    }
}

/// Sample encodings accepted by [`decode_wav`] and produced by [`encode_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Pcm24,
    Float32,
}

impl WavEncoding {
    fn spec(self) -> (u16, hound::SampleFormat) {
        match self {
            WavEncoding::Pcm16 => (16, hound::SampleFormat::Int),
            WavEncoding::Pcm24 => (24, hound::SampleFormat::Int),
            WavEncoding::Float32 => (32, hound::SampleFormat::Float),
        }
    }
}

fn map_hound(err: hound::Error) -> AudioError {
    match err {
        hound::Error::Unsupported => {
            AudioError::UnsupportedEncoding("format not supported by decoder".into())
        }
        hound::Error::TooWide | hound::Error::InvalidSampleFormat => {
            AudioError::UnsupportedEncoding(err.to_string())
        }
        other => AudioError::MalformedContainer(other.to_string()),
    }
}

/// Decodes a RIFF/WAVE byte buffer into a mono clip.
///
/// Integer PCM is divided by `2^(bits-1)`; stereo frames are averaged.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, AudioError> {
    decode_wav_with_id(bytes, "")
}

pub fn decode_wav_with_id(bytes: &[u8], source_id: &str) -> Result<AudioClip, AudioError> {
    let reader = hound::WavReader::new(Cursor::new(bytes)).map_err(map_hound)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(AudioError::UnsupportedEncoding(format!(
            "{channels} channels"
        )));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = (1i64 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<Result<_, _>>()
                .map_err(map_hound)?
        }
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(map_hound)?,
        (fmt, bits) => {
            return Err(AudioError::UnsupportedEncoding(format!(
                "{bits}-bit {fmt:?}"
            )))
        }
    };
    if !interleaved.len().is_multiple_of(channels) {
        return Err(AudioError::MalformedContainer(
            "partial sample frame".into(),
        ));
    }
    let mono = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(2)
            .map(|f| (f[0] + f[1]) / 2.0)
            .collect()
    };
    AudioClip::new(mono, spec.sample_rate, source_id)
}

/// Reads and decodes a WAV file from disk.
pub fn read_wav(path: &Path) -> Result<AudioClip, AudioError> {
    let bytes = std::fs::read(path).map_err(|source| AudioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_wav_with_id(&bytes, &path.display().to_string())
}

/// Encodes a mono clip as a WAV byte buffer. Integer encodings clamp to the
/// representable range after scaling by `2^(bits-1)`.
pub fn encode_wav(clip: &AudioClip, encoding: WavEncoding) -> Vec<u8> {
    let (bits, sample_format) = encoding.spec();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: bits,
        sample_format,
    };
    let mut cursor = Cursor::new(Vec::new());
    {
        // Writing into an in-memory cursor cannot fail for valid specs.
        let mut writer = hound::WavWriter::new(&mut cursor, spec).expect("valid wav spec");
        match encoding {
            WavEncoding::Float32 => {
                for &s in &clip.samples {
                    writer.write_sample(s as f32).expect("in-memory write");
                }
            }
            WavEncoding::Pcm16 | WavEncoding::Pcm24 => {
                let scale = (1i64 << (bits - 1)) as f64;
                let (lo, hi) = (-scale, scale - 1.0);
                for &s in &clip.samples {
                    let q = (s * scale).round().clamp(lo, hi) as i32;
                    writer.write_sample(q).expect("in-memory write");
                }
            }
        }
        writer.finalize().expect("in-memory finalize");
    }
    cursor.into_inner()
}

/// Evaluates `out[n] = interp(samples, n * step)` for `n < out_len`, holding
/// the last sample for positions past the end.
pub(crate) fn interpolate_at(samples: &[f64], step: f64, out_len: usize) -> Vec<f64> {
    let last = samples.len() - 1;
    (0..out_len)
        .map(|n| {
            let pos = n as f64 * step;
            let i = pos.floor() as usize;
            if i >= last {
                return samples[last];
            }
            let frac = pos - i as f64;
            if frac == 0.0 {
                samples[i]
            } else {
                samples[i] + (samples[i + 1] - samples[i]) * frac
            }
        })
        .collect()
}

/// Linear-interpolation resampling to `target_rate`.
///
/// Output length is `round(len * target / source)`. No anti-alias filtering
/// is applied, so downsampling folds content above the new Nyquist.
pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip, AudioError> {
    if target_rate == 0 {
        return Err(AudioError::InvalidSampleRate(target_rate));
    }
    if target_rate == clip.sample_rate {
        return Ok(clip.clone());
    }
    let out_len =
        (clip.len() as f64 * target_rate as f64 / clip.sample_rate as f64).round() as usize;
    if out_len == 0 {
        return Err(AudioError::DegenerateOutput);
    }
    let step = clip.sample_rate as f64 / target_rate as f64;
    let samples = interpolate_at(&clip.samples, step, out_len);
    Ok(AudioClip {
        samples,
        sample_rate: target_rate,
        source_id: clip.source_id.clone(),
    })
}

/// Counts sign changes, treating exact zeros as belonging to the positive side.
pub fn zero_crossings(samples: &[f64]) -> usize {
    samples
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count()
}
