//! Binary checkpoint format.
//!
//! ```text
//! "ASCM"  u16 version  u64 spec fingerprint
//! u32 len + spec text
//! u32 n_classes, each u32 len + name
//! f64 norm mean  f64 norm std
//! u32 epoch  f64 best_val_accuracy
//! u64 rng seed  4 x u64 rng state
//! u8 optimizer (0 sgd, 1 momentum)  f64 momentum  f64 learning rate
//! u32 n_params  u32 n_velocity
//! tensors: u32 rank, rank x u32 dims, f64 data
//! u32 CRC32 of everything above
//! ```
//! All integers and floats are little-endian.

use std::path::Path;

use super::{ModelError, Network, NetworkSpec, Optimizer, OptimizerKind, Tensor};
use crate::dataset::{ClassIndexMap, NormalizationStats};
use crate::rng::AugmentRng;

pub const MAGIC: &[u8; 4] = b"ASCM";
pub const FORMAT_VERSION: u16 = 1;

/// Everything needed to resume training or run inference.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub spec: NetworkSpec,
    pub params: Vec<Tensor>,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    /// Empty for plain SGD.
    pub velocity: Vec<Tensor>,
    /// 1-based epoch at which this state was saved.
    pub epoch: u32,
    pub best_val_accuracy: f64,
    pub rng_seed: u64,
    pub rng_state: [u64; 4],
    pub classes: ClassIndexMap,
    pub normalization: NormalizationStats,
}

impl Checkpoint {
    pub fn from_parts(
        network: &Network,
        optimizer: &Optimizer,
        epoch: u32,
        best_val_accuracy: f64,
        rng: &AugmentRng,
        classes: &ClassIndexMap,
        normalization: NormalizationStats,
    ) -> Self {
        Self {
            spec: network.spec().clone(),
            params: network.params().to_vec(),
            optimizer: optimizer.kind(),
            learning_rate: optimizer.learning_rate(),
            velocity: optimizer.velocity().to_vec(),
            epoch,
            best_val_accuracy,
            rng_seed: rng.seed(),
            rng_state: rng.state(),
            classes: classes.clone(),
            normalization,
        }
    }

    pub fn network(&self) -> Result<Network, ModelError> {
        Network::new(self.spec.clone(), self.params.clone())
    }

    pub fn restore_optimizer(&self) -> Optimizer {
        Optimizer::from_state(self.optimizer, self.learning_rate, self.velocity.clone())
    }

    pub fn restore_rng(&self) -> AugmentRng {
        AugmentRng::from_state(self.rng_seed, self.rng_state)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u16(FORMAT_VERSION);
        w.u64(self.spec.fingerprint());
        w.str(&self.spec.canonical());
        w.u32(self.classes.len() as u32);
        for name in self.classes.names() {
            w.str(name);
        }
        w.f64(self.normalization.mean);
        w.f64(self.normalization.std);
        w.u32(self.epoch);
        w.f64(self.best_val_accuracy);
        w.u64(self.rng_seed);
        for s in self.rng_state {
            w.u64(s);
        }
        w.0.push(match self.optimizer {
            OptimizerKind::Sgd => 0,
            OptimizerKind::SgdMomentum { .. } => 1,
        });
        w.f64(self.optimizer.momentum());
        w.f64(self.learning_rate);
        w.u32(self.params.len() as u32);
        w.u32(self.velocity.len() as u32);
        for t in self.params.iter().chain(&self.velocity) {
            w.u32(t.shape().len() as u32);
            for &d in t.shape() {
                w.u32(d as u32);
            }
            for &v in t.data() {
                w.f64(v);
            }
        }
        let crc = crc32fast::hash(&w.0);
        w.u32(crc);
        w.0
    }

    /// Parses and validates a checkpoint. With `expected`, the stored spec
    /// must have the same fingerprint.
    pub fn from_bytes(bytes: &[u8], expected: Option<&NetworkSpec>) -> Result<Self, ModelError> {
        let corrupt = |m: &str| ModelError::CorruptCheckpoint(m.to_string());
        if bytes.len() < MAGIC.len() + 2 + 8 + 4 {
            return Err(corrupt("file is too short"));
        }
        if &bytes[..4] != MAGIC {
            return Err(corrupt("bad magic bytes"));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
        if crc32fast::hash(body) != stored {
            return Err(corrupt("CRC mismatch"));
        }
        let mut r = Reader { buf: body, pos: 4 };
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(ModelError::CorruptCheckpoint(format!(
                "unsupported format version {version}"
            )));
        }
        let fingerprint = r.u64()?;
        let spec = NetworkSpec::parse_canonical(&r.str()?)
            .map_err(|e| ModelError::CorruptCheckpoint(e.to_string()))?;
        if spec.fingerprint() != fingerprint {
            return Err(corrupt("spec text does not match its fingerprint"));
        }
        if let Some(exp) = expected {
            if exp.fingerprint() != fingerprint {
                return Err(ModelError::SpecMismatch {
                    expected: exp.canonical(),
                    found: spec.canonical(),
                });
            }
        }
        let n_classes = r.u32()? as usize;
        let names = (0..n_classes)
            .map(|_| r.str())
            .collect::<Result<Vec<_>, _>>()?;
        let classes = ClassIndexMap::from_names(&names);
        if classes.names() != names.as_slice() || n_classes != spec.n_classes {
            return Err(corrupt("class list is inconsistent"));
        }
        let normalization = NormalizationStats {
            mean: r.f64()?,
            std: r.f64()?,
        };
        let epoch = r.u32()?;
        let best_val_accuracy = r.f64()?;
        let rng_seed = r.u64()?;
        let mut rng_state = [0u64; 4];
        for s in &mut rng_state {
            *s = r.u64()?;
        }
        let tag = r.u8()?;
        let momentum = r.f64()?;
        let optimizer = match tag {
            0 => OptimizerKind::Sgd,
            1 => OptimizerKind::SgdMomentum { momentum },
            _ => return Err(corrupt("unknown optimizer tag")),
        };
        let learning_rate = r.f64()?;
        let n_params = r.u32()? as usize;
        let n_velocity = r.u32()? as usize;
        let shapes = spec.param_shapes();
        let want_velocity = match optimizer {
            OptimizerKind::Sgd => 0,
            OptimizerKind::SgdMomentum { .. } => shapes.len(),
        };
        if n_params != shapes.len() || n_velocity != want_velocity {
            return Err(corrupt("tensor count does not match the network shape"));
        }
        let mut tensors = Vec::with_capacity(n_params + n_velocity);
        for i in 0..n_params + n_velocity {
            let rank = r.u32()? as usize;
            let dims = (0..rank)
                .map(|_| r.u32().map(|d| d as usize))
                .collect::<Result<Vec<_>, _>>()?;
            if dims != shapes[i % shapes.len()] {
                return Err(ModelError::CorruptCheckpoint(format!(
                    "tensor {i} has shape {dims:?}, expected {:?}",
                    shapes[i % shapes.len()]
                )));
            }
            let n: usize = dims.iter().product();
            let data = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
            tensors.push(Tensor::from_vec(&dims, data));
        }
        if r.pos != body.len() {
            return Err(corrupt("trailing bytes after tensors"));
        }
        let velocity = tensors.split_off(n_params);
        Ok(Self {
            spec,
            params: tensors,
            optimizer,
            learning_rate,
            velocity,
            epoch,
            best_val_accuracy,
            rng_seed,
            rng_state,
            classes,
            normalization,
        })
    }

    /// Writes to a temporary sibling first, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let io = |source| ModelError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        std::fs::write(&tmp, self.to_bytes()).map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path, expected: Option<&NetworkSpec>) -> Result<Self, ModelError> {
        let bytes = std::fs::read(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_bytes(&bytes, expected)
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], ModelError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| ModelError::CorruptCheckpoint("unexpected end of data".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, ModelError> {
        Ok(u16::from_le_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }
    fn u32(&mut self) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn f64(&mut self) -> Result<f64, ModelError> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn str(&mut self) -> Result<String, ModelError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| ModelError::CorruptCheckpoint("string is not UTF-8".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let spec = NetworkSpec {
            input_height: 8,
            input_width: 8,
            conv_channels: vec![2],
            fc1_units: 4,
            fc2_units: 3,
            n_classes: 2,
        };
        let net = Network::init(&spec, 1).unwrap();
        let opt = Optimizer::new(OptimizerKind::default(), 0.01, net.params());
        Checkpoint::from_parts(
            &net,
            &opt,
            7,
            0.625,
            &AugmentRng::new(99),
            &ClassIndexMap::from_names(["park", "airport"]),
            NormalizationStats {
                mean: 0.4,
                std: 0.2,
            },
        )
    }

    #[test]
    fn round_trip() {
        let ck = sample();
        let bytes = ck.to_bytes();
        assert_eq!(&bytes[..4], b"ASCM");
        let back = Checkpoint::from_bytes(&bytes, Some(&ck.spec)).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn truncation_and_bit_flips_are_detected() {
        let bytes = sample().to_bytes();
        for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(
                Checkpoint::from_bytes(&bytes[..cut], None),
                Err(ModelError::CorruptCheckpoint(_))
            ));
        }
        let mut flipped = bytes.clone();
        flipped[bytes.len() / 2] ^= 0x10;
        assert!(matches!(
            Checkpoint::from_bytes(&flipped, None),
            Err(ModelError::CorruptCheckpoint(_))
        ));
    }

    #[test]
    fn spec_mismatch() {
        let ck = sample();
        let mut other = ck.spec.clone();
        other.fc1_units = 5;
        assert!(matches!(
            Checkpoint::from_bytes(&ck.to_bytes(), Some(&other)),
            Err(ModelError::SpecMismatch { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/model.ascm");
        let ck = sample();
        ck.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path, None).unwrap(), ck);
        assert!(matches!(
            Checkpoint::load(&dir.path().join("none"), None),
            Err(ModelError::Io { .. })
        ));
    }
}
