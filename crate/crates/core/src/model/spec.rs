use super::ModelError;

/// Kernel size of every convolution (3x3, stride 1, padding 1).
pub const KERNEL: usize = 3;

/// Architecture of the classifier: a stack of conv-ReLU-maxpool blocks over a
/// single-channel image, then FC-ReLU, FC-ReLU and a softmax output layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetworkSpec {
    pub input_height: usize,
    pub input_width: usize,
    pub conv_channels: Vec<usize>,
    pub fc1_units: usize,
    pub fc2_units: usize,
    pub n_classes: usize,
}

impl NetworkSpec {
    pub const DEFAULT_CONV_CHANNELS: [usize; 3] = [8, 16, 32];
    pub const DEFAULT_FC1: usize = 256;
    pub const DEFAULT_FC2: usize = 128;

    /// Default architecture for a given input size and class count.
    pub fn with_defaults(input_height: usize, input_width: usize, n_classes: usize) -> Self {
        Self {
            input_height,
            input_width,
            conv_channels: Self::DEFAULT_CONV_CHANNELS.to_vec(),
            fc1_units: Self::DEFAULT_FC1,
            fc2_units: Self::DEFAULT_FC2,
            n_classes,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidSpec(m));
        if self.conv_channels.is_empty() {
            return bad("at least one conv block is required".into());
        }
        if self.n_classes < 2 {
            return bad(format!(
                "{} output classes; need at least 2",
                self.n_classes
            ));
        }
        if self.input_height == 0
            || self.input_width == 0
            || self.fc1_units == 0
            || self.fc2_units == 0
            || self.conv_channels.contains(&0)
        {
            return bad("all dimensions must be positive".into());
        }
        let (h, w) = self.pooled_size();
        if h == 0 || w == 0 {
            return bad(format!(
                "input {}x{} vanishes after {} pooling stages",
                self.input_height,
                self.input_width,
                self.conv_channels.len()
            ));
        }
        Ok(())
    }

    /// Spatial size entering block `i` (block 0 sees the input).
    pub fn block_input_size(&self, i: usize) -> (usize, usize) {
        (self.input_height >> i, self.input_width >> i)
    }

    /// Spatial size after the last pooling stage.
    pub fn pooled_size(&self) -> (usize, usize) {
        self.block_input_size(self.conv_channels.len())
    }

    pub fn flat_features(&self) -> usize {
        let (h, w) = self.pooled_size();
        h * w * self.conv_channels.last().copied().unwrap_or(0)
    }

    /// Input channel count of block `i`.
    pub fn block_in_channels(&self, i: usize) -> usize {
        if i == 0 {
            1
        } else {
            self.conv_channels[i - 1]
        }
    }

    /// Parameter tensor shapes in storage order: each conv block's weight
    /// `[out, in, 3, 3]` and bias `[out]`, then fc1, fc2 and the output
    /// layer as weight `[out, in]` and bias `[out]`.
    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        let mut shapes = Vec::new();
        for (i, &out) in self.conv_channels.iter().enumerate() {
            shapes.push(vec![out, self.block_in_channels(i), KERNEL, KERNEL]);
            shapes.push(vec![out]);
        }
        let dense = [
            (self.fc1_units, self.flat_features()),
            (self.fc2_units, self.fc1_units),
            (self.n_classes, self.fc2_units),
        ];
        for (out, inp) in dense {
            shapes.push(vec![out, inp]);
            shapes.push(vec![out]);
        }
        shapes
    }

    pub fn parameter_count(&self) -> usize {
        self.param_shapes()
            .iter()
            .map(|s| s.iter().product::<usize>())
            .sum()
    }

    /// Canonical text form, e.g. `input=1x24x61 conv=8,16 fc1=64 fc2=32 classes=4`.
    pub fn canonical(&self) -> String {
        let conv: Vec<String> = self.conv_channels.iter().map(|c| c.to_string()).collect();
        format!(
            "input=1x{}x{} conv={} fc1={} fc2={} classes={}",
            self.input_height,
            self.input_width,
            conv.join(","),
            self.fc1_units,
            self.fc2_units,
            self.n_classes
        )
    }

    pub fn parse_canonical(text: &str) -> Result<Self, ModelError> {
        let bad = || ModelError::InvalidSpec(format!("cannot parse spec `{text}`"));
        let mut spec = NetworkSpec {
            input_height: 0,
            input_width: 0,
            conv_channels: Vec::new(),
            fc1_units: 0,
            fc2_units: 0,
            n_classes: 0,
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        for field in text.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(bad)?;
            match key {
                "input" => {
                    let dims: Vec<&str> = value.split('x').collect();
                    if dims.len() != 3 || dims[0] != "1" {
                        return Err(bad());
                    }
                    spec.input_height = num(dims[1])?;
                    spec.input_width = num(dims[2])?;
                }
                "conv" => {
                    spec.conv_channels = value.split(',').map(num).collect::<Result<_, _>>()?
                }
                "fc1" => spec.fc1_units = num(value)?,
                "fc2" => spec.fc2_units = num(value)?,
                "classes" => spec.n_classes = num(value)?,
                _ => return Err(bad()),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    /// FNV-1a hash of [`NetworkSpec::canonical`].
    pub fn fingerprint(&self) -> u64 {
        crate::fnv1a64(self.canonical().as_bytes())
    }
}
