use super::spec::{NetworkSpec, KERNEL};
use super::{ModelError, Tensor};
use crate::rng::AugmentRng;

/// Generator stream reserved for weight initialization.
const INIT_STREAM: u64 = 0x1A17;

/// Floor applied to probabilities inside the cross-entropy.
pub const PROB_FLOOR: f64 = 1e-12;

/// Row-wise softmax with max subtraction.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean of `-ln(max(p[label], 1e-12))` over rows of `probs` (`n_classes`
/// columns each).
pub fn cross_entropy(probs: &[f64], n_classes: usize, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let total: f64 = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| -probs[i * n_classes + l].max(PROB_FLOOR).ln())
        .sum();
    total / labels.len() as f64
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Output of a forward pass over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    pub n_classes: usize,
    /// `[batch, n_classes]`, row-major.
    pub logits: Vec<f64>,
    /// `[batch, n_classes]`, row-major; each row sums to 1.
    pub probabilities: Vec<f64>,
}

impl ForwardOutput {
    pub fn batch_size(&self) -> usize {
        self.logits.len() / self.n_classes
    }

    pub fn probabilities_row(&self, i: usize) -> &[f64] {
        &self.probabilities[i * self.n_classes..(i + 1) * self.n_classes]
    }

    pub fn predictions(&self) -> Vec<usize> {
        (0..self.batch_size())
            .map(|i| argmax(&self.logits[i * self.n_classes..(i + 1) * self.n_classes]))
            .collect()
    }
}

/// A network architecture together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: NetworkSpec,
    params: Vec<Tensor>,
}

/// Intermediate values for one sample, kept for the backward pass.
struct Trace {
    /// Input to each conv block.
    block_inputs: Vec<Vec<f64>>,
    /// Post-ReLU conv output of each block.
    activations: Vec<Vec<f64>>,
    /// For each pooled cell, the index of the winning activation.
    pool_argmax: Vec<Vec<usize>>,
    flat: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
    logits: Vec<f64>,
}

impl Network {
    pub fn new(spec: NetworkSpec, params: Vec<Tensor>) -> Result<Self, ModelError> {
        spec.validate()?;
        let shapes = spec.param_shapes();
        if shapes.len() != params.len() {
            return Err(ModelError::ParameterShape(format!(
                "expected {} tensors, got {}",
                shapes.len(),
                params.len()
            )));
        }
        for (i, (s, p)) in shapes.iter().zip(&params).enumerate() {
            if s.as_slice() != p.shape() {
                return Err(ModelError::ParameterShape(format!(
                    "tensor {i} has shape {:?}, expected {s:?}",
                    p.shape()
                )));
            }
            if !p.is_finite() {
                return Err(ModelError::ParameterShape(format!(
                    "tensor {i} is not finite"
                )));
            }
        }
        Ok(Self { spec, params })
    }

    /// Weights uniform in `±sqrt(6 / fan_in)`, biases zero.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self, ModelError> {
        spec.validate()?;
        let mut rng = AugmentRng::with_stream(seed, INIT_STREAM);
        let params = spec
            .param_shapes()
            .iter()
            .map(|shape| {
                let mut t = Tensor::zeros(shape);
                if shape.len() > 1 {
                    let fan_in: usize = shape[1..].iter().product();
                    let bound = (6.0 / fan_in as f64).sqrt();
                    t.data_mut()
                        .iter_mut()
                        .for_each(|w| *w = rng.uniform(-bound, bound));
                }
                t
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            params,
        })
    }

    /// All parameters zero.
    pub fn zeros(spec: &NetworkSpec) -> Result<Self, ModelError> {
        spec.validate()?;
        let params = spec
            .param_shapes()
            .iter()
            .map(|s| Tensor::zeros(s))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            params,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn params(&self) -> &[Tensor] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor] {
        &mut self.params
    }

    pub fn into_params(self) -> Vec<Tensor> {
        self.params
    }

    fn check_batch(&self, images: &[f64], batch: usize) -> Result<(), ModelError> {
        let per = self.spec.input_height * self.spec.input_width;
        if images.len() != batch * per {
            return Err(ModelError::ShapeMismatch {
                expected: vec![batch, 1, self.spec.input_height, self.spec.input_width],
                actual: images.len(),
            });
        }
        Ok(())
    }

    /// Runs `batch` images of `[1, H, W]` (concatenated row-major) through the
    /// network.
    pub fn forward(&self, images: &[f64], batch: usize) -> Result<ForwardOutput, ModelError> {
        self.check_batch(images, batch)?;
        let per = self.spec.input_height * self.spec.input_width;
        let c = self.spec.n_classes;
        let mut logits = Vec::with_capacity(batch * c);
        let mut probabilities = Vec::with_capacity(batch * c);
        for i in 0..batch {
            let trace = self.trace(&images[i * per..(i + 1) * per]);
            probabilities.extend(softmax(&trace.logits));
            logits.extend(trace.logits);
        }
        Ok(ForwardOutput {
            n_classes: c,
            logits,
            probabilities,
        })
    }

    /// Mean cross-entropy of the batch.
    pub fn loss(&self, images: &[f64], labels: &[usize]) -> Result<f64, ModelError> {
        self.check_labels(labels)?;
        let out = self.forward(images, labels.len())?;
        Ok(cross_entropy(&out.probabilities, out.n_classes, labels))
    }

    fn check_labels(&self, labels: &[usize]) -> Result<(), ModelError> {
        match labels.iter().find(|&&l| l >= self.spec.n_classes) {
            Some(&l) => Err(ModelError::InvalidLabel {
                label: l,
                n_classes: self.spec.n_classes,
            }),
            None => Ok(()),
        }
    }

    /// Mean cross-entropy and its exact gradient with respect to every
    /// parameter, in [`NetworkSpec::param_shapes`] order.
    pub fn loss_and_gradients(
        &self,
        images: &[f64],
        labels: &[usize],
    ) -> Result<(f64, Vec<Tensor>), ModelError> {
        let batch = labels.len();
        self.check_batch(images, batch)?;
        self.check_labels(labels)?;
        let mut grads: Vec<Tensor> = self
            .params
            .iter()
            .map(|p| Tensor::zeros(p.shape()))
            .collect();
        if batch == 0 {
            return Ok((0.0, grads));
        }
        let per = self.spec.input_height * self.spec.input_width;
        let mut loss = 0.0;
        for (i, &label) in labels.iter().enumerate() {
            let trace = self.trace(&images[i * per..(i + 1) * per]);
            let mut d_logits = softmax(&trace.logits);
            loss -= d_logits[label].max(PROB_FLOOR).ln();
            d_logits[label] -= 1.0;
            self.backprop(&trace, d_logits, &mut grads);
        }
        let inv = 1.0 / batch as f64;
        grads.iter_mut().for_each(|g| g.scale(inv));
        Ok((loss * inv, grads))
    }

    fn n_blocks(&self) -> usize {
        self.spec.conv_channels.len()
    }

    /// Index of the first dense-layer weight tensor.
    fn dense_base(&self) -> usize {
        2 * self.n_blocks()
    }

    fn trace(&self, image: &[f64]) -> Trace {
        let spec = &self.spec;
        let mut block_inputs = Vec::with_capacity(self.n_blocks());
        let mut activations = Vec::with_capacity(self.n_blocks());
        let mut pool_argmax = Vec::with_capacity(self.n_blocks());
        let mut x = image.to_vec();
        for b in 0..self.n_blocks() {
            let (h, w) = spec.block_input_size(b);
            let cin = spec.block_in_channels(b);
            let cout = spec.conv_channels[b];
            let mut y = conv3x3(
                &x,
                cin,
                h,
                w,
                self.params[2 * b].data(),
                self.params[2 * b + 1].data(),
                cout,
            );
            y.iter_mut().for_each(|v| *v = v.max(0.0));
            let (pooled, idx) = maxpool2(&y, cout, h, w);
            block_inputs.push(std::mem::replace(&mut x, pooled));
            activations.push(y);
            pool_argmax.push(idx);
        }
        let d = self.dense_base();
        let relu = |mut v: Vec<f64>| {
            v.iter_mut().for_each(|a| *a = a.max(0.0));
            v
        };
        let h1 = relu(dense(&x, self.params[d].data(), self.params[d + 1].data()));
        let h2 = relu(dense(
            &h1,
            self.params[d + 2].data(),
            self.params[d + 3].data(),
        ));
        let logits = dense(&h2, self.params[d + 4].data(), self.params[d + 5].data());
        Trace {
            block_inputs,
            activations,
            pool_argmax,
            flat: x,
            h1,
            h2,
            logits,
        }
    }

    /// Accumulates the gradient of one sample's loss (given `d_logits`) into
    /// `grads`.
    fn backprop(&self, t: &Trace, d_logits: Vec<f64>, grads: &mut [Tensor]) {
        let d = self.dense_base();
        let p = &self.params;

        let mut dh2 = dense_backward(&t.h2, &d_logits, p[d + 4].data(), grads, d + 4);
        mask_relu(&mut dh2, &t.h2);
        let mut dh1 = dense_backward(&t.h1, &dh2, p[d + 2].data(), grads, d + 2);
        mask_relu(&mut dh1, &t.h1);
        let mut dx = dense_backward(&t.flat, &dh1, p[d].data(), grads, d);

        for b in (0..self.n_blocks()).rev() {
            let (h, w) = self.spec.block_input_size(b);
            let cin = self.spec.block_in_channels(b);
            let cout = self.spec.conv_channels[b];
            let act = &t.activations[b];
            // Unpool: route each pooled gradient to its winning activation,
            // dropping it where the ReLU was inactive.
            let mut dy = vec![0.0; act.len()];
            for (&g, &src) in dx.iter().zip(&t.pool_argmax[b]) {
                if act[src] > 0.0 {
                    dy[src] += g;
                }
            }
            let (gw, rest) = grads[2 * b..].split_at_mut(1);
            dx = conv3x3_backward(
                &t.block_inputs[b],
                &dy,
                cin,
                h,
                w,
                p[2 * b].data(),
                cout,
                gw[0].data_mut(),
                rest[0].data_mut(),
                b > 0,
            );
        }
    }
}

fn mask_relu(grad: &mut [f64], activation: &[f64]) {
    for (g, &a) in grad.iter_mut().zip(activation) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
}

/// `y = W x + b` with `W` of shape `[b.len(), x.len()]`.
fn dense(x: &[f64], w: &[f64], b: &[f64]) -> Vec<f64> {
    let n = x.len();
    b.iter()
        .enumerate()
        .map(|(j, &bj)| bj + dot(&w[j * n..(j + 1) * n], x))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Adds `dy xᵀ` and `dy` into the weight and bias gradients at `slot` and
/// `slot + 1`; returns `Wᵀ dy`.
fn dense_backward(x: &[f64], dy: &[f64], w: &[f64], grads: &mut [Tensor], slot: usize) -> Vec<f64> {
    let n = x.len();
    let mut dx = vec![0.0; n];
    {
        let gw = grads[slot].data_mut();
        for (j, &g) in dy.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let row = &mut gw[j * n..(j + 1) * n];
            for (r, &xi) in row.iter_mut().zip(x) {
                *r += g * xi;
            }
            for (d, &wi) in dx.iter_mut().zip(&w[j * n..(j + 1) * n]) {
                *d += g * wi;
            }
        }
    }
    for (gb, &g) in grads[slot + 1].data_mut().iter_mut().zip(dy) {
        *gb += g;
    }
    dx
}

/// Valid row/column range for a kernel offset `k` in `0..3` over size `n`.
fn span(k: usize, n: usize) -> (usize, usize, isize) {
    let off = k as isize - 1;
    let lo = if off < 0 { 1 } else { 0 };
    let hi = if off > 0 { n.saturating_sub(1) } else { n };
    (lo, hi, off)
}

/// Same-size 3x3 convolution (cross-correlation) with zero padding.
fn conv3x3(
    x: &[f64],
    cin: usize,
    h: usize,
    w: usize,
    weight: &[f64],
    bias: &[f64],
    cout: usize,
) -> Vec<f64> {
    let plane = h * w;
    let mut y = vec![0.0; cout * plane];
    for o in 0..cout {
        let yo = &mut y[o * plane..(o + 1) * plane];
        yo.fill(bias[o]);
        for i in 0..cin {
            let xi = &x[i * plane..(i + 1) * plane];
            for ky in 0..KERNEL {
                let (y0, y1, dy) = span(ky, h);
                for kx in 0..KERNEL {
                    let (x0, x1, dx) = span(kx, w);
                    let wv = weight[((o * cin + i) * KERNEL + ky) * KERNEL + kx];
                    for r in y0..y1 {
                        let src = ((r as isize + dy) as usize) * w;
                        let dst = &mut yo[r * w + x0..r * w + x1];
                        let s = &xi[(src as isize + x0 as isize + dx) as usize..];
                        for (d, &v) in dst.iter_mut().zip(s) {
                            *d += wv * v;
                        }
                    }
                }
            }
        }
    }
    y
}

/// Accumulates weight and bias gradients of [`conv3x3`]; returns the input
/// gradient when `need_dx`, otherwise an empty vector.
#[allow(clippy::too_many_arguments)]
fn conv3x3_backward(
    x: &[f64],
    dy: &[f64],
    cin: usize,
    h: usize,
    w: usize,
    weight: &[f64],
    cout: usize,
    gw: &mut [f64],
    gb: &mut [f64],
    need_dx: bool,
) -> Vec<f64> {
    let plane = h * w;
    let mut dx = if need_dx {
        vec![0.0; cin * plane]
    } else {
        Vec::new()
    };
    for o in 0..cout {
        let dyo = &dy[o * plane..(o + 1) * plane];
        gb[o] += dyo.iter().sum::<f64>();
        for i in 0..cin {
            let xi = &x[i * plane..(i + 1) * plane];
            for ky in 0..KERNEL {
                let (y0, y1, oy) = span(ky, h);
                for kx in 0..KERNEL {
                    let (x0, x1, ox) = span(kx, w);
                    let widx = ((o * cin + i) * KERNEL + ky) * KERNEL + kx;
                    let wv = weight[widx];
                    let mut acc = 0.0;
                    for r in y0..y1 {
                        let src = ((r as isize + oy) as usize * w) as isize + ox;
                        let g = &dyo[r * w + x0..r * w + x1];
                        let start = (src + x0 as isize) as usize;
                        let s = &xi[start..start + g.len()];
                        acc += dot(g, s);
                        if need_dx {
                            let d = &mut dx[i * plane + start..i * plane + start + g.len()];
                            for (dv, &gv) in d.iter_mut().zip(g) {
                                *dv += wv * gv;
                            }
                        }
                    }
                    gw[widx] += acc;
                }
            }
        }
    }
    dx
}

/// 2x2 stride-2 max pooling; odd trailing rows/columns are dropped. Ties go
/// to the first cell in row-major order.
fn maxpool2(x: &[f64], c: usize, h: usize, w: usize) -> (Vec<f64>, Vec<usize>) {
    let (ph, pw) = (h / 2, w / 2);
    let mut out = Vec::with_capacity(c * ph * pw);
    let mut idx = Vec::with_capacity(c * ph * pw);
    for ch in 0..c {
        let base = ch * h * w;
        for r in 0..ph {
            for col in 0..pw {
                let cells = [
                    base + 2 * r * w + 2 * col,
                    base + 2 * r * w + 2 * col + 1,
                    base + (2 * r + 1) * w + 2 * col,
                    base + (2 * r + 1) * w + 2 * col + 1,
                ];
                let mut best = cells[0];
                for &k in &cells[1..] {
                    if x[k] > x[best] {
                        best = k;
                    }
                }
                out.push(x[best]);
                idx.push(best);
            }
        }
    }
    (out, idx)
}
