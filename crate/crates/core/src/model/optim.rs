use super::{ModelError, Tensor};

/// Update rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    Sgd,
    /// `v = μ v + g; w -= lr v`.
    SgdMomentum {
        momentum: f64,
    },
}

impl Default for OptimizerKind {
    fn default() -> Self {
        Self::SgdMomentum { momentum: 0.9 }
    }
}

impl OptimizerKind {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Self::SgdMomentum { momentum } if !(0.0..1.0).contains(&momentum) => Err(
                ModelError::InvalidConfig(format!("momentum {momentum} is outside [0, 1)")),
            ),
            _ => Ok(()),
        }
    }

    pub fn momentum(&self) -> f64 {
        match *self {
            Self::Sgd => 0.0,
            Self::SgdMomentum { momentum } => momentum,
        }
    }
}

/// Stochastic gradient descent, optionally with momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    velocity: Vec<Tensor>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64, params: &[Tensor]) -> Self {
        let velocity = match kind {
            OptimizerKind::Sgd => Vec::new(),
            OptimizerKind::SgdMomentum { .. } => {
                params.iter().map(|p| Tensor::zeros(p.shape())).collect()
            }
        };
        Self {
            kind,
            learning_rate,
            velocity,
        }
    }

    /// Restores saved state. `velocity` must be empty for plain SGD.
    pub fn from_state(kind: OptimizerKind, learning_rate: f64, velocity: Vec<Tensor>) -> Self {
        Self {
            kind,
            learning_rate,
            velocity,
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn velocity(&self) -> &[Tensor] {
        &self.velocity
    }

    pub fn step(&mut self, params: &mut [Tensor], grads: &[Tensor]) {
        let lr = self.learning_rate;
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads) {
                    for (w, &d) in p.data_mut().iter_mut().zip(g.data()) {
                        *w -= lr * d;
                    }
                }
            }
            OptimizerKind::SgdMomentum { momentum } => {
                for ((p, g), v) in params.iter_mut().zip(grads).zip(&mut self.velocity) {
                    for ((w, &d), vel) in p.data_mut().iter_mut().zip(g.data()).zip(v.data_mut()) {
                        *vel = momentum * *vel + d;
                        *w -= lr * *vel;
                    }
                }
            }
        }
    }
}
