use ndarray::ArrayView2;

use super::{batch_bce, Layer, LrSchedule, Mlp, NnError, Real};
use crate::noise::Batch;

/// Network shape and optimizer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub input_width: usize,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub output_width: usize,
    pub schedule: LrSchedule,
    pub batch_size: usize,
    /// Classical momentum coefficient; `0` is plain SGD.
    pub momentum: f64,
    pub seed: u64,
}

impl MlpConfig {
    /// Hidden layers four times as wide as the input, batches of 512.
    pub fn new(input_width: usize, output_width: usize, hidden_layers: usize, total_steps: u64) -> Self {
        MlpConfig {
            input_width,
            hidden_width: 4 * input_width,
            hidden_layers,
            output_width,
            schedule: LrSchedule::for_run(total_steps),
            batch_size: 512,
            momentum: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |msg: &str| Err(NnError::Config(msg.to_string()));
        if self.input_width == 0 || self.output_width == 0 || self.hidden_width == 0 {
            return bad("layer widths must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if !(self.schedule.initial.is_finite() && self.schedule.initial >= 0.0) {
            return bad("initial learning rate must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.schedule.decay) {
            return bad("learning-rate decay must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_width];
        dims.extend(std::iter::repeat_n(self.hidden_width, self.hidden_layers));
        dims.push(self.output_width);
        dims
    }
}

/// Stochastic gradient descent with optional classical momentum.
#[derive(Debug, Clone)]
pub struct Sgd<F> {
    momentum: F,
    velocity: Option<Vec<Layer<F>>>,
}

impl<F: Real> Sgd<F> {
    pub fn new(momentum: f64) -> Self {
        Sgd {
            momentum: F::from_f64(momentum),
            velocity: None,
        }
    }

    /// One update on a batch; returns the batch loss before the update.
    pub fn step(
        &mut self,
        net: &mut Mlp<F>,
        x: ArrayView2<F>,
        targets: ArrayView2<F>,
        lr: F,
    ) -> Result<F, NnError> {
        let (loss, grads) = net.loss_and_gradients(x, targets)?;
        if self.momentum == F::zero() {
            net.apply_gradients(&grads, lr);
            return Ok(loss);
        }
        let mu = self.momentum;
        let velocity = self.velocity.get_or_insert_with(|| {
            grads
                .iter()
                .map(|g| Layer::zeros(g.inputs(), g.outputs()))
                .collect()
        });
        for (v, g) in velocity.iter_mut().zip(&grads) {
            v.weights.zip_mut_with(&g.weights, |v, &g| *v = mu * *v + g);
            v.bias.zip_mut_with(&g.bias, |v, &g| *v = mu * *v + g);
        }
        net.apply_gradients(velocity, lr);
        Ok(loss)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub step: u64,
    pub lr: f64,
    pub train_bce: f64,
    pub validation_bce: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub steps: u64,
    pub samples_seen: u64,
    pub initial_validation_bce: f64,
    pub final_validation_bce: f64,
    pub log: Vec<LogRow>,
}

/// Runs `steps` SGD updates on batches pulled from `stream`, logging every
/// `log_every` steps (and after the last one).
pub fn train(
    net: &mut Mlp<f32>,
    config: &MlpConfig,
    steps: u64,
    stream: &mut impl Iterator<Item = Batch>,
    validation: &Batch,
    log_every: u64,
    mut on_log: impl FnMut(&LogRow),
) -> Result<TrainingReport, NnError> {
    config.validate()?;
    if net.dims() != config.dims() {
        return Err(NnError::Architecture(net.dims()));
    }
    let validate = |net: &Mlp<f32>| -> Result<f64, NnError> {
        let out = net.forward_batch(validation.inputs.view())?;
        Ok(batch_bce(&out, &validation.targets) as f64)
    };
    let initial_validation_bce = validate(net)?;
    let mut sgd = Sgd::<f32>::new(config.momentum);
    let mut log = Vec::new();
    let mut samples_seen = 0u64;
    let mut window_loss = 0.0f64;
    let mut window_len = 0u64;
    for step in 0..steps {
        let batch = stream
            .next()
            .ok_or_else(|| NnError::Config("training stream ended early".into()))?;
        let lr = config.schedule.lr(step);
        let loss = sgd.step(net, batch.inputs.view(), batch.targets.view(), lr as f32)?;
        samples_seen += batch.inputs.nrows() as u64;
        window_loss += loss as f64;
        window_len += 1;
        let done = step + 1;
        if (log_every > 0 && done % log_every == 0) || done == steps {
            let row = LogRow {
                step: done,
                lr,
                train_bce: window_loss / window_len as f64,
                validation_bce: validate(net)?,
            };
            on_log(&row);
            log.push(row);
            window_loss = 0.0;
            window_len = 0;
        }
    }
    let final_validation_bce = log
        .last()
        .map(|r| r.validation_bce)
        .unwrap_or(initial_validation_bce);
    Ok(TrainingReport {
        steps,
        samples_seen,
        initial_validation_bce,
        final_validation_bce,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;
    use ndarray::Array2;

    #[test]
    fn dims_follow_width_multiple() {
        let c = MlpConfig::new(162, 324, 18, 1000);
        let dims = c.dims();
        assert_eq!(dims.len(), 20);
        assert_eq!(dims[0], 162);
        assert_eq!(dims[1], 648);
        assert_eq!(dims[19], 324);
        c.validate().unwrap();
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = MlpConfig::new(4, 4, 1, 10);
        c.batch_size = 0;
        assert!(c.validate().is_err());
        let mut c = MlpConfig::new(4, 4, 1, 10);
        c.momentum = 1.0;
        assert!(c.validate().is_err());
        let mut c = MlpConfig::new(4, 4, 1, 10);
        c.schedule.initial = f64::NAN;
        assert!(c.validate().is_err());
    }

    #[test]
    fn momentum_zero_matches_plain_step() {
        let mut rng = rng_for(8, &[]);
        let net = Mlp::<f64>::new(&[3, 5, 2], &mut rng).unwrap();
        let x = Array2::from_shape_fn((4, 3), |(i, j)| (i as f64 - j as f64) / 3.0);
        let t = Array2::from_shape_fn((4, 2), |(i, j)| ((i + j) % 2) as f64);
        let mut a = net.clone();
        let mut b = net.clone();
        let mut sgd = Sgd::new(0.0);
        for _ in 0..5 {
            sgd.step(&mut a, x.view(), t.view(), 0.3).unwrap();
            b.train_step(x.view(), t.view(), 0.3).unwrap();
        }
        assert_eq!(a, b);
        let mut c = net.clone();
        let mut heavy = Sgd::new(0.9);
        for _ in 0..5 {
            heavy.step(&mut c, x.view(), t.view(), 0.3).unwrap();
        }
        assert_ne!(c, a);
    }
}
