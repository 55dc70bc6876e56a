//! Fully connected network with tanh hidden layers and a logistic output
//! layer, trained against mean binary crossentropy.
//!
//! Weights are stored `out × in`; a batch is a `batch × in` matrix, so a layer
//! computes `X · Wᵀ + b` row by row.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng as _;

use super::{NnError, Real};
use crate::seed::Rng;

/// Lower clamp on sigmoid outputs; outputs live in `[EPS, 1 - EPS]`.
pub const EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer<F> {
    pub weights: Array2<F>,
    pub bias: Array1<F>,
}

impl<F: Real> Layer<F> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            weights: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }
}

/// Per-layer gradients, shaped like the network.
pub type Gradients<F> = Vec<Layer<F>>;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<F> {
    layers: Vec<Layer<F>>,
}

#[inline]
fn sigmoid<F: Real>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}

fn clamp_prob<F: Real>(p: F) -> F {
    let eps = F::from_f64(EPS);
    p.max(eps).min(F::one() - eps)
}

/// Mean over entries of `-[t ln e + (1 - t) ln(1 - e)]`, with `e` clamped to
/// `[EPS, 1 - EPS]`.
pub fn bce_loss<F: Real>(outputs: &[F], targets: &[F]) -> Result<F, NnError> {
    if outputs.len() != targets.len() {
        return Err(NnError::Dimension {
            expected: outputs.len(),
            found: targets.len(),
        });
    }
    if outputs.is_empty() {
        return Ok(F::zero());
    }
    let sum = outputs
        .iter()
        .zip(targets)
        .fold(F::zero(), |acc, (&e, &t)| acc + bce_term(e, t));
    Ok(sum / F::from_usize(outputs.len()))
}

#[inline]
fn bce_term<F: Real>(e: F, t: F) -> F {
    let e = clamp_prob(e);
    -(t * e.ln() + (F::one() - t) * (F::one() - e).ln())
}

/// Mean BCE over every entry of a batch.
pub fn batch_bce<F: Real>(outputs: &Array2<F>, targets: &Array2<F>) -> F {
    let sum = Zip::from(outputs)
        .and(targets)
        .fold(F::zero(), |acc, &e, &t| acc + bce_term(e, t));
    sum / F::from_usize(outputs.len().max(1))
}

impl<F: Real> Mlp<F> {
    /// Random initialization: each weight uniform with variance `1/fan_in`,
    /// biases zero. `dims` lists every layer width from input to output.
    pub fn new(dims: &[usize], rng: &mut Rng) -> Result<Self, NnError> {
        let mut net = Self::zeros(dims)?;
        for layer in &mut net.layers {
            let bound = (3.0 / layer.inputs() as f64).sqrt();
            layer
                .weights
                .mapv_inplace(|_| F::from_f64(rng.random_range(-bound..bound)));
        }
        Ok(net)
    }

    pub fn zeros(dims: &[usize]) -> Result<Self, NnError> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(NnError::Architecture(dims.to_vec()));
        }
        let layers = dims.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect();
        Ok(Mlp { layers })
    }

    pub fn from_layers(layers: Vec<Layer<F>>) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::Architecture(vec![]));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.bias.len() != layer.outputs() || layer.inputs() == 0 || layer.outputs() == 0 {
                return Err(NnError::DimensionChain { layer: i });
            }
            if i > 0 && layers[i - 1].outputs() != layer.inputs() {
                return Err(NnError::DimensionChain { layer: i });
            }
        }
        Ok(Mlp { layers })
    }

    pub fn layers(&self) -> &[Layer<F>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<F>] {
        &mut self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_width()];
        dims.extend(self.layers.iter().map(Layer::outputs));
        dims
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_input(&self, width: usize) -> Result<(), NnError> {
        if width != self.input_width() {
            return Err(NnError::Dimension {
                expected: self.input_width(),
                found: width,
            });
        }
        Ok(())
    }

    /// Pre-activations of every layer and the activations feeding them.
    /// `acts[0]` is the input; `acts[l + 1]` is the output of layer `l`,
    /// unclamped.
    fn forward_all(&self, x: ArrayView2<F>) -> Vec<Array2<F>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_owned());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = acts[i].dot(&layer.weights.t());
            z += &layer.bias;
            if i == last {
                z.mapv_inplace(sigmoid);
            } else {
                z.mapv_inplace(F::tanh);
            }
            acts.push(z);
        }
        acts
    }

    /// Batch forward pass; outputs clamped to `[EPS, 1 - EPS]`.
    pub fn forward_batch(&self, x: ArrayView2<F>) -> Result<Array2<F>, NnError> {
        self.check_input(x.ncols())?;
        let mut out = self.forward_all(x).pop().expect("at least one layer");
        out.mapv_inplace(clamp_prob);
        Ok(out)
    }

    /// Per-bit error marginals for one input vector.
    pub fn forward(&self, x: &[F]) -> Result<Vec<F>, NnError> {
        self.check_input(x.len())?;
        let mut a = Array1::from(x.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.weights.dot(&a);
            z += &layer.bias;
            if i == last {
                z.mapv_inplace(|v| clamp_prob(sigmoid(v)));
            } else {
                z.mapv_inplace(F::tanh);
            }
            a = z;
        }
        Ok(a.to_vec())
    }

    /// Mean BCE over the batch and its gradient with respect to every
    /// parameter.
    pub fn loss_and_gradients(
        &self,
        x: ArrayView2<F>,
        targets: ArrayView2<F>,
    ) -> Result<(F, Gradients<F>), NnError> {
        self.check_input(x.ncols())?;
        if targets.dim() != (x.nrows(), self.output_width()) {
            return Err(NnError::Dimension {
                expected: x.nrows() * self.output_width(),
                found: targets.len(),
            });
        }
        let acts = self.forward_all(x);
        let out = &acts[acts.len() - 1];
        let loss = batch_bce(out, &targets.to_owned());

        // sigmoid + BCE: dL/dz = (e - t) / (batch · outputs)
        let scale = F::one() / F::from_usize(out.len().max(1));
        let mut delta = (out - &targets) * scale;
        let mut grads: Vec<Layer<F>> = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let weights = delta.t().dot(&acts[l]);
            let bias = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.layers[l].weights);
                Zip::from(&mut back)
                    .and(&acts[l])
                    .for_each(|d, &a| *d = *d * (F::one() - a * a));
                delta = back;
            }
            grads.push(Layer { weights, bias });
        }
        grads.reverse();
        for (i, g) in grads.iter().enumerate() {
            if !(g.weights.iter().all(|v| v.is_finite()) && g.bias.iter().all(|v| v.is_finite())) {
                return Err(NnError::NonFinite { layer: i });
            }
        }
        Ok((loss, grads))
    }

    /// `params -= lr · grads`.
    pub fn apply_gradients(&mut self, grads: &[Layer<F>], lr: F) {
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            layer.weights.scaled_add(-lr, &g.weights);
            layer.bias.scaled_add(-lr, &g.bias);
        }
    }

    /// One plain SGD step on a batch; returns the batch loss before the
    /// update.
    pub fn train_step(
        &mut self,
        x: ArrayView2<F>,
        targets: ArrayView2<F>,
        lr: F,
    ) -> Result<F, NnError> {
        let (loss, grads) = self.loss_and_gradients(x, targets)?;
        self.apply_gradients(&grads, lr);
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn zero_network_outputs_half() {
        let net = Mlp::<f64>::zeros(&[5, 7, 7, 3]).unwrap();
        let out = net.forward(&[0.3, -1.0, 2.0, 0.0, 1.0]).unwrap();
        assert_eq!(out, vec![0.5; 3]);
    }

    #[test]
    fn output_bias_passes_through_sigmoid() {
        let mut net = Mlp::<f64>::zeros(&[2, 4, 3]).unwrap();
        let b = [-2.0, 0.25, 3.0];
        net.layers_mut()[1].bias = Array1::from(b.to_vec());
        let out = net.forward(&[1.0, -1.0]).unwrap();
        for (o, b) in out.iter().zip(b) {
            assert_abs_diff_eq!(*o, 1.0 / (1.0 + (-b).exp()), epsilon = 1e-15);
        }
    }

    #[test]
    fn outputs_stay_inside_clamp() {
        let mut net = Mlp::<f32>::new(&[3, 8, 2], &mut rng_for(1, &[])).unwrap();
        net.layers_mut()[1].bias = array![1e4, -1e4];
        let out = net.forward(&[1.0, 2.0, 3.0]).unwrap();
        assert!(out.iter().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let net = Mlp::<f32>::zeros(&[3, 2]).unwrap();
        assert!(matches!(
            net.forward(&[1.0]),
            Err(NnError::Dimension { expected: 3, found: 1 })
        ));
        assert!(Mlp::<f32>::zeros(&[3]).is_err());
        assert!(Mlp::<f32>::zeros(&[3, 0, 2]).is_err());
    }

    #[test]
    fn bce_examples() {
        assert_abs_diff_eq!(
            bce_loss(&[0.5, 0.5, 0.5], &[1.0, 0.0, 1.0]).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(bce_loss(&[0.9], &[0.0]).unwrap(), -(0.1f64).ln(), epsilon = 1e-12);
        let near = bce_loss(&[1.0 - 1e-9, 1e-9], &[1.0, 0.0]).unwrap();
        assert!((0.0..1e-6).contains(&near));
        // exact 0/1 outputs are clamped, not infinite
        assert!(bce_loss(&[0.0f64], &[1.0]).unwrap().is_finite());
        assert!(bce_loss(&[0.5], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn forward_batch_matches_single() {
        let net = Mlp::<f64>::new(&[4, 6, 6, 3], &mut rng_for(2, &[])).unwrap();
        let x = array![[0.1, -0.2, 0.3, 1.0], [1.0, 0.0, -1.0, 0.5]];
        let batch = net.forward_batch(x.view()).unwrap();
        for (r, row) in x.rows().into_iter().enumerate() {
            let single = net.forward(row.as_slice().unwrap()).unwrap();
            for (a, b) in single.iter().zip(batch.row(r)) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_learning_rate_is_identity() {
        let mut net = Mlp::<f32>::new(&[3, 5, 2], &mut rng_for(3, &[])).unwrap();
        let before = net.clone();
        let x = array![[1.0f32, -1.0, 0.5]];
        let t = array![[1.0f32, 0.0]];
        net.train_step(x.view(), t.view(), 0.0).unwrap();
        assert_eq!(net, before);
    }

    fn loss_of(net: &Mlp<f64>, x: &Array2<f64>, t: &Array2<f64>) -> f64 {
        let out = net.forward_batch(x.view()).unwrap();
        batch_bce(&out, t)
    }

    #[test]
    fn single_parameter_gradient_matches_finite_difference() {
        let mut net = Mlp::<f64>::zeros(&[1, 1]).unwrap();
        net.layers_mut()[0].weights[[0, 0]] = 0.7;
        let x = array![[1.3], [-0.4]];
        let t = array![[1.0], [0.0]];
        let (_, grads) = net.loss_and_gradients(x.view(), t.view()).unwrap();
        let h = 1e-5;
        let mut plus = net.clone();
        plus.layers_mut()[0].weights[[0, 0]] += h;
        let mut minus = net.clone();
        minus.layers_mut()[0].weights[[0, 0]] -= h;
        let numeric = (loss_of(&plus, &x, &t) - loss_of(&minus, &x, &t)) / (2.0 * h);
        let analytic = grads[0].weights[[0, 0]];
        assert!(((analytic - numeric) / numeric).abs() < 1e-4);
    }

    #[test]
    fn repeated_steps_do_not_increase_loss() {
        let mut rng = rng_for(4, &[]);
        let mut net = Mlp::<f64>::new(&[4, 8, 8, 3], &mut rng).unwrap();
        let x = Array2::from_shape_fn((16, 4), |(i, j)| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let t = Array2::from_shape_fn((16, 3), |(i, j)| ((i + j) % 2) as f64);
        let mut last = f64::INFINITY;
        for _ in 0..200 {
            let loss = net.train_step(x.view(), t.view(), 0.05).unwrap();
            assert!(loss <= last + 1e-12, "loss rose from {last} to {loss}");
            last = loss;
        }
    }

    #[test]
    fn non_finite_gradient_is_reported() {
        let mut net = Mlp::<f64>::zeros(&[1, 2, 1]).unwrap();
        net.layers_mut()[1].weights[[0, 0]] = f64::NAN;
        let x = array![[1.0]];
        let t = array![[1.0]];
        assert!(matches!(
            net.train_step(x.view(), t.view(), 0.1),
            Err(NnError::NonFinite { .. })
        ));
    }
}
