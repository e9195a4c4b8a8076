use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => libm::tanh(x),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

/// Fully connected feed-forward network with a flat parameter vector.
///
/// Layer `l` stores its `out x in` weight matrix row-major followed by its
/// bias, so optimiser and target-blending code can treat every network as a
/// single slice.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mlp {
    sizes: Vec<usize>,
    activations: Vec<Activation>,
    params: Vec<f64>,
}

/// Per-layer outputs of a batched forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    batch: usize,
    /// `layers[0]` is the input; `layers[l + 1]` the output of layer `l`.
    layers: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.layers.last().expect("cache holds at least the input")
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

impl Mlp {
    /// Builds a network with the given parameters.
    pub fn from_params(sizes: Vec<usize>, activations: Vec<Activation>, params: Vec<f64>) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(invalid("an MLP needs at least two non-zero layer sizes"));
        }
        if activations.len() != sizes.len() - 1 {
            return Err(invalid("one activation per layer is required"));
        }
        let expected = param_count(&sizes);
        if params.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: params.len() });
        }
        if !params.iter().all(|p| p.is_finite()) {
            return Err(invalid("parameters must be finite"));
        }
        Ok(Self { sizes, activations, params })
    }

    /// Uniform `(-1/sqrt(fan_in), 1/sqrt(fan_in))` initialisation for weights
    /// and biases. Hidden layers use `hidden`, the last layer `output`.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], hidden: Activation, output: Activation, rng: &mut R) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(invalid("an MLP needs at least two non-zero layer sizes"));
        }
        let layers = sizes.len() - 1;
        let activations = (0..layers).map(|l| if l + 1 == layers { output } else { hidden }).collect();
        let mut params = Vec::with_capacity(param_count(sizes));
        for l in 0..layers {
            let bound = 1.0 / libm::sqrt(sizes[l] as f64);
            for _ in 0..(sizes[l] + 1) * sizes[l + 1] {
                params.push(rng.gen_range(-bound..bound));
            }
        }
        Self::from_params(sizes.to_vec(), activations, params)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn zero_grads(&self) -> Vec<f64> {
        vec![0.0; self.params.len()]
    }

    fn layer_offsets(&self, l: usize) -> (usize, usize) {
        let mut off = 0;
        for k in 0..l {
            off += (self.sizes[k] + 1) * self.sizes[k + 1];
        }
        (off, off + self.sizes[l] * self.sizes[l + 1])
    }

    /// Single-sample forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), got: x.len() });
        }
        let mut cur = x.to_vec();
        for l in 0..self.activations.len() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let (w_off, b_off) = self.layer_offsets(l);
            let w = &self.params[w_off..w_off + n_in * n_out];
            let b = &self.params[b_off..b_off + n_out];
            let act = self.activations[l];
            cur = (0..n_out)
                .map(|o| {
                    let row = &w[o * n_in..(o + 1) * n_in];
                    let z = b[o] + row.iter().zip(&cur).map(|(wi, xi)| wi * xi).sum::<f64>();
                    act.apply(z)
                })
                .collect();
        }
        Ok(cur)
    }

    /// Forward pass over `batch` row-major samples.
    pub fn forward_batch(&self, x: &[f64], batch: usize) -> Result<ForwardCache> {
        let n_in0 = self.input_dim();
        if x.len() != batch * n_in0 {
            return Err(Error::DimensionMismatch { expected: batch * n_in0, got: x.len() });
        }
        let mut layers = Vec::with_capacity(self.sizes.len());
        layers.push(x.to_vec());
        for l in 0..self.activations.len() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let (w_off, b_off) = self.layer_offsets(l);
            let w = &self.params[w_off..w_off + n_in * n_out];
            let b = &self.params[b_off..b_off + n_out];
            let mut z = vec![0.0; batch * n_out];
            for row in z.chunks_exact_mut(n_out) {
                row.copy_from_slice(b);
            }
            // Z += X W^T
            gemm(batch, n_in, n_out, layers[l].as_slice(), (n_in, 1), w, (1, n_in), &mut z, (n_out, 1), 1.0);
            let act = self.activations[l];
            if act != Activation::Identity {
                for v in z.iter_mut() {
                    *v = act.apply(*v);
                }
            }
            layers.push(z);
        }
        Ok(ForwardCache { batch, layers })
    }

    /// Reverse-mode pass. Accumulates parameter gradients into `grads` and
    /// returns the gradient with respect to the input batch.
    pub fn backward(&self, cache: &ForwardCache, upstream: &[f64], grads: &mut [f64]) -> Result<Vec<f64>> {
        if grads.len() != self.params.len() {
            return Err(Error::DimensionMismatch { expected: self.params.len(), got: grads.len() });
        }
        self.backward_impl(cache, upstream, Some(grads))
    }

    /// Gradient with respect to the input only; parameter gradients are not
    /// formed.
    pub fn input_gradient(&self, cache: &ForwardCache, upstream: &[f64]) -> Result<Vec<f64>> {
        self.backward_impl(cache, upstream, None)
    }

    fn backward_impl(&self, cache: &ForwardCache, upstream: &[f64], mut grads: Option<&mut [f64]>) -> Result<Vec<f64>> {
        let batch = cache.batch;
        if cache.layers.len() != self.sizes.len() {
            return Err(Error::DimensionMismatch { expected: self.sizes.len(), got: cache.layers.len() });
        }
        if upstream.len() != batch * self.output_dim() {
            return Err(Error::DimensionMismatch { expected: batch * self.output_dim(), got: upstream.len() });
        }
        let mut delta = upstream.to_vec();
        for l in (0..self.activations.len()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let act = self.activations[l];
            if act != Activation::Identity {
                for (d, y) in delta.iter_mut().zip(&cache.layers[l + 1]) {
                    *d *= act.derivative_from_output(*y);
                }
            }
            let (w_off, b_off) = self.layer_offsets(l);
            if let Some(grads) = grads.as_deref_mut() {
                let input = &cache.layers[l];
                let (gw, gb) = grads[w_off..b_off + n_out].split_at_mut(n_in * n_out);
                // dW += dZ^T X
                gemm(n_out, batch, n_in, &delta, (1, n_out), input, (n_in, 1), gw, (n_in, 1), 1.0);
                for row in delta.chunks_exact(n_out) {
                    for (g, d) in gb.iter_mut().zip(row) {
                        *g += d;
                    }
                }
            }
            // dX = dZ W
            let w = &self.params[w_off..w_off + n_in * n_out];
            let mut dx = vec![0.0; batch * n_in];
            gemm(batch, n_out, n_in, &delta, (n_out, 1), w, (n_in, 1), &mut dx, (n_in, 1), 0.0);
            delta = dx;
        }
        Ok(delta)
    }
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
}

/// `C = A B + beta C` for an `m x k` by `k x n` product with explicit
/// (row, column) strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    a_strides: (usize, usize),
    b: &[f64],
    b_strides: (usize, usize),
    c: &mut [f64],
    c_strides: (usize, usize),
    beta: f64,
) {
    let extent = |rows: usize, cols: usize, (rs, cs): (usize, usize)| {
        if rows == 0 || cols == 0 {
            0
        } else {
            (rows - 1) * rs + (cols - 1) * cs + 1
        }
    };
    assert!(a.len() >= extent(m, k, a_strides));
    assert!(b.len() >= extent(k, n, b_strides));
    assert!(c.len() >= extent(m, n, c_strides));
    // SAFETY: the asserts above bound every index matrixmultiply touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            a_strides.0 as isize,
            a_strides.1 as isize,
            b.as_ptr(),
            b_strides.0 as isize,
            b_strides.1 as isize,
            beta,
            c.as_mut_ptr(),
            c_strides.0 as isize,
            c_strides.1 as isize,
        );
    }
}
