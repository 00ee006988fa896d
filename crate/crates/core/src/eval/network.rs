//! Residual policy-value network with a hand-written backward pass.
//!
//! Architecture, for an input of `2T + 1` planes over an `R x C` board:
//!
//! ```text
//! stem:    conv kxk (F filters) + ReLU
//! body:    n x [conv kxk + ReLU, conv kxk, + skip, ReLU]
//! value:   conv 1x1 (1) + ReLU, fc (hidden) + ReLU, [dropout], fc (1), tanh
//! policy:  conv 1x1 (2) + ReLU, fc (hidden) + ReLU, [dropout], fc (A), softmax
//! ```
//!
//! All parameters live in one flat vector in the order listed by
//! [`PolicyValueNet::layout`]; every weight tensor is followed by its bias.
//! Convolution weights are `[out][in][ky][kx]`, dense weights `[out][in]`.
//!
//! Dropout is inference-only: each hidden unit of both heads is zeroed with
//! probability `p_drop` and survivors are not rescaled.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, RngCore};

use super::{EvalError, EvalResult, Evaluator, MAX_DROPOUT};
use crate::game::{encode_planes, BoardState, GameVariant, PlaneStack, HISTORY_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkConfig {
    pub variant: GameVariant,
    pub history: usize,
    pub residual_blocks: usize,
    pub filters: usize,
    pub kernel_size: usize,
    pub value_hidden: usize,
    pub policy_hidden: usize,
}

impl NetworkConfig {
    /// Full-size network: 256 filters, 3x3 kernels, 2 residual blocks (5 for 8x8 Othello).
    pub fn paper(variant: GameVariant) -> Self {
        Self {
            variant,
            history: HISTORY_LEN,
            residual_blocks: if variant == GameVariant::Othello8 {
                5
            } else {
                2
            },
            filters: 256,
            kernel_size: 3,
            value_hidden: 256,
            policy_hidden: 256,
        }
    }

    /// Small network that trains on a laptop CPU.
    pub fn desk(variant: GameVariant) -> Self {
        Self {
            variant,
            history: HISTORY_LEN,
            residual_blocks: 2,
            filters: 32,
            kernel_size: 3,
            value_hidden: 64,
            policy_hidden: 64,
        }
    }

    pub fn input_planes(&self) -> usize {
        2 * self.history + 1
    }
}

#[derive(Debug, Clone, Copy)]
struct Conv {
    cin: usize,
    cout: usize,
    k: usize,
    w: usize,
    b: usize,
}

#[derive(Debug, Clone, Copy)]
struct Dense {
    nin: usize,
    nout: usize,
    w: usize,
    b: usize,
}

#[derive(Debug, Clone)]
struct Layout {
    stem: Conv,
    blocks: Vec<(Conv, Conv)>,
    value_conv: Conv,
    value_fc1: Dense,
    value_fc2: Dense,
    policy_conv: Conv,
    policy_fc1: Dense,
    policy_fc2: Dense,
    total: usize,
    names: Vec<(String, Vec<usize>)>,
}

impl Layout {
    fn new(cfg: &NetworkConfig) -> Self {
        let hw = cfg.variant.cells();
        let mut offset = 0;
        let mut names = Vec::new();
        let mut tensor = |name: &str, shape: Vec<usize>| {
            let w = offset;
            let nout = shape[0];
            let b = w + shape.iter().product::<usize>();
            offset = b + nout;
            names.push((alloc::format!("{name}.weight"), shape));
            names.push((alloc::format!("{name}.bias"), vec![nout]));
            (w, b)
        };
        let mut conv = |name: &str, cin: usize, cout: usize, k: usize| {
            let (w, b) = tensor(name, vec![cout, cin, k, k]);
            Conv { cin, cout, k, w, b }
        };
        let (f, k) = (cfg.filters, cfg.kernel_size);
        let stem = conv("stem", cfg.input_planes(), f, k);
        let blocks = (0..cfg.residual_blocks)
            .map(|i| {
                (
                    conv(&alloc::format!("block{i}.conv1"), f, f, k),
                    conv(&alloc::format!("block{i}.conv2"), f, f, k),
                )
            })
            .collect();
        let value_conv = conv("value.conv", f, 1, 1);
        let mut dense = |name: &str, nin: usize, nout: usize| {
            let (w, b) = tensor(name, vec![nout, nin]);
            Dense { nin, nout, w, b }
        };
        let value_fc1 = dense("value.fc1", hw, cfg.value_hidden);
        let value_fc2 = dense("value.fc2", cfg.value_hidden, 1);
        let mut conv = |name: &str, cin: usize, cout: usize, k: usize| {
            let (w, b) = tensor(name, vec![cout, cin, k, k]);
            Conv { cin, cout, k, w, b }
        };
        let policy_conv = conv("policy.conv", f, 2, 1);
        let mut dense = |name: &str, nin: usize, nout: usize| {
            let (w, b) = tensor(name, vec![nout, nin]);
            Dense { nin, nout, w, b }
        };
        let policy_fc1 = dense("policy.fc1", 2 * hw, cfg.policy_hidden);
        let policy_fc2 = dense("policy.fc2", cfg.policy_hidden, cfg.variant.action_count());
        Self {
            stem,
            blocks,
            value_conv,
            value_fc1,
            value_fc2,
            policy_conv,
            policy_fc1,
            policy_fc2,
            total: offset,
            names,
        }
    }
}

#[inline]
fn cst<F: Float>(x: f64) -> F {
    F::from(x).expect("float constant")
}

fn relu_inplace<F: Float>(xs: &mut [F]) {
    for x in xs {
        if *x < F::zero() {
            *x = F::zero();
        }
    }
}

fn conv_forward<F: Float>(p: &[F], l: &Conv, input: &[F], out: &mut [F], h: usize, w: usize) {
    let hw = h * w;
    let pad = (l.k / 2) as isize;
    for o in 0..l.cout {
        let out_o = &mut out[o * hw..(o + 1) * hw];
        out_o.fill(p[l.b + o]);
        for i in 0..l.cin {
            let in_i = &input[i * hw..(i + 1) * hw];
            for ky in 0..l.k {
                let dy = ky as isize - pad;
                let (y0, y1) = (
                    (-dy).max(0) as usize,
                    (h as isize - dy).min(h as isize) as usize,
                );
                for kx in 0..l.k {
                    let dx = kx as isize - pad;
                    let (x0, x1) = (
                        (-dx).max(0) as usize,
                        (w as isize - dx).min(w as isize) as usize,
                    );
                    let wt = p[l.w + ((o * l.cin + i) * l.k + ky) * l.k + kx];
                    for y in y0..y1 {
                        let src = ((y as isize + dy) as usize) * w;
                        let row_out = &mut out_o[y * w + x0..y * w + x1];
                        let row_in = &in_i[(src as isize + x0 as isize + dx) as usize..];
                        for (a, &b) in row_out.iter_mut().zip(row_in) {
                            *a = *a + wt * b;
                        }
                    }
                }
            }
        }
    }
}

/// Accumulates parameter gradients into `g` and, if given, input gradients into `dinput`.
#[allow(clippy::too_many_arguments)]
fn conv_backward<F: Float>(
    p: &[F],
    l: &Conv,
    input: &[F],
    dout: &[F],
    mut dinput: Option<&mut [F]>,
    g: &mut [F],
    h: usize,
    w: usize,
) {
    let hw = h * w;
    let pad = (l.k / 2) as isize;
    for o in 0..l.cout {
        let d_o = &dout[o * hw..(o + 1) * hw];
        g[l.b + o] = g[l.b + o] + d_o.iter().fold(F::zero(), |a, &b| a + b);
        for i in 0..l.cin {
            let in_i = &input[i * hw..(i + 1) * hw];
            for ky in 0..l.k {
                let dy = ky as isize - pad;
                let (y0, y1) = (
                    (-dy).max(0) as usize,
                    (h as isize - dy).min(h as isize) as usize,
                );
                for kx in 0..l.k {
                    let dx = kx as isize - pad;
                    let (x0, x1) = (
                        (-dx).max(0) as usize,
                        (w as isize - dx).min(w as isize) as usize,
                    );
                    let widx = l.w + ((o * l.cin + i) * l.k + ky) * l.k + kx;
                    let wt = p[widx];
                    let mut gw = F::zero();
                    for y in y0..y1 {
                        let src = ((y as isize + dy) as usize) * w;
                        let start = (src as isize + x0 as isize + dx) as usize;
                        let d_row = &d_o[y * w + x0..y * w + x1];
                        let in_row = &in_i[start..start + (x1 - x0)];
                        for (&d, &x) in d_row.iter().zip(in_row) {
                            gw = gw + d * x;
                        }
                        if let Some(di) = dinput.as_deref_mut() {
                            let di_row = &mut di[i * hw + start..i * hw + start + (x1 - x0)];
                            for (a, &d) in di_row.iter_mut().zip(d_row) {
                                *a = *a + wt * d;
                            }
                        }
                    }
                    g[widx] = g[widx] + gw;
                }
            }
        }
    }
}

fn dense_forward<F: Float>(p: &[F], l: &Dense, input: &[F], out: &mut [F]) {
    for (o, y) in out.iter_mut().enumerate().take(l.nout) {
        let row = &p[l.w + o * l.nin..l.w + (o + 1) * l.nin];
        *y = row
            .iter()
            .zip(input)
            .fold(p[l.b + o], |a, (&wt, &x)| a + wt * x);
    }
}

fn dense_backward<F: Float>(
    p: &[F],
    l: &Dense,
    input: &[F],
    dout: &[F],
    dinput: &mut [F],
    g: &mut [F],
) {
    for (o, &d) in dout.iter().enumerate().take(l.nout) {
        if d == F::zero() {
            continue;
        }
        g[l.b + o] = g[l.b + o] + d;
        let base = l.w + o * l.nin;
        for j in 0..l.nin {
            g[base + j] = g[base + j] + d * input[j];
            dinput[j] = dinput[j] + p[base + j] * d;
        }
    }
}

/// Intermediate activations of one forward pass.
struct Trace<F> {
    input: Vec<F>,
    stem: Vec<F>,
    blocks: Vec<(Vec<F>, Vec<F>)>,
    value_conv: Vec<F>,
    value_hidden: Vec<F>,
    value: F,
    policy_conv: Vec<F>,
    policy_hidden: Vec<F>,
    logits: Vec<F>,
}

/// Flat gradient vector, laid out like the parameters.
pub type Gradients<F> = Vec<F>;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyValueNet<F = f32> {
    config: NetworkConfig,
    params: Vec<F>,
    layout_names: Vec<(String, Vec<usize>)>,
}

impl<F: Float> PolicyValueNet<F> {
    /// Randomly initialized network (He-uniform weights, zero biases).
    pub fn new<R: Rng + ?Sized>(config: NetworkConfig, rng: &mut R) -> Self {
        let layout = Layout::new(&config);
        let mut params = vec![F::zero(); layout.total];
        let mut init_conv = |l: &Conv| {
            let bound = libm::sqrt(6.0 / (l.cin * l.k * l.k) as f64);
            for x in &mut params[l.w..l.b] {
                *x = cst(rng.random_range(-bound..bound));
            }
        };
        init_conv(&layout.stem);
        layout.blocks.iter().for_each(|(a, b)| {
            init_conv(a);
            init_conv(b);
        });
        init_conv(&layout.value_conv);
        init_conv(&layout.policy_conv);
        for (l, gain) in [
            (&layout.value_fc1, 6.0),
            (&layout.value_fc2, 1.0),
            (&layout.policy_fc1, 6.0),
            (&layout.policy_fc2, 1.0),
        ] {
            let bound = libm::sqrt(gain / l.nin as f64);
            for x in &mut params[l.w..l.b] {
                *x = cst(rng.random_range(-bound..bound));
            }
        }
        Self {
            config,
            params,
            layout_names: layout.names,
        }
    }

    pub fn from_params(config: NetworkConfig, params: Vec<F>) -> Result<Self, EvalError> {
        let layout = Layout::new(&config);
        if params.len() != layout.total {
            return Err(EvalError::WeightCount {
                expected: layout.total,
                got: params.len(),
            });
        }
        Ok(Self {
            config,
            params,
            layout_names: layout.names,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn params(&self) -> &[F] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [F] {
        &mut self.params
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    /// Parameter tensors in storage order: `(name, shape)`.
    pub fn layout(&self) -> &[(String, Vec<usize>)] {
        &self.layout_names
    }

    /// Same network with parameters converted to another float type.
    pub fn cast<G: Float>(&self) -> PolicyValueNet<G> {
        PolicyValueNet {
            config: self.config,
            params: self
                .params
                .iter()
                .map(|x| G::from(*x).expect("finite parameter"))
                .collect(),
            layout_names: self.layout_names.clone(),
        }
    }

    fn check_shape(&self, planes: &PlaneStack) -> Result<(), EvalError> {
        let expected = (
            self.config.variant.rows(),
            self.config.variant.cols(),
            self.config.input_planes(),
        );
        let got = (planes.rows, planes.cols, planes.planes);
        if expected != got || planes.data.len() != got.0 * got.1 * got.2 {
            return Err(EvalError::ShapeMismatch { expected, got });
        }
        Ok(())
    }

    fn run(&self, planes: &PlaneStack, p_drop: f32, rng: Option<&mut dyn RngCore>) -> Trace<F> {
        let layout = Layout::new(&self.config);
        let p = &self.params;
        let (h, w) = (self.config.variant.rows(), self.config.variant.cols());
        let hw = h * w;
        let f = self.config.filters;
        let input: Vec<F> = planes.data.iter().map(|&x| cst(x as f64)).collect();

        let mut stem = vec![F::zero(); f * hw];
        conv_forward(p, &layout.stem, &input, &mut stem, h, w);
        relu_inplace(&mut stem);

        let mut blocks = Vec::with_capacity(layout.blocks.len());
        let mut x = stem.clone();
        for (c1, c2) in &layout.blocks {
            let mut h1 = vec![F::zero(); f * hw];
            conv_forward(p, c1, &x, &mut h1, h, w);
            relu_inplace(&mut h1);
            let mut out = vec![F::zero(); f * hw];
            conv_forward(p, c2, &h1, &mut out, h, w);
            for (o, &s) in out.iter_mut().zip(&x) {
                *o = *o + s;
            }
            relu_inplace(&mut out);
            x = out.clone();
            blocks.push((h1, out));
        }

        let mut value_conv = vec![F::zero(); hw];
        conv_forward(p, &layout.value_conv, &x, &mut value_conv, h, w);
        relu_inplace(&mut value_conv);
        let mut value_hidden = vec![F::zero(); layout.value_fc1.nout];
        dense_forward(p, &layout.value_fc1, &value_conv, &mut value_hidden);
        relu_inplace(&mut value_hidden);

        let mut policy_conv = vec![F::zero(); 2 * hw];
        conv_forward(p, &layout.policy_conv, &x, &mut policy_conv, h, w);
        relu_inplace(&mut policy_conv);
        let mut policy_hidden = vec![F::zero(); layout.policy_fc1.nout];
        dense_forward(p, &layout.policy_fc1, &policy_conv, &mut policy_hidden);
        relu_inplace(&mut policy_hidden);

        if let Some(rng) = rng {
            let p_drop = p_drop.clamp(0.0, MAX_DROPOUT);
            if p_drop > 0.0 {
                for unit in value_hidden.iter_mut().chain(policy_hidden.iter_mut()) {
                    if rng.random::<f32>() < p_drop {
                        *unit = F::zero();
                    }
                }
            }
        }

        let mut v = [F::zero()];
        dense_forward(p, &layout.value_fc2, &value_hidden, &mut v);
        let mut logits = vec![F::zero(); layout.policy_fc2.nout];
        dense_forward(p, &layout.policy_fc2, &policy_hidden, &mut logits);

        Trace {
            input,
            stem,
            blocks,
            value_conv,
            value_hidden,
            value: v[0].tanh(),
            policy_conv,
            policy_hidden,
            logits,
        }
    }

    /// Forward pass. With `p_drop == 0` the rng is not used and the result
    /// is identical to an undamaged pass.
    pub fn forward(
        &self,
        planes: &PlaneStack,
        p_drop: f32,
        rng: &mut dyn RngCore,
    ) -> Result<EvalResult, EvalError> {
        self.check_shape(planes)?;
        let trace = if p_drop > 0.0 {
            self.run(planes, p_drop, Some(rng))
        } else {
            self.run(planes, 0.0, None)
        };
        let policy = softmax(&trace.logits)
            .into_iter()
            .map(|x| x.to_f32().unwrap_or(0.0))
            .collect();
        Ok(EvalResult {
            value: trace.value.to_f32().unwrap_or(0.0).clamp(-1.0, 1.0),
            policy,
        })
    }

    /// Mean loss `(z - v)^2 - pi . log p` over `batch` and its gradient.
    ///
    /// Each batch entry is `(planes, pi, z)`.
    pub fn loss_and_gradients(
        &self,
        batch: &[(&PlaneStack, &[f32], f32)],
    ) -> Result<(F, Gradients<F>), EvalError> {
        if batch.is_empty() {
            return Err(EvalError::EmptyBatch);
        }
        let layout = Layout::new(&self.config);
        let p = &self.params;
        let (h, w) = (self.config.variant.rows(), self.config.variant.cols());
        let hw = h * w;
        let f = self.config.filters;
        let scale: F = cst(1.0 / batch.len() as f64);
        let mut g = vec![F::zero(); p.len()];
        let mut total = F::zero();

        for &(planes, pi, z) in batch {
            self.check_shape(planes)?;
            let t = self.run(planes, 0.0, None);
            let z: F = cst(z as f64);
            let pi: Vec<F> = pi.iter().map(|&x| cst(x as f64)).collect();
            let log_p = log_softmax(&t.logits);
            let v = t.value;
            let ce = pi
                .iter()
                .zip(&log_p)
                .fold(F::zero(), |a, (&q, &lp)| a - q * lp);
            total = total + (z - v) * (z - v) + ce;

            // value head
            let dv = cst::<F>(-2.0) * (z - v) * scale;
            let dpre = dv * (F::one() - v * v);
            let mut d_vh = vec![F::zero(); layout.value_fc1.nout];
            dense_backward(
                p,
                &layout.value_fc2,
                &t.value_hidden,
                &[dpre],
                &mut d_vh,
                &mut g,
            );
            for (d, &a) in d_vh.iter_mut().zip(&t.value_hidden) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }
            let mut d_vc = vec![F::zero(); hw];
            dense_backward(
                p,
                &layout.value_fc1,
                &t.value_conv,
                &d_vh,
                &mut d_vc,
                &mut g,
            );
            for (d, &a) in d_vc.iter_mut().zip(&t.value_conv) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }

            // policy head
            let pi_sum = pi.iter().fold(F::zero(), |a, &b| a + b);
            let d_logits: Vec<F> = log_p
                .iter()
                .zip(&pi)
                .map(|(&lp, &q)| (lp.exp() * pi_sum - q) * scale)
                .collect();
            let mut d_ph = vec![F::zero(); layout.policy_fc1.nout];
            dense_backward(
                p,
                &layout.policy_fc2,
                &t.policy_hidden,
                &d_logits,
                &mut d_ph,
                &mut g,
            );
            for (d, &a) in d_ph.iter_mut().zip(&t.policy_hidden) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }
            let mut d_pc = vec![F::zero(); 2 * hw];
            dense_backward(
                p,
                &layout.policy_fc1,
                &t.policy_conv,
                &d_ph,
                &mut d_pc,
                &mut g,
            );
            for (d, &a) in d_pc.iter_mut().zip(&t.policy_conv) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }

            // trunk output
            let trunk = t.blocks.last().map(|(_, o)| o).unwrap_or(&t.stem);
            let mut dx = vec![F::zero(); f * hw];
            conv_backward(
                p,
                &layout.value_conv,
                trunk,
                &d_vc,
                Some(&mut dx),
                &mut g,
                h,
                w,
            );
            conv_backward(
                p,
                &layout.policy_conv,
                trunk,
                &d_pc,
                Some(&mut dx),
                &mut g,
                h,
                w,
            );

            for (bi, (c1, c2)) in layout.blocks.iter().enumerate().rev() {
                let (h1, out) = &t.blocks[bi];
                let block_in = if bi == 0 {
                    &t.stem
                } else {
                    &t.blocks[bi - 1].1
                };
                for (d, &a) in dx.iter_mut().zip(out) {
                    if a <= F::zero() {
                        *d = F::zero();
                    }
                }
                let mut dh1 = vec![F::zero(); f * hw];
                conv_backward(p, c2, h1, &dx, Some(&mut dh1), &mut g, h, w);
                for (d, &a) in dh1.iter_mut().zip(h1) {
                    if a <= F::zero() {
                        *d = F::zero();
                    }
                }
                // skip connection: dx already holds the gradient into the block input
                conv_backward(p, c1, block_in, &dh1, Some(&mut dx), &mut g, h, w);
            }
            for (d, &a) in dx.iter_mut().zip(&t.stem) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }
            conv_backward(p, &layout.stem, &t.input, &dx, None, &mut g, h, w);
        }
        Ok((total * scale, g))
    }
}

fn softmax<F: Float>(logits: &[F]) -> Vec<F> {
    log_softmax(logits).into_iter().map(F::exp).collect()
}

fn log_softmax<F: Float>(logits: &[F]) -> Vec<F> {
    let max = logits.iter().copied().fold(F::neg_infinity(), F::max);
    let sum = logits.iter().fold(F::zero(), |a, &l| a + (l - max).exp());
    let log_sum = sum.ln() + max;
    logits.iter().map(|&l| l - log_sum).collect()
}

impl Evaluator for PolicyValueNet<f32> {
    fn evaluate(&self, state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> EvalResult {
        let planes = encode_planes(&[*state], state.to_move()).expect("single-state history");
        self.forward(&planes, p_drop, rng)
            .expect("state variant matches network")
    }
}
