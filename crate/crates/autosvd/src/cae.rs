//! Contractive auto-encoder over item content.
//!
//! A single sigmoid hidden layer with tied weights: the decoder reuses the
//! transpose of the encoder matrix. The training objective is per-example
//! binary cross-entropy reconstruction plus a contractive penalty — the
//! squared Frobenius norm of the encoder Jacobian — which for this
//! architecture has the closed form
//!
//! ```text
//! ||J(x)||^2 = sum_j (h_j (1 - h_j))^2 * sum_i W_ji^2
//! ```
//!
//! Items are encoded once after training; the resulting feature matrix is
//! what the factor models consume.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

use crate::dataset::ItemContentMatrix;
use crate::error::{Error, Result};
use crate::store::Store;

/// Decoder outputs are clipped into this range before the log in the
/// cross-entropy, so a saturated sigmoid cannot produce an infinite loss.
const OUTPUT_CLIP: f64 = 1e-7;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Tied-weight contractive auto-encoder: `h = s(W x + b_h)`,
/// `x_hat = s(W^T h + b_y)`.
#[derive(Debug, Clone)]
pub struct CaeModel {
    /// Input (content) dimension.
    pub d_x: usize,
    /// Hidden (feature) dimension.
    pub d_h: usize,
    /// Encoder weights, row-major `d_h x d_x`.
    pub w: Vec<f64>,
    pub b_h: Vec<f64>,
    pub b_y: Vec<f64>,
    /// Weight of the contractive penalty in the loss.
    pub jacobian_weight: f64,
}

/// Gradient of the per-example loss with respect to every parameter.
#[derive(Debug, Clone)]
pub struct CaeGradients {
    pub w: Vec<f64>,
    pub b_h: Vec<f64>,
    pub b_y: Vec<f64>,
}

impl CaeModel {
    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d_x {
            return Err(Error::Shape(format!(
                "input has {} components, model expects {}",
                x.len(),
                self.d_x
            )));
        }
        Ok(())
    }

    /// Hidden activations `s(W x + b_h)`.
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut h = Vec::with_capacity(self.d_h);
        for j in 0..self.d_h {
            let row = &self.w[j * self.d_x..(j + 1) * self.d_x];
            let a: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b_h[j];
            h.push(sigmoid(a));
        }
        Ok(h)
    }

    fn decode(&self, h: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.d_x);
        for i in 0..self.d_x {
            let mut z = self.b_y[i];
            for j in 0..self.d_h {
                z += self.w[j * self.d_x + i] * h[j];
            }
            y.push(sigmoid(z));
        }
        y
    }

    /// Full forward pass `s(W^T s(W x + b_h) + b_y)`.
    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.decode(&self.encode(x)?))
    }

    /// Closed-form squared Frobenius norm of the encoder Jacobian at `x`.
    pub fn jacobian_penalty(&self, x: &[f64]) -> Result<f64> {
        let h = self.encode(x)?;
        let mut p = 0.0;
        for j in 0..self.d_h {
            let t = h[j] * (1.0 - h[j]);
            let s: f64 = self.w[j * self.d_x..(j + 1) * self.d_x]
                .iter()
                .map(|w| w * w)
                .sum();
            p += t * t * s;
        }
        Ok(p)
    }

    /// Per-example loss: clipped binary cross-entropy of the reconstruction
    /// plus `jacobian_weight` times the contractive penalty.
    pub fn loss(&self, x: &[f64]) -> Result<f64> {
        let h = self.encode(x)?;
        let xhat = self.decode(&h);
        let mut bce = 0.0;
        for (xi, yi) in x.iter().zip(&xhat) {
            let y = yi.clamp(OUTPUT_CLIP, 1.0 - OUTPUT_CLIP);
            bce -= xi * y.ln() + (1.0 - xi) * (1.0 - y).ln();
        }
        let mut pen = 0.0;
        for j in 0..self.d_h {
            let t = h[j] * (1.0 - h[j]);
            let s: f64 = self.w[j * self.d_x..(j + 1) * self.d_x]
                .iter()
                .map(|w| w * w)
                .sum();
            pen += t * t * s;
        }
        Ok(bce + self.jacobian_weight * pen)
    }

    /// Analytic gradient of [`CaeModel::loss`] at `x`. The tied weight matrix
    /// accumulates both its encoder-path and decoder-path terms.
    pub fn loss_gradients(&self, x: &[f64]) -> Result<CaeGradients> {
        let h = self.encode(x)?;
        let xhat = self.decode(&h);
        let d_x = self.d_x;
        let d_h = self.d_h;

        let mut gw = vec![0.0; d_h * d_x];
        let mut gbh = vec![0.0; d_h];
        let mut gby = vec![0.0; d_x];

        // Cross-entropy through the sigmoid output: d/dz = xhat - x.
        let delta: Vec<f64> = xhat.iter().zip(x).map(|(y, xi)| y - xi).collect();
        gby.copy_from_slice(&delta);

        for j in 0..d_h {
            let row = j * d_x;
            // backprop into the hidden layer through the decoder
            let mut dh = 0.0;
            for i in 0..d_x {
                dh += self.w[row + i] * delta[i];
                gw[row + i] += delta[i] * h[j]; // decoder-path weight term
            }
            let t = h[j] * (1.0 - h[j]);
            let da = dh * t;
            gbh[j] += da;
            for i in 0..d_x {
                gw[row + i] += da * x[i]; // encoder-path weight term
            }

            // contractive penalty: P_j = t^2 * S_j with S_j = sum_i W_ji^2
            let s: f64 = self.w[row..row + d_x].iter().map(|w| w * w).sum();
            let dpda = 2.0 * t * t * (1.0 - 2.0 * h[j]) * s;
            gbh[j] += self.jacobian_weight * dpda;
            for i in 0..d_x {
                gw[row + i] += self.jacobian_weight * (dpda * x[i] + 2.0 * self.w[row + i] * t * t);
            }
        }

        Ok(CaeGradients {
            w: gw,
            b_h: gbh,
            b_y: gby,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = Store::new();
        s.set_meta("kind", "cae-model");
        s.set_meta("d_x", self.d_x);
        s.set_meta("d_h", self.d_h);
        s.set_meta("activation_hidden", "sigmoid");
        s.set_meta("activation_output", "sigmoid");
        s.push_block("w", self.d_h, self.d_x, self.w.clone());
        s.push_block("b_h", 1, self.d_h, self.b_h.clone());
        s.push_block("b_y", 1, self.d_x, self.b_y.clone());
        s.push_block("jacobian_weight", 1, 1, vec![self.jacobian_weight]);
        s.write(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = Store::read(path)?;
        if s.meta("kind") != Some("cae-model") {
            return Err(Error::Config(format!(
                "{}: not an auto-encoder model file",
                path.display()
            )));
        }
        for key in ["activation_hidden", "activation_output"] {
            if s.meta(key) != Some("sigmoid") {
                return Err(Error::Config(format!(
                    "{}: unsupported {} '{}'",
                    path.display(),
                    key,
                    s.meta(key).unwrap_or("<missing>")
                )));
            }
        }
        let d_x: usize = s.meta_parsed("d_x")?;
        let d_h: usize = s.meta_parsed("d_h")?;
        let w = s.block("w")?;
        let b_h = s.block("b_h")?;
        let b_y = s.block("b_y")?;
        let jw = s.block("jacobian_weight")?;
        if w.rows != d_h || w.cols != d_x || b_h.data.len() != d_h || b_y.data.len() != d_x {
            return Err(Error::Shape(format!(
                "{}: block shapes disagree with d_x={d_x}, d_h={d_h}",
                path.display()
            )));
        }
        Ok(CaeModel {
            d_x,
            d_h,
            w: w.data.clone(),
            b_h: b_h.data.clone(),
            b_y: b_y.data.clone(),
            jacobian_weight: jw.data[0],
        })
    }
}

/// Auto-encoder training hyper-parameters.
#[derive(Debug, Clone)]
pub struct CaeTrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Seeds both the weight init and the per-epoch row shuffles.
    pub batch_order_seed: u64,
    pub jacobian_weight: f64,
    /// Half-width of the uniform weight init; `None` uses `1/sqrt(d_x)`.
    pub init_scale: Option<f64>,
}

impl Default for CaeTrainConfig {
    fn default() -> Self {
        CaeTrainConfig {
            learning_rate: 0.01,
            epochs: 50,
            batch_order_seed: 42,
            jacobian_weight: 0.1,
            init_scale: None,
        }
    }
}

/// Train a `d_h`-dimensional auto-encoder on the content rows by
/// per-example SGD. Returns the model and the mean per-example training
/// loss of each epoch (measured before each update).
pub fn train(
    content: &ItemContentMatrix,
    d_h: usize,
    cfg: &CaeTrainConfig,
) -> Result<(CaeModel, Vec<f64>)> {
    if d_h == 0 {
        return Err(Error::Config("hidden dimension must be at least 1".into()));
    }
    if cfg.epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    if cfg.learning_rate <= 0.0 || cfg.learning_rate.is_nan() {
        return Err(Error::Config(format!(
            "learning rate must be positive, got {}",
            cfg.learning_rate
        )));
    }
    if let Some(s) = cfg.init_scale {
        if s <= 0.0 || s.is_nan() {
            return Err(Error::Config(format!(
                "init_scale must be positive, got {s}"
            )));
        }
    }
    if content.n_items == 0 {
        return Err(Error::Shape("content matrix has no rows".into()));
    }

    let d_x = content.dim;
    let scale = cfg.init_scale.unwrap_or(1.0 / (d_x as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.batch_order_seed);
    let mut model = CaeModel {
        d_x,
        d_h,
        w: (0..d_h * d_x)
            .map(|_| rng.gen_range(-scale..scale))
            .collect(),
        b_h: vec![0.0; d_h],
        b_y: vec![0.0; d_x],
        jacobian_weight: cfg.jacobian_weight,
    };

    let mut order: Vec<usize> = (0..content.n_items).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let mut sum = 0.0;
        for &item in &order {
            let x = content.row(item);
            sum += model.loss(x)?;
            let g = model.loss_gradients(x)?;
            for (w, gw) in model.w.iter_mut().zip(&g.w) {
                *w -= cfg.learning_rate * gw;
            }
            for (b, gb) in model.b_h.iter_mut().zip(&g.b_h) {
                *b -= cfg.learning_rate * gb;
            }
            for (b, gb) in model.b_y.iter_mut().zip(&g.b_y) {
                *b -= cfg.learning_rate * gb;
            }
        }
        let finite = model
            .w
            .iter()
            .chain(&model.b_h)
            .chain(&model.b_y)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Diverged(format!(
                "auto-encoder parameters became non-finite in epoch {}",
                epoch + 1
            )));
        }
        epoch_losses.push(sum / content.n_items as f64);
    }

    Ok((model, epoch_losses))
}

/// Encoded content rows: one `dim`-vector per item, everything in (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub n_items: usize,
    pub dim: usize,
    /// Row-major `n_items * dim`.
    pub data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn row(&self, item: usize) -> &[f64] {
        &self.data[item * self.dim..(item + 1) * self.dim]
    }

    /// FNV-1a over the bit patterns, so factor models can verify at load
    /// time that they are paired with the features they were trained on.
    pub fn checksum(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |byte: u8| {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100_0000_01b3);
        };
        for d in [self.n_items as u64, self.dim as u64] {
            for b in d.to_le_bytes() {
                mix(b);
            }
        }
        for v in &self.data {
            for b in v.to_bits().to_le_bytes() {
                mix(b);
            }
        }
        hash
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = Store::new();
        s.set_meta("kind", "cae-features");
        s.set_meta("checksum", format!("{:016x}", self.checksum()));
        s.push_block("rows", self.n_items, self.dim, self.data.clone());
        s.write(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = Store::read(path)?;
        if s.meta("kind") != Some("cae-features") {
            return Err(Error::Config(format!(
                "{}: not a feature matrix file",
                path.display()
            )));
        }
        let b = s.block("rows")?;
        let m = FeatureMatrix {
            n_items: b.rows,
            dim: b.cols,
            data: b.data.clone(),
        };
        let want = s.meta("checksum").unwrap_or("").to_string();
        let got = format!("{:016x}", m.checksum());
        if want != got {
            return Err(Error::Config(format!(
                "{}: feature checksum mismatch (file says {want}, contents hash to {got})",
                path.display()
            )));
        }
        Ok(m)
    }
}

/// Encode every content row with the trained model.
pub fn extract_features(model: &CaeModel, content: &ItemContentMatrix) -> Result<FeatureMatrix> {
    if content.dim != model.d_x {
        return Err(Error::Shape(format!(
            "content dimension {} does not match model input dimension {}",
            content.dim, model.d_x
        )));
    }
    let mut data = Vec::with_capacity(content.n_items * model.d_h);
    for item in 0..content.n_items {
        data.extend(model.encode(content.row(item))?);
    }
    Ok(FeatureMatrix {
        n_items: content.n_items,
        dim: model.d_h,
        data,
    })
}
