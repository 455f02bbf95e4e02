//! Latent-factor rating models trained by SGD.
//!
//! Four variants share one parameter layout:
//!
//! * `biased_svd` — `r_hat = mu + b_u + b_i + V_i . U_u`
//! * `svdpp` — adds the implicit-feedback term: the user vector becomes
//!   `U_u + |N(u)|^{-1/2} sum_{j in N(u)} y_j` with `N(u)` the user's rated
//!   items in the training split.
//! * `autosvd` — the item vector is anchored by encoded content:
//!   `V_i = beta * cae(C_i) + eps_i`, with only the offset `eps_i` learned.
//! * `autosvdpp` — both of the above.
//!
//! Each SGD step updates every parameter from the values it held before the
//! step (simultaneous update), so one visited triple is one well-defined
//! gradient step and the update rules can be checked against finite
//! differences of the per-sample loss.
//!
//! The implicit variants have two trainers: a naive one that walks `N(u)`
//! for every rating, and a batched one that visits ratings grouped by user,
//! accumulates the implicit-vector updates in a per-user aggregate, and
//! writes the aggregate back to the `y_j` once per user — `O(1)` amortized
//! implicit work per rating instead of `O(|N(u)|)`.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cae::FeatureMatrix;
use crate::dataset::RatingsDataset;
use crate::error::{Error, Result};
use crate::store::Store;

/// The four model variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    BiasedSvd,
    SvdPp,
    AutoSvd,
    AutoSvdPp,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::BiasedSvd,
        Variant::SvdPp,
        Variant::AutoSvd,
        Variant::AutoSvdPp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::BiasedSvd => "biased_svd",
            Variant::SvdPp => "svdpp",
            Variant::AutoSvd => "autosvd",
            Variant::AutoSvdPp => "autosvdpp",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "biased_svd" => Ok(Variant::BiasedSvd),
            "svdpp" => Ok(Variant::SvdPp),
            "autosvd" => Ok(Variant::AutoSvd),
            "autosvdpp" => Ok(Variant::AutoSvdPp),
            _ => Err(Error::Config(format!(
                "unknown variant '{name}' (expected biased_svd, svdpp, autosvd or autosvdpp)"
            ))),
        }
    }

    /// True when the item vector is anchored by encoded content.
    pub fn uses_content(&self) -> bool {
        matches!(self, Variant::AutoSvd | Variant::AutoSvdPp)
    }

    /// True when the user vector carries the implicit-feedback sum.
    pub fn uses_implicit(&self) -> bool {
        matches!(self, Variant::SvdPp | Variant::AutoSvdPp)
    }
}

/// Which epoch implementation drives an implicit-feedback variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trainer {
    /// Recompute the implicit sum and update every `y_j` per rating.
    Naive,
    /// Per-user aggregate updates, written back once per user.
    Efficient,
}

impl Trainer {
    pub fn name(&self) -> &'static str {
        match self {
            Trainer::Naive => "naive",
            Trainer::Efficient => "efficient",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "naive" => Ok(Trainer::Naive),
            "efficient" => Ok(Trainer::Efficient),
            _ => Err(Error::Config(format!(
                "unknown trainer '{name}' (expected naive or efficient)"
            ))),
        }
    }
}

/// SGD hyper-parameters. `gamma1`/`lambda1` drive the bias updates,
/// `gamma2`/`lambda2` the factor updates.
#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Weight of the encoded-content anchor inside the item vector.
    pub beta: f64,
    /// Latent dimensionality (must equal the feature dimension for the
    /// content-anchored variants).
    pub k: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Half-width of the uniform factor init.
    pub init_scale: f64,
    /// Stop when an epoch improves training RMSE by less than this;
    /// set to 0 to always run all epochs.
    pub early_stop_delta: f64,
}

impl TrainConfig {
    /// Published defaults per variant: the content-anchored models and the
    /// plain models share rates within their bias/implicit family.
    pub fn for_variant(variant: Variant) -> Self {
        let (gamma, lambda1, lambda2) = match variant {
            Variant::BiasedSvd | Variant::AutoSvd => (0.01, 0.1, 0.1),
            Variant::SvdPp | Variant::AutoSvdPp => (0.007, 0.005, 0.015),
        };
        TrainConfig {
            gamma1: gamma,
            gamma2: gamma,
            lambda1,
            lambda2,
            beta: 0.1,
            k: 10,
            epochs: 30,
            seed: 42,
            init_scale: 0.05,
            early_stop_delta: 1e-4,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gamma1 <= 0.0 || self.gamma2 <= 0.0 || self.gamma1.is_nan() || self.gamma2.is_nan()
        {
            return Err(Error::Config(format!(
                "learning rates must be positive (gamma1={}, gamma2={})",
                self.gamma1, self.gamma2
            )));
        }
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 {
            return Err(Error::Config(format!(
                "regularization weights must be non-negative (lambda1={}, lambda2={})",
                self.lambda1, self.lambda2
            )));
        }
        if self.k == 0 {
            return Err(Error::Config(
                "latent dimension k must be at least 1".into(),
            ));
        }
        if self.init_scale <= 0.0 || self.init_scale.is_nan() {
            return Err(Error::Config(format!(
                "init_scale must be positive, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }
}

/// One trained epoch: its position, the training RMSE measured from the
/// pre-update errors, and its wall-clock cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_rmse: f64,
    pub seconds: f64,
}

/// A trained (or initialized) rating model. All parameter blocks are flat
/// row-major with `k` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub variant: Variant,
    pub n_users: usize,
    pub n_items: usize,
    pub k: usize,
    /// Global rating mean of the training split.
    pub mu: f64,
    pub b_u: Vec<f64>,
    pub b_i: Vec<f64>,
    /// User factors, `n_users x k`.
    pub u: Vec<f64>,
    /// Learned per-item factors: the whole item vector for the plain
    /// variants, the offset `eps_i` for the content-anchored ones.
    pub item_base: Vec<f64>,
    /// Implicit-feedback item factors, `n_items x k`; empty unless the
    /// variant uses them.
    pub y: Vec<f64>,
    /// `beta * cae(C_i)` precomputed per item; empty unless the variant is
    /// content-anchored.
    pub content_term: Vec<f64>,
    pub beta: f64,
    /// Checksum of the feature matrix this model was trained against
    /// (0 when content is unused), verified when artifacts are reloaded.
    pub feature_checksum: u64,
    /// Rating-scale bounds applied by [`FactorModel::predict_clipped`].
    pub clip: Option<(f64, f64)>,
}

impl FactorModel {
    /// All-zero parameters: every prediction is exactly `mu`.
    pub fn zeroed(variant: Variant, n_users: usize, n_items: usize, k: usize, mu: f64) -> Self {
        FactorModel {
            variant,
            n_users,
            n_items,
            k,
            mu,
            b_u: vec![0.0; n_users],
            b_i: vec![0.0; n_items],
            u: vec![0.0; n_users * k],
            item_base: vec![0.0; n_items * k],
            y: if variant.uses_implicit() {
                vec![0.0; n_items * k]
            } else {
                Vec::new()
            },
            content_term: if variant.uses_content() {
                vec![0.0; n_items * k]
            } else {
                Vec::new()
            },
            beta: 0.0,
            feature_checksum: 0,
            clip: None,
        }
    }

    #[inline]
    fn effective_item(&self, i: usize, f: usize) -> f64 {
        let v = self.item_base[i * self.k + f];
        if self.content_term.is_empty() {
            v
        } else {
            v + self.content_term[i * self.k + f]
        }
    }

    /// `|N(u)|^{-1/2} sum_{j in N(u)} y_j` into `out`; zero when `N(u)` is
    /// empty or the variant has no implicit factors.
    fn implicit_vector(&self, train: &RatingsDataset, user: usize, out: &mut [f64]) {
        out.fill(0.0);
        if self.y.is_empty() || user >= train.user_items.len() {
            return;
        }
        let n_u = &train.user_items[user];
        if n_u.is_empty() {
            return;
        }
        for &j in n_u {
            let jo = j as usize * self.k;
            for (f, o) in out.iter_mut().enumerate() {
                *o += self.y[jo + f];
            }
        }
        let norm = 1.0 / (n_u.len() as f64).sqrt();
        for o in out.iter_mut() {
            *o *= norm;
        }
    }

    /// Raw rating prediction. Unseen users drop `b_u` and the factor term,
    /// unseen items drop `b_i` and the factor term; with both unseen the
    /// prediction is the global mean. Never fails, never returns non-finite
    /// values for a finite model.
    pub fn predict(&self, train: &RatingsDataset, user: usize, item: usize) -> f64 {
        let user_ok = user < self.n_users && train.user_seen(user);
        let item_ok = item < self.n_items && train.item_seen(item);
        let mut p = self.mu;
        if user_ok {
            p += self.b_u[user];
        }
        if item_ok {
            p += self.b_i[item];
        }
        if user_ok && item_ok {
            let mut imp = vec![0.0; self.k];
            if self.variant.uses_implicit() {
                self.implicit_vector(train, user, &mut imp);
            }
            let uo = user * self.k;
            for f in 0..self.k {
                p += self.effective_item(item, f) * (self.u[uo + f] + imp[f]);
            }
        }
        p
    }

    /// [`FactorModel::predict`] clamped to the model's rating scale.
    pub fn predict_clipped(&self, train: &RatingsDataset, user: usize, item: usize) -> f64 {
        let p = self.predict(train, user, item);
        match self.clip {
            Some((lo, hi)) => p.clamp(lo, hi),
            None => p,
        }
    }

    /// The training objective this SGD minimizes: summed squared error plus
    /// per-occurrence regularization — for every training triple,
    /// `lambda1 (b_u^2 + b_i^2)` and `lambda2 (|U_u|^2 + |item_i|^2 +
    /// sum_{j in N(u)} |y_j|^2)`, the last term only for implicit variants.
    pub fn objective(&self, train: &RatingsDataset, cfg: &TrainConfig) -> f64 {
        let k = self.k;
        let mut total = 0.0;
        for r in &train.triples {
            let (u, i) = (r.user as usize, r.item as usize);
            let e = r.value - self.predict(train, u, i);
            total += e * e;
            total += cfg.lambda1 * (self.b_u[u] * self.b_u[u] + self.b_i[i] * self.b_i[i]);
            let uo = u * k;
            let io = i * k;
            let mut reg = 0.0;
            for f in 0..k {
                reg += self.u[uo + f] * self.u[uo + f];
                reg += self.item_base[io + f] * self.item_base[io + f];
            }
            if self.variant.uses_implicit() {
                for &j in &train.user_items[u] {
                    let jo = j as usize * k;
                    for f in 0..k {
                        reg += self.y[jo + f] * self.y[jo + f];
                    }
                }
            }
            total += cfg.lambda2 * reg;
        }
        total
    }

    fn all_finite(&self) -> bool {
        self.b_u
            .iter()
            .chain(&self.b_i)
            .chain(&self.u)
            .chain(&self.item_base)
            .chain(&self.y)
            .all(|v| v.is_finite())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = Store::new();
        s.set_meta("kind", "factor-model");
        s.set_meta("variant", self.variant.name());
        s.set_meta("n_users", self.n_users);
        s.set_meta("n_items", self.n_items);
        s.set_meta("k", self.k);
        s.set_meta(
            "feature_checksum",
            format!("{:016x}", self.feature_checksum),
        );
        s.push_block("mu", 1, 1, vec![self.mu]);
        s.push_block("beta", 1, 1, vec![self.beta]);
        s.push_block("b_u", 1, self.n_users, self.b_u.clone());
        s.push_block("b_i", 1, self.n_items, self.b_i.clone());
        s.push_block("u", self.n_users, self.k, self.u.clone());
        s.push_block("item_base", self.n_items, self.k, self.item_base.clone());
        if !self.y.is_empty() {
            s.push_block("y", self.n_items, self.k, self.y.clone());
        }
        if !self.content_term.is_empty() {
            s.push_block(
                "content_term",
                self.n_items,
                self.k,
                self.content_term.clone(),
            );
        }
        if let Some((lo, hi)) = self.clip {
            s.push_block("clip", 1, 2, vec![lo, hi]);
        }
        s.write(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = Store::read(path)?;
        if s.meta("kind") != Some("factor-model") {
            return Err(Error::Config(format!(
                "{}: not a factor-model file",
                path.display()
            )));
        }
        let variant = Variant::parse(s.meta("variant").unwrap_or(""))?;
        let n_users: usize = s.meta_parsed("n_users")?;
        let n_items: usize = s.meta_parsed("n_items")?;
        let k: usize = s.meta_parsed("k")?;
        let feature_checksum =
            u64::from_str_radix(s.meta("feature_checksum").unwrap_or("0"), 16)
                .map_err(|_| Error::Config(format!("{}: bad feature_checksum", path.display())))?;
        let grab = |name: &str, rows: usize, cols: usize| -> Result<Vec<f64>> {
            let b = s.block(name)?;
            if b.rows != rows || b.cols != cols {
                return Err(Error::Shape(format!(
                    "{}: block '{name}' is {}x{}, expected {rows}x{cols}",
                    path.display(),
                    b.rows,
                    b.cols
                )));
            }
            Ok(b.data.clone())
        };
        let model = FactorModel {
            variant,
            n_users,
            n_items,
            k,
            mu: grab("mu", 1, 1)?[0],
            beta: grab("beta", 1, 1)?[0],
            b_u: grab("b_u", 1, n_users)?,
            b_i: grab("b_i", 1, n_items)?,
            u: grab("u", n_users, k)?,
            item_base: grab("item_base", n_items, k)?,
            y: if variant.uses_implicit() {
                grab("y", n_items, k)?
            } else {
                Vec::new()
            },
            content_term: if variant.uses_content() {
                grab("content_term", n_items, k)?
            } else {
                Vec::new()
            },
            feature_checksum,
            clip: if s.has_block("clip") {
                let c = grab("clip", 1, 2)?;
                Some((c[0], c[1]))
            } else {
                None
            },
        };
        Ok(model)
    }
}

fn shuffled_indices(n: usize, order_seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    order.shuffle(&mut rng);
    order
}

fn epoch_rmse(sq_sum: f64, n: usize) -> Result<f64> {
    let rmse = if n == 0 {
        0.0
    } else {
        (sq_sum / n as f64).sqrt()
    };
    if rmse.is_finite() {
        Ok(rmse)
    } else {
        Err(Error::Diverged(
            "training error became non-finite; lower the learning rates".into(),
        ))
    }
}

/// One SGD epoch for the variants without implicit feedback, visiting
/// triples in a seeded shuffled order. Returns the epoch's training RMSE
/// measured from the pre-update errors.
pub fn sgd_epoch(
    m: &mut FactorModel,
    train: &RatingsDataset,
    cfg: &TrainConfig,
    order_seed: u64,
) -> Result<f64> {
    let k = m.k;
    let mut u_pre = vec![0.0; k];
    let mut v_eff = vec![0.0; k];
    let mut sq = 0.0;
    for &t in &shuffled_indices(train.triples.len(), order_seed) {
        let r = train.triples[t];
        let (u, i) = (r.user as usize, r.item as usize);
        let (uo, io) = (u * k, i * k);
        u_pre.copy_from_slice(&m.u[uo..uo + k]);
        for f in 0..k {
            v_eff[f] = m.effective_item(i, f);
        }
        let mut pred = m.mu + m.b_u[u] + m.b_i[i];
        for f in 0..k {
            pred += v_eff[f] * u_pre[f];
        }
        let e = r.value - pred;
        sq += e * e;

        m.b_u[u] += cfg.gamma1 * (e - cfg.lambda1 * m.b_u[u]);
        m.b_i[i] += cfg.gamma1 * (e - cfg.lambda1 * m.b_i[i]);
        for f in 0..k {
            m.item_base[io + f] += cfg.gamma2 * (e * u_pre[f] - cfg.lambda2 * m.item_base[io + f]);
            m.u[uo + f] += cfg.gamma2 * (e * v_eff[f] - cfg.lambda2 * m.u[uo + f]);
        }
    }
    epoch_rmse(sq, train.triples.len())
}

/// One SGD epoch for the implicit-feedback variants, recomputing the
/// implicit sum and updating every `y_j, j in N(u)` at each visited rating.
pub fn sgd_epoch_implicit_naive(
    m: &mut FactorModel,
    train: &RatingsDataset,
    cfg: &TrainConfig,
    order_seed: u64,
) -> Result<f64> {
    let k = m.k;
    let mut u_pre = vec![0.0; k];
    let mut v_eff = vec![0.0; k];
    let mut imp = vec![0.0; k];
    let mut sq = 0.0;
    for &t in &shuffled_indices(train.triples.len(), order_seed) {
        let r = train.triples[t];
        let (u, i) = (r.user as usize, r.item as usize);
        let (uo, io) = (u * k, i * k);
        let n_u = &train.user_items[u];
        let norm = if n_u.is_empty() {
            0.0
        } else {
            1.0 / (n_u.len() as f64).sqrt()
        };

        m.implicit_vector(train, u, &mut imp);
        u_pre.copy_from_slice(&m.u[uo..uo + k]);
        for f in 0..k {
            v_eff[f] = m.effective_item(i, f);
        }
        let mut pred = m.mu + m.b_u[u] + m.b_i[i];
        for f in 0..k {
            pred += v_eff[f] * (u_pre[f] + imp[f]);
        }
        let e = r.value - pred;
        sq += e * e;

        m.b_u[u] += cfg.gamma1 * (e - cfg.lambda1 * m.b_u[u]);
        m.b_i[i] += cfg.gamma1 * (e - cfg.lambda1 * m.b_i[i]);
        for f in 0..k {
            m.item_base[io + f] +=
                cfg.gamma2 * (e * (u_pre[f] + imp[f]) - cfg.lambda2 * m.item_base[io + f]);
            m.u[uo + f] += cfg.gamma2 * (e * v_eff[f] - cfg.lambda2 * m.u[uo + f]);
        }
        for &j in n_u {
            let jo = j as usize * k;
            for f in 0..k {
                m.y[jo + f] += cfg.gamma2 * (e * norm * v_eff[f] - cfg.lambda2 * m.y[jo + f]);
            }
        }
    }
    epoch_rmse(sq, train.triples.len())
}

/// One batched SGD epoch for the implicit-feedback variants.
///
/// Ratings are visited grouped by user (user order shuffled by
/// `order_seed`, a user's ratings in load order). The user's implicit
/// vector is materialized once, updated in place through the user's
/// ratings, and the accumulated change is distributed to the `y_j` after
/// the last one — `O(1)` amortized implicit work per rating instead of
/// `O(|N(u)|)`.
pub fn sgd_epoch_implicit_efficient(
    m: &mut FactorModel,
    train: &RatingsDataset,
    cfg: &TrainConfig,
    order_seed: u64,
) -> Result<f64> {
    let k = m.k;
    let mut by_user: Vec<Vec<u32>> = vec![Vec::new(); train.n_users];
    for (t, r) in train.triples.iter().enumerate() {
        by_user[r.user as usize].push(t as u32);
    }
    let mut users: Vec<usize> = (0..train.n_users)
        .filter(|&u| !by_user[u].is_empty())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    users.shuffle(&mut rng);

    let mut u_pre = vec![0.0; k];
    let mut v_eff = vec![0.0; k];
    let mut p_im = vec![0.0; k];
    let mut p_old = vec![0.0; k];
    let mut sq = 0.0;

    for &u in &users {
        let n_u = &train.user_items[u];
        let norm = 1.0 / (n_u.len() as f64).sqrt();
        p_im.fill(0.0);
        for &j in n_u {
            let jo = j as usize * k;
            for f in 0..k {
                p_im[f] += m.y[jo + f];
            }
        }
        for p in p_im.iter_mut() {
            *p *= norm;
        }
        p_old.copy_from_slice(&p_im);

        let uo = u * k;
        for &t in &by_user[u] {
            let r = train.triples[t as usize];
            let i = r.item as usize;
            let io = i * k;
            u_pre.copy_from_slice(&m.u[uo..uo + k]);
            for f in 0..k {
                v_eff[f] = m.effective_item(i, f);
            }
            let mut pred = m.mu + m.b_u[u] + m.b_i[i];
            for f in 0..k {
                pred += v_eff[f] * (u_pre[f] + p_im[f]);
            }
            let e = r.value - pred;
            sq += e * e;

            m.b_u[u] += cfg.gamma1 * (e - cfg.lambda1 * m.b_u[u]);
            m.b_i[i] += cfg.gamma1 * (e - cfg.lambda1 * m.b_i[i]);
            for f in 0..k {
                let eps_new = m.item_base[io + f]
                    + cfg.gamma2 * (e * (u_pre[f] + p_im[f]) - cfg.lambda2 * m.item_base[io + f]);
                let u_new = m.u[uo + f] + cfg.gamma2 * (e * v_eff[f] - cfg.lambda2 * m.u[uo + f]);
                let p_new = p_im[f] + cfg.gamma2 * (e * v_eff[f] - cfg.lambda2 * p_im[f]);
                m.item_base[io + f] = eps_new;
                m.u[uo + f] = u_new;
                p_im[f] = p_new;
            }
        }

        for &j in n_u {
            let jo = j as usize * k;
            for f in 0..k {
                m.y[jo + f] += norm * (p_im[f] - p_old[f]);
            }
        }
    }
    epoch_rmse(sq, train.triples.len())
}

/// Initialize and train a model: biases start at zero, factors uniform in
/// `[-init_scale, init_scale]` from the config seed. Per-epoch visit orders
/// derive from the same seed, so a (variant, config, dataset) triple pins
/// the result bitwise. Returns the model and the per-epoch trace; with
/// `epochs = 0` the initialized model is returned untouched.
pub fn train(
    variant: Variant,
    train: &RatingsDataset,
    cfg: &TrainConfig,
    features: Option<&FeatureMatrix>,
    trainer: Trainer,
) -> Result<(FactorModel, Vec<EpochStats>)> {
    cfg.validate()?;
    if variant.uses_content() && features.is_none() {
        return Err(Error::Config(format!(
            "variant '{}' requires content features",
            variant.name()
        )));
    }
    if !variant.uses_content() && features.is_some() {
        return Err(Error::Config(format!(
            "variant '{}' does not take content features",
            variant.name()
        )));
    }
    if trainer == Trainer::Efficient && !variant.uses_implicit() {
        return Err(Error::Config(format!(
            "the batched trainer only applies to the implicit-feedback variants, not '{}'",
            variant.name()
        )));
    }
    if train.triples.is_empty() {
        return Err(Error::Config("cannot train on an empty dataset".into()));
    }
    if let Some(f) = features {
        if f.n_items != train.n_items {
            return Err(Error::Shape(format!(
                "feature matrix covers {} items, dataset has {}",
                f.n_items, train.n_items
            )));
        }
        if f.dim != cfg.k {
            return Err(Error::Shape(format!(
                "feature dimension {} does not match k={}",
                f.dim, cfg.k
            )));
        }
    }

    let k = cfg.k;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let s = cfg.init_scale;
    let mut m = FactorModel {
        variant,
        n_users: train.n_users,
        n_items: train.n_items,
        k,
        mu: train.global_mean,
        b_u: vec![0.0; train.n_users],
        b_i: vec![0.0; train.n_items],
        u: (0..train.n_users * k)
            .map(|_| rng.gen_range(-s..s))
            .collect(),
        item_base: (0..train.n_items * k)
            .map(|_| rng.gen_range(-s..s))
            .collect(),
        y: if variant.uses_implicit() {
            (0..train.n_items * k)
                .map(|_| rng.gen_range(-s..s))
                .collect()
        } else {
            Vec::new()
        },
        content_term: match features {
            Some(f) => f.data.iter().map(|v| cfg.beta * v).collect(),
            None => Vec::new(),
        },
        beta: if variant.uses_content() {
            cfg.beta
        } else {
            0.0
        },
        feature_checksum: features.map(|f| f.checksum()).unwrap_or(0),
        clip: Some((train.rating_min, train.rating_max)),
    };

    let mut stats: Vec<EpochStats> = Vec::with_capacity(cfg.epochs);
    for ep in 0..cfg.epochs {
        let order_seed = cfg.seed.wrapping_add(1 + ep as u64);
        let t0 = Instant::now();
        let rmse = match (variant.uses_implicit(), trainer) {
            (false, _) => sgd_epoch(&mut m, train, cfg, order_seed)?,
            (true, Trainer::Naive) => sgd_epoch_implicit_naive(&mut m, train, cfg, order_seed)?,
            (true, Trainer::Efficient) => {
                sgd_epoch_implicit_efficient(&mut m, train, cfg, order_seed)?
            }
        };
        let seconds = t0.elapsed().as_secs_f64();
        if !m.all_finite() {
            return Err(Error::Diverged(format!(
                "model parameters became non-finite in epoch {}; lower the learning rates",
                ep + 1
            )));
        }
        stats.push(EpochStats {
            epoch: ep + 1,
            train_rmse: rmse,
            seconds,
        });
        if cfg.early_stop_delta > 0.0 && stats.len() >= 2 {
            let prev = stats[stats.len() - 2].train_rmse;
            if prev - rmse < cfg.early_stop_delta {
                break;
            }
        }
    }

    Ok((m, stats))
}
