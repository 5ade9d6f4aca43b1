//! Latent Dirichlet allocation by collapsed Gibbs sampling.
//!
//! Each token's topic is resampled from
//! `p(z = k | rest) ∝ (n_dk + α_k) (n_kw + η) / (n_k + Vη)` with its own
//! count removed. Topic-word and document-topic estimates are smoothed
//! averages of the count tables over the post-burn-in sweeps.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::DocTermMatrix;
use crate::rng::{self, SeededRng};
use crate::{Error, Result};

/// Dirichlet prior on document-topic proportions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AlphaPrior {
    /// Symmetric `50 / K`.
    Default,
    Symmetric(f64),
    /// One concentration per topic; length must equal `K`.
    PerTopic(Vec<f64>),
}

impl AlphaPrior {
    pub fn resolve(&self, k: usize) -> Result<Vec<f64>> {
        let values = match self {
            AlphaPrior::Default => vec![50.0 / k as f64; k],
            AlphaPrior::Symmetric(a) => vec![*a; k],
            AlphaPrior::PerTopic(v) => {
                if v.len() != k {
                    return Err(Error::invalid(format!("{} alpha values for K = {k}", v.len())));
                }
                v.clone()
            }
        };
        if values.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("alpha must be positive and finite"));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdaHyperparams {
    pub k: usize,
    pub alpha: AlphaPrior,
    pub eta: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl LdaHyperparams {
    /// Defaults: `α = 50/K`, `η = 0.1`, 1000 sweeps with 200 burn-in.
    pub fn new(k: usize) -> Self {
        LdaHyperparams { k, alpha: AlphaPrior::Default, eta: 0.1, sweeps: 1000, burn_in: 200, seed: 42 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("K must be >= 1"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid("eta must be positive and finite"));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::invalid(format!(
                "sweeps ({}) must exceed burn-in ({})",
                self.sweeps, self.burn_in
            )));
        }
        self.alpha.resolve(self.k)?;
        Ok(())
    }
}

/// A trained topic model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LdaModel {
    pub alpha: Vec<f64>,
    pub eta: f64,
    /// `K x V` topic-word probabilities; rows sum to one.
    pub phi: Vec<Vec<f64>>,
    pub vocabulary: Vec<String>,
    /// Point-estimate log-likelihood after each sweep.
    pub ll_trace: Vec<f64>,
}

impl LdaModel {
    pub fn k(&self) -> usize {
        self.phi.len()
    }

    pub fn n_words(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(Error::invalid("model has no topics"));
        }
        if self.alpha.len() != k {
            return Err(Error::DimensionMismatch(format!("{} alpha values for K = {k}", self.alpha.len())));
        }
        if self.alpha.iter().chain([&self.eta]).any(|&a| a.is_nan() || a <= 0.0) {
            return Err(Error::invalid("priors must be positive"));
        }
        for (i, row) in self.phi.iter().enumerate() {
            if row.len() != self.vocabulary.len() {
                return Err(Error::DimensionMismatch(format!(
                    "phi row {i} has {} columns for a vocabulary of {}",
                    row.len(),
                    self.vocabulary.len()
                )));
            }
            if row.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
                return Err(Error::invalid(format!("phi row {i} has a non-positive entry")));
            }
            let s: f64 = row.iter().sum();
            if libm::fabs(s - 1.0) > 1e-9 {
                return Err(Error::invalid(format!("phi row {i} sums to {s}")));
            }
        }
        Ok(())
    }
}

/// Topic assignments with their count tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicAssignmentState {
    k: usize,
    v: usize,
    words: Vec<Vec<u32>>,
    z: Vec<Vec<u32>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<u32>,
    topic_total: Vec<u64>,
}

impl TopicAssignmentState {
    pub fn z(&self) -> &[Vec<u32>] {
        &self.z
    }

    pub fn doc_topic(&self, d: usize) -> &[u32] {
        &self.doc_topic[d]
    }

    pub fn topic_word(&self, k: usize, w: usize) -> u32 {
        self.topic_word[k * self.v + w]
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_total
    }

    pub fn total_tokens(&self) -> u64 {
        self.words.iter().map(|d| d.len() as u64).sum()
    }

    /// Recounts every table from `z` and compares.
    pub fn check_invariants(&self) -> Result<()> {
        let mut topic_word = vec![0u32; self.k * self.v];
        let mut topic_total = vec![0u64; self.k];
        for (d, (ws, zs)) in self.words.iter().zip(&self.z).enumerate() {
            let mut doc_topic = vec![0u32; self.k];
            for (&w, &z) in ws.iter().zip(zs) {
                doc_topic[z as usize] += 1;
                topic_word[z as usize * self.v + w as usize] += 1;
                topic_total[z as usize] += 1;
            }
            if doc_topic != self.doc_topic[d] {
                return Err(Error::invalid(format!("doc-topic counts of document {d} drifted")));
            }
        }
        if topic_word != self.topic_word || topic_total != self.topic_total {
            return Err(Error::invalid("topic-word counts drifted"));
        }
        if self.topic_total.iter().sum::<u64>() != self.total_tokens() {
            return Err(Error::invalid("topic totals do not cover every token"));
        }
        Ok(())
    }
}

/// A running collapsed Gibbs chain over a corpus without empty documents.
pub struct GibbsSampler<'a> {
    corpus: &'a DocTermMatrix,
    alpha: Vec<f64>,
    alpha_sum: f64,
    eta: f64,
    state: TopicAssignmentState,
    rngs: Vec<SeededRng>,
    weights: Vec<f64>,
    sum_doc_topic: Vec<Vec<f64>>,
    sum_topic_word: Vec<f64>,
    samples: usize,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(corpus: &'a DocTermMatrix, hp: &LdaHyperparams) -> Result<Self> {
        hp.validate()?;
        if !corpus.empty_docs().is_empty() {
            return Err(Error::invalid("sampler corpus contains empty documents"));
        }
        let k = hp.k;
        let v = corpus.n_words();
        let alpha = hp.alpha.resolve(k)?;
        let mut rngs: Vec<SeededRng> = corpus
            .doc_ids()
            .iter()
            .map(|id| rng::seeded(rng::derive_seed(hp.seed, rng::stream_key(id))))
            .collect();

        let mut words = Vec::with_capacity(corpus.n_docs());
        let mut z = Vec::with_capacity(corpus.n_docs());
        let mut doc_topic = Vec::with_capacity(corpus.n_docs());
        let mut topic_word = vec![0u32; k * v];
        let mut topic_total = vec![0u64; k];
        for (d, rng) in rngs.iter_mut().enumerate() {
            let ws: Vec<u32> = corpus
                .row(d)
                .iter()
                .flat_map(|&(w, c)| core::iter::repeat_n(w, c as usize))
                .collect();
            let mut dt = vec![0u32; k];
            let zs: Vec<u32> = ws
                .iter()
                .map(|&w| {
                    let t = rng::index(rng, k);
                    dt[t] += 1;
                    topic_word[t * v + w as usize] += 1;
                    topic_total[t] += 1;
                    t as u32
                })
                .collect();
            words.push(ws);
            z.push(zs);
            doc_topic.push(dt);
        }

        let alpha_sum = alpha.iter().sum();
        Ok(GibbsSampler {
            corpus,
            alpha,
            alpha_sum,
            eta: hp.eta,
            state: TopicAssignmentState { k, v, words, z, doc_topic, topic_word, topic_total },
            rngs,
            weights: vec![0.0; k],
            sum_doc_topic: vec![vec![0.0; k]; corpus.n_docs()],
            sum_topic_word: vec![0.0; k * v],
            samples: 0,
        })
    }

    pub fn state(&self) -> &TopicAssignmentState {
        &self.state
    }

    /// One full pass over every token.
    pub fn sweep(&mut self) {
        let k = self.state.k;
        let v = self.state.v;
        let v_eta = v as f64 * self.eta;
        let st = &mut self.state;
        for d in 0..st.words.len() {
            let rng = &mut self.rngs[d];
            for i in 0..st.words[d].len() {
                let w = st.words[d][i] as usize;
                let old = st.z[d][i] as usize;
                st.doc_topic[d][old] -= 1;
                st.topic_word[old * v + w] -= 1;
                st.topic_total[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (f64::from(st.doc_topic[d][t]) + self.alpha[t])
                        * (f64::from(st.topic_word[t * v + w]) + self.eta)
                        / (st.topic_total[t] as f64 + v_eta);
                    self.weights[t] = p;
                    total += p;
                }
                let new = rng::categorical(rng, &self.weights, total);

                st.z[d][i] = new as u32;
                st.doc_topic[d][new] += 1;
                st.topic_word[new * v + w] += 1;
                st.topic_total[new] += 1;
            }
        }
    }

    /// Adds the current count tables to the running averages.
    pub fn accumulate(&mut self) {
        for (acc, counts) in self.sum_doc_topic.iter_mut().zip(&self.state.doc_topic) {
            for (a, &c) in acc.iter_mut().zip(counts) {
                *a += f64::from(c);
            }
        }
        for (a, &c) in self.sum_topic_word.iter_mut().zip(&self.state.topic_word) {
            *a += f64::from(c);
        }
        self.samples += 1;
    }

    fn phi_from(&self, topic_word: &[f64]) -> Vec<Vec<f64>> {
        let v = self.state.v;
        let v_eta = v as f64 * self.eta;
        topic_word
            .chunks(v)
            .map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().map(|&c| (c + self.eta) / (total + v_eta)).collect()
            })
            .collect()
    }

    fn theta_from(&self, doc_topic: &[Vec<f64>]) -> Vec<Vec<f64>> {
        doc_topic
            .iter()
            .enumerate()
            .map(|(d, row)| {
                let n = self.state.words[d].len() as f64;
                row.iter()
                    .zip(&self.alpha)
                    .map(|(&c, &a)| (c + a) / (n + self.alpha_sum))
                    .collect()
            })
            .collect()
    }

    /// Point estimates from the current assignment alone.
    pub fn current_estimates(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let tw: Vec<f64> = self.state.topic_word.iter().map(|&c| f64::from(c)).collect();
        let dt: Vec<Vec<f64>> = self
            .state
            .doc_topic
            .iter()
            .map(|r| r.iter().map(|&c| f64::from(c)).collect())
            .collect();
        (self.phi_from(&tw), self.theta_from(&dt))
    }

    /// Estimates averaged over accumulated sweeps, or the current state if
    /// nothing was accumulated.
    pub fn averaged_estimates(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        if self.samples == 0 {
            return self.current_estimates();
        }
        let n = self.samples as f64;
        let tw: Vec<f64> = self.sum_topic_word.iter().map(|c| c / n).collect();
        let dt: Vec<Vec<f64>> = self.sum_doc_topic.iter().map(|r| r.iter().map(|c| c / n).collect()).collect();
        (self.phi_from(&tw), self.theta_from(&dt))
    }

    pub fn current_log_likelihood(&self) -> f64 {
        let (phi, theta) = self.current_estimates();
        ll_unchecked(&phi, &theta, self.corpus)
    }
}

/// Result of [`gibbs_train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub model: LdaModel,
    /// Document-topic proportions for the documents in `trained_docs`.
    pub theta: Vec<Vec<f64>>,
    /// Corpus row indices that were trained on, in order.
    pub trained_docs: Vec<usize>,
    /// Corpus row indices skipped for having no tokens.
    pub skipped_docs: Vec<usize>,
    /// Log-likelihood of the trained documents at the final estimates.
    pub log_likelihood: f64,
}

impl TrainOutput {
    /// `theta` expanded to every corpus row; skipped rows get the prior mean.
    pub fn theta_for_all(&self, n_docs: usize) -> Vec<Vec<f64>> {
        let alpha_sum: f64 = self.model.alpha.iter().sum();
        let prior: Vec<f64> = self.model.alpha.iter().map(|a| a / alpha_sum).collect();
        let mut out = vec![prior; n_docs];
        for (row, &d) in self.theta.iter().zip(&self.trained_docs) {
            out[d] = row.clone();
        }
        out
    }
}

pub fn gibbs_train(corpus: &DocTermMatrix, hp: &LdaHyperparams) -> Result<TrainOutput> {
    hp.validate()?;
    let skipped_docs = corpus.empty_docs();
    let trained_docs: Vec<usize> = (0..corpus.n_docs()).filter(|d| !skipped_docs.contains(d)).collect();
    if trained_docs.is_empty() {
        return Err(Error::invalid("corpus has no tokens to train on"));
    }
    let train_corpus = if skipped_docs.is_empty() { corpus.clone() } else { corpus.select_rows(&trained_docs)? };

    let mut sampler = GibbsSampler::new(&train_corpus, hp)?;
    let mut trace = Vec::with_capacity(hp.sweeps);
    for s in 1..=hp.sweeps {
        sampler.sweep();
        trace.push(sampler.current_log_likelihood());
        if s > hp.burn_in {
            sampler.accumulate();
        }
    }
    let (phi, theta) = sampler.averaged_estimates();
    let log_likelihood = ll_unchecked(&phi, &theta, &train_corpus);
    let model = LdaModel {
        alpha: sampler.alpha.clone(),
        eta: hp.eta,
        phi,
        vocabulary: corpus.vocabulary().to_vec(),
        ll_trace: trace,
    };
    Ok(TrainOutput { model, theta, trained_docs, skipped_docs, log_likelihood })
}

fn ll_unchecked(phi: &[Vec<f64>], theta: &[Vec<f64>], corpus: &DocTermMatrix) -> f64 {
    let mut ll = 0.0;
    for (d, th) in theta.iter().enumerate() {
        for &(w, c) in corpus.row(d) {
            let p: f64 = th.iter().zip(phi).map(|(t, row)| t * row[w as usize]).sum();
            ll += f64::from(c) * libm::log(p);
        }
    }
    ll
}

/// `Σ_d Σ_n log Σ_k θ_dk φ_{k,w_n}` at point estimates.
pub fn log_likelihood(model: &LdaModel, theta: &[Vec<f64>], corpus: &DocTermMatrix) -> Result<f64> {
    if theta.len() != corpus.n_docs() {
        return Err(Error::DimensionMismatch(format!(
            "{} theta rows for {} documents",
            theta.len(),
            corpus.n_docs()
        )));
    }
    if let Some(row) = theta.iter().find(|r| r.len() != model.k()) {
        return Err(Error::DimensionMismatch(format!("theta row of length {} for K = {}", row.len(), model.k())));
    }
    if corpus.n_words() != model.n_words() {
        return Err(Error::DimensionMismatch(format!(
            "corpus has {} columns, model vocabulary {}",
            corpus.n_words(),
            model.n_words()
        )));
    }
    Ok(ll_unchecked(&model.phi, theta, corpus))
}

/// Hyperparameters of restart `restart` for candidate `k`. The seed depends
/// only on `(template.seed, k, restart)`.
pub fn restart_hyperparams(template: &LdaHyperparams, k: usize, restart: usize) -> LdaHyperparams {
    LdaHyperparams {
        k,
        seed: rng::derive_seed(rng::derive_seed(template.seed, k as u64), restart as u64),
        ..template.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFit {
    pub k: usize,
    pub restart_lls: Vec<f64>,
    pub best_ll: f64,
    pub best_restart: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub best_k: usize,
    pub candidates: Vec<CandidateFit>,
}

/// Picks the best-scoring candidate from already computed fits; ties go to
/// the smaller K.
pub fn pick_best(mut candidates: Vec<CandidateFit>) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::invalid("no K candidates"));
    }
    candidates.sort_by_key(|c| c.k);
    let mut best = &candidates[0];
    for c in &candidates[1..] {
        if c.best_ll > best.best_ll {
            best = c;
        }
    }
    Ok(Selection { best_k: best.k, candidates })
}

pub fn fit_from_restarts(k: usize, restart_lls: Vec<f64>) -> CandidateFit {
    let (best_restart, best_ll) = restart_lls
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, ll)| if ll > acc.1 { (i, ll) } else { acc });
    CandidateFit { k, restart_lls, best_ll, best_restart }
}

/// Score used to compare candidate topic counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionMetric {
    /// Point-estimate log-likelihood of the training tokens. Grows with K
    /// on most corpora, so it rarely prefers the smaller of two candidates.
    Training,
    /// Document completion: a seeded `fraction` of each document's tokens is
    /// held out (the same split for every K and restart), the model is
    /// trained on the rest, and the held-out tokens are scored at the
    /// trained point estimates.
    HeldOut { fraction: f64 },
}

impl Default for SelectionMetric {
    fn default() -> Self {
        SelectionMetric::HeldOut { fraction: 0.2 }
    }
}

/// Observed / held-out halves of a corpus for document completion.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionSplit {
    pub observed: DocTermMatrix,
    pub held_out: DocTermMatrix,
}

/// Holds out `floor(fraction * N_d)` tokens of each document, chosen by a
/// stream keyed on `(seed, doc id)`.
pub fn completion_split(corpus: &DocTermMatrix, fraction: f64, seed: u64) -> Result<CompletionSplit> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invalid(format!("held-out fraction must be in [0, 1), got {fraction}")));
    }
    let v = corpus.n_words();
    let mut observed = Vec::with_capacity(corpus.n_docs());
    let mut held = Vec::with_capacity(corpus.n_docs());
    for d in 0..corpus.n_docs() {
        let mut tokens: Vec<u32> = corpus
            .row(d)
            .iter()
            .flat_map(|&(w, c)| core::iter::repeat_n(w, c as usize))
            .collect();
        let n_held = libm::floor(fraction * tokens.len() as f64) as usize;
        let mut rng = rng::seeded(rng::derive_seed(seed, rng::stream_key(&corpus.doc_ids()[d])));
        for i in 0..n_held {
            let j = i + rng::index(&mut rng, tokens.len() - i);
            tokens.swap(i, j);
        }
        let mut held_row = vec![0u32; v];
        let mut obs_row = vec![0u32; v];
        for (i, &w) in tokens.iter().enumerate() {
            if i < n_held {
                held_row[w as usize] += 1;
            } else {
                obs_row[w as usize] += 1;
            }
        }
        held.push(held_row);
        observed.push(obs_row);
    }
    Ok(CompletionSplit {
        observed: DocTermMatrix::from_dense(corpus.doc_ids().to_vec(), corpus.vocabulary().to_vec(), &observed)?,
        held_out: DocTermMatrix::from_dense(corpus.doc_ids().to_vec(), corpus.vocabulary().to_vec(), &held)?,
    })
}

/// Score of one training run under `metric`.
pub fn candidate_score(
    corpus: &DocTermMatrix,
    split: Option<&CompletionSplit>,
    hp: &LdaHyperparams,
) -> Result<f64> {
    match split {
        None => gibbs_train(corpus, hp).map(|o| o.log_likelihood),
        Some(split) => {
            let out = gibbs_train(&split.observed, hp)?;
            let theta = out.theta_for_all(split.observed.n_docs());
            log_likelihood(&out.model, &theta, &split.held_out)
        }
    }
}

/// Trains `restarts` seeded chains per candidate K, keeps the best score of
/// each, and returns the K with the highest best score.
pub fn select_k(
    corpus: &DocTermMatrix,
    k_candidates: &[usize],
    restarts: usize,
    template: &LdaHyperparams,
) -> Result<Selection> {
    select_k_with(corpus, k_candidates, restarts, template, SelectionMetric::default())
}

pub fn select_k_with(
    corpus: &DocTermMatrix,
    k_candidates: &[usize],
    restarts: usize,
    template: &LdaHyperparams,
    metric: SelectionMetric,
) -> Result<Selection> {
    if k_candidates.is_empty() {
        return Err(Error::invalid("no K candidates"));
    }
    if restarts < 1 {
        return Err(Error::invalid("restarts must be >= 1"));
    }
    let split = selection_split(corpus, template, metric)?;
    let mut fits = Vec::with_capacity(k_candidates.len());
    for &k in k_candidates {
        let scores = (0..restarts)
            .map(|r| candidate_score(corpus, split.as_ref(), &restart_hyperparams(template, k, r)))
            .collect::<Result<Vec<f64>>>()?;
        fits.push(fit_from_restarts(k, scores));
    }
    pick_best(fits)
}

/// The split shared by every candidate, if the metric needs one.
pub fn selection_split(
    corpus: &DocTermMatrix,
    template: &LdaHyperparams,
    metric: SelectionMetric,
) -> Result<Option<CompletionSplit>> {
    match metric {
        SelectionMetric::Training => Ok(None),
        SelectionMetric::HeldOut { fraction } => {
            completion_split(corpus, fraction, rng::derive_seed(template.seed, u64::MAX)).map(Some)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldInConfig {
    pub sweeps: usize,
    pub burn_in: usize,
}

impl Default for FoldInConfig {
    fn default() -> Self {
        FoldInConfig { sweeps: 200, burn_in: 50 }
    }
}

/// Topic proportions of an unseen document with `phi` held fixed.
/// `doc` holds `(column, count)` pairs in the model's vocabulary.
pub fn fold_in(model: &LdaModel, doc: &[(u32, u32)], seed: u64) -> Result<Vec<f64>> {
    fold_in_with(model, doc, seed, FoldInConfig::default())
}

pub fn fold_in_with(model: &LdaModel, doc: &[(u32, u32)], seed: u64, cfg: FoldInConfig) -> Result<Vec<f64>> {
    if cfg.sweeps <= cfg.burn_in {
        return Err(Error::invalid("fold-in sweeps must exceed burn-in"));
    }
    let k = model.k();
    let v = model.n_words();
    if let Some(&(w, _)) = doc.iter().find(|&&(w, _)| w as usize >= v) {
        return Err(Error::DimensionMismatch(format!("word {w} outside a vocabulary of {v}")));
    }
    let alpha_sum: f64 = model.alpha.iter().sum();
    let words: Vec<usize> = doc
        .iter()
        .flat_map(|&(w, c)| core::iter::repeat_n(w as usize, c as usize))
        .collect();
    let n = words.len() as f64;
    if words.is_empty() {
        return Ok(model.alpha.iter().map(|a| a / alpha_sum).collect());
    }

    let mut rng = rng::seeded(seed);
    let mut counts = vec![0u32; k];
    let mut z: Vec<usize> = words
        .iter()
        .map(|_| {
            let t = rng::index(&mut rng, k);
            counts[t] += 1;
            t
        })
        .collect();
    let mut weights = vec![0.0; k];
    let mut sum = vec![0.0; k];
    for s in 1..=cfg.sweeps {
        for (zi, &w) in z.iter_mut().zip(&words) {
            counts[*zi] -= 1;
            let mut total = 0.0;
            for t in 0..k {
                let p = (f64::from(counts[t]) + model.alpha[t]) * model.phi[t][w];
                weights[t] = p;
                total += p;
            }
            *zi = rng::categorical(&mut rng, &weights, total);
            counts[*zi] += 1;
        }
        if s > cfg.burn_in {
            for (a, &c) in sum.iter_mut().zip(&counts) {
                *a += f64::from(c);
            }
        }
    }
    let samples = (cfg.sweeps - cfg.burn_in) as f64;
    Ok(sum
        .iter()
        .zip(&model.alpha)
        .map(|(s, a)| (s / samples + a) / (n + alpha_sum))
        .collect())
}
