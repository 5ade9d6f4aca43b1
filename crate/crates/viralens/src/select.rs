//! Topic-count selection with restarts and candidates trained in parallel.

use rayon::prelude::*;
use viralens_core::corpus::DocTermMatrix;
use viralens_core::lda::{
    candidate_score, fit_from_restarts, pick_best, restart_hyperparams, selection_split, LdaHyperparams, Selection,
    SelectionMetric,
};

use crate::error::{Error, Result};

/// Same selection as the sequential core routine, with every
/// `(K, restart)` chain run on the rayon pool.
pub fn select_k_parallel(
    corpus: &DocTermMatrix,
    k_candidates: &[usize],
    restarts: usize,
    template: &LdaHyperparams,
    metric: SelectionMetric,
) -> Result<Selection> {
    if k_candidates.is_empty() {
        return Err(Error::Validation("no K candidates".into()));
    }
    if restarts < 1 {
        return Err(Error::Validation("restarts must be >= 1".into()));
    }
    let split = selection_split(corpus, template, metric)?;
    let jobs: Vec<(usize, usize)> = k_candidates.iter().flat_map(|&k| (0..restarts).map(move |r| (k, r))).collect();
    let scores = jobs
        .par_iter()
        .map(|&(k, r)| candidate_score(corpus, split.as_ref(), &restart_hyperparams(template, k, r)))
        .collect::<Result<Vec<f64>, _>>()?;
    let fits = k_candidates
        .iter()
        .zip(scores.chunks(restarts))
        .map(|(&k, s)| fit_from_restarts(k, s.to_vec()))
        .collect();
    Ok(pick_best(fits)?)
}
