#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma};
use viralens_core::corpus::DocTermMatrix;

pub struct Synthetic {
    pub corpus: DocTermMatrix,
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
}

/// Draws a corpus from the LDA generative process.
pub fn lda_corpus(k: usize, v: usize, m: usize, n_d: usize, alpha: f64, topic_conc: f64, seed: u64) -> Synthetic {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let phi: Vec<Vec<f64>> = (0..k).map(|_| dirichlet(&mut rng, topic_conc, v)).collect();
    let mut theta = Vec::with_capacity(m);
    let mut dense = Vec::with_capacity(m);
    for _ in 0..m {
        let th = dirichlet(&mut rng, alpha, k);
        let mut row = vec![0u32; v];
        for _ in 0..n_d {
            let z = draw(&th, rng.random::<f64>());
            let w = draw(&phi[z], rng.random::<f64>());
            row[w] += 1;
        }
        theta.push(th);
        dense.push(row);
    }
    let corpus = DocTermMatrix::from_dense(
        (0..m).map(|i| format!("doc{i:04}")).collect(),
        (0..v).map(|i| format!("w{i}")).collect(),
        &dense,
    )
    .unwrap();
    Synthetic { corpus, phi, theta }
}

/// Symmetric Dirichlet via normalized Gamma draws.
pub fn dirichlet<R: Rng>(rng: &mut R, conc: f64, n: usize) -> Vec<f64> {
    let g = Gamma::new(conc, 1.0).unwrap();
    loop {
        let x: Vec<f64> = (0..n).map(|_| g.sample(rng)).collect();
        let s: f64 = x.iter().sum();
        if s > 0.0 {
            return x.into_iter().map(|v| v / s).collect();
        }
    }
}

fn draw(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Mean total-variation distance between topic sets under the best matching.
pub fn best_permutation_tv(truth: &[Vec<f64>], estimate: &[Vec<f64>]) -> f64 {
    permutations(truth.len())
        .into_iter()
        .map(|p| {
            p.iter().enumerate().map(|(i, &j)| total_variation(&truth[i], &estimate[j])).sum::<f64>()
                / truth.len() as f64
        })
        .fold(f64::INFINITY, f64::min)
}
