use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleCluster {
    pub id: usize,
    /// Ascending indices into the clustered rule set.
    pub member_indices: Vec<usize>,
    pub centroid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<String>,
}

/// Spherical k-means over unit vectors.
///
/// Initialization is greedy farthest-point starting from a seed-chosen
/// distinct point. All tie-breaking follows a value-based canonical order of
/// the inputs, so the partition does not depend on input order; clusters are
/// numbered by their smallest member index.
pub fn cluster(vectors: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<RuleCluster>> {
    let n = vectors.len();
    if k < 1 {
        return Err(Error::Validation("cluster count must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Validation(format!("cannot form {k} clusters from {n} vectors")));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Validation("vectors differ in dimension".into()));
    }

    // canonical order: lexicographic by value, then by input position
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lex_cmp(&vectors[a], &vectors[b]).then(a.cmp(&b)));

    let mut centroids = initial_centroids(vectors, &order, k, seed);
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..MAX_ITERATIONS {
        let mut next: Vec<usize> = vectors.iter().map(|v| nearest(v, &centroids)).collect();
        repair_empty(vectors, &order, &centroids, &mut next, k);
        let changed = next != assignment;
        assignment = next;
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let mut sum = vec![0.0; dim];
            for &i in order.iter().filter(|&&i| assignment[i] == c) {
                sum.iter_mut().zip(&vectors[i]).for_each(|(s, x)| *s += x);
            }
            let norm = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                *centroid = sum.into_iter().map(|x| x / norm).collect();
            }
        }
        if !changed {
            break;
        }
    }

    let mut clusters: Vec<RuleCluster> = (0..k)
        .map(|c| RuleCluster {
            id: 0,
            member_indices: (0..n).filter(|&i| assignment[i] == c).collect(),
            centroid: centroids[c].clone(),
            persona: None,
        })
        .collect();
    clusters.sort_by_key(|c| c.member_indices[0]);
    for (id, c) in clusters.iter_mut().enumerate() {
        c.id = id;
    }
    Ok(clusters)
}

/// Mean silhouette under cosine distance; singletons contribute 0.
pub fn silhouette(vectors: &[Vec<f64>], clusters: &[RuleCluster]) -> f64 {
    let n = vectors.len();
    if clusters.len() < 2 || n == 0 {
        return 0.0;
    }
    let mut label = vec![0; n];
    for (c, cl) in clusters.iter().enumerate() {
        cl.member_indices.iter().for_each(|&i| label[i] = c);
    }
    let mean_dist = |i: usize, members: &[usize]| {
        let others: Vec<usize> = members.iter().copied().filter(|&j| j != i).collect();
        others.iter().map(|&j| 1.0 - cosine(&vectors[i], &vectors[j])).sum::<f64>() / others.len() as f64
    };
    let total: f64 = (0..n)
        .map(|i| {
            let own = &clusters[label[i]].member_indices;
            if own.len() < 2 {
                return 0.0;
            }
            let a = mean_dist(i, own);
            let b = clusters
                .iter()
                .enumerate()
                .filter(|(c, _)| *c != label[i])
                .map(|(_, cl)| mean_dist(i, &cl.member_indices))
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 { (b - a) / denom } else { 0.0 }
        })
        .sum();
    total / n as f64
}

/// Picks k in `2..=max_k` (capped at n − 1) by mean silhouette; ties favour
/// the smaller k.
pub fn select_k(vectors: &[Vec<f64>], max_k: usize, seed: u64) -> Result<(usize, Vec<RuleCluster>)> {
    let upper = max_k.min(vectors.len().saturating_sub(1));
    if upper < 2 {
        return Err(Error::Validation(format!("need at least 3 rules to choose a cluster count, got {}", vectors.len())));
    }
    let mut best: Option<(f64, usize, Vec<RuleCluster>)> = None;
    for k in 2..=upper {
        let clusters = cluster(vectors, k, seed)?;
        let score = silhouette(vectors, &clusters);
        if best.as_ref().is_none_or(|(s, _, _)| score > *s + 1e-12) {
            best = Some((score, k, clusters));
        }
    }
    let (_, k, clusters) = best.expect("at least one k evaluated");
    Ok((k, clusters))
}

fn initial_centroids(vectors: &[Vec<f64>], order: &[usize], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut distinct: Vec<usize> = order.to_vec();
    distinct.dedup_by(|a, b| vectors[*a] == vectors[*b]);
    let first = distinct[(seed % distinct.len() as u64) as usize];
    let mut chosen = vec![first];
    while chosen.len() < k {
        // farthest remaining point from its nearest chosen centroid; the
        // first in canonical order wins ties
        let mut best: Option<(usize, f64)> = None;
        for &i in order.iter().filter(|i| !chosen.contains(i)) {
            let d = chosen.iter().map(|&c| 1.0 - cosine(&vectors[i], &vectors[c])).fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d > bd + 1e-12) {
                best = Some((i, d));
            }
        }
        chosen.push(best.expect("k <= n").0);
    }
    chosen.into_iter().map(|i| vectors[i].clone()).collect()
}

fn nearest(v: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let s = cosine(v, centroid);
        if s > best.1 + 1e-12 {
            best = (c, s);
        }
    }
    best.0
}

/// Moves, for each empty cluster, the member of the largest cluster that lies
/// farthest from that cluster's centroid.
fn repair_empty(vectors: &[Vec<f64>], order: &[usize], centroids: &[Vec<f64>], assignment: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        assignment.iter().for_each(|&c| sizes[c] += 1);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        let largest = (0..k).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))).expect("k >= 1");
        let victim = order
            .iter()
            .copied()
            .filter(|&i| assignment[i] == largest)
            .min_by(|&a, &b| {
                cosine(&vectors[a], &centroids[largest])
                    .partial_cmp(&cosine(&vectors[b], &centroids[largest]))
                    .unwrap_or(Ordering::Equal)
            })
            .expect("largest cluster is non-empty");
        assignment[victim] = empty;
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}
