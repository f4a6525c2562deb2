use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lda::TopicModel;

/// Topics placed in the plane so that distances track topic dissimilarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMap {
    pub coords: Vec<[f64; 2]>,
    /// Share of corpus tokens attributed to each topic.
    pub prevalence: Vec<f64>,
}

/// Jensen–Shannon divergence in nats; bounded by ln 2.
pub fn js_divergence(p: ArrayView1<'_, f64>, q: ArrayView1<'_, f64>) -> f64 {
    let mut js = 0.0;
    for (&a, &b) in p.iter().zip(q.iter()) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            js += 0.5 * a * (a / m).ln();
        }
        if b > 0.0 {
            js += 0.5 * b * (b / m).ln();
        }
    }
    js.max(0.0)
}

/// Pairwise JS divergences between the rows of `dists`; symmetric by
/// construction with an exact zero diagonal.
pub fn js_matrix(dists: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = dists.nrows();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let d = js_divergence(dists.row(i), dists.row(j));
            out[[i, j]] = d;
            out[[j, i]] = d;
        }
    }
    out
}

/// Classical (Torgerson) MDS into two dimensions: double-centre the squared
/// distances, take the two leading eigenpairs, scale eigenvectors by the
/// root eigenvalue. Each axis is flipped so that the first point with a
/// non-negligible coordinate on it lies on the positive side.
pub fn classical_mds(distances: ArrayView2<'_, f64>) -> Vec<[f64; 2]> {
    let n = distances.nrows();
    if n == 0 {
        return Vec::new();
    }
    let sq = DMatrix::from_fn(n, n, |i, j| distances[[i, j]] * distances[[i, j]]);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));

    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lead = eig.eigenvalues[order[0]].max(0.0);
    let tol = 1e-12 * lead.max(1e-300);

    let mut coords = vec![[0.0; 2]; n];
    for (axis, &e) in order.iter().take(2).enumerate() {
        let lambda = eig.eigenvalues[e];
        if lambda <= tol {
            continue;
        }
        let scale = lambda.sqrt();
        let col = eig.eigenvectors.column(e);
        let sign = col.iter().find(|x| x.abs() * scale > 1e-9).map_or(1.0, |x| x.signum());
        for i in 0..n {
            coords[i][axis] = sign * col[i] * scale;
        }
    }
    coords
}

/// JS divergence between φ rows, embedded in 2-D by classical MDS, with
/// prevalence `Σ_d θ[d,k]·len(d) / total_tokens`.
pub fn topic_map(model: &TopicModel) -> Result<TopicMap> {
    let k = model.topics();
    if k < 2 {
        return Err(Error::Invalid("topic map needs at least two topics".into()));
    }
    let coords = classical_mds(js_matrix(model.phi().view()).view());
    let total: f64 = model.doc_lengths().iter().map(|&l| l as f64).sum();
    let theta = model.theta();
    let prevalence = (0..k)
        .map(|t| {
            model
                .doc_lengths()
                .iter()
                .enumerate()
                .map(|(d, &len)| theta[[d, t]] * len as f64)
                .sum::<f64>()
                / total
        })
        .collect();
    Ok(TopicMap { coords, prevalence })
}
