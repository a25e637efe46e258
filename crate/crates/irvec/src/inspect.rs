//! Vocabulary diagnostics: nearest neighbors, 2-D PCA projections for
//! cluster plots, and intra/inter group distance summaries.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, jacobi_eigen, Matrix, Vector};
use crate::vocab::SeedVocabulary;

/// Mean-centered projection onto the top two principal components.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub points: BTreeMap<String, (f64, f64)>,
    /// Fractions of total variance captured by each component;
    /// `explained_variance.0 >= explained_variance.1`.
    pub explained_variance: (f64, f64),
}

/// The `k` nearest entities to `entity` by L2 distance, ascending, ties
/// broken lexicographically. The query itself is excluded.
pub fn nearest_neighbors(
    vocab: &SeedVocabulary,
    entity: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let query = vocab.entity(entity)?;
    let mut dists: Vec<(String, f64)> = vocab
        .entities
        .iter()
        .filter(|(name, _)| name.as_str() != entity)
        .map(|(name, v)| (name.clone(), linalg::norm_l2(&linalg::sub(v, query))))
        .collect();
    dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    dists.truncate(k);
    Ok(dists)
}

/// Project named vectors onto their top two principal components.
///
/// Deterministic sign convention: the first nonzero loading of each
/// principal axis is positive. When the data has rank one, the second
/// coordinate is zero everywhere and the second variance fraction is 0.
pub fn pca2(vectors: &BTreeMap<String, Vector>) -> Result<Projection2D> {
    let n = vectors.len();
    if n < 3 {
        return Err(Error::DegenerateData(format!("need at least 3 points, got {}", n)));
    }
    let dim = vectors.values().next().unwrap().len();
    if dim < 2 {
        return Err(Error::DegenerateData(format!("need dimension >= 2, got {}", dim)));
    }
    for v in vectors.values() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
    }

    // center
    let mut mean = linalg::zeros(dim);
    for v in vectors.values() {
        linalg::add_assign(&mut mean, v);
    }
    for x in mean.iter_mut() {
        *x /= n as f64;
    }
    let names: Vec<&String> = vectors.keys().collect();
    let centered: Vec<Vector> = vectors.values().map(|v| linalg::sub(v, &mean)).collect();

    // eigendecomposition of the smaller of the covariance (dim x dim) and
    // Gram (n x n) matrices; both give the same principal axes
    let (total_var, axes, vals) = if dim <= n {
        let mut cov = Matrix::zeros(dim, dim);
        for v in &centered {
            for i in 0..dim {
                for j in i..dim {
                    cov[(i, j)] += v[i] * v[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                cov[(i, j)] = cov[(j, i)];
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] /= n as f64;
            }
        }
        let (vals, vecs) = jacobi_eigen(&cov);
        let total: f64 = vals.iter().filter(|v| **v > 0.0).sum();
        let axis = |c: usize| -> Vector { (0..dim).map(|i| vecs[(i, c)]).collect() };
        (total, vec![axis(0), axis(1)], vals)
    } else {
        let mut gram = Matrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let d = linalg::dot(&centered[a], &centered[b]);
                gram[(a, b)] = d;
                gram[(b, a)] = d;
            }
        }
        let (gvals, gvecs) = jacobi_eigen(&gram);
        // eigenvalue of covariance = gram eigenvalue / n; axis = X^T u
        let vals: Vector = gvals.iter().map(|l| l / n as f64).collect();
        let total: f64 = vals.iter().filter(|v| **v > 0.0).sum();
        let axis = |c: usize| -> Vector {
            let mut a = linalg::zeros(dim);
            for (row, v) in centered.iter().enumerate() {
                linalg::axpy(&mut a, gvecs[(row, c)], v);
            }
            linalg::normalize(&mut a);
            a
        };
        (total, vec![axis(0), axis(1)], vals)
    };

    let lambda1 = vals.first().copied().unwrap_or(0.0).max(0.0);
    let lambda2 = vals.get(1).copied().unwrap_or(0.0).max(0.0);
    let rank_tol = lambda1 * 1e-12;

    let mut axis1 = axes[0].clone();
    let mut axis2 = axes[1].clone();
    fix_sign(&mut axis1);
    let rank1 = lambda2 <= rank_tol;
    if rank1 {
        axis2 = linalg::zeros(dim);
    } else {
        fix_sign(&mut axis2);
    }

    let mut points = BTreeMap::new();
    for (name, v) in names.iter().zip(&centered) {
        let x = linalg::dot(v, &axis1);
        let y = if rank1 { 0.0 } else { linalg::dot(v, &axis2) };
        points.insert((*name).clone(), (x, y));
    }
    let explained = if total_var > 0.0 {
        (lambda1 / total_var, if rank1 { 0.0 } else { lambda2 / total_var })
    } else {
        (0.0, 0.0)
    };
    Ok(Projection2D { points, explained_variance: explained })
}

fn fix_sign(axis: &mut Vector) {
    for x in axis.iter() {
        if *x != 0.0 {
            if *x < 0.0 {
                for y in axis.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

/// Mean pairwise L2 distances within groups and across groups.
///
/// Groups must be disjoint entity lists with at least two members each.
pub fn cluster_separation(
    vocab: &SeedVocabulary,
    groups: &BTreeMap<String, Vec<String>>,
) -> Result<(f64, f64)> {
    let mut seen = std::collections::BTreeSet::new();
    for (gname, members) in groups {
        if members.len() < 2 {
            return Err(Error::DegenerateData(format!(
                "group `{}` needs at least 2 members",
                gname
            )));
        }
        for m in members {
            vocab.entity(m)?;
            if !seen.insert(m.clone()) {
                return Err(Error::DegenerateData(format!(
                    "entity `{}` appears in more than one group",
                    m
                )));
            }
        }
    }
    let dist = |a: &str, b: &str| -> f64 {
        linalg::norm_l2(&linalg::sub(&vocab.entities[a], &vocab.entities[b]))
    };
    let mut intra_sum = 0.0;
    let mut intra_n = 0usize;
    for members in groups.values() {
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                intra_sum += dist(&members[i], &members[j]);
                intra_n += 1;
            }
        }
    }
    let mut inter_sum = 0.0;
    let mut inter_n = 0usize;
    let names: Vec<&String> = groups.keys().collect();
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            for x in &groups[names[a]] {
                for y in &groups[names[b]] {
                    inter_sum += dist(x, y);
                    inter_n += 1;
                }
            }
        }
    }
    Ok((
        intra_sum / intra_n.max(1) as f64,
        inter_sum / inter_n.max(1) as f64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_of(points: &[(&str, Vec<f64>)]) -> SeedVocabulary {
        let mut v = SeedVocabulary::new(points[0].1.len());
        for (name, p) in points {
            v.entities.insert((*name).to_string(), p.clone());
        }
        v
    }

    #[test]
    fn neighbors_k_zero_is_empty() {
        let v = vocab_of(&[("a", vec![0.0, 0.0]), ("b", vec![1.0, 0.0]), ("c", vec![5.0, 0.0])]);
        assert_eq!(nearest_neighbors(&v, "a", 0).unwrap(), vec![]);
    }

    #[test]
    fn neighbors_hand_geometry() {
        let v = vocab_of(&[("a", vec![0.0, 0.0]), ("b", vec![1.0, 0.0]), ("c", vec![5.0, 0.0])]);
        let nn = nearest_neighbors(&v, "a", 2).unwrap();
        assert_eq!(nn.len(), 2);
        assert_eq!(nn[0].0, "b");
        assert!((nn[0].1 - 1.0).abs() < 1e-15);
        assert_eq!(nn[1].0, "c");
        assert!((nn[1].1 - 5.0).abs() < 1e-15);
    }

    #[test]
    fn neighbors_distances_nondecreasing_and_ties_lexicographic() {
        let v = vocab_of(&[
            ("q", vec![0.0, 0.0]),
            ("far", vec![3.0, 0.0]),
            ("beta", vec![0.0, 1.0]),
            ("alpha", vec![1.0, 0.0]),
        ]);
        let nn = nearest_neighbors(&v, "q", 3).unwrap();
        assert_eq!(nn[0].0, "alpha");
        assert_eq!(nn[1].0, "beta");
        assert_eq!(nn[2].0, "far");
        for w in nn.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn neighbors_unknown_query() {
        let v = vocab_of(&[("a", vec![0.0]), ("b", vec![1.0])]);
        assert!(matches!(nearest_neighbors(&v, "zz", 1), Err(Error::UnknownEntity(_))));
    }

    #[test]
    fn pca_planar_data_explains_everything() {
        // points on a 2-D plane embedded in 5-D
        let mut pts = BTreeMap::new();
        let e1 = [1.0, 0.0, 1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0, 1.0, 0.0];
        let coords = [(0.0, 0.0), (1.0, 0.5), (2.0, -1.0), (0.5, 2.0), (-1.0, 1.0)];
        for (i, (a, b)) in coords.iter().enumerate() {
            let v: Vector = (0..5).map(|d| a * e1[d] + b * e2[d]).collect();
            pts.insert(format!("p{}", i), v);
        }
        let proj = pca2(&pts).unwrap();
        let (f1, f2) = proj.explained_variance;
        assert!(f1 >= f2);
        assert!((f1 + f2 - 1.0).abs() < 1e-9, "planar data: fractions sum to 1");
    }

    #[test]
    fn pca_translation_and_duplication_invariance() {
        let mut pts = BTreeMap::new();
        let raw = [
            ("a", vec![0.0, 0.0, 1.0]),
            ("b", vec![1.0, 2.0, 0.0]),
            ("c", vec![2.0, 1.0, -1.0]),
            ("d", vec![-1.0, 3.0, 0.5]),
        ];
        for (n, v) in &raw {
            pts.insert((*n).to_string(), v.clone());
        }
        let base = pca2(&pts).unwrap();

        let mut shifted = BTreeMap::new();
        for (n, v) in &raw {
            shifted.insert((*n).to_string(), v.iter().map(|x| x + 100.0).collect());
        }
        let moved = pca2(&shifted).unwrap();
        for (name, (x, y)) in &base.points {
            let (mx, my) = moved.points[name];
            assert!((x - mx).abs() < 1e-9 && (y - my).abs() < 1e-9);
        }

        // duplicating the point set leaves the projection unchanged
        let mut doubled = BTreeMap::new();
        for (n, v) in &raw {
            doubled.insert((*n).to_string(), v.clone());
            doubled.insert(format!("{}_copy", n), v.clone());
        }
        let dup = pca2(&doubled).unwrap();
        for (name, (x, y)) in &base.points {
            let (dx, dy) = dup.points[name];
            assert!((x - dx).abs() < 1e-9 && (y - dy).abs() < 1e-9);
        }
    }

    #[test]
    fn pca_rank_one_falls_back_gracefully() {
        let mut pts = BTreeMap::new();
        for i in 0..4 {
            pts.insert(format!("p{}", i), vec![i as f64, 2.0 * i as f64]);
        }
        let proj = pca2(&pts).unwrap();
        assert_eq!(proj.explained_variance.1, 0.0);
        for (_, y) in proj.points.values() {
            assert_eq!(*y, 0.0);
        }
    }

    #[test]
    fn pca_too_few_points_is_degenerate() {
        let mut pts = BTreeMap::new();
        pts.insert("a".to_string(), vec![0.0, 1.0]);
        pts.insert("b".to_string(), vec![1.0, 0.0]);
        assert!(matches!(pca2(&pts), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn pca_reconstruction_error_matches_spectrum() {
        // residual variance after projecting on 2 axes = total - top-2
        let mut pts = BTreeMap::new();
        let raw = [
            vec![1.0, 0.2, -0.3, 0.8],
            vec![-0.5, 1.1, 0.4, -0.2],
            vec![0.3, -0.7, 1.5, 0.1],
            vec![-1.2, 0.5, -0.6, 1.0],
            vec![0.8, 0.9, 0.2, -1.1],
            vec![0.1, -0.4, -1.0, 0.6],
        ];
        for (i, v) in raw.iter().enumerate() {
            pts.insert(format!("p{}", i), v.clone());
        }
        let n = raw.len() as f64;
        let proj = pca2(&pts).unwrap();
        let mut mean = linalg::zeros(4);
        for v in &raw {
            linalg::add_assign(&mut mean, v);
        }
        for x in mean.iter_mut() {
            *x /= n;
        }
        let total: f64 = raw
            .iter()
            .map(|v| {
                let c = linalg::sub(v, &mean);
                linalg::dot(&c, &c)
            })
            .sum::<f64>()
            / n;
        let projected: f64 = proj
            .points
            .values()
            .map(|(x, y)| x * x + y * y)
            .sum::<f64>()
            / n;
        let explained = (proj.explained_variance.0 + proj.explained_variance.1) * total;
        assert!(
            (projected - explained).abs() < 1e-9 * total.max(1.0),
            "projected variance {} vs explained {}",
            projected,
            explained
        );
    }

    #[test]
    fn separation_of_coincident_pairs_is_zero_intra() {
        let v = vocab_of(&[
            ("a1", vec![0.0, 0.0]),
            ("a2", vec![0.0, 0.0]),
            ("b1", vec![10.0, 0.0]),
            ("b2", vec![10.0, 0.0]),
        ]);
        let mut groups = BTreeMap::new();
        groups.insert("a".to_string(), vec!["a1".into(), "a2".into()]);
        groups.insert("b".to_string(), vec!["b1".into(), "b2".into()]);
        let (intra, inter) = cluster_separation(&v, &groups).unwrap();
        assert_eq!(intra, 0.0);
        assert!((inter - 10.0).abs() < 1e-12);
    }

    #[test]
    fn separation_of_planted_clusters() {
        let v = vocab_of(&[
            ("a1", vec![0.0, 0.0]),
            ("a2", vec![1.0, 0.0]),
            ("b1", vec![10.0, 0.0]),
            ("b2", vec![10.0, 1.0]),
        ]);
        let mut groups = BTreeMap::new();
        groups.insert("a".to_string(), vec!["a1".into(), "a2".into()]);
        groups.insert("b".to_string(), vec!["b1".into(), "b2".into()]);
        let (intra, inter) = cluster_separation(&v, &groups).unwrap();
        assert!(inter > intra);
    }
}
