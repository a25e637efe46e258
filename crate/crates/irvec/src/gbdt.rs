//! Gradient-boosted decision trees for classification over program
//! vectors, with stratified cross-validation.
//!
//! Second-order boosting on the multinomial logistic loss: each round fits
//! one depth-limited regression tree per class to the gradient/hessian
//! statistics of the softmaxed scores (a single tree per round in the
//! binary case, which reduces to plain logistic boosting). Split search is
//! exact greedy over midpoints of sorted unique feature values, so fitting
//! is fully deterministic; the config seed only drives fold shuffling.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub rows: Vec<DataRow>,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct DataRow {
    pub features: Vector,
    pub label: usize,
    pub weight: Option<f64>,
}

impl Dataset {
    pub fn new(class_names: Vec<String>) -> Self {
        Dataset { rows: Vec::new(), class_names }
    }

    pub fn push(&mut self, features: Vector, label: usize) {
        assert!(label < self.class_names.len(), "label out of range");
        self.rows.push(DataRow { features, label, weight: None });
    }

    pub fn feature_len(&self) -> usize {
        self.rows.first().map(|r| r.features.len()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.feature_len();
        for r in &self.rows {
            if r.features.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: r.features.len() });
            }
            if r.label >= self.class_names.len() {
                return Err(Error::Format(format!("label {} out of range", r.label)));
            }
        }
        Ok(())
    }

    /// Load `label,f1,...,fd` CSV with a header line. Class names are the
    /// sorted distinct labels.
    pub fn from_csv(text: &str) -> Result<Dataset> {
        let mut lines = text.lines().enumerate();
        let (_, header) =
            lines.next().ok_or_else(|| Error::Format("empty dataset file".into()))?;
        if !header.to_lowercase().starts_with("label") {
            return Err(Error::Format("expected header starting with `label`".into()));
        }
        let mut raw: Vec<(String, Vector)> = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let label = parts
                .next()
                .ok_or_else(|| Error::Format(format!("line {}: missing label", i + 1)))?
                .trim()
                .to_string();
            let features: std::result::Result<Vector, _> =
                parts.map(|p| p.trim().parse::<f64>()).collect();
            let features = features
                .map_err(|e| Error::Format(format!("line {}: bad feature: {}", i + 1, e)))?;
            raw.push((label, features));
        }
        let mut class_names: Vec<String> = raw.iter().map(|(l, _)| l.clone()).collect();
        class_names.sort();
        class_names.dedup();
        let index: BTreeMap<&str, usize> =
            class_names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut ds = Dataset::new(class_names.clone());
        for (label, features) in raw {
            ds.push(features, index[label.as_str()]);
        }
        ds.validate()?;
        Ok(ds)
    }

    /// Append auxiliary numeric columns to each row by index. The aux CSV
    /// has a header line and one row per dataset row.
    pub fn append_aux_csv(&mut self, text: &str) -> Result<()> {
        let mut lines = text.lines();
        lines.next().ok_or_else(|| Error::Format("empty aux file".into()))?;
        let mut rows: Vec<Vector> = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vector, _> =
                line.split(',').map(|p| p.trim().parse::<f64>()).collect();
            rows.push(
                vals.map_err(|e| Error::Format(format!("aux line {}: {}", i + 2, e)))?,
            );
        }
        if rows.len() != self.rows.len() {
            return Err(Error::Format(format!(
                "aux row count {} does not match dataset row count {}",
                rows.len(),
                self.rows.len()
            )));
        }
        for (row, aux) in self.rows.iter_mut().zip(rows) {
            row.features.extend(aux);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GbdtConfig {
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub max_depth: usize,
    pub n_folds: usize,
    pub rng_seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        GbdtConfig {
            learning_rate: 0.5,
            n_estimators: 70,
            max_depth: 10,
            n_folds: 10,
            rng_seed: 42,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.n_estimators < 1 {
            return Err(Error::InvalidConfig("n_estimators must be >= 1".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidConfig("max_depth must be >= 1".into()));
        }
        if self.n_folds < 2 {
            return Err(Error::InvalidConfig("n_folds must be >= 2".into()));
        }
        Ok(())
    }
}

/// Leaf-value shrinkage guard in `-G / (H + LAMBDA)`.
const LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: Box<TreeNode>, right: Box<TreeNode> },
}

impl TreeNode {
    pub fn predict(&self, features: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { value } => *value,
            TreeNode::Split { feature, threshold, left, right } => {
                if features[*feature] < *threshold {
                    left.predict(features)
                } else {
                    right.predict(features)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub n_classes: usize,
    pub feature_len: usize,
    pub learning_rate: f64,
    /// One tree per boosting round in the binary case; `n_classes` trees
    /// per round otherwise, class-major within a round.
    pub trees: Vec<Vec<TreeNode>>,
    /// Training multinomial log-loss after each round.
    pub train_loss: Vec<f64>,
}

fn softmax(scores: &[f64]) -> Vector {
    let m = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let exps: Vector = scores.iter().map(|s| (s - m).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.iter().map(|e| e / z).collect()
}

/// Fit an additive model of depth-limited regression trees by gradient
/// boosting on the multinomial logistic loss.
pub fn fit(dataset: &Dataset, config: &GbdtConfig) -> Result<GbdtModel> {
    config.validate()?;
    dataset.validate()?;
    let n = dataset.rows.len();
    if n == 0 {
        return Err(Error::InsufficientData("empty dataset".into()));
    }
    let k = dataset.class_names.len();
    let mut present = vec![false; k];
    for r in &dataset.rows {
        present[r.label] = true;
    }
    if present.iter().filter(|p| **p).count() < 2 {
        return Err(Error::DegenerateDataset);
    }

    let binary = k == 2;
    let score_width = if binary { 1 } else { k };
    let mut scores = vec![vec![0.0f64; score_width]; n];
    let mut model = GbdtModel {
        n_classes: k,
        feature_len: dataset.feature_len(),
        learning_rate: config.learning_rate,
        trees: Vec::new(),
        train_loss: Vec::new(),
    };

    for _round in 0..config.n_estimators {
        let mut round_trees = Vec::with_capacity(score_width);
        if binary {
            let mut grads = Vec::with_capacity(n);
            let mut hess = Vec::with_capacity(n);
            for (row, s) in dataset.rows.iter().zip(&scores) {
                let p = 1.0 / (1.0 + (-s[0]).exp());
                let y = row.label as f64;
                grads.push(p - y);
                hess.push((p * (1.0 - p)).max(1e-12));
            }
            let idx: Vec<usize> = (0..n).collect();
            let tree = build_tree(dataset, &idx, &grads, &hess, config.max_depth);
            for (i, s) in scores.iter_mut().enumerate() {
                s[0] += config.learning_rate * tree.predict(&dataset.rows[i].features);
            }
            round_trees.push(tree);
        } else {
            let probs: Vec<Vector> = scores.iter().map(|s| softmax(s)).collect();
            for class in 0..k {
                let mut grads = Vec::with_capacity(n);
                let mut hess = Vec::with_capacity(n);
                for (row, p) in dataset.rows.iter().zip(&probs) {
                    let y = if row.label == class { 1.0 } else { 0.0 };
                    grads.push(p[class] - y);
                    hess.push((p[class] * (1.0 - p[class])).max(1e-12));
                }
                let idx: Vec<usize> = (0..n).collect();
                let tree = build_tree(dataset, &idx, &grads, &hess, config.max_depth);
                for (i, s) in scores.iter_mut().enumerate() {
                    s[class] += config.learning_rate * tree.predict(&dataset.rows[i].features);
                }
                round_trees.push(tree);
            }
        }
        model.trees.push(round_trees);

        let mut loss = 0.0;
        for (row, s) in dataset.rows.iter().zip(&scores) {
            let p = if binary {
                let p1 = 1.0 / (1.0 + (-s[0]).exp());
                if row.label == 1 {
                    p1
                } else {
                    1.0 - p1
                }
            } else {
                softmax(s)[row.label]
            };
            loss -= p.max(1e-15).ln();
        }
        model.train_loss.push(loss / n as f64);
    }
    Ok(model)
}

/// Argmax of softmaxed additive scores; ties break toward the lower class
/// index. Returns the class and the per-class probabilities.
pub fn predict(model: &GbdtModel, features: &[f64]) -> Result<(usize, Vector)> {
    if features.len() != model.feature_len {
        return Err(Error::DimensionMismatch {
            expected: model.feature_len,
            got: features.len(),
        });
    }
    let probs = if model.n_classes == 2 {
        let mut f = 0.0;
        for round in &model.trees {
            f += model.learning_rate * round[0].predict(features);
        }
        let p1 = 1.0 / (1.0 + (-f).exp());
        vec![1.0 - p1, p1]
    } else {
        let mut scores = vec![0.0; model.n_classes];
        for round in &model.trees {
            for (class, tree) in round.iter().enumerate() {
                scores[class] += model.learning_rate * tree.predict(features);
            }
        }
        softmax(&scores)
    };
    let mut best = 0usize;
    for (i, p) in probs.iter().enumerate() {
        if *p > probs[best] {
            best = i;
        }
    }
    Ok((best, probs))
}

fn node_value(g: f64, h: f64) -> f64 {
    -g / (h + LAMBDA)
}

fn gain_score(g: f64, h: f64) -> f64 {
    g * g / (h + LAMBDA)
}

fn build_tree(
    dataset: &Dataset,
    idx: &[usize],
    grads: &[f64],
    hess: &[f64],
    depth_left: usize,
) -> TreeNode {
    let g: f64 = idx.iter().map(|&i| grads[i]).sum();
    let h: f64 = idx.iter().map(|&i| hess[i]).sum();
    // a node whose gradient targets all agree is pure: nothing to split
    let gmin = idx.iter().map(|&i| grads[i]).fold(f64::INFINITY, f64::min);
    let gmax = idx.iter().map(|&i| grads[i]).fold(f64::NEG_INFINITY, f64::max);
    if depth_left == 0 || idx.len() < 2 || gmax - gmin < 1e-12 {
        return TreeNode::Leaf { value: node_value(g, h) };
    }

    // exact greedy split search: midpoints of consecutive distinct values
    let d = dataset.feature_len();
    let parent_score = gain_score(g, h);
    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    for feature in 0..d {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| {
            dataset.rows[a].features[feature]
                .partial_cmp(&dataset.rows[b].features[feature])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut gl = 0.0;
        let mut hl = 0.0;
        for w in 0..order.len() - 1 {
            let i = order[w];
            gl += grads[i];
            hl += hess[i];
            let x = dataset.rows[i].features[feature];
            let x_next = dataset.rows[order[w + 1]].features[feature];
            if x == x_next {
                continue;
            }
            let threshold = x / 2.0 + x_next / 2.0;
            // zero-gain splits are allowed on impure nodes; the children
            // can still separate what this level cannot (xor-like data)
            let gain = gain_score(gl, hl) + gain_score(g - gl, h - hl) - parent_score;
            let better = match best {
                None => gain > -1e-12,
                Some((bg, bf, bt)) => {
                    gain > bg + 1e-12
                        || ((gain - bg).abs() <= 1e-12 && (feature, threshold) < (bf, bt))
                }
            };
            if better {
                best = Some((gain, feature, threshold));
            }
        }
    }

    match best {
        None => TreeNode::Leaf { value: node_value(g, h) },
        Some((_, feature, threshold)) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| dataset.rows[i].features[feature] < threshold);
            let left = build_tree(dataset, &left_idx, grads, hess, depth_left - 1);
            let right = build_tree(dataset, &right_idx, grads, hess, depth_left - 1);
            TreeNode::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}

/// Stratified k-fold cross-validation with seeded shuffling. Returns the
/// per-fold test accuracies and their mean.
pub fn cross_validate(dataset: &Dataset, config: &GbdtConfig) -> Result<(Vec<f64>, f64)> {
    config.validate()?;
    dataset.validate()?;
    let k = config.n_folds;
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, row) in dataset.rows.iter().enumerate() {
        by_class.entry(row.label).or_default().push(i);
    }
    let smallest = by_class.values().map(|v| v.len()).min().unwrap_or(0);
    if smallest < k {
        return Err(Error::InsufficientData(format!(
            "smallest class has {} rows, need at least n_folds = {}",
            smallest, k
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for indices in by_class.values() {
        let mut shuffled = indices.clone();
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        for (pos, &row) in shuffled.iter().enumerate() {
            folds[pos % k].push(row);
        }
    }

    let mut accuracies = Vec::with_capacity(k);
    for fold in 0..k {
        let test: &[usize] = &folds[fold];
        let mut train_ds = Dataset::new(dataset.class_names.clone());
        for (f, rows) in folds.iter().enumerate() {
            if f != fold {
                for &r in rows {
                    train_ds.rows.push(dataset.rows[r].clone());
                }
            }
        }
        let model = fit(&train_ds, config)?;
        let mut correct = 0usize;
        for &r in test {
            let (class, _) = predict(&model, &dataset.rows[r].features)?;
            if class == dataset.rows[r].label {
                correct += 1;
            }
        }
        accuracies.push(correct as f64 / test.len().max(1) as f64);
    }
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    Ok((accuracies, mean))
}
