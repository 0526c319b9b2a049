//! Per-class affine PCA classifier and the random-split evaluation protocol.
//!
//! Each class is modelled by its mean and the top `d` left singular vectors
//! of its centred training columns. A query goes to the class whose affine
//! subspace leaves the smallest residual; ties go to the lower class index.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature vectors stored as columns, with a class label per column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: DMatrix<f64>,
    labels: Vec<usize>,
    classes: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(columns: Vec<Vec<f64>>, labels: Vec<usize>, classes: Vec<String>) -> Result<Self> {
        if columns.len() != labels.len() {
            return Err(Error::Parameter(format!(
                "{} columns but {} labels",
                columns.len(),
                labels.len()
            )));
        }
        let dims = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != dims) {
            return Err(Error::Parameter("feature columns differ in length".into()));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite feature value".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::Parameter(format!(
                "label {bad} outside {} classes",
                classes.len()
            )));
        }
        let data = DMatrix::from_fn(dims, columns.len(), |r, c| columns[c][r]);
        Ok(Self {
            data,
            labels,
            classes,
        })
    }

    pub fn dims(&self) -> usize {
        self.data.nrows()
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.data.column(i).iter().copied().collect()
    }

    /// Columns at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            data: self.data.select_columns(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
        }
    }

    /// `[self, other]`, e.g. training then testing columns.
    pub fn hcat(&self, other: &FeatureMatrix) -> Result<Self> {
        if self.classes != other.classes || (self.dims() != other.dims() && !other.is_empty()) {
            return Err(Error::Parameter("cannot concatenate incompatible feature matrices".into()));
        }
        let mut data = DMatrix::zeros(self.dims(), self.len() + other.len());
        data.columns_mut(0, self.len()).copy_from(&self.data);
        data.columns_mut(self.len(), other.len()).copy_from(&other.data);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(Self {
            data,
            labels,
            classes: self.classes.clone(),
        })
    }

    fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.classes.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }
}

/// Mean and orthonormal principal directions of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub mean: DVector<f64>,
    /// `dims x r`, orthonormal columns in decreasing variance order.
    pub basis: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    dims: usize,
    requested: usize,
    classes: Vec<ClassModel>,
}

impl ClassifierModel {
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// The requested number of principal directions per class.
    pub fn dimension(&self) -> usize {
        self.requested
    }

    pub fn class_models(&self) -> &[ClassModel] {
        &self.classes
    }

    /// Directions each class could not supply (rank-deficient training data).
    pub fn deficits(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| self.requested - c.basis.ncols())
            .collect()
    }

    /// Residual norm of `x` against every class subspace.
    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dims {
            return Err(Error::Parameter(format!(
                "query has {} features, model expects {}",
                x.len(),
                self.dims
            )));
        }
        let x = DVector::from_column_slice(x);
        Ok(self
            .classes
            .iter()
            .map(|c| {
                let centred = &x - &c.mean;
                let proj = c.basis.tr_mul(&centred);
                residual_sq(centred.norm_squared(), proj.iter()).sqrt()
            })
            .collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmin(&self.residuals(x)?))
    }
}

/// `|c|^2 - |V^T c|^2`, clamped at zero.
fn residual_sq<'a>(norm_sq: f64, proj: impl Iterator<Item = &'a f64>) -> f64 {
    (norm_sq - proj.map(|p| p * p).sum::<f64>()).max(0.0)
}

/// First index of the minimum.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn class_model(columns: &DMatrix<f64>, max_dirs: usize) -> ClassModel {
    let n = columns.ncols();
    let mean = columns.column_mean();
    if n < 2 || max_dirs == 0 {
        return ClassModel {
            mean,
            basis: DMatrix::zeros(columns.nrows(), 0),
        };
    }
    let mut centred = columns.clone();
    for mut col in centred.column_iter_mut() {
        col -= &mean;
    }
    let svd = centred.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.max();
    let tol = top * f64::EPSILON * columns.nrows().max(n) as f64;
    let rank = svd
        .singular_values
        .iter()
        .take_while(|&&s| s > tol && s > 0.0)
        .count();
    let keep = rank.min(max_dirs);
    let basis = if keep == 0 {
        DMatrix::zeros(columns.nrows(), 0)
    } else {
        // Re-orthonormalize; columns with equal singular values may come back in any order.
        let q = u.columns(0, keep).into_owned().qr().q();
        q.columns(0, keep).into_owned()
    };
    ClassModel { mean, basis }
}

/// Fits the per-class affine PCA model with `d` directions per class.
pub fn fit(train: &FeatureMatrix, d: usize) -> Result<ClassifierModel> {
    let members = train.class_members();
    if let Some(c) = members.iter().position(Vec::is_empty) {
        return Err(Error::Parameter(format!(
            "class '{}' has no training columns",
            train.classes[c]
        )));
    }
    let classes = members
        .iter()
        .map(|idx| class_model(&train.data.select_columns(idx), d))
        .collect();
    Ok(ClassifierModel {
        dims: train.dims(),
        requested: d,
        classes,
    })
}

/// Random-split protocol: `train_per_class` columns of every class train the
/// model, the rest test it, repeated `n_splits` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_per_class: usize,
    pub n_splits: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self, features: &FeatureMatrix) -> Result<()> {
        if self.train_per_class == 0 || self.n_splits == 0 {
            return Err(Error::Split(format!(
                "train_per_class and n_splits must be positive, got {self:?}"
            )));
        }
        for (c, m) in features.class_members().iter().enumerate() {
            if self.train_per_class >= m.len() {
                return Err(Error::Split(format!(
                    "class '{}' has {} samples, cannot train on {} and still test",
                    features.classes[c],
                    m.len(),
                    self.train_per_class
                )));
            }
        }
        Ok(())
    }
}

/// Train/test column indices for split `s` (1-based). Depends only on the
/// labels and the spec, never on feature values.
pub fn split_indices(labels: &[usize], n_classes: usize, spec: &SplitSpec, s: usize) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(s as u64);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut members = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    for mut m in members {
        m.shuffle(&mut rng);
        let cut = spec.train_per_class.min(m.len());
        train.extend_from_slice(&m[..cut]);
        test.extend_from_slice(&m[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAccuracy {
    pub dim: usize,
    /// Percent correct, averaged over splits.
    pub mean: f64,
    pub per_split: Vec<f64>,
}

/// Accuracy (percent) for one principal dimension; see [`evaluate_splits_multi`].
pub fn evaluate_splits(features: &FeatureMatrix, spec: &SplitSpec, d: usize) -> Result<SplitAccuracy> {
    Ok(evaluate_splits_multi(features, spec, &[d])?.remove(0))
}

/// Runs the split protocol for several dimensions at once. Every dimension
/// sees the same splits; each split fits one SVD per class and truncates it.
pub fn evaluate_splits_multi(
    features: &FeatureMatrix,
    spec: &SplitSpec,
    dims: &[usize],
) -> Result<Vec<SplitAccuracy>> {
    spec.validate(features)?;
    if dims.is_empty() {
        return Err(Error::Parameter("no dimensions to evaluate".into()));
    }
    let max_d = *dims.iter().max().unwrap();
    let n_classes = features.classes.len();

    let per_split: Vec<Vec<f64>> = (1..=spec.n_splits)
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            let (train_idx, test_idx) = split_indices(&features.labels, n_classes, spec, s);
            let model = fit(&features.select(&train_idx), max_d)?;
            let test = features.data.select_columns(&test_idx);

            // norms[c][i] = |x_i - mu_c|^2 and proj[c] = V_c^T (X - mu_c)
            let mut norms = Vec::with_capacity(n_classes);
            let mut projs = Vec::with_capacity(n_classes);
            for c in &model.classes {
                let mut centred = test.clone();
                for mut col in centred.column_iter_mut() {
                    col -= &c.mean;
                }
                norms.push(centred.column_iter().map(|col| col.norm_squared()).collect::<Vec<_>>());
                projs.push(c.basis.tr_mul(&centred));
            }

            Ok(dims
                .iter()
                .map(|&d| {
                    let correct = test_idx
                        .iter()
                        .enumerate()
                        .filter(|&(i, &col)| {
                            let res: Vec<f64> = (0..n_classes)
                                .map(|c| {
                                    let p = &projs[c];
                                    let take = d.min(p.nrows());
                                    residual_sq(norms[c][i], p.column(i).iter().take(take))
                                })
                                .collect();
                            argmin(&res) == features.labels[col]
                        })
                        .count();
                    100.0 * correct as f64 / test_idx.len() as f64
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(dims
        .iter()
        .enumerate()
        .map(|(di, &dim)| {
            let values: Vec<f64> = per_split.iter().map(|s| s[di]).collect();
            SplitAccuracy {
                dim,
                mean: values.iter().sum::<f64>() / values.len() as f64,
                per_split: values,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn zero_dimension_is_nearest_mean() {
        let fm = FeatureMatrix::new(
            vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![10.0, 0.0], vec![12.0, 0.0]],
            vec![0, 0, 1, 1],
            names(2),
        )
        .unwrap();
        let m = fit(&fm, 0).unwrap();
        assert_eq!(m.class_models()[0].mean.as_slice(), &[1.0, 0.0]);
        assert_eq!(m.predict(&[4.0, 3.0]).unwrap(), 0);
        assert_eq!(m.predict(&[7.0, -3.0]).unwrap(), 1);
        assert_eq!(m.predict(&[11.0, 0.0]).unwrap(), 1);
        // Equidistant: ties go to the first class.
        assert_eq!(m.predict(&[6.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn constant_class_has_no_directions() {
        let v = vec![1.0, 2.0, 3.0];
        let fm = FeatureMatrix::new(vec![v.clone(); 4], vec![0; 4], names(1)).unwrap();
        let m = fit(&fm, 3).unwrap();
        assert_eq!(m.class_models()[0].mean.as_slice(), v.as_slice());
        assert_eq!(m.class_models()[0].basis.ncols(), 0);
        assert_eq!(m.deficits(), vec![3]);
    }

    #[test]
    fn basis_is_orthonormal_and_limited_by_class_size() {
        let cols: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..8).map(|r| ((i * 7 + r * 3) % 11) as f64 + 0.1 * r as f64).collect())
            .collect();
        let fm = FeatureMatrix::new(cols, vec![0; 5], names(1)).unwrap();
        let m = fit(&fm, 6).unwrap();
        let b = &m.class_models()[0].basis;
        assert_eq!(b.ncols(), 4);
        let gram = b.tr_mul(b);
        assert!((gram - DMatrix::identity(4, 4)).amax() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_and_empty_class() {
        let fm = FeatureMatrix::new(vec![vec![1.0], vec![2.0]], vec![0, 0], names(2)).unwrap();
        assert!(matches!(fit(&fm, 1), Err(Error::Parameter(_))));
        let fm = FeatureMatrix::new(vec![vec![1.0], vec![2.0]], vec![0, 1], names(2)).unwrap();
        let m = fit(&fm, 1).unwrap();
        assert!(matches!(m.predict(&[1.0, 2.0]), Err(Error::Parameter(_))));
    }

    #[test]
    fn split_errors_name_the_class() {
        let fm = FeatureMatrix::new(vec![vec![0.0]; 5], vec![0, 0, 0, 1, 1], names(2)).unwrap();
        let spec = SplitSpec {
            train_per_class: 2,
            n_splits: 3,
            seed: 1,
        };
        let err = evaluate_splits(&fm, &spec, 0).unwrap_err();
        assert!(matches!(&err, Error::Split(m) if m.contains("'c1'")), "{err}");
    }

    #[test]
    fn splits_partition_each_class() {
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let spec = SplitSpec {
            train_per_class: 4,
            n_splits: 2,
            seed: 9,
        };
        let (train, test) = split_indices(&labels, 3, &spec, 1);
        assert_eq!(train.len(), 12);
        assert_eq!(test.len(), 18);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort();
        assert_eq!(all, (0..30).collect::<Vec<_>>());
        for c in 0..3 {
            assert_eq!(train.iter().filter(|&&i| labels[i] == c).count(), 4);
        }
        assert_ne!(split_indices(&labels, 3, &spec, 2).0, train);
        assert_eq!(split_indices(&labels, 3, &spec, 1).0, train);
    }

    #[test]
    fn identical_features_fall_to_first_class() {
        let labels: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let fm = FeatureMatrix::new(vec![vec![1.0, 1.0]; 40], labels, names(4)).unwrap();
        let spec = SplitSpec {
            train_per_class: 5,
            n_splits: 3,
            seed: 4,
        };
        let acc = evaluate_splits(&fm, &spec, 1).unwrap();
        assert!(acc.per_split.iter().all(|&a| (a - 25.0).abs() < 1e-12));
    }

    #[test]
    fn hcat_appends_columns() {
        let a = FeatureMatrix::new(vec![vec![1.0, 2.0]], vec![0], names(2)).unwrap();
        let b = FeatureMatrix::new(vec![vec![3.0, 4.0], vec![5.0, 6.0]], vec![1, 0], names(2)).unwrap();
        let q = a.hcat(&b).unwrap();
        assert_eq!((q.dims(), q.len()), (2, 3));
        assert_eq!(q.column(2), vec![5.0, 6.0]);
        assert_eq!(q.labels(), &[0, 1, 0]);
    }
}
