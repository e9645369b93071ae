//! Ridge-regression design state over a growing feature subset.
//!
//! Actions live in the ambient dimension `d` as [`SparseVector`]s. The
//! regression itself only ever sees the coordinates listed in a
//! [`FeatureSet`], so every matrix here is dense at the restricted size
//! `m = |features|` and the cost of an update is independent of `d`.
//!
//! [`DesignState`] keeps the Gram matrix `V = λI + Σ x xᵀ`, its inverse, its
//! log-determinant, the moment vector `b = Σ y x` and the ridge estimate
//! `θ̂ = V⁻¹ b` in sync. Two routes produce it:
//!
//! * [`DesignState::rank_one_update`] applies Sherman–Morrison to the stored
//!   inverse and the matrix determinant lemma to the log-determinant;
//! * [`DesignState::recompute`] rebuilds everything from a [`History`] with a
//!   Cholesky factorization.
//!
//! The incremental route refreshes itself from a factorization every
//! [`REFRESH_INTERVAL`] updates so round-off cannot accumulate without bound.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of incremental updates between refactorizations of the Gram matrix.
pub const REFRESH_INTERVAL: usize = 512;

/// A vector in `R^dim` stored as strictly increasing `(index, value)` pairs
/// with no explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Zero values are dropped. Out-of-range or repeated indices and
    /// non-finite values are rejected.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if i >= dim {
                return Err(Error::invalid(format!("index {i} out of range for dimension {dim}")));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite value at index {i}")));
            }
            if indices.last() == Some(&i) {
                return Err(Error::invalid(format!("duplicate index {i}")));
            }
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        Ok(Self { dim, indices, values })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), values.iter().copied().enumerate())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored nonzeros.
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Inner product of two sparse vectors by merging their index lists.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Multiplies every entry by `factor`; a zero factor empties the vector.
    pub fn scale(&mut self, factor: f64) {
        if factor == 0.0 {
            self.indices.clear();
            self.values.clear();
        } else {
            self.values.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    /// The set of indices carrying a nonzero value.
    pub fn support(&self) -> FeatureSet {
        FeatureSet {
            indices: self.indices.clone(),
        }
    }
}

/// An ordered set of global feature indices.
///
/// There is deliberately no removal operation: within a run the discovered
/// feature set only ever grows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSet {
    indices: Vec<usize>,
}

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// All features `0..dim`.
    pub fn full(dim: usize) -> Self {
        Self {
            indices: (0..dim).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Local (restricted) coordinate of a global feature index.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    /// Returns `true` if the index was not already present.
    pub fn insert(&mut self, index: usize) -> bool {
        match self.indices.binary_search(&index) {
            Ok(_) => false,
            Err(pos) => {
                self.indices.insert(pos, index);
                true
            }
        }
    }

    /// Adds every index of `other`; returns `true` if the set grew.
    pub fn extend_from(&mut self, other: &FeatureSet) -> bool {
        let before = self.len();
        for i in other.iter() {
            self.insert(i);
        }
        self.len() > before
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &FeatureSet) -> bool {
        self.iter().all(|i| !other.contains(i))
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut indices: Vec<usize> = iter.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }
}

/// Append-only record of every `(action, reward)` pair played in a run.
#[derive(Debug, Clone, Default)]
pub struct History {
    entries: Vec<(SparseVector, f64)>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, action: SparseVector, reward: f64) {
        self.entries.push((action, reward));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&(SparseVector, f64)> {
        self.entries.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(SparseVector, f64)> + '_ {
        self.entries.iter()
    }

    pub fn append(&mut self, other: History) {
        self.entries.extend(other.entries);
    }
}

/// Ridge-regression state restricted to a feature subset.
#[derive(Debug, Clone)]
pub struct DesignState {
    features: FeatureSet,
    ridge: f64,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    logdet: f64,
    moment: DVector<f64>,
    estimate: DVector<f64>,
    since_refresh: usize,
}

impl DesignState {
    /// The empty-data state: `V = λI`, `θ̂ = 0`.
    pub fn new(features: FeatureSet, ridge: f64) -> Result<Self> {
        check_ridge(ridge)?;
        let m = features.len();
        Ok(Self {
            gram: DMatrix::from_diagonal_element(m, m, ridge),
            gram_inv: DMatrix::from_diagonal_element(m, m, 1.0 / ridge),
            logdet: m as f64 * ridge.ln(),
            moment: DVector::zeros(m),
            estimate: DVector::zeros(m),
            features,
            ridge,
            since_refresh: 0,
        })
    }

    /// Rebuilds the state from scratch over every entry of `history`,
    /// restricted to `features`.
    pub fn recompute(history: &History, features: FeatureSet, ridge: f64) -> Result<Self> {
        let mut state = Self::new(features, ridge)?;
        let mut buf = Vec::new();
        for (x, y) in history.iter() {
            state.restrict_into(x, &mut buf);
            for &(a, va) in &buf {
                for &(b, vb) in &buf {
                    state.gram[(a, b)] += va * vb;
                }
                state.moment[a] += y * va;
            }
        }
        state.refactor();
        Ok(state)
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    /// Restricted dimension `m`.
    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// Natural log of `det(V)`.
    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }

    pub fn estimate(&self) -> &DVector<f64> {
        &self.estimate
    }

    /// Writes the restriction of `x` to the feature set into `buf` as
    /// `(local index, value)` pairs.
    pub fn restrict_into(&self, x: &SparseVector, buf: &mut Vec<(usize, f64)>) {
        buf.clear();
        if self.features.is_empty() {
            return;
        }
        buf.extend(
            x.iter()
                .filter_map(|(i, v)| self.features.position(i).map(|p| (p, v))),
        );
    }

    /// Restriction of `x` as a dense `m`-vector.
    pub fn restrict(&self, x: &SparseVector) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for (i, v) in x.iter() {
            if let Some(p) = self.features.position(i) {
                out[p] = v;
            }
        }
        out
    }

    /// Folds one observation into the state.
    pub fn rank_one_update(&mut self, x: &SparseVector, y: f64) {
        let mut buf = Vec::new();
        self.restrict_into(x, &mut buf);
        if buf.is_empty() {
            return;
        }
        let m = self.dim();

        // u = V⁻¹ x_r, q = x_rᵀ V⁻¹ x_r
        let mut u = DVector::zeros(m);
        for &(a, va) in &buf {
            u.axpy(va, &self.gram_inv.column(a), 1.0);
        }
        let q: f64 = buf.iter().map(|&(a, va)| va * u[a]).sum();

        self.gram_inv.ger(-1.0 / (1.0 + q), &u, &u, 1.0);
        for &(a, va) in &buf {
            for &(b, vb) in &buf {
                self.gram[(a, b)] += va * vb;
            }
            self.moment[a] += y * va;
        }
        self.logdet += q.ln_1p();

        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_INTERVAL {
            self.refactor();
        } else {
            self.estimate = &self.gram_inv * &self.moment;
        }
    }

    /// `sqrt(x_rᵀ V⁻¹ x_r)`.
    pub fn inv_norm(&self, x: &SparseVector) -> f64 {
        let mut buf = Vec::new();
        self.restrict_into(x, &mut buf);
        self.inv_norm_restricted(&buf)
    }

    pub(crate) fn inv_norm_restricted(&self, r: &[(usize, f64)]) -> f64 {
        let mut acc = 0.0;
        for &(a, va) in r {
            let col = self.gram_inv.column(a);
            let mut inner = 0.0;
            for &(b, vb) in r {
                inner += col[b] * vb;
            }
            acc += va * inner;
        }
        acc.max(0.0).sqrt()
    }

    /// `⟨θ̂, x_r⟩`.
    pub fn predict(&self, x: &SparseVector) -> f64 {
        let mut buf = Vec::new();
        self.restrict_into(x, &mut buf);
        self.predict_restricted(&buf)
    }

    pub(crate) fn predict_restricted(&self, r: &[(usize, f64)]) -> f64 {
        r.iter().map(|&(a, va)| self.estimate[a] * va).sum()
    }

    /// `‖θ̂ − θ‖_V` for a restricted parameter vector `θ`.
    pub fn estimate_distance(&self, theta: &DVector<f64>) -> f64 {
        let diff = &self.estimate - theta;
        (diff.dot(&(&self.gram * &diff))).max(0.0).sqrt()
    }

    fn refactor(&mut self) {
        self.since_refresh = 0;
        let m = self.dim();
        if m == 0 {
            self.logdet = 0.0;
            return;
        }
        // V = λI + XᵀX with λ > 0 is positive definite, so this cannot fail
        // short of catastrophic overflow.
        let chol = Cholesky::new(self.gram.clone())
            .expect("ridge Gram matrix must be positive definite");
        self.logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        self.gram_inv = chol.inverse();
        self.estimate = chol.solve(&self.moment);
    }
}

fn check_ridge(ridge: f64) -> Result<()> {
    if ridge > 0.0 && ridge.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("ridge must be positive, got {ridge}")))
    }
}

/// `sqrt(xᵀ M⁻¹ x)` for a symmetric positive definite `M`; `None` if `M` is
/// not positive definite.
pub fn inv_quadratic_norm(matrix: &DMatrix<f64>, x: &DVector<f64>) -> Option<f64> {
    let chol = Cholesky::new(matrix.clone())?;
    let z = chol.solve(x);
    Some(x.dot(&z).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(dim: usize, entries: &[(usize, f64)]) -> SparseVector {
        SparseVector::new(dim, entries.iter().copied()).unwrap()
    }

    #[test]
    fn sparse_vector_drops_zeros_and_sorts() {
        let v = sv(5, &[(3, 2.0), (0, 0.0), (1, -1.0)]);
        assert_eq!(v.indices(), &[1, 3]);
        assert_eq!(v.values(), &[-1.0, 2.0]);
        assert_eq!(v.get(3), 2.0);
        assert_eq!(v.get(0), 0.0);
    }

    #[test]
    fn sparse_vector_rejects_bad_input() {
        assert!(SparseVector::new(3, [(3, 1.0)]).is_err());
        assert!(SparseVector::new(3, [(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::new(3, [(1, f64::NAN)]).is_err());
    }

    #[test]
    fn sparse_dot_matches_dense() {
        let a = sv(6, &[(0, 1.0), (2, 2.0), (5, -1.0)]);
        let b = sv(6, &[(2, 3.0), (4, 1.0), (5, 2.0)]);
        let dense: f64 = a.to_dense().iter().zip(b.to_dense()).map(|(x, y)| x * y).sum();
        assert_eq!(a.dot(&b), dense);
        assert_eq!(a.dot(&b), 4.0);
    }

    #[test]
    fn feature_set_grows_only() {
        let mut f: FeatureSet = [5, 1, 3, 1].into_iter().collect();
        assert_eq!(f.as_slice(), &[1, 3, 5]);
        assert!(!f.insert(3));
        assert!(f.insert(0));
        assert_eq!(f.position(3), Some(2));
        let g: FeatureSet = [3, 5].into_iter().collect();
        assert!(g.is_subset(&f));
        assert!(!f.extend_from(&g));
    }

    #[test]
    fn fresh_state_identity() {
        let s = DesignState::new([0, 1].into_iter().collect(), 1.0).unwrap();
        assert_eq!(s.gram(), &DMatrix::identity(2, 2));
        assert_eq!(s.logdet(), 0.0);
        assert_eq!(s.estimate().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn fresh_state_scalar() {
        let s = DesignState::new([3].into_iter().collect(), 4.0).unwrap();
        assert_eq!(s.gram()[(0, 0)], 4.0);
        assert_eq!(s.gram_inv()[(0, 0)], 0.25);
        assert!((s.logdet() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn fresh_state_empty_features() {
        let s = DesignState::new(FeatureSet::new(), 1.0).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.logdet(), 0.0);
    }

    #[test]
    fn non_positive_ridge_is_rejected() {
        assert!(DesignState::new(FeatureSet::full(2), 0.0).is_err());
        assert!(DesignState::new(FeatureSet::full(2), -1.0).is_err());
        assert!(DesignState::recompute(&History::new(), FeatureSet::full(2), 0.0).is_err());
    }

    #[test]
    fn single_update_matches_direct_solve() {
        // (I + e0 e0ᵀ) θ = 2 e0  =>  θ = (1, 0)
        let mut s = DesignState::new(FeatureSet::full(2), 1.0).unwrap();
        s.rank_one_update(&sv(2, &[(0, 1.0)]), 2.0);
        assert_eq!(s.gram()[(0, 0)], 2.0);
        assert_eq!(s.gram()[(1, 1)], 1.0);
        assert!((s.estimate()[0] - 1.0).abs() < 1e-15);
        assert_eq!(s.estimate()[1], 0.0);
        assert!((s.logdet() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_restriction_is_a_no_op() {
        let mut s = DesignState::new([0, 1].into_iter().collect(), 1.0).unwrap();
        s.rank_one_update(&sv(4, &[(0, 1.0)]), 1.0);
        let before = s.clone();
        s.rank_one_update(&sv(4, &[(2, 1.0), (3, 5.0)]), 7.0);
        assert_eq!(s.gram(), before.gram());
        assert_eq!(s.estimate(), before.estimate());
        assert_eq!(s.logdet(), before.logdet());
    }

    #[test]
    fn inv_norm_cases() {
        let mut s = DesignState::new(FeatureSet::full(2), 1.0).unwrap();
        s.rank_one_update(&sv(2, &[(0, 1.0)]), 0.0);
        // gram = diag(2, 1)
        let x = sv(2, &[(0, 1.0), (1, 1.0)]);
        assert!((s.inv_norm(&x) - 1.5f64.sqrt()).abs() < 1e-15);

        let iso = DesignState::new(FeatureSet::full(3), 4.0).unwrap();
        let unit = sv(3, &[(0, 0.6), (2, 0.8)]);
        assert!((iso.inv_norm(&unit) - 0.5).abs() < 1e-15);

        let sub = DesignState::new([1].into_iter().collect(), 1.0).unwrap();
        assert_eq!(sub.inv_norm(&sv(3, &[(0, 1.0)])), 0.0);
    }

    #[test]
    fn recompute_of_empty_history_is_fresh_state() {
        let f: FeatureSet = [2, 7].into_iter().collect();
        let a = DesignState::recompute(&History::new(), f.clone(), 3.0).unwrap();
        let b = DesignState::new(f, 3.0).unwrap();
        assert_eq!(a.gram(), b.gram());
        assert!((a.gram_inv() - b.gram_inv()).amax() < 1e-15);
        assert!((a.logdet() - b.logdet()).abs() < 1e-12);
    }

    #[test]
    fn recompute_uses_observations_from_before_feature_growth() {
        let mut h = History::new();
        h.push(sv(3, &[(0, 1.0), (2, 1.0)]), 1.0);
        h.push(sv(3, &[(2, 2.0)]), 3.0);
        let small = DesignState::recompute(&h, [0].into_iter().collect(), 1.0).unwrap();
        let big = DesignState::recompute(&h, [0, 2].into_iter().collect(), 1.0).unwrap();
        assert_eq!(small.gram()[(0, 0)], 2.0);
        // feature 2 sees both rows even though it was "discovered" later
        assert_eq!(big.gram()[(1, 1)], 1.0 + 1.0 + 4.0);
        assert_eq!(big.moment()[1], 1.0 + 6.0);
    }

    #[test]
    fn inv_quadratic_norm_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(inv_quadratic_norm(&m, &DVector::from_element(2, 1.0)).is_none());
    }
}
