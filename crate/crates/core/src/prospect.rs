//! Prospects and the small amount of algebra the solvers need.

use itertools::Itertools;

use crate::error::{Error, Result};

/// A T×N matrix of payoffs: row t is scenario t, column n is attribute n.
/// Stored row-major, so the flat slice is the scenario-major vectorization.
/// Serializes as a list of scenario rows.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(into = "Vec<Vec<f64>>")]
pub struct Prospect {
    t: usize,
    n: usize,
    data: Vec<f64>,
}

impl Prospect {
    pub fn new(t: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if t == 0 || n == 0 {
            return Err(Error::Dimension(format!(
                "prospect needs at least one scenario and one attribute, got {t}x{n}"
            )));
        }
        if data.len() != t * n {
            return Err(Error::Dimension(format!(
                "{t}x{n} prospect needs {} entries, got {}",
                t * n,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "prospect entry ({}, {}) is not finite",
                i / n,
                i % n
            )));
        }
        Ok(Prospect { t, n, data })
    }

    /// Builds a prospect from scenario rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let t = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {i} has {} columns, expected {n}",
                r.len()
            )));
        }
        Prospect::new(t, n, rows.concat())
    }

    /// Single-scenario, single-attribute prospect.
    pub fn scalar(x: f64) -> Self {
        Prospect::new(1, 1, vec![x]).expect("finite scalar")
    }

    /// Single-attribute prospect with the given scenario payoffs.
    pub fn column(xs: &[f64]) -> Result<Self> {
        Prospect::new(xs.len(), 1, xs.to_vec())
    }

    pub fn constant(t: usize, n: usize, c: f64) -> Result<Self> {
        Prospect::new(t, n, vec![c; t * n])
    }

    pub fn scenarios(&self) -> usize {
        self.t
    }

    pub fn attributes(&self) -> usize {
        self.n
    }

    /// Total number of entries, T·N.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, t: usize, n: usize) -> f64 {
        self.data[t * self.n + n]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.n..(t + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn same_shape(&self, other: &Prospect) -> bool {
        self.t == other.t && self.n == other.n
    }

    pub(crate) fn check_shape(&self, other: &Prospect, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.t, self.n, other.t, other.n
            )))
        }
    }

    /// True when every entry of `self` is at least the matching entry of `other`.
    pub fn dominates(&self, other: &Prospect) -> bool {
        self.same_shape(other) && self.data.iter().zip(&other.data).all(|(a, b)| a >= b)
    }

    pub fn dot(&self, s: &[f64]) -> f64 {
        self.data.iter().zip(s).map(|(a, b)| a * b).sum()
    }

    /// `self + c·1`.
    pub fn shifted(&self, c: f64) -> Prospect {
        Prospect {
            t: self.t,
            n: self.n,
            data: self.data.iter().map(|x| x + c).collect(),
        }
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Prospect, lambda: f64) -> Result<Prospect> {
        self.check_shape(other, "mixing prospects")?;
        Ok(Prospect {
            t: self.t,
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        })
    }
}

impl From<Prospect> for Vec<Vec<f64>> {
    fn from(p: Prospect) -> Self {
        p.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Sup-norm distance between two prospects of equal shape.
pub fn inf_norm_distance(x: &Prospect, y: &Prospect) -> Result<f64> {
    x.check_shape(y, "distance between prospects")?;
    Ok(x
        .data
        .iter()
        .zip(&y.data)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// A bijection on scenario indices `0..T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &i in &mapping {
            if i >= mapping.len() || seen[i] {
                return Err(Error::InvalidValue(format!(
                    "{mapping:?} is not a permutation of 0..{}",
                    mapping.len()
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation(mapping))
    }

    pub fn identity(t: usize) -> Self {
        Permutation((0..t).collect())
    }

    /// All T! permutations in lexicographic order.
    pub fn all(t: usize) -> impl Iterator<Item = Permutation> {
        (0..t).permutations(t).map(Permutation)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Source row for output row `t`.
    pub fn apply(&self, t: usize) -> usize {
        self.0[t]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Reorders scenarios: row t of the result is row σ(t) of `x`. All
/// attribute columns move together.
pub fn permute(x: &Prospect, sigma: &Permutation) -> Result<Prospect> {
    if sigma.len() != x.t {
        return Err(Error::Dimension(format!(
            "permutation acts on {} scenarios but the prospect has {}",
            sigma.len(),
            x.t
        )));
    }
    let mut data = Vec::with_capacity(x.data.len());
    for t in 0..x.t {
        data.extend_from_slice(x.row(sigma.apply(t)));
    }
    Ok(Prospect {
        t: x.t,
        n: x.n,
        data,
    })
}

/// Translate `θ` by `−(v/C)·1`.
pub fn tilde(theta: &Prospect, v: f64, c: f64) -> Result<Prospect> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::Lipschitz(c));
    }
    Ok(theta.shifted(-v / c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let x = Prospect::scalar(5.0);
        assert_eq!(inf_norm_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(inf_norm_distance(&x, &Prospect::scalar(3.0)).unwrap(), 2.0);
        let a = Prospect::column(&[5.0, 5.0]).unwrap();
        let b = Prospect::column(&[1.0, 3.0]).unwrap();
        assert_eq!(inf_norm_distance(&a, &b).unwrap(), 4.0);
        assert!(inf_norm_distance(&a, &x).is_err());
    }

    #[test]
    fn permute_examples() {
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let x = Prospect::column(&[3.0, 4.0]).unwrap();
        assert_eq!(permute(&x, &Permutation::identity(2)).unwrap(), x);
        assert_eq!(permute(&x, &swap).unwrap().as_slice(), &[4.0, 3.0]);
        let y = Prospect::from_rows(&[vec![3.0, 7.0], vec![4.0, 8.0]]).unwrap();
        assert_eq!(permute(&y, &swap).unwrap().as_slice(), &[4.0, 8.0, 3.0, 7.0]);
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(permute(&x, &Permutation::identity(3)).is_err());
        assert_eq!(Permutation::all(4).count(), 24);
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde(&Prospect::scalar(5.0), 0.0, 1.0).unwrap().get(0, 0), 5.0);
        assert_eq!(tilde(&Prospect::scalar(3.0), -2.0, 1.0).unwrap().get(0, 0), 5.0);
        assert_eq!(tilde(&Prospect::scalar(1.0), -4.0, 2.0).unwrap().get(0, 0), 3.0);
        assert!(tilde(&Prospect::scalar(1.0), -4.0, 0.0).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(Prospect::new(2, 1, vec![1.0]).is_err());
        assert!(Prospect::new(1, 1, vec![f64::NAN]).is_err());
        assert!(Prospect::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(Prospect::from_rows(&[]).is_err());
    }
}
