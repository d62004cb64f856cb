use std::ops::{Deref, DerefMut};

/// Cell-wise constant function on the grid, extended by zero outside the domain.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn zeros(n: usize) -> Self {
        Field(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Field(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn abs(&self) -> Field {
        Field(self.0.iter().map(|v| v.abs()).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Plain Euclidean dot product (no cell measure).
    pub fn dot(&self, other: &Field) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// `(1 - tau) * self + tau * other`, cell-wise.
    pub fn lerp(&self, other: &Field, tau: f64) -> Field {
        Field(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - tau) * a + tau * b)
                .collect(),
        )
    }

    pub fn sup_distance(&self, other: &Field) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Field {
    fn from(values: Vec<f64>) -> Self {
        Field(values)
    }
}

impl From<&[f64]> for Field {
    fn from(values: &[f64]) -> Self {
        Field(values.to_vec())
    }
}

impl FromIterator<f64> for Field {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Field(iter.into_iter().collect())
    }
}
