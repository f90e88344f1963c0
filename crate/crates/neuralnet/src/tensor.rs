//! Minimal dense f64 tensor.

use crate::NnError;

/// Row-major n-dimensional array of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        Self {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(dims: &[usize], data: Vec<f64>) -> Result<Self, NnError> {
        let want: usize = dims.iter().product();
        if data.len() != want {
            return Err(NnError::Shape(format!(
                "data length {} does not fill dims {:?} ({} values)",
                data.len(),
                dims,
                want
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    /// Same shape, all zeros.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.dims)
    }
}
