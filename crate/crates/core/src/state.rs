//! Fixed-capacity vectors for points of the state space.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest system size handled (full Euler).
pub const MAX_DIM: usize = 3;

/// A point of the state space, or any vector of the same dimension
/// (fluxes, coupling defects, eigenvectors).
#[derive(Clone, Copy, PartialEq)]
pub struct State {
    values: [f64; MAX_DIM],
    dim: usize,
}

impl State {
    pub fn new(values: &[f64]) -> Self {
        assert!(
            !values.is_empty() && values.len() <= MAX_DIM,
            "state dimension {} unsupported",
            values.len()
        );
        let mut v = [0.0; MAX_DIM];
        v[..values.len()].copy_from_slice(values);
        Self { values: v, dim: values.len() }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0 && dim <= MAX_DIM);
        Self { values: [0.0; MAX_DIM], dim }
    }

    pub fn unit(dim: usize, k: usize) -> Self {
        let mut s = Self::zeros(dim);
        s[k] = 1.0;
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &State) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.as_slice().iter().zip(other.as_slice()).map(|(a, b)| a * b).sum()
    }

    pub fn dist(&self, other: &State) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    pub fn normalized(&self) -> State {
        let n = self.norm();
        *self * (1.0 / n)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.as_slice().iter()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for State {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for State {
    type Output = State;
    fn add(mut self, rhs: State) -> State {
        self += rhs;
        self
    }
}

impl AddAssign for State {
    fn add_assign(&mut self, rhs: State) {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..self.dim {
            self.values[k] += rhs.values[k];
        }
    }
}

impl Sub for State {
    type Output = State;
    fn sub(mut self, rhs: State) -> State {
        self -= rhs;
        self
    }
}

impl SubAssign for State {
    fn sub_assign(&mut self, rhs: State) {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..self.dim {
            self.values[k] -= rhs.values[k];
        }
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(mut self, rhs: f64) -> State {
        for k in 0..self.dim {
            self.values[k] *= rhs;
        }
        self
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        self * -1.0
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(serde::de::Error::custom(format!(
                "state must have 1..={MAX_DIM} components, got {}",
                v.len()
            )));
        }
        Ok(State::new(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_respects_dimension() {
        let a = State::new(&[1.0, 2.0]);
        let b = State::new(&[0.5, -1.0]);
        assert_eq!((a + b).as_slice(), &[1.5, 1.0]);
        assert_eq!((a - b).as_slice(), &[0.5, 3.0]);
        assert_eq!((a * 2.0).as_slice(), &[2.0, 4.0]);
        assert!((a.norm() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip_as_sequence() {
        let a = State::new(&[1.0, 0.25, 3.0]);
        let text = toml::to_string(&std::collections::BTreeMap::from([("u", a)])).unwrap();
        let back: std::collections::BTreeMap<String, State> = toml::from_str(&text).unwrap();
        assert_eq!(back["u"], a);
    }
}
