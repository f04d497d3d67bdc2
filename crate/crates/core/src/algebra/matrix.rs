use super::Scalar;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DMat<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn scalar(n: usize, v: T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn diagonal(entries: Vec<T>) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, v) in entries.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v.clone() * k.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// `self·other + other·self`
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// Frobenius norm, evaluated in `f64`.
    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|v| {
                let x = v.to_f64();
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DMat<U> {
        DMat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_of_diagonals_vanishes() {
        let a = DMat::diagonal(vec![1.0, 2.0, 3.0]);
        let b = DMat::diagonal(vec![4.0, -1.0, 0.5]);
        assert_eq!(a.commutator(&b).frobenius(), 0.0);
    }

    #[test]
    fn pauli_commutator() {
        let mut x = DMat::zeros(2);
        x.set(0, 1, 1.0);
        x.set(1, 0, 1.0);
        let z = DMat::diagonal(vec![1.0, -1.0]);
        // [x, z] = -2i y; real part: [[0,-2],[2,0]]
        let c = x.commutator(&z);
        assert_eq!(*c.get(0, 1), -2.0);
        assert_eq!(*c.get(1, 0), 2.0);
        assert_eq!(x.anticommutator(&z).frobenius(), 0.0);
    }
}
