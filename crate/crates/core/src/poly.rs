//! Sparse multivariate polynomials over a generic coefficient ring.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// Coefficient ring used by the symbolic tensor code: `Complex64` for
/// numerics, `BigRational` for exact checks.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive {}

impl<T> Scalar for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> + FromPrimitive {}

pub(crate) fn small<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("small integer fits every scalar type")
}

/// Polynomial in `nvars` variables, keyed by exponent vectors. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `c * z_{i_1} * ... * z_{i_k}`
    pub fn monomial(nvars: usize, vars: &[usize], c: T) -> Self {
        let mut e = vec![0u32; nvars];
        for &v in vars {
            e[v] += 1;
        }
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: T) {
        assert_eq!(exps.len(), self.nvars);
        let sum = self.terms.remove(&exps).unwrap_or_else(T::zero) + c;
        if !sum.is_zero() {
            self.terms.insert(exps, sum);
        }
    }

    pub fn coefficient(&self, exps: &[u32]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.clone() * s.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Homogeneous part of the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Partial derivative `d/dz_var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c.clone() * small::<T>(e[var] as i64));
        }
        out
    }

    /// Value at the origin of the mixed partial over the listed variables.
    pub fn derivative_at_zero(&self, vars: &[usize]) -> T {
        let mut e = vec![0u32; self.nvars];
        for &v in vars {
            e[v] += 1;
        }
        let factorials: i64 = e.iter().map(|&k| (1..=k as i64).product::<i64>()).product();
        self.coefficient(&e) * small::<T>(factorials)
    }

    pub fn eval(&self, z: &[T]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (zi, &k) in z.iter().zip(e) {
                for _ in 0..k {
                    term = term * zi.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }
}
