//! Sparse quadratic polynomials over binary variables, the QUBO and Ising
//! models built from them, and the transforms between the two.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::compiler::PenaltyConfig;
use crate::scalar::{lift, Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("bitstring has {found} bits, model has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("term references bit {index} outside a {dimension}-bit model")]
    IndexOutOfRange { index: usize, dimension: usize },
}

/// A quadratic polynomial in binary variables with `x * x = x` folded in.
///
/// Quadratic keys are always `(p, q)` with `p < q`; zero coefficients are
/// dropped by [`Polynomial::prune`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    pub linear: BTreeMap<usize, T>,
    pub quadratic: BTreeMap<(usize, usize), T>,
    pub offset: T,
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn new() -> Self {
        Self {
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: T::zero(),
        }
    }

    pub fn add_linear(&mut self, p: usize, c: T) {
        *self.linear.entry(p).or_insert_with(T::zero) += c;
    }

    pub fn add_quadratic(&mut self, p: usize, q: usize, c: T) {
        match p.cmp(&q) {
            std::cmp::Ordering::Equal => self.add_linear(p, c),
            std::cmp::Ordering::Less => *self.quadratic.entry((p, q)).or_insert_with(T::zero) += c,
            std::cmp::Ordering::Greater => {
                *self.quadratic.entry((q, p)).or_insert_with(T::zero) += c
            }
        }
    }

    pub fn add_constant(&mut self, c: T) {
        self.offset += c;
    }

    /// Adds `weight * other`.
    pub fn add_scaled(&mut self, other: &Polynomial<T>, weight: T) {
        for (&p, &c) in &other.linear {
            self.add_linear(p, c * weight);
        }
        for (&(p, q), &c) in &other.quadratic {
            self.add_quadratic(p, q, c * weight);
        }
        self.offset += other.offset * weight;
    }

    /// Adds `weight * (sum(a_p x_p) + constant)^2`.
    pub fn add_squared_affine(&mut self, terms: &[(usize, T)], constant: T, weight: T) {
        let two: T = lift(2);
        for (n, &(p, a)) in terms.iter().enumerate() {
            self.add_linear(p, weight * (a * a + two * a * constant));
            for &(q, b) in &terms[n + 1..] {
                self.add_quadratic(p, q, weight * two * a * b);
            }
        }
        self.offset += weight * constant * constant;
    }

    /// Removes zero coefficients.
    pub fn prune(&mut self) {
        self.linear.retain(|_, c| !c.is_zero());
        self.quadratic.retain(|_, c| !c.is_zero());
    }

    pub fn is_empty(&self) -> bool {
        self.linear.values().all(|c| c.is_zero())
            && self.quadratic.values().all(|c| c.is_zero())
            && self.offset.is_zero()
    }

    /// Direct evaluation; out-of-range indices read as 0.
    pub fn evaluate(&self, bits: &[bool]) -> T {
        let on = |p: usize| bits.get(p).copied().unwrap_or(false);
        let mut e = self.offset;
        for (&p, &c) in &self.linear {
            if on(p) {
                e += c;
            }
        }
        for (&(p, q), &c) in &self.quadratic {
            if on(p) && on(q) {
                e += c;
            }
        }
        e
    }

    pub fn max_index(&self) -> Option<usize> {
        let lin = self.linear.keys().next_back().copied();
        let quad = self.quadratic.keys().map(|&(_, q)| q).max();
        lin.max(quad)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Polynomial<U> {
        Polynomial {
            linear: self.linear.iter().map(|(&p, &c)| (p, f(c))).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, f(c))).collect(),
            offset: f(self.offset),
        }
    }
}

/// Expansion of `(sum(a_p x_p) + constant)^2` using `x_p^2 = x_p`.
pub fn expand_squared_affine<T: Scalar>(terms: &[(usize, T)], constant: T) -> Polynomial<T> {
    let mut poly = Polynomial::new();
    poly.add_squared_affine(terms, constant, T::one());
    poly.prune();
    poly
}

/// A QUBO: minimize `offset + sum(linear) + sum(quadratic)` over bitstrings
/// of length `dimension`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel<T> {
    pub dimension: usize,
    pub terms: Polynomial<T>,
    /// Penalty the model was compiled with, when known.
    pub penalty: Option<PenaltyConfig>,
    /// Distance denominator: energies divided by `scale` are distances.
    pub scale: i64,
}

impl<T: Scalar> QuboModel<T> {
    pub fn new(dimension: usize, mut terms: Polynomial<T>) -> Result<Self, ModelError> {
        if let Some(index) = terms.max_index().filter(|&i| i >= dimension) {
            return Err(ModelError::IndexOutOfRange { index, dimension });
        }
        terms.prune();
        Ok(Self {
            dimension,
            terms,
            penalty: None,
            scale: 1,
        })
    }

    pub fn offset(&self) -> T {
        self.terms.offset
    }

    pub fn energy(&self, bits: &[bool]) -> Result<T, ModelError> {
        if bits.len() != self.dimension {
            return Err(ModelError::LengthMismatch {
                expected: self.dimension,
                found: bits.len(),
            });
        }
        Ok(self.terms.evaluate(bits))
    }

    pub fn max_abs_coefficient(&self) -> T {
        self.terms
            .linear
            .values()
            .chain(self.terms.quadratic.values())
            .map(|c| c.abs())
            .fold(T::zero(), |m, c| if c > m { c } else { m })
    }

    /// Per-bit neighbour lists `(other bit, coupling)` and linear terms, the
    /// layout the samplers iterate over.
    pub fn adjacency(&self) -> (Vec<T>, Vec<Vec<(usize, T)>>) {
        let mut linear = vec![T::zero(); self.dimension];
        for (&p, &c) in &self.terms.linear {
            linear[p] = c;
        }
        let mut neighbours = vec![Vec::new(); self.dimension];
        for (&(p, q), &c) in &self.terms.quadratic {
            neighbours[p].push((q, c));
            neighbours[q].push((p, c));
        }
        (linear, neighbours)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> QuboModel<U> {
        QuboModel {
            dimension: self.dimension,
            terms: self.terms.map(f),
            penalty: self.penalty,
            scale: self.scale,
        }
    }
}

/// An Ising Hamiltonian over spins in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    pub spins: usize,
    pub h: BTreeMap<usize, T>,
    /// Couplings keyed `(p, q)` with `p < q`.
    pub j: BTreeMap<(usize, usize), T>,
    pub offset: T,
}

impl<T: Scalar> IsingModel<T> {
    pub fn energy(&self, spins: &[i8]) -> Result<T, ModelError> {
        if spins.len() != self.spins {
            return Err(ModelError::LengthMismatch {
                expected: self.spins,
                found: spins.len(),
            });
        }
        let s = |p: usize| -> T { if spins[p] > 0 { T::one() } else { -T::one() } };
        let mut e = self.offset;
        for (&p, &h) in &self.h {
            e += h * s(p);
        }
        for (&(p, q), &j) in &self.j {
            e += j * s(p) * s(q);
        }
        Ok(e)
    }
}

/// Rewrites a QUBO in spins under `x = (1 + s) / 2`.
pub fn qubo_to_ising<T: Field>(model: &QuboModel<T>) -> IsingModel<T> {
    let two: T = lift(2);
    let four: T = lift(4);
    let mut h: BTreeMap<usize, T> = BTreeMap::new();
    let mut j = BTreeMap::new();
    let mut offset = model.terms.offset;
    for (&p, &a) in &model.terms.linear {
        *h.entry(p).or_insert_with(T::zero) += a / two;
        offset += a / two;
    }
    for (&(p, q), &c) in &model.terms.quadratic {
        let quarter = c / four;
        *h.entry(p).or_insert_with(T::zero) += quarter;
        *h.entry(q).or_insert_with(T::zero) += quarter;
        j.insert((p, q), quarter);
        offset += quarter;
    }
    h.retain(|_, c| !c.is_zero());
    IsingModel {
        spins: model.dimension,
        h,
        j,
        offset,
    }
}

/// Rewrites an Ising model in binaries under `s = 2x - 1`.
pub fn ising_to_qubo<T: Scalar>(ising: &IsingModel<T>) -> QuboModel<T> {
    let two: T = lift(2);
    let four: T = lift(4);
    let mut terms = Polynomial::new();
    for (&p, &h) in &ising.h {
        terms.add_linear(p, two * h);
        terms.add_constant(-h);
    }
    for (&(p, q), &c) in &ising.j {
        terms.add_quadratic(p, q, four * c);
        terms.add_linear(p, -two * c);
        terms.add_linear(q, -two * c);
        terms.add_constant(c);
    }
    terms.add_constant(ising.offset);
    terms.prune();
    QuboModel {
        dimension: ising.spins,
        terms,
        penalty: None,
        scale: 1,
    }
}
