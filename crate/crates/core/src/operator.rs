//! Dense complex operators on tensor-product Hilbert spaces.
//!
//! An [`Operator`] is a square complex matrix together with the list of
//! tensor-factor dimensions it acts on. Hamiltonians are in units of angular
//! frequency with ħ = 1, so propagators are `exp(-i H t)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{MAX_DIM, STRUCTURAL_TOL};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square operator tagged with its tensor-factor dimensions.
#[derive(Clone, PartialEq)]
pub struct Operator {
    data: DMatrix<C64>,
    dims: Vec<usize>,
}

/// Distance metric between two operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Frobenius,
    /// Half the sum of singular values of the difference.
    Trace,
}

fn check_dims(dims: &[usize], n: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidDims(format!("factor list {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != n {
        return Err(Error::InvalidDims(format!(
            "factors {dims:?} multiply to {prod}, matrix is {n}x{n}"
        )));
    }
    if n > MAX_DIM {
        return Err(Error::DimensionCap { dim: n, cap: MAX_DIM });
    }
    Ok(())
}

impl Operator {
    /// Wraps a square matrix with the given factor dimensions.
    pub fn new(data: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is not square: {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        check_dims(&dims, data.nrows())?;
        Ok(Self { data, dims })
    }

    /// Single-factor operator.
    pub fn from_matrix(data: DMatrix<C64>) -> Result<Self> {
        let n = data.nrows();
        Self::new(data, vec![n])
    }

    /// Builds a single-factor operator from row-major entries.
    pub fn from_rows(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Self {
            data: DMatrix::identity(n, n),
            dims: dims.to_vec(),
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Self {
            data: DMatrix::zeros(n, n),
            dims: dims.to_vec(),
        }
    }

    /// Projector |i><i| onto a computational basis state.
    pub fn basis_projector(dims: &[usize], i: usize) -> Self {
        Self::matrix_unit(dims, i, i)
    }

    /// Matrix unit |i><j|.
    pub fn matrix_unit(dims: &[usize], i: usize, j: usize) -> Self {
        let mut op = Self::zeros(dims);
        op.data[(i, j)] = ONE;
        op
    }

    /// Pure-state density |ψ><ψ| for a (not necessarily normalized) vector.
    pub fn pure_state(dims: &[usize], amplitudes: &[C64]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if amplitudes.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {n}",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(n, amplitudes.iter().map(|a| a / norm));
        Self::new(&v * v.adjoint(), dims.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    /// Same entries, new factor structure.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.data, dims)
    }

    pub fn dagger(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            dims: self.dims.clone(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: &self.data * s,
            dims: self.dims.clone(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Hilbert–Schmidt inner product Tr(self† other).
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            data: &self.data * &other.data - &other.data * &self.data,
            dims: self.dims.clone(),
        }
    }

    /// `g† self g`.
    pub fn conjugated_by(&self, g: &Self) -> Self {
        Self {
            data: g.data.adjoint() * &self.data * &g.data,
            dims: self.dims.clone(),
        }
    }

    /// Traceless part `self - Tr(self)/d · 1`.
    pub fn traceless_part(&self) -> Self {
        let shift = self.trace() / self.dim() as f64;
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.data[(i, i)] -= shift;
        }
        out
    }

    /// Absolute Hermiticity residual max|A - A†|.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian to 1e-10 relative to max(1, max|A|).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= STRUCTURAL_TOL * self.max_abs().max(1.0)
    }

    /// max|A†A - 1|.
    pub fn unitary_residual(&self) -> f64 {
        let n = self.dim();
        let prod = self.data.adjoint() * &self.data;
        (prod - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_residual() <= STRUCTURAL_TOL
    }

    /// Symmetrized copy `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0),
            dims: self.dims.clone(),
        }
    }

    /// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian operator.
    pub fn eigh(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian(self.hermitian_residual()));
        }
        let eig = self.hermitian_part().data.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).into_owned())
                .collect::<Vec<_>>(),
        );
        Ok((values, vectors))
    }

    /// Applies a real function to the spectrum of a Hermitian operator.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> C64) -> Result<Self> {
        let (values, vectors) = self.eigh()?;
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| f(v)),
        ));
        Ok(Self {
            data: &vectors * diag * vectors.adjoint(),
            dims: self.dims.clone(),
        })
    }

    /// Nearest unitary in the polar decomposition, `U (U†U)^{-1/2}`.
    pub fn reunitarize(&self) -> Result<Self> {
        let gram = Self {
            data: self.data.adjoint() * &self.data,
            dims: self.dims.clone(),
        };
        let inv_sqrt = gram.hermitian_function(|v| C64::new(1.0 / v.max(f64::MIN_POSITIVE).sqrt(), 0.0))?;
        Ok(Self {
            data: &self.data * inv_sqrt.data,
            dims: self.dims.clone(),
        })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        tensor(self, other)
    }

    pub fn expm_hermitian(&self, t: f64) -> Result<Self> {
        expm_hermitian(self, t)
    }

    pub fn partial_trace_bath(&self, n_system_factors: usize) -> Result<Self> {
        partial_trace_bath(self, n_system_factors)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(dims={:?}){}", self.dims, self.data)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
                Operator {
                    data: &self.data $op &rhs.data,
                    dims: self.dims.clone(),
                }
            }
        }
        impl $trait<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Kronecker product; `a`'s indices are major.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Operator {
        data: a.data.kronecker(&b.data),
        dims,
    }
}

/// Tensor product of a list of operators, left to right.
pub fn tensor_all<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> Option<Operator> {
    ops.into_iter().fold(None, |acc, op| match acc {
        None => Some(op.clone()),
        Some(a) => Some(tensor(&a, op)),
    })
}

/// `exp(-i H t)` through the spectral decomposition of `H`.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    h.hermitian_function(|lambda| C64::from_polar(1.0, -lambda * t))
}

/// Traces out every factor after the first `n_system_factors`.
pub fn partial_trace_bath(rho: &Operator, n_system_factors: usize) -> Result<Operator> {
    if n_system_factors == 0 || n_system_factors > rho.dims.len() {
        return Err(Error::InvalidDims(format!(
            "cannot keep {n_system_factors} of {} factors",
            rho.dims.len()
        )));
    }
    let sys_dims = rho.dims[..n_system_factors].to_vec();
    let ds: usize = sys_dims.iter().product();
    let db: usize = rho.dims[n_system_factors..].iter().product();
    let out = DMatrix::from_fn(ds, ds, |i, j| {
        (0..db).map(|b| rho.data[(i * db + b, j * db + b)]).sum()
    });
    Operator::new(out, sys_dims)
}

/// Frobenius or trace distance between two same-shape operators.
pub fn distance(a: &Operator, b: &Operator, metric: Metric) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "distance between {0}x{0} and {1}x{1}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = &a.data - &b.data;
    Ok(match metric {
        Metric::Frobenius => diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        Metric::Trace => 0.5 * diff.singular_values().iter().sum::<f64>(),
    })
}
