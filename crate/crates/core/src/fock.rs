//! Dense linear algebra on truncated Fock spaces.
//!
//! Everything here uses hbar = 1 and the propagator convention
//! `U(t) = exp(+i H t)`. Joint two-mode states are stored a-major:
//! the amplitude of `|j>_a |m>_b` lives at flat index `j * d_b + m`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type AmplitudeVector = DVector<C64>;

/// Largest tolerated `max |H - H^dagger|` for a propagator generator.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A single bosonic mode truncated to the basis `|0>, ..., |cutoff - 1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    cutoff: usize,
}

impl ModeSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidCutoff(cutoff));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number state `|k>`.
    pub fn fock(&self, k: usize) -> Result<AmplitudeVector> {
        if k >= self.cutoff {
            return Err(Error::FockOutOfRange {
                m: k,
                cutoff: self.cutoff,
            });
        }
        let mut v = AmplitudeVector::zeros(self.cutoff);
        v[k] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(&self) -> AmplitudeVector {
        let mut v = AmplitudeVector::zeros(self.cutoff);
        v[0] = C64::new(1.0, 0.0);
        v
    }
}

#[derive(Debug, Clone)]
pub struct LadderOps {
    pub annihilation: ComplexMatrix,
    pub creation: ComplexMatrix,
    pub number: ComplexMatrix,
}

/// Annihilation, creation and number operators on `space`.
///
/// `annihilation[(k - 1, k)] = sqrt(k)`. The number operator equals
/// `creation * annihilation` but is filled in directly, so its diagonal holds
/// the exact integers `0, 1, ..., cutoff - 1`.
pub fn ladder_ops(space: ModeSpace) -> LadderOps {
    let d = space.cutoff();
    let annihilation = ComplexMatrix::from_fn(d, d, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let creation = annihilation.adjoint();
    let number = ComplexMatrix::from_fn(d, d, |r, c| {
        if r == c {
            C64::new(r as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    LadderOps {
        annihilation,
        creation,
        number,
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |H - H^dagger|` over all entries.
pub fn hermiticity_defect(h: &ComplexMatrix) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// `max |U^dagger U - I|` over all entries.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}

/// `exp(i H t)` through the eigendecomposition `H = V diag(lambda) V^dagger`.
pub fn hermitian_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    let asymmetry = hermiticity_defect(h);
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    let eig = SymmetricEigen::new(h.clone());
    let phases = eig
        .eigenvalues
        .map(|lambda| C64::from_polar(1.0, lambda * t));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[k];
    }
    Ok(scaled * v.adjoint())
}

/// Kronecker product `a (x) b`, a-major.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Cross-Kerr unitary `exp(i kappa a^dagger a b^dagger b)`, kept as its
/// diagonal over the joint basis.
#[derive(Debug, Clone)]
pub struct KerrUnitary {
    dims: (usize, usize),
    diagonal: AmplitudeVector,
}

impl KerrUnitary {
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn diagonal(&self) -> &AmplitudeVector {
        &self.diagonal
    }

    /// Phase on `|j>_a |m>_b`.
    pub fn phase(&self, j: usize, m: usize) -> C64 {
        self.diagonal[j * self.dims.1 + m]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.diagonal)
    }
}

pub fn kerr_unitary(kappa: f64, space_a: ModeSpace, space_b: ModeSpace) -> KerrUnitary {
    let (da, db) = (space_a.cutoff(), space_b.cutoff());
    let diagonal = AmplitudeVector::from_fn(da * db, |idx, _| {
        let (j, m) = (idx / db, idx % db);
        C64::from_polar(1.0, kappa * (j * m) as f64)
    });
    KerrUnitary {
        dims: (da, db),
        diagonal,
    }
}

pub fn norm_sqr(v: &AmplitudeVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn normalize(v: &AmplitudeVector) -> Result<AmplitudeVector> {
    let norm = norm_sqr(v).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(v.unscale(norm))
}

/// `<u|v>`, antilinear in `u`.
pub fn overlap(u: &AmplitudeVector, v: &AmplitudeVector) -> Result<C64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.dotc(v))
}

/// `|<u|v>|^2` for normalized inputs. Inputs are divided by their norms, so
/// slightly denormalized vectors still land in `[0, 1]`.
pub fn fidelity(u: &AmplitudeVector, v: &AmplitudeVector) -> Result<f64> {
    let (nu, nv) = (norm_sqr(u), norm_sqr(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let f = overlap(u, v)?.norm_sqr() / (nu * nv);
    Ok(f.clamp(0.0, 1.0))
}

/// Pure state of modes a and b.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    dims: (usize, usize),
    amplitudes: AmplitudeVector,
}

impl JointState {
    pub fn product(a: &AmplitudeVector, b: &AmplitudeVector) -> Self {
        let amplitudes = AmplitudeVector::from_fn(a.len() * b.len(), |idx, _| {
            a[idx / b.len()] * b[idx % b.len()]
        });
        Self {
            dims: (a.len(), b.len()),
            amplitudes,
        }
    }

    pub fn from_amplitudes(dims: (usize, usize), amplitudes: AmplitudeVector) -> Result<Self> {
        if amplitudes.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch {
                expected: dims.0 * dims.1,
                got: amplitudes.len(),
            });
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &AmplitudeVector {
        &self.amplitudes
    }

    /// Amplitude of `|j>_a |m>_b`.
    pub fn amplitude(&self, j: usize, m: usize) -> C64 {
        self.amplitudes[j * self.dims.1 + m]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.ncols() != self.amplitudes.len() || op.nrows() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: op.ncols(),
            });
        }
        Ok(Self {
            dims: self.dims,
            amplitudes: op * &self.amplitudes,
        })
    }

    pub fn apply_kerr(&self, kerr: &KerrUnitary) -> Result<Self> {
        if kerr.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: kerr.diagonal().len(),
            });
        }
        Ok(Self {
            dims: self.dims,
            amplitudes: self.amplitudes.component_mul(kerr.diagonal()),
        })
    }

    /// Photon-number distribution of mode a.
    pub fn a_marginal(&self) -> Vec<f64> {
        (0..self.dims.0)
            .map(|j| (0..self.dims.1).map(|m| self.amplitude(j, m).norm_sqr()).sum())
            .collect()
    }

    /// Photon-number distribution of mode b.
    pub fn b_marginal(&self) -> Vec<f64> {
        (0..self.dims.1)
            .map(|m| (0..self.dims.0).map(|j| self.amplitude(j, m).norm_sqr()).sum())
            .collect()
    }

    /// Unnormalized mode-b state left after projecting mode a onto `|j>`.
    pub fn project_a(&self, j: usize) -> AmplitudeVector {
        AmplitudeVector::from_fn(self.dims.1, |m, _| self.amplitude(j, m))
    }
}
