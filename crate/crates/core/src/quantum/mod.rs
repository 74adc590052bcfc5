//! Finite-dimensional quantum realisations and steering constructions.
//!
//! Everything here is double precision. Results reach the exact modules only
//! through [`snap`].

pub mod io;
mod snap;
mod steering;
mod tables;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub use snap::{snap, snap_correlation, snap_table};
pub use steering::{
    assemblage_from_bell, hjw_construct, verify_steering, Assemblage, HjwRealisation,
    SteeredBehaviour, SteeringResidual,
};
pub use tables::{chsh_value, realisation_to_tables, FloatCorrelation};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues of ρ_B at or below this are treated as zero.
pub const EPS_RANK: f64 = 1e-10;
/// Default tolerance for validity checks and residuals.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid realisation: {0}")]
    InvalidRealisation(String),
    #[error("assemblage state leaves the support of rho_B by {0:e}")]
    RankDeficientInput(f64),
    #[error("format error: {0}")]
    Format(String),
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real_matrix(n: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(n, n, entries.iter().map(|&v| c(v, 0.0)))
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    is_hermitian(m, tol) && hermitian_eigenvalues(m).first().is_none_or(|&l| l >= -tol)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Tr_A of an operator on C^da ⊗ C^db.
pub fn partial_trace_a(op: &CMatrix, da: usize, db: usize) -> Result<CMatrix, QuantumError> {
    if op.nrows() != da * db || op.ncols() != da * db {
        return Err(QuantumError::DimensionMismatch(format!(
            "operator is {}x{}, expected {}",
            op.nrows(),
            op.ncols(),
            da * db
        )));
    }
    Ok(CMatrix::from_fn(db, db, |i, j| {
        (0..da).map(|k| op[(k * db + i, k * db + j)]).sum()
    }))
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// A bipartite state with local POVMs: `m[x][a]` on A, `n[y][b]` on B.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBellRealisation {
    pub da: usize,
    pub db: usize,
    pub rho: CMatrix,
    pub m: Vec<Vec<CMatrix>>,
    pub n: Vec<Vec<CMatrix>>,
}

fn check_povms(povms: &[Vec<CMatrix>], d: usize, side: &str, tol: f64) -> Result<(), QuantumError> {
    if povms.is_empty() {
        return Err(QuantumError::InvalidRealisation(format!("no measurements on side {side}")));
    }
    for (x, povm) in povms.iter().enumerate() {
        if povm.is_empty() {
            return Err(QuantumError::InvalidRealisation(format!(
                "measurement {} on side {side} has no outcomes",
                x + 1
            )));
        }
        let mut total = CMatrix::zeros(d, d);
        for (a, e) in povm.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(QuantumError::DimensionMismatch(format!(
                    "element {}|{} on side {side} is {}x{}, expected {d}",
                    a + 1,
                    x + 1,
                    e.nrows(),
                    e.ncols()
                )));
            }
            if !is_psd(e, tol) {
                return Err(QuantumError::InvalidRealisation(format!(
                    "element {}|{} on side {side} is not positive semidefinite",
                    a + 1,
                    x + 1
                )));
            }
            total += e;
        }
        let dev = max_abs(&(total - CMatrix::identity(d, d)));
        if dev > tol {
            return Err(QuantumError::InvalidRealisation(format!(
                "measurement {} on side {side} sums to identity only within {dev:e}",
                x + 1
            )));
        }
    }
    Ok(())
}

impl QuantumBellRealisation {
    pub fn validate(&self, tol: f64) -> Result<(), QuantumError> {
        let d = self.da * self.db;
        if self.rho.nrows() != d || self.rho.ncols() != d {
            return Err(QuantumError::DimensionMismatch(format!(
                "state is {}x{}, expected {d}",
                self.rho.nrows(),
                self.rho.ncols()
            )));
        }
        if !is_psd(&self.rho, tol) {
            return Err(QuantumError::InvalidRealisation("state is not positive semidefinite".into()));
        }
        let tr = self.rho.trace();
        if (tr - c(1.0, 0.0)).norm() > tol {
            return Err(QuantumError::InvalidRealisation(format!("state has trace {tr}")));
        }
        check_povms(&self.m, self.da, "A", tol)?;
        check_povms(&self.n, self.db, "B", tol)
    }

    pub fn from_pure(
        psi: &CVector,
        da: usize,
        db: usize,
        m: Vec<Vec<CMatrix>>,
        n: Vec<Vec<CMatrix>>,
    ) -> Self {
        QuantumBellRealisation {
            da,
            db,
            rho: projector(psi),
            m,
            n,
        }
    }
}

/// Projective measurement onto the eigenvectors of a ±1 observable:
/// outcome 1 ↦ (I + O)/2, outcome 2 ↦ (I − O)/2.
pub fn binary_povm(observable: &CMatrix) -> Vec<CMatrix> {
    let n = observable.nrows();
    let id = CMatrix::identity(n, n);
    vec![
        (&id + observable) * c(0.5, 0.0),
        (&id - observable) * c(0.5, 0.0),
    ]
}

/// Singlet with Alice measuring Z, X and Bob measuring (Z ± X)/√2.
pub fn tsirelson_realisation() -> QuantumBellRealisation {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = real_matrix(2, &[1.0, 0.0, 0.0, -1.0]);
    let x = real_matrix(2, &[0.0, 1.0, 1.0, 0.0]);
    let psi = CVector::from_vec(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]);
    let plus = (&z + &x) * c(s, 0.0);
    let minus = (&z - &x) * c(s, 0.0);
    QuantumBellRealisation::from_pure(
        &psi,
        2,
        2,
        vec![binary_povm(&z), binary_povm(&x)],
        vec![binary_povm(&plus), binary_povm(&minus)],
    )
}
