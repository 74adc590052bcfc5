use super::{
    c, hermitian_eigenvalues, is_psd, kron, max_abs, partial_trace_a, projector, CMatrix, CVector,
    QuantumBellRealisation, QuantumError, EPS_RANK,
};

/// Weighted conditional states of Bob: `weights[x][a]` = p̂_A(a|x), and
/// `states[x][a]` = ρ_{a|x} when the weight is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    pub weights: Vec<Vec<f64>>,
    pub states: Vec<Vec<Option<CMatrix>>>,
    pub rho_b: CMatrix,
}

impl Assemblage {
    pub fn dim(&self) -> usize {
        self.rho_b.nrows()
    }

    /// max_x ‖Σ_a p̂_A(a|x)·ρ_{a|x} − ρ_B‖.
    pub fn averaging_residual(&self) -> f64 {
        let d = self.dim();
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(ws, ss)| {
                let mut total = CMatrix::zeros(d, d);
                for (w, s) in ws.iter().zip(ss) {
                    if let Some(s) = s {
                        total += s * c(*w, 0.0);
                    }
                }
                max_abs(&(total - &self.rho_b))
            })
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, tol: f64) -> Result<(), QuantumError> {
        let d = self.dim();
        if self.weights.len() != self.states.len() {
            return Err(QuantumError::DimensionMismatch("weights and states differ in shape".into()));
        }
        for (x, (ws, ss)) in self.weights.iter().zip(&self.states).enumerate() {
            if ws.len() != ss.len() {
                return Err(QuantumError::DimensionMismatch(format!(
                    "input {} has {} weights but {} states",
                    x + 1,
                    ws.len(),
                    ss.len()
                )));
            }
            let sum: f64 = ws.iter().sum();
            if ws.iter().any(|&w| w < -tol) || (sum - 1.0).abs() > tol {
                return Err(QuantumError::InvalidRealisation(format!(
                    "weights of input {} are not a distribution",
                    x + 1
                )));
            }
            for (a, (w, s)) in ws.iter().zip(ss).enumerate() {
                match s {
                    Some(s) if s.nrows() != d || s.ncols() != d => {
                        return Err(QuantumError::DimensionMismatch(format!(
                            "state {}|{} has the wrong size",
                            a + 1,
                            x + 1
                        )))
                    }
                    Some(s) if !is_psd(s, tol) || (s.trace() - c(1.0, 0.0)).norm() > tol => {
                        return Err(QuantumError::InvalidRealisation(format!(
                            "state {}|{} is not a density matrix",
                            a + 1,
                            x + 1
                        )))
                    }
                    None if *w > tol => {
                        return Err(QuantumError::InvalidRealisation(format!(
                            "outcome {}|{} has weight {w} but no state",
                            a + 1,
                            x + 1
                        )))
                    }
                    _ => {}
                }
            }
        }
        let r = self.averaging_residual();
        if r > tol {
            return Err(QuantumError::InvalidRealisation(format!(
                "states do not average to rho_B (residual {r:e})"
            )));
        }
        Ok(())
    }
}

/// q(b|[a|x],y) = Tr(N^y_b ρ_{a|x}) as `q[x][a] = Some(rows[y][b])` on the
/// outcomes with positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeredBehaviour {
    pub q: Vec<Vec<Option<Vec<Vec<f64>>>>>,
}

/// Bob's conditional states and the behaviour they induce.
pub fn assemblage_from_bell(
    r: &QuantumBellRealisation,
    tol: f64,
) -> Result<(Assemblage, SteeredBehaviour), QuantumError> {
    r.validate(tol)?;
    let id_b = CMatrix::identity(r.db, r.db);
    let rho_b = partial_trace_a(&r.rho, r.da, r.db)?;
    let mut weights = Vec::new();
    let mut states = Vec::new();
    let mut q = Vec::new();
    for povm in &r.m {
        let mut ws = Vec::new();
        let mut ss = Vec::new();
        let mut qs = Vec::new();
        for m in povm {
            let unnormalised = partial_trace_a(&(kron(m, &id_b) * &r.rho), r.da, r.db)?;
            let w = unnormalised.trace().re;
            ws.push(w.max(0.0));
            if w > EPS_RANK {
                let state = unnormalised * c(1.0 / w, 0.0);
                let rows = r
                    .n
                    .iter()
                    .map(|nv| nv.iter().map(|n| (n * &state).trace().re).collect())
                    .collect();
                ss.push(Some(state));
                qs.push(Some(rows));
            } else {
                ss.push(None);
                qs.push(None);
            }
        }
        weights.push(ws);
        states.push(ss);
        q.push(qs);
    }
    Ok((
        Assemblage {
            weights,
            states,
            rho_b,
        },
        SteeredBehaviour { q },
    ))
}

/// Output of [`hjw_construct`]: Alice's space is ℂ^r with r = rank ρ_B.
#[derive(Debug, Clone, PartialEq)]
pub struct HjwRealisation {
    pub r: usize,
    pub db: usize,
    /// Σ_n √λ_n e_n ⊗ v_n.
    pub psi: CVector,
    /// `m[x][a]`, r×r each.
    pub m: Vec<Vec<CMatrix>>,
    /// λ_n in descending order.
    pub eigenvalues: Vec<f64>,
    /// The eigenvectors v_n of ρ_B.
    pub basis: Vec<CVector>,
}

impl HjwRealisation {
    pub fn with_bob(&self, n: Vec<Vec<CMatrix>>) -> QuantumBellRealisation {
        QuantumBellRealisation::from_pure(&self.psi, self.r, self.db, self.m.clone(), n)
    }
}

/// Makes the first entry with modulus above 1e-12 real and positive.
fn fix_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}

/// Eigenpairs of a Hermitian matrix with λ > eps, sorted descending. Within
/// a degenerate cluster the basis is Gram–Schmidt applied to the projected
/// standard basis vectors, so it does not depend on the eigensolver.
fn canonical_eigenbasis(h: &CMatrix, eps: f64) -> (Vec<f64>, Vec<CVector>) {
    let n = h.nrows();
    let herm = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = herm.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .filter(|(l, _)| *l > eps)
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len() && (pairs[i].0 - pairs[j].0).abs() <= 1e-9 {
            j += 1;
        }
        let mut proj = CMatrix::zeros(n, n);
        for (_, v) in &pairs[i..j] {
            proj += projector(v);
        }
        let mut cluster: Vec<CVector> = Vec::new();
        for k in 0..n {
            if cluster.len() == j - i {
                break;
            }
            let mut u = proj.column(k).into_owned();
            for w in &cluster {
                let overlap = w.dotc(&u);
                u -= w * overlap;
            }
            let norm = u.norm();
            if norm > 1e-6 {
                u /= c(norm, 0.0);
                fix_phase(&mut u);
                cluster.push(u);
            }
        }
        for u in cluster {
            values.push((u.adjoint() * &herm * &u)[(0, 0)].re);
            vectors.push(u);
        }
        i = j;
    }
    (values, vectors)
}

/// Purifies ρ_B on its support and builds POVMs for Alice that steer Bob to
/// p̂_A(a|x)·ρ_{a|x}. Outcomes without a state get the zero operator.
pub fn hjw_construct(asm: &Assemblage, tol: f64) -> Result<HjwRealisation, QuantumError> {
    asm.validate(tol)?;
    let db = asm.dim();
    let (eigenvalues, basis) = canonical_eigenbasis(&asm.rho_b, EPS_RANK);
    let r = eigenvalues.len();
    let mut v = CMatrix::zeros(db, r);
    for (k, u) in basis.iter().enumerate() {
        v.set_column(k, u);
    }
    let support = &v * v.adjoint();
    let outside = CMatrix::identity(db, db) - &support;
    let scale = CMatrix::from_diagonal(&CVector::from_iterator(
        r,
        eigenvalues.iter().map(|l| c(1.0 / l.sqrt(), 0.0)),
    ));
    let mut m = Vec::new();
    for (ws, ss) in asm.weights.iter().zip(&asm.states) {
        let mut povm = Vec::new();
        for (w, s) in ws.iter().zip(ss) {
            match s {
                Some(s) => {
                    let sub = s * c(*w, 0.0);
                    let leak = max_abs(&(&outside * &sub)).max(max_abs(&(&sub * &outside)));
                    if leak > tol {
                        return Err(QuantumError::RankDeficientInput(leak));
                    }
                    let t = v.adjoint() * &sub * &v;
                    povm.push((&scale * t * &scale).transpose());
                }
                None => povm.push(CMatrix::zeros(r, r)),
            }
        }
        m.push(povm);
    }
    let mut psi = CVector::zeros(r * db);
    for (n, (l, u)) in eigenvalues.iter().zip(&basis).enumerate() {
        for i in 0..db {
            psi[n * db + i] = u[i] * l.sqrt();
        }
    }
    Ok(HjwRealisation {
        r,
        db,
        psi,
        m,
        eigenvalues,
        basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringResidual {
    /// max_{a,x} ‖Tr_A((M^x_a ⊗ I)|Ψ⟩⟨Ψ|) − p̂_A(a|x)ρ_{a|x}‖.
    pub steering: f64,
    /// max_x ‖Σ_a M^x_a − I_r‖, I_r being the support projector.
    pub completeness: f64,
    /// Smallest eigenvalue over all POVM elements.
    pub min_eigenvalue: f64,
}

pub fn verify_steering(h: &HjwRealisation, asm: &Assemblage) -> Result<SteeringResidual, QuantumError> {
    let db = h.db;
    let rho = projector(&h.psi);
    let id_b = CMatrix::identity(db, db);
    let id_r = CMatrix::identity(h.r, h.r);
    let mut steering: f64 = 0.0;
    let mut completeness: f64 = 0.0;
    let mut min_eigenvalue = f64::INFINITY;
    if h.m.len() != asm.weights.len() {
        return Err(QuantumError::DimensionMismatch("number of inputs differs".into()));
    }
    for (povm, (ws, ss)) in h.m.iter().zip(asm.weights.iter().zip(&asm.states)) {
        if povm.len() != ws.len() {
            return Err(QuantumError::DimensionMismatch("number of outcomes differs".into()));
        }
        let mut total = CMatrix::zeros(h.r, h.r);
        for (m, (w, s)) in povm.iter().zip(ws.iter().zip(ss)) {
            let steered = partial_trace_a(&(kron(m, &id_b) * &rho), h.r, db)?;
            let target = match s {
                Some(s) => s * c(*w, 0.0),
                None => CMatrix::zeros(db, db),
            };
            steering = steering.max(max_abs(&(steered - target)));
            min_eigenvalue = min_eigenvalue.min(hermitian_eigenvalues(m).first().copied().unwrap_or(0.0));
            total += m;
        }
        completeness = completeness.max(max_abs(&(total - &id_r)));
    }
    Ok(SteeringResidual {
        steering,
        completeness,
        min_eigenvalue,
    })
}
