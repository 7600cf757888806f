use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::OperatorSubspace;
use crate::channel::{compose, ChannelMap};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, MatrixC, C64};
use crate::tolerance;

/// Affine conditions on a Choi matrix. Hermiticity of `J` is built into the
/// parametrization and needs no constraint.
#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    /// `θ(x) = x`
    FixPoint(MatrixC),
    /// `θ(I) = I`
    Unital,
    /// `ψ∘θ = θ`
    AbsorbLeft(ChannelMap),
}

impl Constraint {
    /// The linear part `L(θ)` with `L(θ) = rhs` on members.
    fn linear_part(&self, theta: &ChannelMap) -> MatrixC {
        match self {
            Constraint::FixPoint(x) => theta.apply(x).expect("shape checked at construction"),
            Constraint::Unital => theta.apply(&MatrixC::identity(theta.dim_in())).expect("square"),
            Constraint::AbsorbLeft(psi) => {
                let composed = compose(psi, theta).expect("shape checked at construction");
                composed.superop() - theta.superop()
            }
        }
    }

    fn rhs(&self, n: usize) -> MatrixC {
        match self {
            Constraint::FixPoint(x) => x.clone(),
            Constraint::Unital => MatrixC::identity(n),
            Constraint::AbsorbLeft(_) => MatrixC::zeros(n * n, n * n),
        }
    }

    fn residual(&self, theta: &ChannelMap) -> f64 {
        self.linear_part(theta).distance(&self.rhs(theta.dim_in()))
    }
}

/// Residuals of a candidate against every condition defining the set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    /// `max_x ‖θ(x) − x‖_F` over the fix-point conditions.
    pub fix_point: f64,
    pub unital: Option<f64>,
    pub absorb: Option<f64>,
    pub lambda_min: f64,
    pub hermiticity: f64,
}

impl Membership {
    pub fn max_affine(&self) -> f64 {
        self.fix_point
            .max(self.unital.unwrap_or(0.0))
            .max(self.absorb.unwrap_or(0.0))
            .max(self.hermiticity)
    }

    pub fn is_member(&self, tol: f64) -> bool {
        self.max_affine() <= tol && self.lambda_min >= -tol
    }
}

/// `{J ⪰ 0 : J satisfies every constraint}` on `M_n`, stored in reduced
/// coordinates `J = B Y B*`: `B` spans the minimal face found by facial
/// reduction and `Y` is a real vector of Hermitian coordinates.
#[derive(Clone, Debug)]
pub struct FeasibleSet {
    n: usize,
    constraints: Vec<Constraint>,
    face: MatrixC,
    /// Orthonormal rows `Q` and right-hand side `β` of the affine hull in
    /// `Y` coordinates: `{y : Qy = β}`.
    rows: Vec<Vec<f64>>,
    beta: Vec<f64>,
    reference: ChannelMap,
    projection_budget: usize,
}

const FACIAL_SAMPLES_PER_DIM: usize = 4;
const FACIAL_SEED: u64 = 0xfac1a1;

fn flatten(m: &MatrixC) -> impl Iterator<Item = f64> + '_ {
    m.data().iter().map(|z| z.re).chain(m.data().iter().map(|z| z.im))
}

impl FeasibleSet {
    /// `reference` must be a member; it witnesses nonemptiness.
    pub fn new(n: usize, constraints: Vec<Constraint>, reference: ChannelMap) -> Result<Self> {
        if reference.dim_in() != n || reference.dim_out() != n {
            return Err(Error::dim(format!("reference map must act on M_{n}")));
        }
        for c in &constraints {
            match c {
                Constraint::FixPoint(x) if x.shape() != (n, n) => {
                    return Err(Error::dim(format!("fixed element must be {n}x{n}")))
                }
                Constraint::AbsorbLeft(psi) if psi.dim_in() != n || psi.dim_out() != n => {
                    return Err(Error::dim(format!("absorbing map must act on M_{n}")))
                }
                _ => {}
            }
        }
        let face = minimal_face(n, &constraints)?;
        let mut set = Self {
            n,
            constraints,
            face,
            rows: Vec::new(),
            beta: Vec::new(),
            reference,
            projection_budget: super::PROJECTION_BUDGET,
        };
        set.assemble_affine()?;
        let m = set.membership(&set.reference);
        if !m.is_member(tolerance::LIMIT) {
            return Err(Error::Infeasible(format!(
                "reference map violates the constraints (affine {:.3e}, λ_min {:.3e})",
                m.max_affine(),
                m.lambda_min
            )));
        }
        Ok(set)
    }

    /// Dykstra iteration cap used by sampling and ascent.
    pub fn with_projection_budget(mut self, budget: usize) -> Self {
        self.projection_budget = budget.max(1);
        self
    }

    pub fn projection_budget(&self) -> usize {
        self.projection_budget
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn reference(&self) -> &ChannelMap {
        &self.reference
    }

    /// Dimension `w` of the face `{J : range J ⊆ range B}`.
    pub fn face_dim(&self) -> usize {
        self.face.cols()
    }

    /// Real dimension of the affine hull.
    pub fn degrees_of_freedom(&self) -> usize {
        self.coord_dim() - self.rows.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.degrees_of_freedom() == 0
    }

    pub(crate) fn coord_dim(&self) -> usize {
        self.face_dim() * self.face_dim()
    }

    pub fn membership(&self, theta: &ChannelMap) -> Membership {
        let mut fix: f64 = 0.0;
        let mut unital = None;
        let mut absorb = None;
        for c in &self.constraints {
            let r = c.residual(theta);
            match c {
                Constraint::FixPoint(_) => fix = fix.max(r),
                Constraint::Unital => unital = Some(r),
                Constraint::AbsorbLeft(_) => absorb = Some(absorb.unwrap_or(0.0f64).max(r)),
            }
        }
        Membership {
            fix_point: fix,
            unital,
            absorb,
            lambda_min: theta.choi_lambda_min(),
            hermiticity: theta.choi().hermiticity_defect(),
        }
    }

    /// Hermitian `w x w` matrix from real coordinates: diagonal first, then
    /// `√2·Re`, `√2·Im` of each upper off-diagonal entry. Isometric.
    pub(crate) fn coords_to_matrix(&self, y: &[f64]) -> MatrixC {
        let w = self.face_dim();
        let mut m = MatrixC::zeros(w, w);
        for k in 0..w {
            m[(k, k)] = C64::new(y[k], 0.0);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut idx = w;
        for k in 0..w {
            for l in (k + 1)..w {
                let z = C64::new(y[idx] * s, y[idx + 1] * s);
                m[(k, l)] = z;
                m[(l, k)] = z.conj();
                idx += 2;
            }
        }
        m
    }

    pub(crate) fn matrix_to_coords(&self, m: &MatrixC) -> Vec<f64> {
        let w = self.face_dim();
        let mut y = Vec::with_capacity(w * w);
        for k in 0..w {
            y.push(m[(k, k)].re);
        }
        let r2 = std::f64::consts::SQRT_2;
        for k in 0..w {
            for l in (k + 1)..w {
                let z = (m[(k, l)] + m[(l, k)].conj()) * 0.5;
                y.push(z.re * r2);
                y.push(z.im * r2);
            }
        }
        y
    }

    /// `B Y B*` as a map.
    pub(crate) fn coords_to_channel(&self, y: &[f64]) -> ChannelMap {
        let yy = self.coords_to_matrix(y);
        let j = &(&self.face * &yy) * &self.face.adjoint();
        ChannelMap::from_choi(self.n, self.n, j).expect("face has Choi size")
    }

    /// Coordinates of the compression `B* J B` of a Hermitian matrix.
    pub(crate) fn choi_to_coords(&self, j: &MatrixC) -> Vec<f64> {
        let yy = &(&self.face.adjoint() * &j.hermitian_part()) * &self.face;
        self.matrix_to_coords(&yy)
    }

    fn assemble_affine(&mut self) -> Result<()> {
        let p = self.coord_dim();
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(p);
        for c in 0..p {
            let mut e = vec![0.0; p];
            e[c] = 1.0;
            let theta = self.coords_to_channel(&e);
            let col: Vec<f64> = self
                .constraints
                .iter()
                .flat_map(|k| flatten(&k.linear_part(&theta)).collect::<Vec<_>>())
                .collect();
            columns.push(col);
        }
        let rhs: Vec<f64> = self
            .constraints
            .iter()
            .flat_map(|k| flatten(&k.rhs(self.n)).collect::<Vec<_>>())
            .collect();
        let count = rhs.len();
        let row_norm_max = (0..count)
            .map(|r| columns.iter().map(|col| col[r] * col[r]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let cutoff = tolerance::ALGEBRAIC * row_norm_max.max(1.0);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for r in 0..count {
            let mut a: Vec<f64> = columns.iter().map(|col| col[r]).collect();
            let mut b = rhs[r];
            for _ in 0..2 {
                for (q, bq) in rows.iter().zip(&beta) {
                    let d: f64 = q.iter().zip(&a).map(|(x, y)| x * y).sum();
                    for (ai, qi) in a.iter_mut().zip(q) {
                        *ai -= d * qi;
                    }
                    b -= d * bq;
                }
            }
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > cutoff {
                rows.push(a.iter().map(|x| x / norm).collect());
                beta.push(b / norm);
            } else if b.abs() > tolerance::LIMIT * (1.0 + rhs[r].abs()) {
                return Err(Error::Infeasible(format!(
                    "affine constraints are inconsistent on the reduced face (residual {:.3e})",
                    b.abs()
                )));
            }
        }
        self.rows = rows;
        self.beta = beta;
        Ok(())
    }

    /// Orthogonal projection onto `{y : Qy = β}`.
    pub(crate) fn project_affine(&self, y: &mut [f64]) {
        for (q, b) in self.rows.iter().zip(&self.beta) {
            let d: f64 = q.iter().zip(y.iter()).map(|(x, v)| x * v).sum::<f64>() - b;
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi -= d * qi;
            }
        }
    }

    /// Dykstra's method between the affine hull and the PSD cone, started
    /// at `J0`; the affine step needs no correction term. Returns the
    /// affine-exact iterate once `λ_min ≥ −tol` and successive iterates move
    /// by at most `tol`.
    pub fn dykstra_project(&self, j0: &MatrixC, tol: f64, max_iter: usize) -> Result<ChannelMap> {
        let side = self.n * self.n;
        if j0.shape() != (side, side) {
            return Err(Error::dim(format!("J0 must be {side}x{side}")));
        }
        let y = self.dykstra_coords(&self.choi_to_coords(j0), tol, max_iter)?;
        Ok(self.coords_to_channel(&y))
    }

    pub(crate) fn dykstra_coords(&self, start: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let p = self.coord_dim();
        let mut x = start.to_vec();
        let mut corr = vec![0.0; p];
        let mut prev = start.to_vec();
        let mut history = Vec::new();
        let mut residual = f64::INFINITY;
        for it in 0..max_iter.max(1) {
            let mut y = x.clone();
            self.project_affine(&mut y);
            let step = prev.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let z: Vec<f64> = y.iter().zip(&corr).map(|(a, b)| a + b).collect();
            let eig = hermitian_eig(&self.coords_to_matrix(&z))?;
            let lmin_z = eig.eigenvalues.first().copied().unwrap_or(0.0);
            x = if lmin_z >= 0.0 {
                z.clone()
            } else {
                self.matrix_to_coords(&eig.reconstruct_with(|l| l.max(0.0)))
            };
            corr = z.iter().zip(&x).map(|(a, b)| a - b).collect();
            if step <= tol {
                let lmin = hermitian_eig(&self.coords_to_matrix(&y))?.eigenvalues.first().copied().unwrap_or(0.0);
                residual = step.max(-lmin);
                if lmin >= -tol {
                    return Ok(y);
                }
            } else {
                residual = step;
            }
            if it % 100 == 0 {
                history.push(residual);
            }
            prev = y;
        }
        Err(Error::NonConvergence {
            method: "dykstra",
            iterations: max_iter,
            residual,
            history,
        })
    }
}

/// Basis of the smallest face of the PSD cone that can contain members,
/// from the fixed positive elements with a kernel.
///
/// If `θ(h) = h` with `h ⪰ 0`, then `Tr((hᵀ ⊗ vv*) J) = ⟨v, h v⟩ = 0` for
/// `v ∈ ker h`, hence `J(u ⊗ v) = 0` for `u ∈ range(hᵀ)`. Every fixed
/// Hermitian `h` yields two such elements, `h − λ_min I` and `λ_max I − h`
/// (the latter only when `I` is fixed).
fn minimal_face(n: usize, constraints: &[Constraint]) -> Result<MatrixC> {
    let unital = constraints.iter().any(|c| matches!(c, Constraint::Unital));
    let mut herm: Vec<MatrixC> = Vec::new();
    for c in constraints {
        if let Constraint::FixPoint(x) = c {
            // θ Hermitian-preserving, so Hermitian and skew parts are fixed too
            let re = x.hermitian_part();
            let im = (x - &x.adjoint()).scale(C64::new(0.0, -0.5));
            for h in [re, im] {
                if h.frobenius_norm() > tolerance::ALGEBRAIC {
                    herm.push(h);
                }
            }
        }
    }
    let side = n * n;
    let mut gram = MatrixC::zeros(side, side);
    let mut rng = ChaCha8Rng::seed_from_u64(FACIAL_SEED);
    let mut candidates: Vec<MatrixC> = herm.clone();
    if !herm.is_empty() {
        for _ in 0..FACIAL_SAMPLES_PER_DIM * side + 8 {
            let mut h = MatrixC::zeros(n, n);
            for g in &herm {
                h.axpy(C64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0), g);
            }
            candidates.push(h);
        }
    }
    for h in &candidates {
        let eig = hermitian_eig(&h.hermitian_part())?;
        let lo = eig.eigenvalues[0];
        let hi = eig.eigenvalues[n - 1];
        let spread = hi - lo;
        if spread <= tolerance::ALGEBRAIC * h.frobenius_norm().max(1.0) {
            continue;
        }
        let cut = tolerance::KERNEL * spread;
        let bottom: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] - lo <= cut).collect();
        let top: Vec<usize> = (0..n).filter(|&k| hi - eig.eigenvalues[k] <= cut).collect();
        let mut shifts = vec![(bottom.clone(), (0..n).filter(|k| !bottom.contains(k)).collect::<Vec<_>>())];
        if unital {
            shifts.push((top.clone(), (0..n).filter(|k| !top.contains(k)).collect()));
        }
        for (kernel_idx, range_idx) in shifts {
            for &r in &range_idx {
                let u: Vec<C64> = eig.eigenvectors.col(r).iter().map(|z| z.conj()).collect();
                for &k in &kernel_idx {
                    let v = eig.eigenvectors.col(k);
                    let uv = MatrixC::column(&u).kron(&MatrixC::column(&v));
                    gram = &gram + &(&uv * &uv.adjoint());
                }
            }
        }
    }
    let eig = hermitian_eig(&gram.hermitian_part())?;
    let scale = eig.eigenvalues.last().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<Vec<C64>> = (0..side)
        .filter(|&k| eig.eigenvalues[k] <= tolerance::KERNEL * scale)
        .map(|k| eig.eigenvectors.col(k))
        .collect();
    if keep.is_empty() {
        return Err(Error::Infeasible("facial reduction leaves only J = 0".into()));
    }
    Ok(MatrixC::from_columns(side, &keep))
}

/// `𝒮 = {UCP θ : θ(x) = x ∀x ∈ E}` for an operator system `E`.
pub fn build_system_set(e: &OperatorSubspace) -> Result<FeasibleSet> {
    if !e.is_system() {
        return Err(Error::domain(format!(
            "E is not an operator system (unital: {}, self-adjoint: {}); take the Paulsen lift first",
            e.is_unital(),
            e.is_selfadjoint()
        )));
    }
    let n = e.ambient();
    let mut constraints: Vec<Constraint> =
        e.basis().hermitian_generators().into_iter().map(Constraint::FixPoint).collect();
    constraints.push(Constraint::Unital);
    FeasibleSet::new(n, constraints, ChannelMap::identity(n))
}
