//! Per-unit-length momentum and angular-momentum operators on the truncated
//! mode space, their commutation table, and a quadrature oracle for every
//! matrix element.
//!
//! All observables here are quadratic forms `Û = Σ a†_A U^{AA'} a_{A'}` and
//! are represented by their coefficient matrix over the [`ModeSpace`]
//! enumeration. With `theta0 = 2 lambda_bar / w0` the matrices take exact
//! ladder form:
//!
//! ```text
//! Px = (θ0/2i) δ_{μμ'} δ_{mm'} (√n' δ_{n',n+1} - √n δ_{n,n'+1})      Pz = 1
//! Jx = (λ̄/θ0) δ_{μμ'} δ_{nn'} (√m δ_{m,m'+1} + √m' δ_{m',m+1})
//! Sz = -iλ̄ ε_{μμ'3} δ_{nn'} δ_{mm'}
//! Lz = -iλ̄ δ_{μμ'} (√(nm') δ_{n,n'+1} δ_{m',m+1} - √(n'm) δ_{n',n+1} δ_{m,m'+1})
//! ```
//!
//! The transverse orbital components behave like transverse *coordinates*
//! (`Lx ~ y`, `Ly ~ -x`), so the commutation table is anomalous for a
//! collimated beam: `[Lx, Ly] = 0` and the structure constants carry
//! `(1 - δ)` factors instead of the canonical Levi-Civita symbol. The table
//! is verified on the interior of the truncated space, where ladder
//! products are unaffected by the cutoff.
//!
//! Everything is reported in units of the global prefactor
//! `hbar*omega0/(c^2 T)`, which is never multiplied in. The `theta0`, `λ̄`
//! and `λ̄/θ0` scale factors *are* multiplied into the stored entries; the
//! [`UnitsTag`] records which class an operator belongs to.

use crate::beam::BeamParams;
use crate::error::Error;
use crate::modes::{hermite_normalized, ModeSpace, GH_NODES, SIMPSON_POINTS};
use crate::quad::{simpson_weights, uniform_nodes, GaussHermite};
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

type CMatrix = DMatrix<Complex64>;

/// Scale-factor class of an operator's entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitsTag {
    Dimensionless,
    Theta0,
    LambdaBar,
    LambdaBarOverTheta0,
}

impl UnitsTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnitsTag::Dimensionless => "dimensionless",
            UnitsTag::Theta0 => "theta0",
            UnitsTag::LambdaBar => "lambda_bar",
            UnitsTag::LambdaBarOverTheta0 => "lambda_bar_over_theta0",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dimensionless" => Ok(UnitsTag::Dimensionless),
            "theta0" => Ok(UnitsTag::Theta0),
            "lambda_bar" => Ok(UnitsTag::LambdaBar),
            "lambda_bar_over_theta0" => Ok(UnitsTag::LambdaBarOverTheta0),
            other => Err(Error::Parse(format!("unknown units tag {other:?}"))),
        }
    }
}

/// Tolerance for declaring a matrix Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A quadratic-form observable over a [`ModeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticOperator {
    matrix: CMatrix,
    units_tag: UnitsTag,
    hermitian: bool,
}

impl QuadraticOperator {
    /// Wrap a matrix claimed to be Hermitian; the claim is checked against
    /// [`HERMITIAN_TOL`] in max norm.
    pub fn hermitian(matrix: CMatrix, units_tag: UnitsTag) -> Result<Self> {
        let dev = max_abs(&(&matrix - matrix.adjoint()));
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian: max |M - M†| = {dev:e}"
            )));
        }
        Ok(QuadraticOperator {
            matrix,
            units_tag,
            hermitian: true,
        })
    }

    /// Wrap a general (not necessarily Hermitian) matrix.
    pub fn general(matrix: CMatrix, units_tag: UnitsTag) -> Self {
        QuadraticOperator {
            matrix,
            units_tag,
            hermitian: false,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn units_tag(&self) -> UnitsTag {
        self.units_tag
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Matrix with all rows and columns outside the interior (both
    /// transverse indices at least `margin` below the cutoff) zeroed.
    pub fn restrict_interior(&self, space: &ModeSpace, margin: usize) -> CMatrix {
        let mut out = self.matrix.clone();
        for i in 0..out.nrows() {
            let keep_row = space.is_interior(space.mode_at(i), margin);
            for j in 0..out.ncols() {
                if !keep_row || !space.is_interior(space.mode_at(j), margin) {
                    out[(i, j)] = Complex64::default();
                }
            }
        }
        out
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()))
}

/// Linear-momentum component triple.
#[derive(Debug, Clone)]
pub struct POperators {
    pub px: QuadraticOperator,
    pub py: QuadraticOperator,
    pub pz: QuadraticOperator,
}

/// Angular-momentum components plus the split of the longitudinal one into
/// spin and orbital parts (`jz = sz + lz`).
#[derive(Debug, Clone)]
pub struct JOperators {
    pub jx: QuadraticOperator,
    pub jy: QuadraticOperator,
    pub jz: QuadraticOperator,
    pub sz: QuadraticOperator,
    pub lz: QuadraticOperator,
}

/* Ladder building blocks *****************************************************/

/// Annihilation ladder `a[n][n'] = √n' δ_{n',n+1}` of size `side`.
fn annihilation(side: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(side, side);
    for n in 0..side - 1 {
        a[(n, n + 1)] = ((n + 1) as f64).sqrt();
    }
    a
}

fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

fn identity_c(side: usize) -> CMatrix {
    CMatrix::identity(side, side)
}

/// `kron(I_2, kron(a, b))` over the μ-major enumeration.
fn orbital_kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    identity_c(2).kronecker(&a.kronecker(b))
}

/* Operator construction ******************************************************/

/// Momentum operators: `Px`, `Py` are `(θ0/2i)` ladder differences acting on
/// `n` and `m` respectively; `Pz` is the identity (photon number per unit
/// length).
pub fn build_p(space: &ModeSpace, params: &BeamParams) -> POperators {
    let side = space.ncut() + 1;
    let a = annihilation(side);
    let minus = to_complex(&(&a - &a.transpose()));
    let eye = identity_c(side);
    let factor = Complex64::new(0.0, -0.5 * params.theta0());

    let px = orbital_kron(&(&minus * factor), &eye);
    let py = orbital_kron(&eye, &(&minus * factor));
    let pz = identity_c(space.dim());

    POperators {
        px: QuadraticOperator::hermitian(px, UnitsTag::Theta0).expect("ladder form"),
        py: QuadraticOperator::hermitian(py, UnitsTag::Theta0).expect("ladder form"),
        pz: QuadraticOperator::hermitian(pz, UnitsTag::Dimensionless).expect("identity"),
    }
}

/// Angular-momentum operators. The transverse components are position-like
/// ladder sums scaled by `λ̄/θ0 = w0/2`; the longitudinal one splits into
/// the polarization (spin) part `Sz` and the mode-space (orbital) part `Lz`.
pub fn build_j(space: &ModeSpace, params: &BeamParams) -> JOperators {
    let side = space.ncut() + 1;
    let a = to_complex(&annihilation(side));
    let adag = a.adjoint();
    let plus = &a + &adag;
    let eye = identity_c(side);
    let lam = params.lambda_bar();
    let w_half = Complex64::new(lam / params.theta0(), 0.0);

    let jx = orbital_kron(&eye, &(&plus * w_half));
    let jy = orbital_kron(&(&plus * (-w_half)), &eye);

    // spin: -iλ̄ ε_{μμ'3} on the 2x2 polarization block
    let minus_i_lam = Complex64::new(0.0, -lam);
    let mut sigma = CMatrix::zeros(2, 2);
    sigma[(0, 1)] = minus_i_lam;
    sigma[(1, 0)] = -minus_i_lam;
    let side2 = side * side;
    let sz = sigma.kronecker(&identity_c(side2));

    // orbital: -iλ̄ (a†_n ⊗ a_m - a_n ⊗ a†_m)
    let lz_orb = (adag.kronecker(&a) - a.kronecker(&adag)) * minus_i_lam;
    let lz = identity_c(2).kronecker(&lz_orb);
    let jz = &sz + &lz;

    JOperators {
        jx: QuadraticOperator::hermitian(jx, UnitsTag::LambdaBarOverTheta0).expect("ladder form"),
        jy: QuadraticOperator::hermitian(jy, UnitsTag::LambdaBarOverTheta0).expect("ladder form"),
        jz: QuadraticOperator::hermitian(jz, UnitsTag::LambdaBar).expect("ladder form"),
        sz: QuadraticOperator::hermitian(sz, UnitsTag::LambdaBar).expect("ladder form"),
        lz: QuadraticOperator::hermitian(lz, UnitsTag::LambdaBar).expect("ladder form"),
    }
}

/// Verify the Kronecker split `J_a = S_a ⊗ I_L + I_S ⊗ L_a`: rebuild all
/// three components from a 2x2 spin block and orbital-only matrices, and
/// return the largest reconstruction residual. The transverse spin blocks
/// vanish identically.
pub fn tensor_split_check(space: &ModeSpace, params: &BeamParams) -> f64 {
    let side = space.ncut() + 1;
    let side2 = side * side;
    let j = build_j(space, params);
    let lam = params.lambda_bar();

    let a = to_complex(&annihilation(side));
    let adag = a.adjoint();
    let plus = &a + &adag;
    let eye = identity_c(side);
    let w_half = Complex64::new(lam / params.theta0(), 0.0);
    let minus_i_lam = Complex64::new(0.0, -lam);

    // orbital-only blocks over (n, m)
    let lx_orb = eye.kronecker(&(&plus * w_half));
    let ly_orb = (&plus * (-w_half)).kronecker(&eye);
    let lz_orb = (adag.kronecker(&a) - a.kronecker(&adag)) * minus_i_lam;

    // spin blocks: transverse are zero, longitudinal is -iλ̄ ε
    let s_zero = CMatrix::zeros(2, 2);
    let mut s_z = CMatrix::zeros(2, 2);
    s_z[(0, 1)] = minus_i_lam;
    s_z[(1, 0)] = -minus_i_lam;

    let rebuild = |s_block: &CMatrix, l_orb: &CMatrix| -> CMatrix {
        s_block.kronecker(&identity_c(side2)) + identity_c(2).kronecker(l_orb)
    };

    let rx = rebuild(&s_zero, &lx_orb) - j.jx.matrix();
    let ry = rebuild(&s_zero, &ly_orb) - j.jy.matrix();
    let rz = rebuild(&s_z, &lz_orb) - j.jz.matrix();
    max_abs(&rx).max(max_abs(&ry)).max(max_abs(&rz))
}

/// Matrix commutator `[U, V] = UV - VU`.
///
/// The result is anti-Hermitian when both inputs are Hermitian and is
/// returned untagged (derived scale factors are products of the inputs').
pub fn commutator(u: &QuadraticOperator, v: &QuadraticOperator) -> Result<QuadraticOperator> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let m = u.matrix() * v.matrix() - v.matrix() * u.matrix();
    Ok(QuadraticOperator::general(m, UnitsTag::Dimensionless))
}

/* Commutation table **********************************************************/

/// Outcome of identifying one commutator `[U, V]` against `iλ̄ f W`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutatorReport {
    /// Names of the commuted pair, e.g. `("Lx", "Pz")`.
    pub pair: (String, String),
    /// Max-norm residual, relative to the identified right-hand side (or to
    /// the product of the input norms when the result is zero).
    pub residual_norm: f64,
    /// Name of the identified right-hand-side operator, or `"zero"`.
    pub identified_rhs: String,
    /// Coefficient `f` in `[U, V] = iλ̄ f W`.
    pub coefficient: [f64; 2],
}

impl CommutatorReport {
    pub fn coefficient_complex(&self) -> Complex64 {
        Complex64::new(self.coefficient[0], self.coefficient[1])
    }
}

/// Expected right-hand side of `[U, V] = iλ̄ f W` for the canonical
/// operator names: `Some((w_name, f))` or `None` when the commutator
/// vanishes. Encodes `f_JJ = ε_abc (1 - δ_cz)` and `f_LP = ε_abc (1 - δ_bz)`
/// with all spin and momentum-momentum pairs commuting.
pub fn expected_commutator(u: &str, v: &str) -> Option<(&'static str, f64)> {
    match (u, v) {
        ("Lx", "Lz") => Some(("Ly", -1.0)),
        ("Lz", "Lx") => Some(("Ly", 1.0)),
        ("Ly", "Lz") => Some(("Lx", 1.0)),
        ("Lz", "Ly") => Some(("Lx", -1.0)),
        ("Lx", "Py") => Some(("Pz", 1.0)),
        ("Py", "Lx") => Some(("Pz", -1.0)),
        ("Ly", "Px") => Some(("Pz", -1.0)),
        ("Px", "Ly") => Some(("Pz", 1.0)),
        ("Lz", "Px") => Some(("Py", 1.0)),
        ("Px", "Lz") => Some(("Py", -1.0)),
        ("Lz", "Py") => Some(("Px", -1.0)),
        ("Py", "Lz") => Some(("Px", 1.0)),
        _ => None,
    }
}

/// Canonical operator set for the commutation table, in report order.
pub fn named_operator_set(
    space: &ModeSpace,
    params: &BeamParams,
) -> Vec<(&'static str, QuadraticOperator)> {
    let p = build_p(space, params);
    let j = build_j(space, params);
    let zero = QuadraticOperator::hermitian(
        CMatrix::zeros(space.dim(), space.dim()),
        UnitsTag::LambdaBar,
    )
    .expect("zero is Hermitian");
    vec![
        ("Lx", j.jx),
        ("Ly", j.jy),
        ("Lz", j.lz),
        ("Px", p.px),
        ("Py", p.py),
        ("Pz", p.pz),
        ("Sx", zero.clone()),
        ("Sy", zero),
        ("Sz", j.sz),
    ]
}

/// Evaluate every unordered pair among `{Lx, Ly, Lz, Px, Py, Pz, Sx, Sy,
/// Sz}` on the interior of the truncated space (both transverse indices at
/// least two below the cutoff) and identify each commutator as
/// `iλ̄ f · {named operator}` or zero.
///
/// Needs `ncut >= 3` so the interior is non-trivial.
pub fn ccr_table(space: &ModeSpace, params: &BeamParams) -> Result<Vec<CommutatorReport>> {
    if space.ncut() < 3 {
        return Err(Error::NcutTooSmall {
            ncut: space.ncut(),
            min: 3,
        });
    }
    let margin = 2;
    let ops = named_operator_set(space, params);
    let interiors: Vec<(&str, CMatrix)> = ops
        .iter()
        .map(|(name, op)| (*name, op.restrict_interior(space, margin)))
        .collect();
    let i_lam = Complex64::new(0.0, params.lambda_bar());

    let mut reports = Vec::new();
    for i in 0..ops.len() {
        for k in i + 1..ops.len() {
            let (name_u, op_u) = &ops[i];
            let (name_v, op_v) = &ops[k];
            let comm = commutator(op_u, op_v)?;
            let c_int = comm.restrict_interior(space, margin);
            let c_norm = max_abs(&c_int);
            let scale = op_u.max_norm() * op_v.max_norm();

            // zero classification
            if c_norm <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                reports.push(CommutatorReport {
                    pair: (name_u.to_string(), name_v.to_string()),
                    residual_norm: if scale > 0.0 { c_norm / scale } else { 0.0 },
                    identified_rhs: "zero".to_string(),
                    coefficient: [0.0, 0.0],
                });
                continue;
            }

            // best match among the candidates: coef = <W, C> / (iλ̄ <W, W>)
            let mut best: Option<(&str, Complex64, f64)> = None;
            for (cand_name, cand_int) in &interiors {
                let w_sq: f64 = cand_int.iter().map(|c| c.norm_sqr()).sum();
                if w_sq == 0.0 {
                    continue;
                }
                let inner: Complex64 = cand_int
                    .iter()
                    .zip(c_int.iter())
                    .map(|(w, c)| w.conj() * c)
                    .sum();
                let coef = inner / (i_lam * w_sq);
                let rhs = cand_int * (i_lam * coef);
                let residual = max_abs(&(&c_int - &rhs)) / max_abs(&rhs);
                if best.is_none() || residual < best.unwrap().2 {
                    best = Some((cand_name, coef, residual));
                }
            }
            let (rhs_name, coef, residual) =
                best.expect("candidate set contains nonzero operators");
            reports.push(CommutatorReport {
                pair: (name_u.to_string(), name_v.to_string()),
                residual_norm: residual,
                identified_rhs: rhs_name.to_string(),
                coefficient: [coef.re, coef.im],
            });
        }
    }
    Ok(reports)
}

/* Quadrature oracle **********************************************************/

/// Entry whose two-resolution quadrature difference exceeded the
/// convergence budget.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureFlag {
    pub operator: &'static str,
    pub row: usize,
    pub col: usize,
    pub estimate: f64,
}

/// Relative convergence budget for oracle entries.
const ORACLE_CONVERGENCE_TOL: f64 = 1e-7;

/// Largest truncation order the quadrature oracle accepts.
const ORACLE_NCUT_MAX: usize = 8;

/// Scalar integrals over one spatial mode pair `(n m | n' m')`.
#[derive(Clone, Copy, Default)]
struct PairIntegrals {
    s00: Complex64,  // ∫ ψ* ψ'
    sdx: Complex64,  // ∫ ψ* ∂x ψ'
    sdy: Complex64,  // ∫ ψ* ∂y ψ'
    sx: Complex64,   // ∫ ψ* x ψ'
    sy: Complex64,   // ∫ ψ* y ψ'
    sxdy: Complex64, // ∫ ψ* x ∂y ψ'
    sydx: Complex64, // ∫ ψ* y ∂x ψ'
}

/// Tabulated 1D mode values and derivatives on a node set.
struct AxisTables {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `values[n][i] = u_n(x_i, z)`
    values: Vec<Vec<Complex64>>,
    /// `derivs[n][i] = ∂x u_n(x_i, z)`
    derivs: Vec<Vec<Complex64>>,
}

impl AxisTables {
    /// Waist plane: Gauss-Hermite nodes in the scaled coordinate. Weights
    /// absorb the shared Gaussian `e^{-t²}`, so the tabulated "values" are
    /// the modes with half the Gaussian stripped; products of two of them
    /// against one weight reproduce `u_n u_n' dx` exactly.
    fn waist(nmax: usize, params: &BeamParams, points: usize) -> Self {
        let gh = GaussHermite::new(points);
        let w0 = params.w0();
        let norm = (2.0 / std::f64::consts::PI).powf(0.25) / w0.sqrt();
        let jacobian = w0 / std::f64::consts::SQRT_2;
        let mut values = vec![Vec::with_capacity(points); nmax + 1];
        let mut derivs = vec![Vec::with_capacity(points); nmax + 1];
        for &t in &gh.nodes {
            let h = hermite_normalized(nmax + 1, t);
            for n in 0..=nmax {
                values[n].push(Complex64::new(norm * h[n], 0.0));
                // ladder derivative: (√n u_{n-1} - √(n+1) u_{n+1}) / w0
                let lower = if n > 0 {
                    (n as f64).sqrt() * h[n - 1]
                } else {
                    0.0
                };
                let upper = ((n + 1) as f64).sqrt() * h[n + 1];
                derivs[n].push(Complex64::new(norm * (lower - upper) / w0, 0.0));
            }
        }
        AxisTables {
            nodes: gh.nodes.iter().map(|&t| t * jacobian).collect(),
            weights: gh.weights.iter().map(|&w| w * jacobian).collect(),
            values,
            derivs,
        }
    }

    /// Off-waist plane: Simpson nodes over `[-8 w(z), 8 w(z)]` with the full
    /// complex mode values.
    fn off_waist(nmax: usize, params: &BeamParams, z: f64, points: usize) -> Self {
        let half = crate::modes::EXTENT_FACTOR * params.beam_radius(z);
        let (xs, h) = uniform_nodes(points, half);
        let weights = simpson_weights(points, h);
        let values: Vec<Vec<Complex64>> = (0..=nmax)
            .map(|n| {
                xs.iter()
                    .map(|&x| crate::modes::hg1d(n, x, z, params))
                    .collect()
            })
            .collect();
        let derivs: Vec<Vec<Complex64>> = (0..=nmax)
            .map(|n| {
                xs.iter()
                    .map(|&x| crate::modes::hg1d_dx(n, x, z, params))
                    .collect()
            })
            .collect();
        AxisTables {
            nodes: xs,
            weights,
            values,
            derivs,
        }
    }
}

/// 2D quadrature of all seven pair integrals for every spatial pair.
fn pair_integral_table(space: &ModeSpace, tables: &AxisTables) -> Vec<PairIntegrals> {
    let side = space.ncut() + 1;
    let pairs: Vec<(usize, usize, usize, usize)> = (0..side)
        .flat_map(|n| (0..side).map(move |m| (n, m)))
        .flat_map(|(n, m)| (0..side).flat_map(move |np| (0..side).map(move |mp| (n, m, np, mp))))
        .collect();

    pairs
        .par_iter()
        .map(|&(n, m, np, mp)| {
            let un = &tables.values[n];
            let unp = &tables.values[np];
            let dunp = &tables.derivs[np];
            let vm = &tables.values[m];
            let vmp = &tables.values[mp];
            let dvmp = &tables.derivs[mp];
            let mut acc = PairIntegrals::default();
            for (i, (&x, &wx)) in tables.nodes.iter().zip(&tables.weights).enumerate() {
                let bra_x = un[i].conj();
                let ket_x = unp[i];
                let dket_x = dunp[i];
                // y-direction inner sums for this x
                let mut r00 = Complex64::default();
                let mut rdy = Complex64::default();
                let mut ry = Complex64::default();
                for (j, (&y, &wy)) in tables.nodes.iter().zip(&tables.weights).enumerate() {
                    let bra_y = vm[j].conj();
                    let pair_y = bra_y * vmp[j];
                    let pair_dy = bra_y * dvmp[j];
                    r00 += wy * pair_y;
                    rdy += wy * pair_dy;
                    ry += wy * y * pair_y;
                }
                let fx = wx * bra_x;
                acc.s00 += fx * ket_x * r00;
                acc.sdx += fx * dket_x * r00;
                acc.sdy += fx * ket_x * rdy;
                acc.sx += fx * x * ket_x * r00;
                acc.sy += fx * ket_x * ry;
                acc.sxdy += fx * x * ket_x * rdy;
                acc.sydx += fx * dket_x * ry;
            }
            acc
        })
        .collect()
}

fn spatial_pair_index(side: usize, n: usize, m: usize, np: usize, mp: usize) -> usize {
    ((n * side + m) * side + np) * side + mp
}

/// Assemble the momentum matrices from the pair integrals of the defining
/// integral `∫ ψ* (ẑ - iλ̄ ∇⊥) ψ' d²x`.
fn assemble_p(space: &ModeSpace, params: &BeamParams, table: &[PairIntegrals]) -> [CMatrix; 3] {
    let dim = space.dim();
    let side = space.ncut() + 1;
    let minus_i_lam = Complex64::new(0.0, -params.lambda_bar());
    let mut px = CMatrix::zeros(dim, dim);
    let mut py = CMatrix::zeros(dim, dim);
    let mut pz = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let a = space.mode_at(row);
        for col in 0..dim {
            let b = space.mode_at(col);
            if a.mu != b.mu {
                continue;
            }
            let ints = &table[spatial_pair_index(side, a.n, a.m, b.n, b.m)];
            px[(row, col)] = minus_i_lam * ints.sdx;
            py[(row, col)] = minus_i_lam * ints.sdy;
            pz[(row, col)] = ints.s00;
        }
    }
    [px, py, pz]
}

/// Assemble the angular-momentum matrices from the defining integral with
/// `r = (x, y, z)`:
///
/// ```text
/// Jx = ∫ ψ* (y + iλ̄ z ∂y) ψ'        Jy = -∫ ψ* (x + iλ̄ z ∂x) ψ'
/// Jz = -iλ̄ [ ε_{μμ'3} ∫ ψ* ψ' + δ_{μμ'} ∫ ψ* (x ∂y - y ∂x) ψ' ]
/// ```
fn assemble_j(
    space: &ModeSpace,
    params: &BeamParams,
    table: &[PairIntegrals],
    z: f64,
) -> [CMatrix; 5] {
    let dim = space.dim();
    let side = space.ncut() + 1;
    let lam = params.lambda_bar();
    let i_lam_z = Complex64::new(0.0, lam * z);
    let minus_i_lam = Complex64::new(0.0, -lam);
    let mut jx = CMatrix::zeros(dim, dim);
    let mut jy = CMatrix::zeros(dim, dim);
    let mut sz = CMatrix::zeros(dim, dim);
    let mut lz = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let a = space.mode_at(row);
        for col in 0..dim {
            let b = space.mode_at(col);
            let ints = &table[spatial_pair_index(side, a.n, a.m, b.n, b.m)];
            if a.mu == b.mu {
                jx[(row, col)] = ints.sy + i_lam_z * ints.sdy;
                jy[(row, col)] = -(ints.sx + i_lam_z * ints.sdx);
                lz[(row, col)] = minus_i_lam * (ints.sxdy - ints.sydx);
            } else {
                // ε_{μμ'3}: +1 for (1,2), -1 for (2,1)
                let eps = if a.mu == 1 { 1.0 } else { -1.0 };
                sz[(row, col)] = minus_i_lam * eps * ints.s00;
            }
        }
    }
    let jz = &sz + &lz;
    [jx, jy, jz, sz, lz]
}

fn collect_flags(
    names: &[&'static str],
    fine: &[CMatrix],
    coarse: &[CMatrix],
) -> Vec<QuadratureFlag> {
    let mut flags = Vec::new();
    for ((name, f), c) in names.iter().zip(fine).zip(coarse) {
        let scale = max_abs(f).max(f64::MIN_POSITIVE);
        for row in 0..f.nrows() {
            for col in 0..f.ncols() {
                let estimate = (f[(row, col)] - c[(row, col)]).norm() / scale;
                if estimate > ORACLE_CONVERGENCE_TOL {
                    flags.push(QuadratureFlag {
                        operator: name,
                        row,
                        col,
                        estimate,
                    });
                }
            }
        }
    }
    flags
}

fn oracle_tables(
    space: &ModeSpace,
    params: &BeamParams,
    z: f64,
) -> Result<(Vec<PairIntegrals>, Vec<PairIntegrals>)> {
    if space.ncut() > ORACLE_NCUT_MAX {
        return Err(Error::InvalidArgument(format!(
            "quadrature oracle limited to ncut <= {ORACLE_NCUT_MAX}, got {}",
            space.ncut()
        )));
    }
    let nmax = space.ncut();
    let (fine, coarse) = if z == 0.0 {
        (
            AxisTables::waist(nmax, params, GH_NODES),
            AxisTables::waist(nmax, params, GH_NODES * 3 / 4),
        )
    } else {
        (
            AxisTables::off_waist(nmax, params, z, SIMPSON_POINTS),
            AxisTables::off_waist(nmax, params, z, SIMPSON_POINTS * 3 / 4),
        )
    };
    Ok((
        pair_integral_table(space, &fine),
        pair_integral_table(space, &coarse),
    ))
}

/// Momentum matrix elements by 2D quadrature of the defining integral at
/// plane `z`, with derivatives from the analytic Hermite recurrence.
///
/// Entries whose two-resolution difference exceeds `1e-7` (relative to the
/// family max norm) are flagged. Truncation orders above 8 are rejected on
/// cost grounds.
pub fn oracle_p_operators_at(
    space: &ModeSpace,
    params: &BeamParams,
    z: f64,
) -> Result<(POperators, Vec<QuadratureFlag>)> {
    let (fine_table, coarse_table) = oracle_tables(space, params, z)?;
    let fine = assemble_p(space, params, &fine_table);
    let coarse = assemble_p(space, params, &coarse_table);
    let flags = collect_flags(&["Px", "Py", "Pz"], &fine, &coarse);
    let [px, py, pz] = fine;
    Ok((
        POperators {
            px: QuadraticOperator::hermitian(px, UnitsTag::Theta0)?,
            py: QuadraticOperator::hermitian(py, UnitsTag::Theta0)?,
            pz: QuadraticOperator::hermitian(pz, UnitsTag::Dimensionless)?,
        },
        flags,
    ))
}

/// Waist-plane momentum oracle.
pub fn oracle_p_operators(
    space: &ModeSpace,
    params: &BeamParams,
) -> Result<(POperators, Vec<QuadratureFlag>)> {
    oracle_p_operators_at(space, params, 0.0)
}

/// Angular-momentum matrix elements by 2D quadrature at plane `z`, with
/// `r = (x, y, z)` in the defining integral. The assembled matrices are
/// z-independent: the explicit `z` terms cancel the migration of the mode
/// pattern exactly.
pub fn oracle_j_operators_at(
    space: &ModeSpace,
    params: &BeamParams,
    z: f64,
) -> Result<(JOperators, Vec<QuadratureFlag>)> {
    let (fine_table, coarse_table) = oracle_tables(space, params, z)?;
    let fine = assemble_j(space, params, &fine_table, z);
    let coarse = assemble_j(space, params, &coarse_table, z);
    let flags = collect_flags(&["Jx", "Jy", "Jz", "Sz", "Lz"], &fine, &coarse);
    let [jx, jy, jz, sz, lz] = fine;
    Ok((
        JOperators {
            jx: QuadraticOperator::hermitian(jx, UnitsTag::LambdaBarOverTheta0)?,
            jy: QuadraticOperator::hermitian(jy, UnitsTag::LambdaBarOverTheta0)?,
            jz: QuadraticOperator::hermitian(jz, UnitsTag::LambdaBar)?,
            sz: QuadraticOperator::hermitian(sz, UnitsTag::LambdaBar)?,
            lz: QuadraticOperator::hermitian(lz, UnitsTag::LambdaBar)?,
        },
        flags,
    ))
}

/// Waist-plane angular-momentum oracle.
pub fn oracle_j_operators(
    space: &ModeSpace,
    params: &BeamParams,
) -> Result<(JOperators, Vec<QuadratureFlag>)> {
    oracle_j_operators_at(space, params, 0.0)
}

/* Sparse CSV export **********************************************************/

/// Serialize the nonzero entries as coordinate-sparse CSV with header
/// `mu,n,m,mu',n',m',re,im,units_tag`. Floats use the shortest
/// representation that round-trips exactly.
pub fn operator_to_csv(op: &QuadraticOperator, space: &ModeSpace) -> String {
    let mut out = String::from("mu,n,m,mu',n',m',re,im,units_tag\n");
    let m = op.matrix();
    for row in 0..m.nrows() {
        let a = space.mode_at(row);
        for col in 0..m.ncols() {
            let v = m[(row, col)];
            if v.re != 0.0 || v.im != 0.0 {
                let b = space.mode_at(col);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    a.mu,
                    a.n,
                    a.m,
                    b.mu,
                    b.n,
                    b.m,
                    v.re,
                    v.im,
                    op.units_tag().as_str()
                ));
            }
        }
    }
    out
}

/// Parse a coordinate-sparse CSV produced by [`operator_to_csv`].
pub fn operator_from_csv(text: &str, space: &ModeSpace) -> Result<QuadraticOperator> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty operator CSV".into()))?;
    if header.trim() != "mu,n,m,mu',n',m',re,im,units_tag" {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let dim = space.dim();
    let mut matrix = CMatrix::zeros(dim, dim);
    let mut tag: Option<UnitsTag> = None;
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse(format!(
                "line {}: expected 9 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse_usize = |s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let parse_f64 = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let a = crate::modes::ModeIndex::new(
            parse_usize(fields[0])? as u8,
            parse_usize(fields[1])?,
            parse_usize(fields[2])?,
        )?;
        let b = crate::modes::ModeIndex::new(
            parse_usize(fields[3])? as u8,
            parse_usize(fields[4])?,
            parse_usize(fields[5])?,
        )?;
        let row = space.index_of(a)?;
        let col = space.index_of(b)?;
        matrix[(row, col)] = Complex64::new(parse_f64(fields[6])?, parse_f64(fields[7])?);
        let line_tag = UnitsTag::parse(fields[8].trim())?;
        match tag {
            None => tag = Some(line_tag),
            Some(existing) if existing != line_tag => {
                return Err(Error::Parse(format!(
                    "line {}: mixed units tags in one operator file",
                    lineno + 1
                )));
            }
            _ => {}
        }
    }
    let tag = tag.unwrap_or(UnitsTag::Dimensionless);
    let hermitian = max_abs(&(&matrix - matrix.adjoint())) <= HERMITIAN_TOL;
    Ok(if hermitian {
        QuadraticOperator::hermitian(matrix, tag)?
    } else {
        QuadraticOperator::general(matrix, tag)
    })
}
