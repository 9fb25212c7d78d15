use nalgebra::DMatrix;
use num_complex::Complex64;

use super::NumericError;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[0.0.into(), -I, I, 0.0.into()])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[1.0.into(), 0.0.into(), 0.0.into(), (-1.0).into()])
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn expm(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// `‖U†U − I‖`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    op_norm(&(u.adjoint() * u - identity(u.nrows())))
}

/// `‖M + M†‖`, zero for anti-Hermitian `M`.
pub fn anti_hermitian_defect(m: &CMatrix) -> f64 {
    op_norm(&(m + m.adjoint()))
}

/// Diagonal of the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Eigenvalues closer than this to the negative real axis are refused.
pub const BRANCH_MARGIN: f64 = 1e-6;

fn sqrt_denman_beavers(x: &CMatrix) -> Result<CMatrix, NumericError> {
    let n = x.nrows();
    let mut y = x.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().ok_or(NumericError::Singular)?;
        let z_inv = z.clone().try_inverse().ok_or(NumericError::Singular)?;
        let y_next = (&y + z_inv).scale(0.5);
        let z_next = (&z + y_inv).scale(0.5);
        let step = op_norm(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if step <= 1e-15 * op_norm(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(NumericError::NonConvergence {
        what: "matrix square root".into(),
        achieved: f64::NAN,
        tolerance: 1e-15,
    })
}

/// Principal logarithm by inverse scaling and squaring.
///
/// Repeated square roots bring `U` within `0.1` of the identity, where
/// `log X = 2 atanh((X − I)(X + I)^{-1})` is summed as a series.
pub fn matrix_log_principal(u: &CMatrix) -> Result<CMatrix, NumericError> {
    let n = u.nrows();
    if n != u.ncols() {
        return Err(NumericError::Dimension(format!(
            "{}x{} is not square",
            n,
            u.ncols()
        )));
    }
    for lambda in eigenvalues(u) {
        if lambda.norm() < BRANCH_MARGIN
            || (lambda.re < 0.0 && lambda.im.abs() < BRANCH_MARGIN * lambda.norm())
        {
            return Err(NumericError::BranchCut { eigenvalue: lambda });
        }
    }
    let id = identity(n);
    let mut x = u.clone();
    let mut squarings = 0u32;
    while op_norm(&(&x - &id)) > 0.1 {
        if squarings > 60 {
            return Err(NumericError::NonConvergence {
                what: "inverse scaling".into(),
                achieved: op_norm(&(&x - &id)),
                tolerance: 0.1,
            });
        }
        x = sqrt_denman_beavers(&x)?;
        squarings += 1;
    }
    let denom = (&x + &id).try_inverse().ok_or(NumericError::Singular)?;
    let z = (&x - &id) * denom;
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = z.clone();
    for j in 1..200 {
        power = &power * &z2;
        let term = power.scale(1.0 / (2 * j + 1) as f64);
        let size = op_norm(&term);
        sum += term;
        if size <= 1e-18 * op_norm(&sum).max(1e-300) || size == 0.0 {
            break;
        }
    }
    Ok(sum.scale(2f64.powi(squarings as i32 + 1)))
}

/// `row,col,re,im` lines.
pub fn matrix_csv(m: &CMatrix) -> String {
    let mut out = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            out.push_str(&format!("{i},{j},{:.17e},{:.17e}\n", v.re, v.im));
        }
    }
    out
}
