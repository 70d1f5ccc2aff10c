//! Dense complex linear algebra on top of the system BLAS/LAPACK.
//!
//! Matrices are stored row-major in `ndarray::Array2<Complex64>`. The Fortran
//! routines see the same memory as the transpose, so the wrappers below swap
//! operand roles instead of copying; each wrapper documents the identity it
//! relies on and is pinned by a reconstruction test.

use ndarray::prelude::*;
use num_complex::Complex64;
use std::sync::Once;

use crate::error::{Result, ShellError};

#[link(name = "openblas")]
extern "C" {
    fn cblas_zgemm(
        order: i32,
        transa: i32,
        transb: i32,
        m: i32,
        n: i32,
        k: i32,
        alpha: *const Complex64,
        a: *const Complex64,
        lda: i32,
        b: *const Complex64,
        ldb: i32,
        beta: *const Complex64,
        c: *mut Complex64,
        ldc: i32,
    );
    fn zgesvd_(
        jobu: *const u8,
        jobvt: *const u8,
        m: *const i32,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        s: *mut f64,
        u: *mut Complex64,
        ldu: *const i32,
        vt: *mut Complex64,
        ldvt: *const i32,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn zgesdd_(
        jobz: *const u8,
        m: *const i32,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        s: *mut f64,
        u: *mut Complex64,
        ldu: *const i32,
        vt: *mut Complex64,
        ldvt: *const i32,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        iwork: *mut i32,
        info: *mut i32,
    );
    fn zgetrf_(
        m: *const i32,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        ipiv: *mut i32,
        info: *mut i32,
    );
    fn zgetrs_(
        trans: *const u8,
        n: *const i32,
        nrhs: *const i32,
        a: *const Complex64,
        lda: *const i32,
        ipiv: *const i32,
        b: *mut Complex64,
        ldb: *const i32,
        info: *mut i32,
    );
    fn zgetri_(
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        ipiv: *const i32,
        work: *mut Complex64,
        lwork: *const i32,
        info: *mut i32,
    );
    fn openblas_set_num_threads(n: i32);
}

static BLAS_INIT: Once = Once::new();

/// Pin openblas to one thread; outer parallelism is handled by rayon and
/// per-call determinism is required by the scan contract.
fn init_blas() {
    BLAS_INIT.call_once(|| unsafe {
        openblas_set_num_threads(1);
    });
}

const COL_MAJOR: i32 = 102;
const NO_TRANS: i32 = 111;

/// `a * b` via zgemm.
pub fn matmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    init_blas();
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    assert_eq!(ac, br, "matmul dimension mismatch");
    let a = as_standard(a);
    let b = as_standard(b);
    let mut c = Array2::<Complex64>::zeros((ar, bc));
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // Row-major product C = A B computed as the column-major identity
    // C^T = B^T A^T on the same buffers.
    unsafe {
        cblas_zgemm(
            COL_MAJOR,
            NO_TRANS,
            NO_TRANS,
            bc as i32,
            ar as i32,
            ac as i32,
            &one,
            b.as_slice().unwrap().as_ptr(),
            bc as i32,
            a.as_slice().unwrap().as_ptr(),
            ac as i32,
            &zero,
            c.as_slice_mut().unwrap().as_mut_ptr(),
            bc as i32,
        );
    }
    c
}

fn as_standard(a: &Array2<Complex64>) -> std::borrow::Cow<'_, Array2<Complex64>> {
    if a.as_slice().is_some() {
        std::borrow::Cow::Borrowed(a)
    } else {
        std::borrow::Cow::Owned(a.as_standard_layout().into_owned())
    }
}

/// Singular values of `a`, descending.
pub fn singular_values(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    init_blas();
    let (rows, cols) = a.dim();
    let mut buf = as_standard(a).into_owned();
    // Column-major view of the row-major buffer is A^T; singular values agree.
    let m = cols as i32;
    let n = rows as i32;
    let mn = rows.min(cols);
    let mut s = vec![0.0f64; mn];
    let (jobu, jobvt) = (b'N', b'N');
    let mut rwork = vec![0.0f64; (5 * mn).max(1)];
    let mut info = 0i32;
    let mut query = [Complex64::new(0.0, 0.0)];
    let neg1 = -1i32;
    let one = 1i32;
    unsafe {
        zgesvd_(
            &jobu,
            &jobvt,
            &m,
            &n,
            buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            s.as_mut_ptr(),
            std::ptr::null_mut(),
            &one,
            std::ptr::null_mut(),
            &one,
            query.as_mut_ptr(),
            &neg1,
            rwork.as_mut_ptr(),
            &mut info,
        );
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgesvd", info });
        }
        let lwork = query[0].re as i32;
        let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
        zgesvd_(
            &jobu,
            &jobvt,
            &m,
            &n,
            buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            s.as_mut_ptr(),
            std::ptr::null_mut(),
            &one,
            std::ptr::null_mut(),
            &one,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgesvd", info });
        }
    }
    Ok(s)
}

/// Full SVD `a = u * diag(s) * vh` with `s` descending.
pub fn svd(a: &Array2<Complex64>) -> Result<(Array2<Complex64>, Vec<f64>, Array2<Complex64>)> {
    init_blas();
    let (rows, cols) = a.dim();
    assert_eq!(rows, cols, "svd wrapper expects a square matrix");
    let nn = rows;
    let mut buf = as_standard(a).into_owned();
    // zgesdd on the column-major view factors A^T = U1 S V1^H. Transposing,
    // A = conj(V1) S U1^T, so the row-major read of the vt buffer is U and the
    // row-major read of the u buffer is V^H.
    let m = nn as i32;
    let mut s = vec![0.0f64; nn];
    let jobz = b'A';
    let mn = nn;
    let mut u_buf = Array2::<Complex64>::zeros((nn, nn));
    let mut vt_buf = Array2::<Complex64>::zeros((nn, nn));
    let lrwork = (5 * mn * mn + 7 * mn).max(1);
    let mut rwork = vec![0.0f64; lrwork];
    let mut iwork = vec![0i32; 8 * mn];
    let mut info = 0i32;
    let mut query = [Complex64::new(0.0, 0.0)];
    let neg1 = -1i32;
    unsafe {
        zgesdd_(
            &jobz,
            &m,
            &m,
            buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            s.as_mut_ptr(),
            u_buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            vt_buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            query.as_mut_ptr(),
            &neg1,
            rwork.as_mut_ptr(),
            iwork.as_mut_ptr(),
            &mut info,
        );
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgesdd", info });
        }
        let lwork = query[0].re as i32;
        let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
        zgesdd_(
            &jobz,
            &m,
            &m,
            buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            s.as_mut_ptr(),
            u_buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            vt_buf.as_slice_mut().unwrap().as_mut_ptr(),
            &m,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            iwork.as_mut_ptr(),
            &mut info,
        );
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgesdd", info });
        }
    }
    Ok((vt_buf, s, u_buf))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &Array2<Complex64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Smallest singular value together with its right singular vector.
pub fn smallest_singular_pair(a: &Array2<Complex64>) -> Result<(f64, Array1<Complex64>)> {
    let (_, s, vh) = svd(a)?;
    let last = s.len() - 1;
    let v = vh.row(last).mapv(|x| x.conj());
    Ok((s[last], v))
}

/// LU factorization of a square matrix, for repeated solves.
pub struct LuFactors {
    lu: Array2<Complex64>,
    ipiv: Vec<i32>,
    n: usize,
}

pub fn lu_factor(a: &Array2<Complex64>) -> Result<LuFactors> {
    init_blas();
    let (rows, cols) = a.dim();
    assert_eq!(rows, cols);
    let mut lu = as_standard(a).into_owned();
    let n = rows as i32;
    let mut ipiv = vec![0i32; rows];
    let mut info = 0i32;
    unsafe {
        zgetrf_(
            &n,
            &n,
            lu.as_slice_mut().unwrap().as_mut_ptr(),
            &n,
            ipiv.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(ShellError::Lapack { routine: "zgetrf", info });
    }
    Ok(LuFactors { lu, ipiv, n: rows })
}

impl LuFactors {
    /// Solve `a x = b`; the factors hold A^T in column-major form, so the
    /// transposed solve recovers the row-major system.
    pub fn solve(&self, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
        assert_eq!(b.len(), self.n);
        let trans = b'T';
        let n = self.n as i32;
        let one = 1i32;
        let mut x = b.to_owned();
        let mut info = 0i32;
        unsafe {
            zgetrs_(
                &trans,
                &n,
                &one,
                self.lu.as_slice().unwrap().as_ptr(),
                &n,
                self.ipiv.as_ptr(),
                x.as_slice_mut().unwrap().as_mut_ptr(),
                &n,
                &mut info,
            );
        }
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgetrs", info });
        }
        Ok(x)
    }
}

/// Matrix inverse via LU; the column-major inverse of A^T reads back
/// row-major as A^{-1}.
pub fn inverse(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let mut f = lu_factor(a)?;
    let n = f.n as i32;
    let mut info = 0i32;
    let neg1 = -1i32;
    let mut query = [Complex64::new(0.0, 0.0)];
    unsafe {
        zgetri_(
            &n,
            f.lu.as_slice_mut().unwrap().as_mut_ptr(),
            &n,
            f.ipiv.as_ptr(),
            query.as_mut_ptr(),
            &neg1,
            &mut info,
        );
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgetri", info });
        }
        let lwork = query[0].re as i32;
        let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
        zgetri_(
            &n,
            f.lu.as_slice_mut().unwrap().as_mut_ptr(),
            &n,
            f.ipiv.as_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
        if info != 0 {
            return Err(ShellError::Lapack { routine: "zgetri", info });
        }
    }
    Ok(f.lu)
}

/// Frobenius norm.
pub fn fro_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Max-abs entry norm.
pub fn max_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Hermitian deviation `||a - a^H||_2`.
pub fn hermiticity_defect(a: &Array2<Complex64>) -> Result<f64> {
    let ah = a.t().mapv(|x| x.conj());
    spectral_norm(&(a - &ah))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> Array2<Complex64> {
        Array2::from_shape_fn((n, n), |(i, j)| {
            Complex64::new(
                (0.37 * i as f64 + 0.71 * j as f64).sin(),
                (0.23 * i as f64 - 0.3 * j as f64).cos(),
            )
        }) + Array2::<Complex64>::eye(n).mapv(|x| x * 3.0)
    }

    #[test]
    fn svd_reconstructs() {
        let a = test_matrix(17);
        let (u, s, vh) = svd(&a).unwrap();
        let mut us = u.clone();
        for (j, &sv) in s.iter().enumerate() {
            us.column_mut(j).mapv_inplace(|x| x * sv);
        }
        let rec = matmul(&us, &vh);
        let err = max_norm(&(&rec - &a));
        assert!(err < 1e-12, "svd reconstruction error {err}");
        // descending order
        for w in s.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn singular_values_match_full_svd() {
        let a = test_matrix(11);
        let s1 = singular_values(&a).unwrap();
        let (_, s2, _) = svd(&a).unwrap();
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn smallest_pair_is_null_direction() {
        let a = test_matrix(13);
        let (smin, v) = smallest_singular_pair(&a).unwrap();
        let av = a.dot(&v);
        let norm = av.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - smin).abs() < 1e-10, "|A v| = {norm} vs smin = {smin}");
    }

    #[test]
    fn lu_solve_and_inverse() {
        let a = test_matrix(19);
        let b = Array1::from_shape_fn(19, |i| Complex64::new(i as f64, 1.0 - i as f64));
        let f = lu_factor(&a).unwrap();
        let x = f.solve(&b).unwrap();
        let r = a.dot(&x) - &b;
        assert!(r.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-11);

        let ainv = inverse(&a).unwrap();
        let id = matmul(&a, &ainv);
        let err = max_norm(&(&id - &Array2::<Complex64>::eye(19)));
        assert!(err < 1e-11, "inverse error {err}");
    }

    #[test]
    fn matmul_matches_ndarray_dot() {
        let a = test_matrix(8);
        let b = test_matrix(8).mapv(|x| x * Complex64::new(0.0, 1.0));
        let c1 = matmul(&a, &b);
        let c2 = a.dot(&b);
        assert!(max_norm(&(&c1 - &c2)) < 1e-13);
    }
}
