//! Shared test oracles, independent of the library's solution path.
//!
//! The dense collocation oracle discretizes the integer-order problem
//! (alpha = 2, beta = 1) directly on the monomial basis: three boundary
//! rows plus a dense grid of collocation rows, solved in least squares by
//! Householder QR in plain f64. It never touches kernels, Gram-Schmidt, or
//! the Caputo machinery.

/// Least-squares solution of an overdetermined system by Householder QR.
#[allow(clippy::needless_range_loop)]
pub fn householder_lstsq(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, ncols: usize) -> Vec<f64> {
    let nrows = a.len();
    assert!(nrows >= ncols);
    for k in 0..ncols {
        let mut norm = 0.0;
        for i in k..nrows {
            norm += a[i][k] * a[i][k];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..nrows).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..ncols {
            let dot: f64 = (k..nrows).map(|i| a[i][j] * v[i - k]).sum();
            let scale = 2.0 * dot / vnorm2;
            for i in k..nrows {
                a[i][j] -= scale * v[i - k];
            }
        }
        let dot: f64 = (k..nrows).map(|i| b[i] * v[i - k]).sum();
        let scale = 2.0 * dot / vnorm2;
        for i in k..nrows {
            b[i] -= scale * v[i - k];
        }
    }
    // back substitution on the upper-triangular block
    let mut x = vec![0.0; ncols];
    for k in (0..ncols).rev() {
        let mut s = b[k];
        for j in k + 1..ncols {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    x
}

/// Monomial coefficients solving
/// `a2 z'' + a1 z' + a0 z = g(x)` with `z(0) = g0, z(theta) = g1, z(1) = g2`
/// in least squares over a dense grid, degree `deg`.
#[allow(clippy::too_many_arguments)]
pub fn dense_collocation_oracle(
    a0: &dyn Fn(f64) -> f64,
    a1: &dyn Fn(f64) -> f64,
    a2: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    theta: f64,
    boundary: [f64; 3],
    deg: usize,
) -> Vec<f64> {
    let ncols = deg + 1;
    let xs: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
    let mut rows = Vec::with_capacity(xs.len() + 3);
    let mut rhs = Vec::with_capacity(xs.len() + 3);
    for (bx, bv) in [(0.0, boundary[0]), (theta, boundary[1]), (1.0, boundary[2])] {
        rows.push((0..ncols).map(|k| bx.powi(k as i32)).collect::<Vec<_>>());
        rhs.push(bv);
    }
    for &x in &xs {
        let mut row = vec![0.0; ncols];
        for (k, slot) in row.iter_mut().enumerate() {
            let kk = k as f64;
            let second = if k >= 2 {
                kk * (kk - 1.0) * x.powi(k as i32 - 2)
            } else {
                0.0
            };
            let first = if k >= 1 {
                kk * x.powi(k as i32 - 1)
            } else {
                0.0
            };
            *slot = a2(x) * second + a1(x) * first + a0(x) * x.powi(k as i32);
        }
        rows.push(row);
        rhs.push(g(x));
    }
    householder_lstsq(rows, rhs, ncols)
}

pub fn eval_monomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
