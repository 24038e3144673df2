//! Eigenpairs of real symmetric tridiagonal matrices by Sturm-sequence
//! bisection and inverse iteration.

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - b2 / d;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based), bisected to full precision.
pub fn eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
    lo -= pad;
    hi += pad;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Solve `(T − μ) x = b` by Gaussian elimination with partial pivoting.
fn shifted_solve(diag: &[f64], off: &[f64], mu: f64, b: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let d = diag[0] - mu;
        b[0] /= if d == 0.0 { f64::EPSILON } else { d };
        return;
    }
    // U has bands u0 (diagonal), u1, u2; rows may be swapped during elimination.
    let mut u0: Vec<f64> = diag.iter().map(|d| d - mu).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut sub: Vec<f64> = off.to_vec();
    let scale = diag.iter().map(|d| d.abs()).fold(0.0, f64::max).max(1.0);
    for i in 0..n - 1 {
        let (a, c) = (u0[i], sub[i]);
        if c.abs() > a.abs() {
            // swap rows i and i+1
            let m = a / c;
            u0[i] = c;
            let (t1, t2) = (u1[i], u2[i]);
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            u0[i + 1] = t1 - m * u1[i];
            u1[i + 1] = t2 - m * u2[i];
            b.swap(i, i + 1);
            b[i + 1] -= m * b[i];
        } else {
            let m = if a == 0.0 { 0.0 } else { c / a };
            u0[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            b[i + 1] -= m * b[i];
        }
        sub[i] = 0.0;
    }
    let eps = f64::EPSILON * scale;
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc -= u1[i] * b[i + 1];
        }
        if i + 2 < n {
            acc -= u2[i] * b[i + 2];
        }
        let d = if u0[i].abs() < eps { eps.copysign(u0[i]) } else { u0[i] };
        b[i] = acc / d;
    }
}

/// Unit eigenvector for the eigenvalue `e` by inverse iteration.
pub fn eigenvector(diag: &[f64], off: &[f64], e: f64) -> Vec<f64> {
    let n = diag.len();
    // deterministic, non-degenerate start
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract()).collect();
    for _ in 0..4 {
        shifted_solve(diag, off, e, &mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    // fix the sign so the largest component is positive
    let imax = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap_or(0);
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let (d, o) = laplacian(n);
        for k in [0, 1, 7, 49] {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((eigenvalue(&d, &o, k) - exact).abs() < 1e-13);
            let v = eigenvector(&d, &o, eigenvalue(&d, &o, k));
            for j in 0..n {
                let lhs = d[j] * v[j] + if j > 0 { o[j - 1] * v[j - 1] } else { 0.0 } + if j + 1 < n { o[j] * v[j + 1] } else { 0.0 };
                assert!((lhs - exact * v[j]).abs() < 1e-11);
            }
        }
        assert_eq!(sturm_count(&d, &o, 0.0), 0);
        assert_eq!(sturm_count(&d, &o, 4.0), n);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // zero diagonal, unit off-diagonal: eigenvalues −√2, 0, √2
        let (d, o) = (vec![0.0, 0.0, 0.0], vec![1.0, 1.0]);
        let e0 = eigenvalue(&d, &o, 0);
        assert!((e0 + 2f64.sqrt()).abs() < 1e-14);
        let v = eigenvector(&d, &o, e0);
        assert!((v[0] + 0.5).abs() < 1e-12 && (v[1] - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
