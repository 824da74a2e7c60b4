use super::LatticeOperator;
use crate::error::{Error, Result};
use num_complex::Complex64;

pub const EIGEN_DIM_CAP: usize = 4096;
const MAX_SWEEPS: usize = 100;

/// Sorted eigenvalues of a Hermitian operator via cyclic complex Jacobi
/// rotations. `tol` bounds the accepted asymmetry relative to the largest
/// entry.
pub fn eigenvalues_hermitian(op: &LatticeOperator, tol: f64) -> Result<Vec<f64>> {
    let n = op.dim();
    if n > EIGEN_DIM_CAP {
        return Err(Error::TooLarge(n, EIGEN_DIM_CAP));
    }
    if let Some(diag) = op.as_diagonal() {
        return check_and_sort_diagonal(diag, tol);
    }
    let a = op.to_dense();
    check_hermitian(&a, tol)?;
    jacobi(a)
}

fn check_and_sort_diagonal(diag: Vec<Complex64>, tol: f64) -> Result<Vec<f64>> {
    let scale = diag.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut out = Vec::with_capacity(diag.len());
    for (i, z) in diag.iter().enumerate() {
        if z.im.abs() > tol * scale {
            return Err(Error::NotHermitian {
                asymmetry: 2.0 * z.im.abs(),
                row: i,
                col: i,
            });
        }
        out.push(z.re);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn check_hermitian(a: &[Vec<Complex64>], tol: f64) -> Result<()> {
    let n = a.len();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in i..n {
            let d = (a[i][j] - a[j][i].conj()).norm();
            if d > worst.0 {
                worst = (d, i, j);
            }
        }
    }
    if worst.0 > tol * scale {
        return Err(Error::NotHermitian {
            asymmetry: worst.0,
            row: worst.1,
            col: worst.2,
        });
    }
    Ok(())
}

fn jacobi(mut a: Vec<Vec<Complex64>>) -> Result<Vec<f64>> {
    let n = a.len();
    // symmetrise the residual asymmetry away before rotating
    for i in 0..n {
        a[i][i].im = 0.0;
        for j in i + 1..n {
            let avg = (a[i][j] + a[j][i].conj()) * 0.5;
            a[i][j] = avg;
            a[j][i] = avg.conj();
        }
    }
    let frob = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * frob / (n.max(1) as f64);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let g = a[p][q].norm();
                if g <= threshold || g == 0.0 {
                    continue;
                }
                rotated = true;
                rotate(&mut a, p, q);
            }
        }
        if !rotated {
            let mut ev: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
            ev.sort_by(f64::total_cmp);
            return Ok(ev);
        }
    }
    Err(Error::EigenNoConvergence(MAX_SWEEPS))
}

// U = diag(1, e^{−iφ}) · [[c, s], [−s, c]] in the (p, q) plane, A ← U^H A U.
fn rotate(a: &mut [Vec<Complex64>], p: usize, q: usize) {
    let n = a.len();
    let apq = a[p][q];
    let g = apq.norm();
    let phase = apq / g; // e^{iφ}
    let theta = (a[q][q].re - a[p][p].re) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    for row in a.iter_mut() {
        let (x, y) = (row[p], row[q]);
        row[p] = x * c - y * conj_phase * s;
        row[q] = x * s + y * conj_phase * c;
    }
    for k in 0..n {
        let (x, y) = (a[p][k], a[q][k]);
        a[p][k] = x * c - y * phase * s;
        a[q][k] = x * s + y * phase * c;
    }
    a[p][q] = Complex64::new(0.0, 0.0);
    a[q][p] = Complex64::new(0.0, 0.0);
    a[p][p].im = 0.0;
    a[q][q].im = 0.0;
}
