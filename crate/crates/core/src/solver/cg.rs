use super::kernel::DenseKernel;
use super::SolverError;

/// Convergence record of a conjugate-gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    /// True residual `|b - Ax|_2 / |b|_2` at exit.
    pub rel_residual: f64,
    /// Largest single-entry true residual at exit.
    pub max_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients on a dense SPD matrix.
///
/// The recurrence residual drives the iteration; convergence is then
/// confirmed against the true residual `b - Ax`, tightening the internal
/// target if rounding made the recurrence optimistic.  All reductions run
/// in index order, so repeated solves are bitwise identical.
pub fn solve_pcg(
    a: &DenseKernel,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, CgOutcome), SolverError> {
    let n = a.n();
    assert_eq!(b.len(), n);
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| {
            debug_assert!(d > 0.0);
            1.0 / d
        })
        .collect();
    let norm_b = l2(b).max(f64::MIN_POSITIVE);

    let mut x = vec![0.0_f64; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0_f64; n];
    let mut target = rel_tol;
    let mut iterations = 0usize;

    loop {
        while l2(&r) > target * norm_b {
            if iterations >= max_iter {
                let (rel, _) = true_residual(a, &x, b, &mut ap);
                return Err(SolverError::NoConvergence {
                    iterations,
                    residual: rel,
                    tolerance: rel_tol,
                });
            }
            a.matvec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(SolverError::NotPositiveDefinite { iteration: iterations });
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
            iterations += 1;
        }

        let (rel, max) = true_residual(a, &x, b, &mut ap);
        if rel <= rel_tol {
            return Ok((
                x,
                CgOutcome {
                    iterations,
                    rel_residual: rel,
                    max_residual: max,
                },
            ));
        }
        if iterations >= max_iter {
            return Err(SolverError::NoConvergence {
                iterations,
                residual: rel,
                tolerance: rel_tol,
            });
        }
        // Restart from the true residual with a tighter internal target.
        a.matvec(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        p.copy_from_slice(&z);
        rz = dot(&r, &z);
        target *= 0.1;
    }
}

fn true_residual(a: &DenseKernel, x: &[f64], b: &[f64], scratch: &mut [f64]) -> (f64, f64) {
    a.matvec(x, scratch);
    let mut sq = 0.0;
    let mut max = 0.0_f64;
    for i in 0..b.len() {
        let r = b[i] - scratch[i];
        sq += r * r;
        max = max.max(r.abs());
    }
    let norm_b = l2(b).max(f64::MIN_POSITIVE);
    (sq.sqrt() / norm_b, max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

fn l2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
