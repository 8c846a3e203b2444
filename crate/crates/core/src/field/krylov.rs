use num_complex::Complex64;

use crate::error::{Error, Result};

/// Outcome of a converged iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final true relative residual `‖b − A x‖ / ‖b‖`.
    pub residual: f64,
    pub history: Vec<f64>,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Right-preconditioned BiCGSTAB for complex systems.
///
/// `apply(x, y)` computes `y = A x`, `precond(r, z)` computes `z ≈ M⁻¹ r`.
/// `x` holds the initial guess on entry. Convergence is judged on the true
/// residual; a stalled or broken-down recurrence is restarted from the
/// current iterate.
pub fn bicgstab<A, P>(
    apply: A,
    precond: P,
    b: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats>
where
    A: Fn(&[Complex64], &mut [Complex64]),
    P: Fn(&[Complex64], &mut [Complex64]),
{
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let bnorm = norm(b);
    let mut history = Vec::new();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = zero);
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
            history,
        });
    }

    let mut r = vec![zero; n];
    let mut tmp = vec![zero; n];
    let true_residual = |x: &[Complex64], r: &mut [Complex64], tmp: &mut [Complex64]| {
        apply(x, tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        norm(r) / bnorm
    };

    let mut rel = true_residual(x, &mut r, &mut tmp);
    history.push(rel);
    if rel <= tol {
        return Ok(SolveStats {
            iterations: 0,
            residual: rel,
            history,
        });
    }

    let mut p = vec![zero; n];
    let mut v = vec![zero; n];
    let mut s = vec![zero; n];
    let mut t = vec![zero; n];
    let mut ph = vec![zero; n];
    let mut sh = vec![zero; n];
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut fresh = true;

    let mut it = 0;
    while it < max_iter {
        it += 1;
        let rho_new = dot(&r_hat, &r);
        if rho_new.norm() < 1e-300 || omega.norm() < 1e-300 {
            // breakdown: restart with the current residual as shadow
            rel = true_residual(x, &mut r, &mut tmp);
            r_hat.copy_from_slice(&r);
            p.iter_mut().for_each(|z| *z = zero);
            v.iter_mut().for_each(|z| *z = zero);
            rho = Complex64::new(1.0, 0.0);
            alpha = rho;
            omega = rho;
            fresh = true;
            history.push(rel);
            if rel <= tol {
                return Ok(SolveStats { iterations: it, residual: rel, history });
            }
            continue;
        }
        if fresh {
            p.copy_from_slice(&r);
            fresh = false;
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
        }
        rho = rho_new;
        precond(&p, &mut ph);
        apply(&ph, &mut v);
        let rv = dot(&r_hat, &v);
        if rv.norm() < 1e-300 {
            omega = zero;
            continue;
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / bnorm <= tol {
            for i in 0..n {
                x[i] += alpha * ph[i];
            }
        } else {
            precond(&s, &mut sh);
            apply(&sh, &mut t);
            let tt = dot(&t, &t);
            omega = if tt.norm() > 0.0 { dot(&t, &s) / tt } else { zero };
            for i in 0..n {
                x[i] += alpha * ph[i] + omega * sh[i];
                r[i] = s[i] - omega * t[i];
            }
            let est = norm(&r) / bnorm;
            if est > tol {
                history.push(est);
                continue;
            }
        }
        // recurrence claims convergence; confirm on the true residual
        rel = true_residual(x, &mut r, &mut tmp);
        history.push(rel);
        if rel <= tol {
            return Ok(SolveStats { iterations: it, residual: rel, history });
        }
        r_hat.copy_from_slice(&r);
        rho = Complex64::new(1.0, 0.0);
        alpha = rho;
        omega = rho;
        fresh = true;
    }
    Err(Error::NonConvergence {
        iterations: it,
        last: *history.last().unwrap_or(&rel),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> impl Fn(&[Complex64], &mut [Complex64]) {
        move |x: &[Complex64], y: &mut [Complex64]| {
            for i in 0..n {
                let mut acc = Complex64::new(4.0, 1.0) * x[i];
                if i > 0 {
                    acc -= x[i - 1];
                }
                if i + 1 < n {
                    acc -= Complex64::new(1.0, -0.5) * x[i + 1];
                }
                y[i] = acc;
            }
        }
    }

    #[test]
    fn solves_nonsymmetric_complex_system() {
        let n = 50;
        let a = tridiag(n);
        let xs: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, -(i as f64).sqrt())).collect();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        a(&xs, &mut b);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        let st = bicgstab(&a, |r: &[Complex64], z: &mut [Complex64]| z.copy_from_slice(r), &b, &mut x, 1e-12, 200).unwrap();
        assert!(st.residual <= 1e-12);
        for (u, v) in x.iter().zip(&xs) {
            assert!((u - v).norm() < 1e-9);
        }
    }

    #[test]
    fn non_convergence_reports_history() {
        let n = 50;
        let a = tridiag(n);
        let b = vec![Complex64::new(1.0, 0.0); n];
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        match bicgstab(&a, |r: &[Complex64], z: &mut [Complex64]| z.copy_from_slice(r), &b, &mut x, 1e-30, 3) {
            Err(Error::NonConvergence { iterations, history, .. }) => {
                assert_eq!(iterations, 3);
                assert!(!history.is_empty());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = tridiag(5);
        let b = vec![Complex64::new(0.0, 0.0); 5];
        let mut x = vec![Complex64::new(1.0, 0.0); 5];
        bicgstab(&a, |r: &[Complex64], z: &mut [Complex64]| z.copy_from_slice(r), &b, &mut x, 1e-9, 10).unwrap();
        assert!(x.iter().all(|v| v.norm() == 0.0));
    }
}
