//! Dense eigensolvers: cyclic complex Jacobi for Hermitian input and
//! Hessenberg reduction plus shifted QR for everything else.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{inner, norm, CMatrix, CVector};
use crate::scalar::{cast_complex, cis, cr, Real, C};

/// Eigenpairs of a square matrix.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    pub values: Vec<C<T>>,
    /// Unit-norm right eigenvectors, one per value.
    pub vectors: Vec<CVector<T>>,
    pub is_hermitian_input: bool,
    /// Set when the eigenvectors cannot resolve the matrix (Jordan blocks,
    /// exceptional points).
    pub defective: bool,
    /// Largest `‖m v − λ v‖` over all pairs.
    pub max_residual: T,
    /// Smallest singular value of the matrix of eigenvectors.
    pub min_singular: T,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector_matrix(&self) -> CMatrix<T> {
        CMatrix::from_columns(&self.vectors)
    }
}

/// Rotates `v` so its largest-magnitude entry is real and positive. Near-ties
/// go to the lowest index.
pub fn gauge_fix<T: Real>(v: &mut [C<T>]) {
    let max = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if max == T::zero() {
        return;
    }
    let cutoff = max * (T::one() - T::lit(1e-10));
    let pivot = v.iter().position(|z| z.norm() >= cutoff).unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = cr(v[pivot].re);
}

fn sort_hermitian<T: Real>(values: &mut Vec<C<T>>, vectors: &mut Vec<CVector<T>>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .partial_cmp(&values[b].re)
            .unwrap_or(Ordering::Equal)
    });
    *values = order.iter().map(|&i| values[i]).collect();
    *vectors = order.iter().map(|&i| vectors[i].clone()).collect();
}

/// Orthonormalizes runs of eigenvalues closer than `gap` by modified
/// Gram-Schmidt. Returns the cluster boundaries.
pub(crate) fn orthonormalize_clusters<T: Real>(
    values: &[C<T>],
    vectors: &mut [CVector<T>],
    gap: T,
) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).norm() > gap {
            clusters.push(start..i);
            start = i;
        }
    }
    for r in &clusters {
        for k in r.clone() {
            for j in r.start..k {
                let proj = inner(&vectors[j], &vectors[k]);
                let (head, tail) = vectors.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= proj * *y;
                }
            }
            let n = norm(&vectors[k]);
            for x in vectors[k].iter_mut() {
                *x /= n;
            }
        }
    }
    clusters
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// `tol` bounds `‖m − m†‖_max` relative to `max(1, ‖m‖_max)`. Values come out
/// ascending; vectors are orthonormal and gauge fixed.
pub fn hermitian_eig<T: Real>(m: &CMatrix<T>, tol: T) -> Result<EigenSystem<T>> {
    let n = m.dim();
    let scale = m.max_abs().max(T::one());
    let defect = m.hermiticity_defect();
    if defect > tol * scale {
        return Err(Error::NotHermitian {
            deviation: defect.to_f64_lossy(),
        });
    }
    // Work on the Hermitian part so the solver never sees the tiny defect.
    let mut a = CMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5));
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon();
    let max_sweeps = 100;
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        let total = a.frobenius();
        if off.sqrt() <= eps * total.max(T::min_positive_value()) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: max_sweeps,
            partial: (0..n)
                .map(|i| cast_complex::<T, f64>(a[(i, i)]))
                .collect::<Vec<Complex64>>(),
        });
    }
    let mut values: Vec<C<T>> = (0..n).map(|i| cr(a[(i, i)].re)).collect();
    let mut vectors = v.columns();
    sort_hermitian(&mut values, &mut vectors);
    let gap = T::tolerances().degeneracy * scale;
    orthonormalize_clusters(&values, &mut vectors, gap);
    for vec in vectors.iter_mut() {
        gauge_fix(vec);
    }
    let max_residual = max_residual(m, &values, &vectors);
    Ok(EigenSystem {
        values,
        vectors,
        is_hermitian_input: true,
        defective: false,
        max_residual,
        min_singular: T::one(),
    })
}

fn jacobi_rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let scale = app.abs() + aqq.abs();
    if r <= T::epsilon() * T::lit(1e-3) * scale {
        a[(p, q)] = cr(T::zero());
        a[(q, p)] = cr(T::zero());
        return;
    }
    // Phase the q axis so a_pq becomes real, then rotate in the real plane.
    let phase = cis(-apq.arg());
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = tau.signum() / (tau.abs() + (tau * tau + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let g_pp = cr(c);
    let g_pq = cr(s);
    let g_qp = phase * (-s);
    let g_qq = phase * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = cr(T::zero());
    a[(q, p)] = cr(T::zero());
    a[(p, p)] = cr(a[(p, p)].re);
    a[(q, q)] = cr(a[(q, q)].re);
}

fn max_residual<T: Real>(m: &CMatrix<T>, values: &[C<T>], vectors: &[CVector<T>]) -> T {
    values
        .iter()
        .zip(vectors)
        .map(|(l, v)| {
            let mv = m.mul_vec(v);
            norm(
                &mv.iter()
                    .zip(v)
                    .map(|(x, y)| *x - *l * *y)
                    .collect::<Vec<_>>(),
            )
        })
        .fold(T::zero(), T::max)
}

/// Complex Schur form `m = Q T Q†` with `T` upper triangular.
pub fn schur<T: Real>(m: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let (mut h, mut q) = hessenberg(m);
    shifted_qr(&mut h, &mut q)?;
    Ok((q, h))
}

fn hessenberg<T: Real>(m: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = m.dim();
    let mut h = m.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let xn = norm(&x);
        if xn <= T::min_positive_value() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            cr(T::one())
        };
        let alpha = -phase * xn;
        let mut v = x.clone();
        v[0] -= alpha;
        let vn = norm(&v);
        if vn <= T::min_positive_value() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        let two = cr(T::lit(2.0));
        // h ← P h with P = I − 2 v v† acting on rows k+1..n.
        for j in 0..n {
            let s = (0..v.len()).fold(cr(T::zero()), |acc, i| {
                acc + v[i].conj() * h[(k + 1 + i, j)]
            });
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= two * v[i] * s;
            }
        }
        // h ← h P and q ← q P on columns k+1..n.
        for target in [&mut h, &mut q] {
            for i in 0..n {
                let s =
                    (0..v.len()).fold(cr(T::zero()), |acc, j| acc + target[(i, k + 1 + j)] * v[j]);
                for j in 0..v.len() {
                    target[(i, k + 1 + j)] -= two * s * v[j].conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = cr(T::zero());
        }
    }
    (h, q)
}

fn givens<T: Real>(x: C<T>, y: C<T>) -> Option<(C<T>, C<T>)> {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r <= T::min_positive_value() {
        return None;
    }
    Some((x / r, y / r))
}

fn shifted_qr<T: Real>(h: &mut CMatrix<T>, q: &mut CMatrix<T>) -> Result<()> {
    let n = h.dim();
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let norm_h = h.max_abs().max(T::min_positive_value());
    let max_iter = 100 * n;
    let mut total = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let reference = if diag > T::zero() { diag } else { norm_h };
            if sub <= eps * reference {
                h[(l, l - 1)] = cr(T::zero());
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                iterations: total,
                partial: (0..n).map(|i| cast_complex::<T, f64>(h[(i, i)])).collect(),
            });
        }
        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let rot = givens(h[(k, k)], h[(k + 1, k)]);
            if let Some((c, s)) = rot {
                for j in k..n {
                    let a = h[(k, j)];
                    let b = h[(k + 1, j)];
                    h[(k, j)] = c.conj() * a + s.conj() * b;
                    h[(k + 1, j)] = -s * a + c * b;
                }
                h[(k + 1, k)] = cr(T::zero());
            }
            rotations.push(rot);
        }
        for (offset, rot) in rotations.into_iter().enumerate() {
            let k = l + offset;
            let Some((c, s)) = rot else { continue };
            let rows = (k + 2).min(hi) + 1;
            for i in 0..rows {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s;
                h[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + b * s;
                q[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = cr(T::zero());
        }
    }
    Ok(())
}

fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues and right eigenvectors of a general square matrix.
///
/// Values are sorted by real part, then imaginary part. `defective` is set
/// when a residual exceeds the type's defect tolerance or the eigenvectors
/// are numerically dependent.
pub fn general_eig<T: Real>(m: &CMatrix<T>) -> Result<EigenSystem<T>> {
    let n = m.dim();
    let (q, t) = schur(m)?;
    let scale = t.max_abs().max(T::min_positive_value());
    let tiny = T::epsilon() * scale;
    let cluster = T::epsilon().sqrt() * scale;
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![cr(T::zero()); n];
        y[k] = cr(T::one());
        for i in (0..k).rev() {
            let num = ((i + 1)..=k).fold(cr(T::zero()), |acc, j| acc + t[(i, j)] * y[j]);
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < cluster {
                let ymax = y.iter().map(|z| z.norm()).fold(T::zero(), T::max);
                if num.norm() <= cluster * ymax {
                    // Degenerate but diagonalizable direction.
                    y[i] = cr(T::zero());
                    continue;
                }
                if denom.norm() < tiny {
                    denom = cr(tiny);
                }
            }
            y[i] = -num / denom;
        }
        let mut v = q.mul_vec(&y);
        let nv = norm(&v);
        for z in v.iter_mut() {
            *z /= nv;
        }
        gauge_fix(&mut v);
        values.push(lambda);
        vectors.push(v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (values[a], values[b]);
        x.re.partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
    });
    let values: Vec<C<T>> = order.iter().map(|&i| values[i]).collect();
    let vectors: Vec<CVector<T>> = order.iter().map(|&i| vectors[i].clone()).collect();
    let max_res = max_residual(m, &values, &vectors);
    let min_singular = min_singular_value(&CMatrix::from_columns(&vectors));
    let tol = T::tolerances().defect;
    let defective = max_res > tol * m.max_abs().max(T::one()) || min_singular < tol * T::lit(1.5);
    Ok(EigenSystem {
        values,
        vectors,
        is_hermitian_input: false,
        defective,
        max_residual: max_res,
        min_singular,
    })
}

/// Smallest singular value, via the Gram matrix.
pub fn min_singular_value<T: Real>(m: &CMatrix<T>) -> T {
    let gram = &m.adjoint() * m;
    match hermitian_eig(&gram, T::lit(1e-6)) {
        Ok(es) => es.values[0].re.max(T::zero()).sqrt(),
        Err(_) => T::zero(),
    }
}

/// Greedy nearest-neighbour matching distance between two multisets.
/// Returns the largest matched distance, or infinity on a length mismatch.
pub fn multiset_distance<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    // Match the points with the fewest close neighbours first.
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| {
        let di = b
            .iter()
            .map(|z| (*z - a[i]).norm())
            .fold(T::infinity(), T::min);
        let dj = b
            .iter()
            .map(|z| (*z - a[j]).norm())
            .fold(T::infinity(), T::min);
        dj.partial_cmp(&di).unwrap_or(Ordering::Equal)
    });
    for i in order {
        let mut best = None;
        let mut best_d = T::infinity();
        for (j, z) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (*z - a[i]).norm();
            if d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            used[j] = true;
            worst = worst.max(best_d);
        }
    }
    worst
}
