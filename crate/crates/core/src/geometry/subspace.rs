use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

use super::rng::RngStream;
use super::vector::dot;

/// Relative residual below which a freshly drawn row counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-12;
const MAX_REDRAWS: usize = 64;

/// A `k`-dimensional subspace of `R^d` held as a row-orthonormal `k x d`
/// basis `U`. The orthogonal projector is `P = UᵀU`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    ambient_dim: usize,
    rank: usize,
    // row-major, rank x ambient_dim
    basis: Vec<T>,
}

impl<T: Real> Subspace<T> {
    /// Rotation-invariant random subspace: Gaussian rows orthonormalized by
    /// modified Gram-Schmidt with one re-orthogonalization pass.
    pub fn random(rng: &mut RngStream, d: usize, k: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::config(format!(
                "subspace rank k={k} must satisfy 1 <= k <= d={d}"
            )));
        }
        let rows = orthonormal_rows(rng, d, k, &[])?;
        Ok(Self::from_f64_rows(d, rows))
    }

    /// Random `m`-dimensional subspace orthogonal to `exclude`.
    pub fn random_complement(rng: &mut RngStream, m: usize, exclude: &Subspace<T>) -> Result<Self> {
        let d = exclude.ambient_dim;
        if m == 0 || m + exclude.rank > d {
            return Err(Error::config(format!(
                "complement rank m={m} must satisfy 1 <= m <= d-k = {}",
                d - exclude.rank
            )));
        }
        let fixed: Vec<Vec<f64>> = exclude
            .rows()
            .map(|r| r.iter().map(|x| x.as_f64()).collect())
            .collect();
        let rows = orthonormal_rows(rng, d, m, &fixed)?;
        Ok(Self::from_f64_rows(d, rows))
    }

    /// Wraps caller-supplied rows, rejecting them unless `UUᵀ = I`.
    pub fn from_rows(d: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() || rows.len() > d {
            return Err(Error::config(format!(
                "subspace needs 1..={d} rows, got {}",
                rows.len()
            )));
        }
        let rank = rows.len();
        let mut basis = Vec::with_capacity(rank * d);
        for row in rows {
            check_dim(d, row.len())?;
            basis.extend(row);
        }
        let s = Self { ambient_dim: d, rank, basis };
        let err = s.orthonormality_error();
        if err > T::orthonormal_tol() {
            return Err(Error::config(format!(
                "rows are not orthonormal (max |UUᵀ - I| = {err:e})"
            )));
        }
        Ok(s)
    }

    /// Span of the listed standard basis vectors.
    pub fn coordinate_axes(d: usize, axes: &[usize]) -> Result<Self> {
        let rows = axes
            .iter()
            .map(|&i| {
                if i >= d {
                    return Err(Error::config(format!("axis {i} out of range for d={d}")));
                }
                let mut e = vec![T::zero(); d];
                e[i] = T::one();
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(d, rows)
    }

    fn from_f64_rows(d: usize, rows: Vec<Vec<f64>>) -> Self {
        let rank = rows.len();
        let basis = rows.into_iter().flatten().map(T::lit).collect();
        Self { ambient_dim: d, rank, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.basis[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.basis.chunks_exact(self.ambient_dim)
    }

    /// `Uv`, the coordinates of `v` in this basis. Panics on length mismatch.
    pub fn coords(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.ambient_dim, "coords: length mismatch");
        self.rows().map(|r| dot(r, v)).collect()
    }

    /// `Uᵀz`. Panics unless `z.len() == rank`.
    pub fn lift(&self, z: &[T]) -> Vec<T> {
        assert_eq!(z.len(), self.rank, "lift: length mismatch");
        let mut out = vec![T::zero(); self.ambient_dim];
        for (row, &zi) in self.rows().zip(z) {
            for (o, &u) in out.iter_mut().zip(row) {
                *o = *o + zi * u;
            }
        }
        out
    }

    /// `Pv = Uᵀ(Uv)`.
    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        check_dim(self.ambient_dim, v.len())?;
        Ok(self.lift(&self.coords(v)))
    }

    /// `(I - P)v`.
    pub fn reject(&self, v: &[T]) -> Result<Vec<T>> {
        let p = self.project(v)?;
        Ok(v.iter().zip(&p).map(|(&a, &b)| a - b).collect())
    }

    /// `max_ij |(UUᵀ - I)_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rank {
            for j in 0..=i {
                let g = dot(self.row(i), self.row(j)).as_f64();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// The same subspace embedded in `R^{d_new}` by appending zero coordinates.
    pub fn zero_padded(&self, d_new: usize) -> Result<Self> {
        if d_new < self.ambient_dim {
            return Err(Error::config(format!(
                "cannot pad d={} down to {d_new}",
                self.ambient_dim
            )));
        }
        let mut basis = Vec::with_capacity(self.rank * d_new);
        for row in self.rows() {
            basis.extend_from_slice(row);
            basis.extend(std::iter::repeat_n(T::zero(), d_new - self.ambient_dim));
        }
        Ok(Self { ambient_dim: d_new, rank: self.rank, basis })
    }

    /// Converts the basis to another precision.
    pub fn cast<S: Real>(&self) -> Subspace<S> {
        Subspace {
            ambient_dim: self.ambient_dim,
            rank: self.rank,
            basis: self.basis.iter().map(|x| S::lit(x.as_f64())).collect(),
        }
    }
}

fn orthonormal_rows(rng: &mut RngStream, d: usize, k: usize, fixed: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut accepted = false;
        for _ in 0..MAX_REDRAWS {
            let mut v: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
            let original = dot(&v, &v).sqrt();
            for _pass in 0..2 {
                for q in fixed.iter().chain(rows.iter()) {
                    let c = dot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                }
            }
            let n = dot(&v, &v).sqrt();
            if n > DEPENDENCE_TOL * original {
                v.iter_mut().for_each(|x| *x /= n);
                rows.push(v);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::domain("Gram-Schmidt kept drawing dependent rows"));
        }
    }
    Ok(rows)
}
