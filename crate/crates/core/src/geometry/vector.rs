//! Slice helpers. Lengths are the caller's contract; mismatches panic.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    assert_eq!(x.len(), y.len(), "axpy: length mismatch");
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

/// `x + alpha * s` as a new vector.
pub fn offset<T: Real>(x: &[T], alpha: T, s: &[T]) -> Vec<T> {
    let mut out = x.to_vec();
    axpy(alpha, s, &mut out);
    out
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    assert_eq!(a.len(), b.len(), "sub: length mismatch");
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Real>(alpha: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&x| alpha * x).collect()
}

pub fn is_finite<T: Real>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "max_abs_diff: length mismatch");
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}
