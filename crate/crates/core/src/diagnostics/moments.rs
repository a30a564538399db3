use std::f64::consts::PI;

use super::{require_samples, within_band, Accumulator, CheckReport, EQUALITY_SE, MIN_SAMPLES};
use crate::error::{check_dim, Result};
use crate::geometry::vector::{dot, norm, norm_sq};
use crate::geometry::{gaussian_vector, RngStream, Subspace};

fn equality_report(name: String, accs: &[Accumulator], theory: Vec<f64>, n: usize) -> CheckReport {
    let estimates: Vec<f64> = accs.iter().map(|a| a.mean()).collect();
    let std_errors: Vec<f64> = accs.iter().map(|a| a.stderr()).collect();
    let pass = estimates
        .iter()
        .zip(&theory)
        .zip(&std_errors)
        .all(|((e, t), s)| within_band(*e, *t, *s, EQUALITY_SE));
    CheckReport { name, estimates, theory, n_samples: n, std_errors, pass, rule: format!("|estimate - theory| <= {EQUALITY_SE} SE") }
}

/// `E‖Ps‖², E‖Ps‖⁴, E‖Ps‖⁶` for `s ~ N(0, I_d)` against `k, k(k+2), k(k+2)(k+4)`.
pub fn check_projector_moments(subspace: &Subspace<f64>, n: usize, rng: &mut RngStream) -> Result<CheckReport> {
    require_samples(n, MIN_SAMPLES)?;
    let k = subspace.rank() as f64;
    let mut accs = [Accumulator::default(); 3];
    for _ in 0..n {
        let s: Vec<f64> = gaussian_vector(rng, subspace.ambient_dim());
        let r2 = norm_sq(&subspace.coords(&s));
        accs[0].push(r2);
        accs[1].push(r2 * r2);
        accs[2].push(r2 * r2 * r2);
    }
    let theory = vec![k, k * (k + 2.0), k * (k + 2.0) * (k + 4.0)];
    Ok(equality_report(format!("projector_moments[k={}]", subspace.rank()), &accs, theory, n))
}

/// `E[(aᵀs)² ‖Ps‖²]` against `k‖a‖² + 2 aᵀPa`.
pub fn check_cross_moment(subspace: &Subspace<f64>, a: &[f64], n: usize, rng: &mut RngStream) -> Result<CheckReport> {
    require_samples(n, MIN_SAMPLES)?;
    check_dim(subspace.ambient_dim(), a.len())?;
    let k = subspace.rank() as f64;
    let mut acc = Accumulator::default();
    for _ in 0..n {
        let s: Vec<f64> = gaussian_vector(rng, subspace.ambient_dim());
        let proj = dot(a, &s);
        acc.push(proj * proj * norm_sq(&subspace.coords(&s)));
    }
    let a_pa = norm_sq(&subspace.coords(a));
    let theory = k * norm_sq(a) + 2.0 * a_pa;
    Ok(equality_report(
        format!("cross_moment[k={},|a|={:.3},aPa={:.3}]", subspace.rank(), norm(a), a_pa),
        &[acc],
        vec![theory],
        n,
    ))
}

/// `E|⟨g, s⟩|` against `√(2/π) ‖g‖`.
pub fn check_halfnormal(g: &[f64], n: usize, rng: &mut RngStream) -> Result<CheckReport> {
    require_samples(n, MIN_SAMPLES)?;
    let mut acc = Accumulator::default();
    for _ in 0..n {
        let s: Vec<f64> = gaussian_vector(rng, g.len());
        acc.push(dot(g, &s).abs());
    }
    let theory = (2.0 / PI).sqrt() * norm(g);
    Ok(equality_report(format!("halfnormal[|g|={:.3}]", norm(g)), &[acc], vec![theory], n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(tag: &str) -> RngStream {
        RngStream::for_role(2024, 0, tag)
    }

    #[test]
    fn projector_targets() {
        for (d, k, want) in [(10, 1, [1.0, 3.0, 15.0]), (12, 2, [2.0, 8.0, 48.0]), (50, 7, [7.0, 63.0, 693.0])] {
            let s = Subspace::random(&mut rng("sub"), d, k).unwrap();
            let r = check_projector_moments(&s, MIN_SAMPLES, &mut rng("mc")).unwrap();
            assert_eq!(r.theory, want.to_vec());
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn cross_moment_cases() {
        let s = Subspace::<f64>::coordinate_axes(8, &[0, 1, 2]).unwrap();
        let zero = check_cross_moment(&s, &[0.0; 8], MIN_SAMPLES, &mut rng("a")).unwrap();
        assert_eq!((zero.estimates[0], zero.theory[0], zero.pass), (0.0, 0.0, true));
        let mut inside = vec![0.0; 8];
        inside[1] = 1.0;
        let r = check_cross_moment(&s, &inside, MIN_SAMPLES, &mut rng("b")).unwrap();
        assert_eq!(r.theory[0], 5.0);
        assert!(r.pass, "{r:?}");
        let mut outside = vec![0.0; 8];
        outside[6] = 1.0;
        let r = check_cross_moment(&s, &outside, MIN_SAMPLES, &mut rng("c")).unwrap();
        assert_eq!(r.theory[0], 3.0);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn halfnormal_cases() {
        let zero = check_halfnormal(&[0.0; 4], MIN_SAMPLES, &mut rng("z")).unwrap();
        assert_eq!((zero.estimates[0], zero.pass), (0.0, true));
        let g = [0.6, 0.0, -0.8];
        let r = check_halfnormal(&g, MIN_SAMPLES, &mut rng("g")).unwrap();
        assert!((r.theory[0] - 0.7978845608028654).abs() < 1e-15);
        assert!(r.pass && r.std_errors[0] < 2e-3, "{r:?}");
        // same stream, doubled vector: estimate doubles exactly
        let g2 = [1.2, 0.0, -1.6];
        let r2 = check_halfnormal(&g2, MIN_SAMPLES, &mut rng("g")).unwrap();
        assert!((r2.estimates[0] - 2.0 * r.estimates[0]).abs() < 1e-12);
    }

    #[test]
    fn undersized_samples_rejected() {
        assert!(check_halfnormal(&[1.0], 10, &mut rng("x")).is_err());
    }
}
