//! Optimizers checked against independent straight-line implementations.

use ncrs_core::algorithms::{ncrs_run, NoInstrument, StepSchedule};
use ncrs_core::geometry::{gaussian_vector, RngStream, Subspace};
use ncrs_core::objectives::{InnerFunction, Objective, RidgeObjective};
use ncrs_core::oracles::SignOracle;

fn half_norm_sq_of_coords(basis: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for row in basis {
        let mut z = 0.0;
        for (u, v) in row.iter().zip(x) {
            z += u * v;
        }
        total += z * z;
    }
    0.5 * total
}

fn grad_norm(basis: &[Vec<f64>], x: &[f64]) -> f64 {
    // ∇(½‖Ux‖²) = UᵀUx
    let d = x.len();
    let mut g = vec![0.0; d];
    for row in basis {
        let z: f64 = row.iter().zip(x).map(|(u, v)| u * v).sum();
        for i in 0..d {
            g[i] += z * row[i];
        }
    }
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn ncrs_matches_reference_loop_and_halves_the_average() {
    let (d, k, iterations) = (10, 10, 10_000);
    let subspace = Subspace::random(&mut RngStream::new(42, 0), d, k).unwrap();
    let basis: Vec<Vec<f64>> = subspace.rows().map(|r| r.to_vec()).collect();
    let objective = RidgeObjective::exact(subspace, InnerFunction::PureQuadratic).unwrap();
    let theta1: Vec<f64> = gaussian_vector(&mut RngStream::new(42, 1), d);

    // reference: θ ← θ + α s when f(θ + α s) < f(θ), α = 1/√(kT)
    let alpha = 1.0 / ((k * iterations) as f64).sqrt();
    let mut dirs = RngStream::new(42, 2);
    let mut noise = RngStream::new(42, 3);
    let mut theta = theta1.clone();
    let mut accepted = 0;
    let mut sum = 0.0;
    let mut first = 0.0;
    for t in 1..=iterations {
        let g = grad_norm(&basis, &theta);
        if t == 1 {
            first = g;
        }
        sum += g;
        let s: Vec<f64> = (0..d).map(|_| dirs.standard_normal()).collect();
        let y: Vec<f64> = theta.iter().zip(&s).map(|(a, b)| a + alpha * b).collect();
        let (fx, fy) = (half_norm_sq_of_coords(&basis, &theta), half_norm_sq_of_coords(&basis, &y));
        let u = noise.uniform();
        let take = if fx != fy { fy < fx } else { u < 0.5 };
        if take {
            theta = y;
            accepted += 1;
        }
    }
    let reference_avg = sum / iterations as f64;

    let mut oracle = SignOracle::new(&objective, 0.5, RngStream::new(42, 3)).unwrap();
    let schedule = StepSchedule::theory_constant(1.0, k, iterations).unwrap();
    let mut lib_sum = 0.0;
    let mut instrument = |r: &ncrs_core::algorithms::StepRecord<'_, f64>| {
        lib_sum += ncrs_core::geometry::vector::norm(&objective.gradient(r.theta));
    };
    let out = ncrs_run(&mut oracle, theta1, &schedule, iterations, &mut RngStream::new(42, 2), &mut instrument).unwrap();

    assert_eq!(out.accepted, accepted);
    for (a, b) in out.final_theta.iter().zip(&theta) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    let lib_avg = lib_sum / iterations as f64;
    assert!((lib_avg - reference_avg).abs() < 1e-9 * reference_avg);
    assert!(reference_avg <= 0.5 * first, "average {reference_avg} vs start {first}");
}

#[test]
fn ncrs_in_f32_follows_f64() {
    let (d, k, iterations) = (12, 3, 500);
    let subspace = Subspace::random(&mut RngStream::new(5, 0), d, k).unwrap();
    let obj64 = RidgeObjective::exact(subspace.clone(), InnerFunction::PureQuadratic).unwrap();
    let obj32 = RidgeObjective::exact(subspace.cast::<f32>(), InnerFunction::PureQuadratic).unwrap();
    let theta64: Vec<f64> = gaussian_vector(&mut RngStream::new(5, 1), d);
    let theta32: Vec<f32> = theta64.iter().map(|&v| v as f32).collect();
    let schedule = StepSchedule::constant(0.05, iterations).unwrap();
    let mut o64 = SignOracle::new(&obj64, 0.5, RngStream::new(5, 2)).unwrap();
    let mut o32 = SignOracle::new(&obj32, 0.5, RngStream::new(5, 2)).unwrap();
    let a = ncrs_run(&mut o64, theta64, &schedule, iterations, &mut RngStream::new(5, 3), &mut NoInstrument).unwrap();
    let b = ncrs_run(&mut o32, theta32, &schedule, iterations, &mut RngStream::new(5, 3), &mut NoInstrument).unwrap();
    let fa = obj64.value(&a.final_theta);
    let fb = obj32.value(&b.final_theta) as f64;
    assert!(fa < 0.1 * obj64.value(&gaussian_vector::<f64>(&mut RngStream::new(5, 1), d)));
    assert!((fa - fb).abs() < 0.05 * (1.0 + fa), "{fa} vs {fb}");
}
