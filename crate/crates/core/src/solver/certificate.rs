use super::LinearMap;
use crate::dynamics::DiscreteLinearSystem;
use crate::error::{Error, Result};
use crate::objectives::{ObjectiveSpec, Tracking};
use crate::series::norm2;
use crate::Series;

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// Controls this small relative to the largest one sit at the kink of
/// `|·|`.
fn zero_level(u: &Series) -> f64 {
    1e-10 * u.as_slice().iter().fold(1.0f64, |a, v| a.max(v.abs()))
}

/// Smallest element of `∂G(u) + s` with `s` fixed.
fn control_part(spec: &ObjectiveSpec, u: &Series, s: &[f64]) -> Vec<f64> {
    let (dt, l) = (spec.dt(), spec.control_l1_weight);
    let zero = zero_level(u);
    u.as_slice()
        .iter()
        .zip(spec.u_d.as_slice())
        .zip(s)
        .map(|((&ui, &d), &si)| {
            let a = dt * (ui - d) + si;
            if ui.abs() > zero {
                a + dt * l * ui.signum()
            } else {
                soft(a, dt * l)
            }
        })
        .collect()
}

/// Euclidean norm of a small element of `∂J(u)`.
///
/// With a dual variable (typically the solver's), the tracking part of the
/// subgradient is fixed to `Kᵀp` and only the control part is minimised.
/// Without one, pointwise L¹ tracking is supported: the minimum over the
/// whole subdifferential is found by projected gradient on the free dual
/// coordinates.
pub fn subgradient_certificate(
    sys: &DiscreteLinearSystem,
    spec: &ObjectiveSpec,
    u: &Series,
    dual: Option<&[f64]>,
) -> Result<f64> {
    let map = LinearMap::new(sys, spec)?;
    let x = sys.simulate(u)?;
    let r = spec.residual(&x);
    if let Some(p) = dual {
        if p.len() != r.len() {
            return Err(Error::Dimension {
                step: 0,
                detail: format!("dual has length {}, residual has {}", p.len(), r.len()),
            });
        }
        let mut p = p.to_vec();
        spec.project_dual(&mut p);
        let s = map.apply_transpose(&p);
        return Ok(norm2(&control_part(spec, u, s.as_slice())));
    }
    if !matches!(spec.tracking, Tracking::PointwiseL1 { .. }) {
        return Err(Error::Unsupported(
            "certificate without a dual variable needs pointwise L1 tracking".into(),
        ));
    }
    if r.is_empty() {
        return Ok(norm2(&control_part(spec, u, &vec![0.0; u.as_slice().len()])));
    }

    // ∂φ(r): fixed at the box face where r ≠ 0, the full interval where
    // r = 0 (up to rounding).
    let full = spec.tracking_subgradient(&vec![1.0; r.len()]);
    let scale = r.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let free: Vec<bool> = r.iter().map(|v| v.abs() <= 1e-10 * scale).collect();
    let mut p: Vec<f64> = spec
        .tracking_subgradient(&r)
        .into_iter()
        .zip(&free)
        .map(|(v, &f)| if f { 0.0 } else { v })
        .collect();
    let clamp = |p: &mut [f64]| {
        for ((pi, &f), &b) in p.iter_mut().zip(&free).zip(&full) {
            if f {
                *pi = pi.clamp(-b, b);
            }
        }
    };
    let dt = spec.dt();
    let lipschitz = 2.0 * (map.weighted_norm(50, 7) * 1.05).powi(2) * dt;
    if lipschitz == 0.0 {
        return Ok(norm2(&control_part(spec, u, map.apply_transpose(&p).as_slice())));
    }
    let step = 1.0 / lipschitz;
    let smooth_part = |p: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let s = map.apply_transpose(p);
        let (dtl, d) = (dt * spec.control_l1_weight, spec.u_d.as_slice());
        let zero = zero_level(u);
        let mut z = Vec::with_capacity(s.as_slice().len());
        let mut grad_s = Vec::with_capacity(s.as_slice().len());
        for ((&ui, &di), &si) in u.as_slice().iter().zip(d).zip(s.as_slice()) {
            let a = dt * (ui - di) + si;
            let zi = if ui.abs() > zero {
                a + dtl * ui.signum()
            } else {
                soft(a, dtl)
            };
            z.push(zi);
            grad_s.push(2.0 * zi);
        }
        (z, grad_s)
    };
    let mut y = p.clone();
    let mut t = 1.0f64;
    let mut best = f64::INFINITY;
    for _ in 0..20_000 {
        let (z, gs) = smooth_part(&y);
        best = best.min(norm2(&z));
        let gs = Series::from_flat(u.dim(), gs).expect("shape");
        let grad = map.apply(&gs);
        let mut next: Vec<f64> = y
            .iter()
            .zip(&grad)
            .zip(&free)
            .map(|((yi, g), &f)| if f { yi - step * g } else { *yi })
            .collect();
        clamp(&mut next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = next
            .iter()
            .zip(&p)
            .map(|(n, o)| n + (t - 1.0) / t_next * (n - o))
            .collect();
        clamp(&mut y);
        p = next;
        t = t_next;
        if best < 1e-13 {
            break;
        }
    }
    let (z, _) = smooth_part(&p);
    Ok(best.min(norm2(&z)))
}
