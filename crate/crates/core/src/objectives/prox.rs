use super::{ObjectiveSpec, Tracking};
use crate::error::{domain, Result};
use crate::series::norm2;
use crate::Series;

#[derive(Debug, Clone, PartialEq)]
pub struct ProxResult {
    pub point: Series,
    /// Control cost at `point`.
    pub objective_contribution: f64,
}

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// `argmin_p Σ dt(½‖p − u_d‖² + l‖p‖₁) + ‖p − v‖²/(2τ)`, componentwise
/// `soft(v + a u_d, a l) / (1 + a)` with `a = τ dt`.
pub fn prox_control_term(v: &Series, tau: f64, spec: &ObjectiveSpec) -> Result<ProxResult> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(domain(format!("prox step must be positive, got {tau}")));
    }
    let mut point = v.clone();
    prox_control_in_place(
        point.as_mut_slice(),
        spec.u_d.as_slice(),
        tau * spec.dt(),
        spec.control_l1_weight,
    );
    let objective_contribution = spec.control_cost(&point);
    Ok(ProxResult {
        point,
        objective_contribution,
    })
}

pub(crate) fn prox_control_in_place(v: &mut [f64], u_d: &[f64], a: f64, l1: f64) {
    for (vi, &d) in v.iter_mut().zip(u_d) {
        *vi = soft(*vi + a * d, a * l1) / (1.0 + a);
    }
}

impl ObjectiveSpec {
    /// Dual set radius: per-node box bound for the pointwise term, ball
    /// radius otherwise.
    fn dual_radius(&self) -> f64 {
        let sw = self.state_weight;
        match &self.tracking {
            Tracking::PointwiseL1 { .. } => f64::NAN,
            Tracking::MaxNormWindow { gamma, .. } | Tracking::PointPenalty { gamma, .. } => gamma * sw.sqrt(),
            Tracking::GroupL2Window { gamma, .. } => gamma * self.dt().sqrt(),
        }
    }

    fn box_bounds(&self) -> Vec<f64> {
        match &self.tracking {
            Tracking::PointwiseL1 { weights, .. } => {
                let c = self.dt() * self.state_weight;
                self.tracked_nodes().iter().map(|&k| weights[k] * c).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Euclidean projection onto the dual set `D` of the tracking term.
    pub fn project_dual(&self, p: &mut [f64]) {
        let bd = self.block_dim();
        match &self.tracking {
            Tracking::PointwiseL1 { .. } => {
                for (block, b) in p.chunks_mut(bd).zip(self.box_bounds()) {
                    block.iter_mut().for_each(|v| *v = v.clamp(-b, b));
                }
            }
            Tracking::PointPenalty { .. } | Tracking::GroupL2Window { .. } => {
                let r = self.dual_radius();
                let n = norm2(p);
                if n > r {
                    let s = if n > 0.0 { r / n } else { 0.0 };
                    p.iter_mut().for_each(|v| *v *= s);
                }
            }
            Tracking::MaxNormWindow { .. } => {
                let norms: Vec<f64> = p.chunks(bd).map(norm2).collect();
                let projected = project_l1_ball(&norms, self.dual_radius());
                for ((block, &old), &new) in p.chunks_mut(bd).zip(&norms).zip(&projected) {
                    let s = if old > 0.0 { new / old } else { 0.0 };
                    block.iter_mut().for_each(|v| *v *= s);
                }
            }
        }
    }

    /// Whether `p ∈ D` up to `tol`.
    pub fn in_dual_set(&self, p: &[f64], tol: f64) -> bool {
        let bd = self.block_dim();
        match &self.tracking {
            Tracking::PointwiseL1 { .. } => p
                .chunks(bd)
                .zip(self.box_bounds())
                .all(|(block, b)| block.iter().all(|v| v.abs() <= b + tol)),
            Tracking::PointPenalty { .. } | Tracking::GroupL2Window { .. } => norm2(p) <= self.dual_radius() + tol,
            Tracking::MaxNormWindow { .. } => p.chunks(bd).map(norm2).sum::<f64>() <= self.dual_radius() + tol,
        }
    }

    /// `prox_{τφ}(v)` computed directly, without going through the dual
    /// projection.
    pub fn prox_tracking(&self, v: &[f64], tau: f64) -> Vec<f64> {
        let bd = self.block_dim();
        let mut out = v.to_vec();
        match &self.tracking {
            Tracking::PointwiseL1 { .. } => {
                for (block, b) in out.chunks_mut(bd).zip(self.box_bounds()) {
                    block.iter_mut().for_each(|x| *x = soft(*x, tau * b));
                }
            }
            Tracking::PointPenalty { .. } | Tracking::GroupL2Window { .. } => {
                let n = norm2(v);
                let t = tau * self.dual_radius();
                let s = if n > t { 1.0 - t / n } else { 0.0 };
                out.iter_mut().for_each(|x| *x *= s);
            }
            Tracking::MaxNormWindow { .. } => {
                // Blocks are clipped to a common norm level s with
                // Σ (‖v_k‖ − s)₊ = τR.
                let t = tau * self.dual_radius();
                let norms: Vec<f64> = v.chunks(bd).map(norm2).collect();
                let excess = |s: f64| norms.iter().map(|n| (n - s).max(0.0)).sum::<f64>();
                if excess(0.0) <= t {
                    out.iter_mut().for_each(|x| *x = 0.0);
                    return out;
                }
                let (mut lo, mut hi) = (0.0, norms.iter().cloned().fold(0.0, f64::max));
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if excess(mid) > t {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let s = 0.5 * (lo + hi);
                for (block, &n) in out.chunks_mut(bd).zip(&norms) {
                    if n > s {
                        let f = s / n;
                        block.iter_mut().for_each(|x| *x *= f);
                    }
                }
            }
        }
        out
    }

    /// An element of `∂φ(r)`. At kinks: zero for the pointwise term's zero
    /// coordinates, zero for balls at the origin, and the whole mass on the
    /// first maximal block for the max norm.
    pub fn tracking_subgradient(&self, r: &[f64]) -> Vec<f64> {
        let bd = self.block_dim();
        let mut p = vec![0.0; r.len()];
        match &self.tracking {
            Tracking::PointwiseL1 { .. } => {
                for ((pb, rb), b) in p.chunks_mut(bd).zip(r.chunks(bd)).zip(self.box_bounds()) {
                    for (pi, &ri) in pb.iter_mut().zip(rb) {
                        *pi = if ri == 0.0 { 0.0 } else { b * ri.signum() };
                    }
                }
            }
            Tracking::PointPenalty { .. } | Tracking::GroupL2Window { .. } => {
                let n = norm2(r);
                if n > 0.0 {
                    let s = self.dual_radius() / n;
                    p.iter_mut().zip(r).for_each(|(pi, ri)| *pi = s * ri);
                }
            }
            Tracking::MaxNormWindow { .. } => {
                let norms: Vec<f64> = r.chunks(bd).map(norm2).collect();
                let max = norms.iter().cloned().fold(0.0, f64::max);
                if max > 0.0 {
                    let b = norms.iter().position(|&n| n == max).unwrap();
                    let s = self.dual_radius() / max;
                    for i in 0..bd {
                        p[b * bd + i] = s * r[b * bd + i];
                    }
                }
            }
        }
        p
    }

    /// `G*(s) = sup_u ⟨s, u⟩ − Σ dt(½‖u − u_d‖² + l‖u‖₁)`.
    pub fn control_conjugate(&self, s: &[f64]) -> f64 {
        let (dt, l) = (self.dt(), self.control_l1_weight);
        s.iter()
            .zip(self.u_d.as_slice())
            .map(|(&si, &d)| {
                let u = soft(d + si / dt, l);
                si * u - dt * (0.5 * (u - d).powi(2) + l * u.abs())
            })
            .sum()
    }
}

/// Projection of a nonnegative vector onto `{a ≥ 0 : Σ a ≤ radius}`.
/// Sorting is stable, so ties resolve by index order.
pub(crate) fn project_l1_ball(a: &[f64], radius: f64) -> Vec<f64> {
    let total: f64 = a.iter().sum();
    if total <= radius {
        return a.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; a.len()];
    }
    let mut sorted = a.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - radius) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    a.iter().map(|v| (v - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{TimeGrid, TraceOperator};
    use crate::series::dot;

    fn grid() -> TimeGrid {
        TimeGrid::new(1.0, 4).unwrap()
    }

    fn spec(tracking: Tracking, l1: f64, u_d: f64) -> ObjectiveSpec {
        ObjectiveSpec::new(grid(), Series::constant(4, &[u_d]), l1, tracking, 0.5).unwrap()
    }

    fn all_variants() -> Vec<ObjectiveSpec> {
        vec![
            spec(
                Tracking::PointwiseL1 {
                    weights: vec![0.0, 1.0, 2.0, 0.5, 3.0],
                    target: vec![0.1, -0.2],
                },
                0.0,
                0.0,
            ),
            spec(
                Tracking::MaxNormWindow {
                    gamma: 1.5,
                    window: (1, 4),
                    target: vec![0.0, 0.3],
                },
                0.0,
                0.0,
            ),
            spec(
                Tracking::GroupL2Window {
                    gamma: 2.0,
                    trace: TraceOperator::new(2, 4, vec![1]).unwrap(),
                    target: vec![0.5],
                },
                0.0,
                0.0,
            ),
            spec(
                Tracking::PointPenalty {
                    gamma: 0.7,
                    index: 3,
                    target: vec![1.0, 1.0],
                },
                0.0,
                0.0,
            ),
        ]
    }

    fn pseudo_random(seed: u64, len: usize, scale: f64) -> Vec<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..len)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                scale * (((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0)
            })
            .collect()
    }

    #[test]
    fn control_prox_closed_forms() {
        // τ dt = 1 with dt = 0.25.
        let s = spec(
            Tracking::PointPenalty {
                gamma: 0.0,
                index: 0,
                target: vec![0.0],
            },
            0.0,
            0.0,
        );
        let v = Series::from_scalars(vec![1.0, -2.0, 0.5, 4.0]);
        let p = prox_control_term(&v, 4.0, &s).unwrap();
        assert_eq!(p.point.as_slice(), &[0.5, -1.0, 0.25, 2.0]);
        let s = spec(
            Tracking::PointPenalty {
                gamma: 0.0,
                index: 0,
                target: vec![0.0],
            },
            1.0,
            0.0,
        );
        let small = Series::from_scalars(vec![0.2, -0.9, 0.0, 0.99]);
        assert!(prox_control_term(&small, 4.0, &s)
            .unwrap()
            .point
            .as_slice()
            .iter()
            .all(|&x| x == 0.0));
        assert!(prox_control_term(&small, 0.0, &s).is_err());
    }

    #[test]
    fn control_prox_beats_grid_search() {
        let s = spec(
            Tracking::PointPenalty {
                gamma: 0.0,
                index: 0,
                target: vec![0.0],
            },
            1.0,
            0.3,
        );
        let tau = 2.5;
        let v = pseudo_random(7, 4, 1.5);
        let p = prox_control_term(&Series::from_scalars(v.clone()), tau, &s).unwrap();
        let dt = s.dt();
        let each = |x: f64, vi: f64| dt * (0.5 * (x - 0.3).powi(2) + x.abs()) + (x - vi).powi(2) / (2.0 * tau);
        for (i, &vi) in v.iter().enumerate() {
            let best = (0..=4000)
                .map(|j| vi - 2.0 + j as f64 * 1e-3)
                .map(|x| each(x, vi))
                .fold(f64::INFINITY, f64::min);
            assert!(each(p.point.as_slice()[i], vi) <= best + 1e-12);
        }
    }

    #[test]
    fn projection_examples() {
        let s = spec(
            Tracking::MaxNormWindow {
                gamma: 2.0,
                window: (1, 2),
                target: vec![0.0],
            },
            0.0,
            0.0,
        );
        let r = s.dual_radius();
        let mut p = vec![3.0 * r, 0.0];
        s.project_dual(&mut p);
        assert!((p[0] - r).abs() < 1e-15 && p[1] == 0.0);
        let mut inside = vec![0.3 * r, -0.5 * r];
        let before = inside.clone();
        s.project_dual(&mut inside);
        assert_eq!(inside, before);

        let g = spec(
            Tracking::GroupL2Window {
                gamma: 1.0,
                trace: TraceOperator::new(0, 1, vec![0]).unwrap(),
                target: vec![0.0],
            },
            0.0,
            0.0,
        );
        let r = g.dual_radius();
        let mut p = vec![2.0 * r * 0.6, 2.0 * r * 0.8];
        g.project_dual(&mut p);
        assert!((norm2(&p) - r).abs() < 1e-14);
    }

    #[test]
    fn ties_split_evenly() {
        assert_eq!(project_l1_ball(&[2.0, 2.0, 0.5], 1.0), vec![0.5, 0.5, 0.0]);
        assert_eq!(project_l1_ball(&[1.0, 0.0], 0.0), vec![0.0, 0.0]);
    }

    #[test]
    fn moreau_identity_every_variant() {
        for (i, s) in all_variants().iter().enumerate() {
            let len = s.tracked_nodes().len() * s.block_dim();
            for trial in 0..20u64 {
                let v = pseudo_random(100 * i as u64 + trial, len, 3.0);
                let tau = 0.1 + 0.2 * trial as f64;
                let prox = s.prox_tracking(&v, tau);
                let mut dual: Vec<f64> = v.iter().map(|x| x / tau).collect();
                s.project_dual(&mut dual);
                for j in 0..len {
                    let err = (prox[j] + tau * dual[j] - v[j]).abs();
                    assert!(err < 1e-10, "variant {i} trial {trial}: {err}");
                }
            }
        }
    }

    #[test]
    fn conjugacy_inequality_and_equality() {
        for (i, s) in all_variants().iter().enumerate() {
            let len = s.tracked_nodes().len() * s.block_dim();
            for trial in 0..20u64 {
                let r = pseudo_random(7 + 13 * i as u64 + trial, len, 2.0);
                let mut p = pseudo_random(1000 + trial, len, 4.0);
                s.project_dual(&mut p);
                assert!(s.in_dual_set(&p, 1e-12));
                assert!(s.tracking_value(&r) + 1e-12 >= dot(&r, &p));
                let sub = s.tracking_subgradient(&r);
                assert!(s.in_dual_set(&sub, 1e-12));
                assert!((s.tracking_value(&r) - dot(&r, &sub)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn control_conjugate_matches_brute_force() {
        let s = spec(
            Tracking::PointPenalty {
                gamma: 0.0,
                index: 0,
                target: vec![0.0],
            },
            1.0,
            -0.4,
        );
        let sv = pseudo_random(3, 4, 1.0);
        let dt = s.dt();
        let brute: f64 = sv
            .iter()
            .map(|&si| {
                (0..=200_000)
                    .map(|j| -10.0 + j as f64 * 1e-4)
                    .map(|u| si * u - dt * (0.5 * (u + 0.4f64).powi(2) + u.abs()))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum();
        assert!((s.control_conjugate(&sv) - brute).abs() < 1e-7);
    }
}
