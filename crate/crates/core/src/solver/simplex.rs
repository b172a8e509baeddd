//! Minimization of the potential over the probability simplex.
//!
//! Entropic mirror descent (multiplicative weights) with step halving on
//! non-decrease. The Frank–Wolfe gap `⟨p, g⟩ − min_k g_k` bounds
//! `f(p) − min f` for convex objectives and is the stopping rule.

use super::profile::Profile;

const MAX_ITERATIONS: usize = 200_000;
const MIN_STEP: f64 = 1e-300;
const GRID_RESOLUTION: usize = 40;
/// Largest color count for which the barycentric grid safety net runs.
pub const GRID_MAX_COLORS: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct SimplexMin {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

fn fw_gap(p: &[f64], g: &[f64]) -> f64 {
    let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
    p.iter().zip(g).map(|(pk, gk)| pk * (gk - gmin)).sum::<f64>().max(0.0)
}

pub(crate) fn mirror_descent(profile: &Profile, start: Vec<f64>, tol_abs: f64) -> SimplexMin {
    let r = start.len();
    let mut p = start;
    let mut g = vec![0.0; r];
    let mut f = profile.value(&p);
    profile.gradient(&p, &mut g);
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut step = if scale > 0.0 { 1.0 / scale } else { 1.0 };
    let mut q = vec![0.0; r];
    let mut iterations = 0;
    let mut gap = fw_gap(&p, &g);

    while gap > tol_abs && iterations < MAX_ITERATIONS {
        iterations += 1;
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        let mut accepted = false;
        while step > MIN_STEP {
            let mut total = 0.0;
            for k in 0..r {
                q[k] = p[k] * (-(step * (g[k] - gmin)).min(700.0)).exp();
                total += q[k];
            }
            q.iter_mut().for_each(|v| *v /= total);
            let fq = profile.value(&q);
            if fq < f {
                std::mem::swap(&mut p, &mut q);
                f = fq;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        profile.gradient(&p, &mut g);
        gap = fw_gap(&p, &g);
    }
    SimplexMin { point: p, value: f, iterations }
}

/// Best point of the barycentric grid with spacing `1/40`.
pub(crate) fn grid_best(profile: &Profile, r: usize) -> Vec<f64> {
    let mut best = (f64::INFINITY, vec![1.0 / r as f64; r]);
    let mut counts = vec![0usize; r];
    fn rec(profile: &Profile, counts: &mut Vec<usize>, k: usize, left: usize, best: &mut (f64, Vec<f64>)) {
        let r = counts.len();
        if k == r - 1 {
            counts[k] = left;
            let p: Vec<f64> = counts.iter().map(|&c| c as f64 / GRID_RESOLUTION as f64).collect();
            let v = profile.value(&p);
            if v < best.0 {
                *best = (v, p);
            }
            return;
        }
        for c in 0..=left {
            counts[k] = c;
            rec(profile, counts, k + 1, left - c, best);
        }
    }
    rec(profile, &mut counts, 0, GRID_RESOLUTION, &mut best);
    // Interior start so that multiplicative updates can move every coordinate.
    let floor = 1e-3;
    let p: Vec<f64> = best.1.iter().map(|v| v + floor).collect();
    let s: f64 = p.iter().sum();
    p.into_iter().map(|v| v / s).collect()
}

pub(crate) fn minimize(profile: &Profile, tol_abs: f64) -> SimplexMin {
    let r = profile.dimension();
    let mut best = mirror_descent(profile, vec![1.0 / r as f64; r], tol_abs);
    if r <= GRID_MAX_COLORS {
        let refined = mirror_descent(profile, grid_best(profile, r), tol_abs);
        if refined.value < best.value - tol_abs {
            let iterations = best.iterations + refined.iterations;
            best = SimplexMin { iterations, ..refined };
        } else {
            best.iterations += refined.iterations;
        }
    }
    best
}
