//! Squeezing-enabled electron quantum orbits.
//!
//! The orbits are the complex roots of the five saddle-point conditions of
//! the quantum-orbit action: ionization and recombination energy conditions,
//! the two momentum return conditions, and the fluctuating-quadrature
//! condition carrying the `−(i/σ)(ε − ε̄)` photon-statistics term. All time
//! integrals are exact trigonometric antiderivatives, valid for complex
//! arguments. Roots are found by damped Newton iteration from a seed grid,
//! deduplicated, and filtered to the physical ionization branch.

use crate::driver::Quadrature;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrbitsError {
    #[error("unconverged solution (residual {0:.3e})")]
    Unconverged(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Mean fields, atom, emission frequency and marginal variance defining one
/// saddle-point system.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleSystemConfig {
    pub eps_par_x: f64,
    pub eps_par_y: f64,
    pub eps_perp_x: f64,
    pub eps_perp_y: f64,
    pub omega: f64,
    pub ip: f64,
    /// Emitted harmonic frequency Ω (a.u.).
    pub harmonic_omega: f64,
    /// Quadrature of the perpendicular field that fluctuates.
    pub squeezed_quadrature: Quadrature,
    /// Marginal variance of that quadrature, `σ = 4·I_squ`.
    pub sigma: f64,
}

impl SaddleSystemConfig {
    pub fn validate(&self) -> Result<(), OrbitsError> {
        if !(self.omega > 0.0) {
            return Err(OrbitsError::InvalidParameter("omega must be > 0".into()));
        }
        if self.sigma < 0.0 {
            return Err(OrbitsError::InvalidParameter("sigma must be >= 0".into()));
        }
        if !(self.harmonic_omega > self.ip) {
            return Err(OrbitsError::InvalidParameter(
                "harmonic energy must exceed Ip (above-threshold harmonics)".into(),
            ));
        }
        Ok(())
    }

    pub fn harmonic_order(&self) -> f64 {
        self.harmonic_omega / self.omega
    }

    /// Mean value of the fluctuating quadrature.
    pub fn fluct_mean(&self) -> f64 {
        match self.squeezed_quadrature {
            Quadrature::X => self.eps_perp_x,
            Quadrature::Y => self.eps_perp_y,
        }
    }

    pub fn with_order(&self, q: f64) -> Self {
        SaddleSystemConfig { harmonic_omega: q * self.omega, ..*self }
    }

    /// Perpendicular quadrature coefficients with the fluctuating one set to
    /// `eps_fluct`.
    fn perp_coeffs(&self, eps_fluct: C64) -> (C64, C64) {
        match self.squeezed_quadrature {
            Quadrature::X => (eps_fluct, C64::new(self.eps_perp_y, 0.0)),
            Quadrature::Y => (C64::new(self.eps_perp_x, 0.0), eps_fluct),
        }
    }

    fn par_coeffs(&self) -> (C64, C64) {
        (C64::new(self.eps_par_x, 0.0), C64::new(self.eps_par_y, 0.0))
    }
}

/// Trajectory families, labeled by real excursion time within each
/// half-cycle set. Plotting heuristics, not physics.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Short,
    Long,
    ExtraShort,
    ExtraLong,
    Unclassified,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Short => "short",
            Family::Long => "long",
            Family::ExtraShort => "extra-short",
            Family::ExtraLong => "extra-long",
            Family::Unclassified => "unclassified",
        }
    }
}

/// One complex quantum orbit.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct SaddleSolution {
    pub t_ion: C64,
    pub t_re: C64,
    pub p_par: C64,
    pub p_perp: C64,
    pub eps_fluct: C64,
    pub residual_norm: f64,
    pub harmonic_order: f64,
    pub family: Family,
}

impl SaddleSolution {
    pub fn excursion(&self) -> f64 {
        self.t_re.re - self.t_ion.re
    }
}

// Closed-form building blocks over complex time.

fn a_component(cx: C64, cy: C64, w: f64, t: C64) -> C64 {
    (cx * (w * t).cos() + cy * (w * t).sin()) / w
}

/// d/dt of `a_component`.
fn a_dot(cx: C64, cy: C64, w: f64, t: C64) -> C64 {
    -cx * (w * t).sin() + cy * (w * t).cos()
}

/// Antiderivative of `a_component`.
fn ia_component(cx: C64, cy: C64, w: f64, t: C64) -> C64 {
    (cx * (w * t).sin() - cy * (w * t).cos()) / (w * w)
}

fn int_cos(w: f64, t: C64) -> C64 {
    (w * t).sin() / w
}

fn int_sin(w: f64, t: C64) -> C64 {
    -(w * t).cos() / w
}

fn int_cos2(w: f64, t: C64) -> C64 {
    t / 2.0 + (2.0 * w * t).sin() / (4.0 * w)
}

fn int_sin2(w: f64, t: C64) -> C64 {
    t / 2.0 - (2.0 * w * t).sin() / (4.0 * w)
}

fn int_sincos(w: f64, t: C64) -> C64 {
    -(2.0 * w * t).cos() / (4.0 * w)
}

/// Variable vector `(t_ion, t_re, p_par, p_perp, eps_fluct)`.
pub type SaddleVars = [C64; 5];

/// Residuals of the five saddle-point conditions at `vars`:
/// ionization energy, perpendicular and parallel momentum return,
/// recombination energy, and the fluctuating-quadrature condition (cos kernel
/// for `X`, sin kernel for `Y`). With `σ = 0` the last condition degenerates
/// to pinning the fluctuation at its mean.
pub fn saddle_residuals(vars: &SaddleVars, cfg: &SaddleSystemConfig) -> [C64; 5] {
    let [t1, t2, pp, pq, ef] = *vars;
    let w = cfg.omega;
    let (px, py) = cfg.par_coeffs();
    let (qx, qy) = cfg.perp_coeffs(ef);

    let vp1 = pp + a_component(px, py, w, t1);
    let vq1 = pq + a_component(qx, qy, w, t1);
    let vp2 = pp + a_component(px, py, w, t2);
    let vq2 = pq + a_component(qx, qy, w, t2);
    let dt = t2 - t1;

    let r1 = 0.5 * (vp1 * vp1 + vq1 * vq1) + cfg.ip;
    let r2 = pq * dt + ia_component(qx, qy, w, t2) - ia_component(qx, qy, w, t1);
    let r3 = pp * dt + ia_component(px, py, w, t2) - ia_component(px, py, w, t1);
    let r4 = 0.5 * (vp2 * vp2 + vq2 * vq2) + cfg.ip - cfg.harmonic_omega;

    let r5 = if cfg.sigma == 0.0 {
        ef - cfg.fluct_mean()
    } else {
        let gauss = C64::i() / cfg.sigma * (ef - cfg.fluct_mean());
        match cfg.squeezed_quadrature {
            Quadrature::X => {
                (pq * (int_cos(w, t2) - int_cos(w, t1))
                    + qx / w * (int_cos2(w, t2) - int_cos2(w, t1))
                    + qy / w * (int_sincos(w, t2) - int_sincos(w, t1)))
                    / w
                    - gauss
            }
            Quadrature::Y => {
                (pq * (int_sin(w, t2) - int_sin(w, t1))
                    + qx / w * (int_sincos(w, t2) - int_sincos(w, t1))
                    + qy / w * (int_sin2(w, t2) - int_sin2(w, t1)))
                    / w
                    - gauss
            }
        }
    };
    [r1, r2, r3, r4, r5]
}

/// Analytic Jacobian of [`saddle_residuals`]; all residuals are holomorphic
/// in the five unknowns.
pub fn saddle_jacobian(vars: &SaddleVars, cfg: &SaddleSystemConfig) -> [[C64; 5]; 5] {
    let [t1, t2, pp, pq, ef] = *vars;
    let w = cfg.omega;
    let (px, py) = cfg.par_coeffs();
    let (qx, qy) = cfg.perp_coeffs(ef);
    let zero = C64::new(0.0, 0.0);

    let vp1 = pp + a_component(px, py, w, t1);
    let vq1 = pq + a_component(qx, qy, w, t1);
    let vp2 = pp + a_component(px, py, w, t2);
    let vq2 = pq + a_component(qx, qy, w, t2);
    let dt = t2 - t1;

    // kernel multiplying the fluctuating coefficient inside A_perp
    let kern = |t: C64| match cfg.squeezed_quadrature {
        Quadrature::X => (w * t).cos() / w,
        Quadrature::Y => (w * t).sin() / w,
    };

    let mut j = [[zero; 5]; 5];

    // r1: ionization energy
    j[0][0] = vp1 * a_dot(px, py, w, t1) + vq1 * a_dot(qx, qy, w, t1);
    j[0][2] = vp1;
    j[0][3] = vq1;
    j[0][4] = vq1 * kern(t1);

    // r2: perpendicular return
    j[1][0] = -vq1;
    j[1][1] = vq2;
    j[1][3] = dt;
    j[1][4] = match cfg.squeezed_quadrature {
        Quadrature::X => (int_cos(w, t2) - int_cos(w, t1)) / w,
        Quadrature::Y => (int_sin(w, t2) - int_sin(w, t1)) / w,
    };

    // r3: parallel return
    j[2][0] = -vp1;
    j[2][1] = vp2;
    j[2][2] = dt;

    // r4: recombination energy
    j[3][1] = vp2 * a_dot(px, py, w, t2) + vq2 * a_dot(qx, qy, w, t2);
    j[3][2] = vp2;
    j[3][3] = vq2;
    j[3][4] = vq2 * kern(t2);

    // r5: fluctuating quadrature
    if cfg.sigma == 0.0 {
        j[4][4] = C64::new(1.0, 0.0);
    } else {
        j[4][0] = -vq1 * kern(t1) / w;
        j[4][1] = vq2 * kern(t2) / w;
        j[4][3] = match cfg.squeezed_quadrature {
            Quadrature::X => (int_cos(w, t2) - int_cos(w, t1)) / w,
            Quadrature::Y => (int_sin(w, t2) - int_sin(w, t1)) / w,
        };
        j[4][4] = match cfg.squeezed_quadrature {
            Quadrature::X => (int_cos2(w, t2) - int_cos2(w, t1)) / (w * w),
            Quadrature::Y => (int_sin2(w, t2) - int_sin2(w, t1)) / (w * w),
        } - C64::i() / cfg.sigma;
    }
    j
}

fn max_norm(r: &[C64; 5]) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting for the 5×5 Newton step.
fn solve5(mut a: [[C64; 5]; 5], mut b: [C64; 5]) -> Option<[C64; 5]> {
    for col in 0..5 {
        let pivot = (col..5).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..5 {
            let f = a[row][col] / a[col][col];
            for k in col..5 {
                let delta = f * a[col][k];
                a[row][k] -= delta;
            }
            let db = f * b[col];
            b[row] -= db;
        }
    }
    let mut x = [C64::new(0.0, 0.0); 5];
    for row in (0..5).rev() {
        let mut acc = b[row];
        for k in row + 1..5 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
}

/// Damped Newton iteration from one seed. Steps are halved up to eight times
/// on residual increase; a stalled or exhausted iteration returns `None`.
fn newton(
    seed: SaddleVars,
    cfg: &SaddleSystemConfig,
    tol: f64,
    max_iter: usize,
) -> Option<(SaddleVars, f64)> {
    let mut vars = seed;
    let mut res = saddle_residuals(&vars, cfg);
    let mut rn = max_norm(&res);
    if !rn.is_finite() {
        return None;
    }
    for _ in 0..max_iter {
        if rn < tol {
            return Some((vars, rn));
        }
        let jac = saddle_jacobian(&vars, cfg);
        let step = solve5(jac, res)?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=8 {
            let mut trial = vars;
            for k in 0..5 {
                trial[k] -= lambda * step[k];
            }
            let trial_res = saddle_residuals(&trial, cfg);
            let trial_rn = max_norm(&trial_res);
            if trial_rn.is_finite() && trial_rn < rn {
                accepted = Some((trial, trial_res, trial_rn));
                break;
            }
            lambda *= 0.5;
        }
        let (v, r, n) = accepted?;
        vars = v;
        res = r;
        rn = n;
    }
    (rn < tol).then_some((vars, rn))
}

/// Seed layout for the Newton search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub n_tion: usize,
    pub n_tre: usize,
    /// Imaginary parts seeded for the ionization time (a.u.).
    pub im_tion: Vec<f64>,
    /// Imaginary parts seeded for the recombination time (a.u.).
    pub im_tre: Vec<f64>,
    /// Window for `Re(t_ion)` (and the seeded `Re` ranges).
    pub window: (f64, f64),
}

impl SeedGrid {
    /// 40×40 real-part nodes on one driver period window `[-π/ω, 2π/ω]`,
    /// with `Im(t_ion)` seeded at `{0.1, 0.5}/ω` and `Im(t_re)` at `±0.1/ω`.
    pub fn default_for(omega: f64) -> Self {
        SeedGrid {
            n_tion: 40,
            n_tre: 40,
            im_tion: vec![0.1 / omega, 0.5 / omega],
            im_tre: vec![0.1 / omega, -0.1 / omega],
            window: (-std::f64::consts::PI / omega, 2.0 * std::f64::consts::PI / omega),
        }
    }

    fn seeds(&self, cfg: &SaddleSystemConfig) -> Vec<SaddleVars> {
        let (lo, hi) = self.window;
        let lin = |n: usize, k: usize| lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
        let w = cfg.omega;
        let (px, py) = cfg.par_coeffs();
        let (qx, qy) = cfg.perp_coeffs(C64::new(cfg.fluct_mean(), 0.0));
        let mut out = Vec::with_capacity(
            self.n_tion * self.n_tre * self.im_tion.len() * self.im_tre.len(),
        );
        for k1 in 0..self.n_tion {
            for k2 in 0..self.n_tre {
                let re1 = lin(self.n_tion, k1);
                let re2 = lin(self.n_tre, k2);
                if (re2 - re1).abs() < 1e-3 {
                    continue;
                }
                for &i1 in &self.im_tion {
                    for &i2 in &self.im_tre {
                        let t1 = C64::new(re1, i1);
                        let t2 = C64::new(re2, i2);
                        let dt = t2 - t1;
                        // mean-field stationary momentum
                        let pp =
                            -(ia_component(px, py, w, t2) - ia_component(px, py, w, t1)) / dt;
                        let pq =
                            -(ia_component(qx, qy, w, t2) - ia_component(qx, qy, w, t1)) / dt;
                        out.push([t1, t2, pp, pq, C64::new(cfg.fluct_mean(), 0.0)]);
                    }
                }
            }
        }
        out
    }
}

/// Solutions sorted deterministically, deduplicated at `1e-6` per complex
/// coordinate (clusters merged to the lowest-residual member) and filtered to
/// the physical branch: `Re(t_ion)` inside the window, `Im(t_ion) > 0`,
/// `Re(t_re) > Re(t_ion)`.
fn collect_roots(
    raw: Vec<(SaddleVars, f64)>,
    cfg: &SaddleSystemConfig,
    window: (f64, f64),
) -> Vec<SaddleSolution> {
    let mut roots: Vec<(SaddleVars, f64)> = raw
        .into_iter()
        .filter(|(v, _)| {
            v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
                && v[0].re >= window.0
                && v[0].re <= window.1
                && v[0].im > 0.0
                && v[1].re > v[0].re
        })
        .collect();
    roots.sort_by(|a, b| {
        a.0[0]
            .re
            .total_cmp(&b.0[0].re)
            .then(a.0[1].re.total_cmp(&b.0[1].re))
            .then(a.0[0].im.total_cmp(&b.0[0].im))
            .then(a.0[1].im.total_cmp(&b.0[1].im))
    });
    let mut kept: Vec<(SaddleVars, f64)> = Vec::new();
    'outer: for (vars, rn) in roots {
        for (other, orn) in &mut kept {
            let same = vars
                .iter()
                .zip(other.iter())
                .all(|(a, b)| (a - b).re.abs() < 1e-6 && (a - b).im.abs() < 1e-6);
            if same {
                if rn < *orn {
                    *other = vars;
                    *orn = rn;
                }
                continue 'outer;
            }
        }
        kept.push((vars, rn));
    }
    kept.into_iter()
        .map(|(v, rn)| SaddleSolution {
            t_ion: v[0],
            t_re: v[1],
            p_par: v[2],
            p_perp: v[3],
            eps_fluct: v[4],
            residual_norm: rn,
            harmonic_order: cfg.harmonic_order(),
            family: Family::Unclassified,
        })
        .collect()
}

/// Finds all quantum orbits at the configured harmonic from the seed grid.
pub fn solve_saddles(
    cfg: &SaddleSystemConfig,
    seeds: &SeedGrid,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<SaddleSolution>, OrbitsError> {
    cfg.validate()?;
    if !(tol > 0.0) {
        return Err(OrbitsError::InvalidParameter("tol must be > 0".into()));
    }
    let seed_list = seeds.seeds(cfg);
    let raw: Vec<(SaddleVars, f64)> = seed_list
        .par_iter()
        .filter_map(|s| newton(*s, cfg, tol, max_iter))
        .collect();
    let mut sols = collect_roots(raw, cfg, seeds.window);
    classify_families(&mut sols, cfg.omega);
    Ok(sols)
}

/// Labels solutions by excursion-time ordering within each half-cycle set of
/// `Re(t_ion)`.
pub fn classify_families(solutions: &mut [SaddleSolution], omega: f64) {
    use std::collections::BTreeMap;
    let half = std::f64::consts::PI / omega;
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (idx, sol) in solutions.iter().enumerate() {
        groups.entry((sol.t_ion.re / half).floor() as i64).or_default().push(idx);
    }
    for (_, mut idxs) in groups {
        idxs.sort_by(|&a, &b| solutions[a].excursion().total_cmp(&solutions[b].excursion()));
        let labels: Vec<Family> = match idxs.len() {
            1 => vec![Family::Unclassified],
            2 => vec![Family::Short, Family::Long],
            3 => vec![Family::Short, Family::Long, Family::ExtraLong],
            4 => vec![Family::ExtraShort, Family::Short, Family::Long, Family::ExtraLong],
            n => {
                let mut v = vec![Family::ExtraShort];
                for k in 1..n - 1 {
                    v.push(if k <= n / 2 { Family::Short } else { Family::Long });
                }
                v.push(Family::ExtraLong);
                v
            }
        };
        for (k, &idx) in idxs.iter().enumerate() {
            solutions[idx].family = labels[k];
        }
    }
}

/// Continuation scan over harmonic orders.
///
/// Solutions found at each order seed the next; the full seed grid is
/// re-injected every five steps so families appearing only at higher orders
/// are still picked up.
pub fn scan_harmonics(
    cfg_base: &SaddleSystemConfig,
    q_range: (f64, f64),
    q_step: f64,
    seeds: &SeedGrid,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<(f64, Vec<SaddleSolution>)>, OrbitsError> {
    if !(q_step > 0.0) {
        return Err(OrbitsError::InvalidParameter("q_step must be > 0".into()));
    }
    let mut out = Vec::new();
    if q_range.1 < q_range.0 {
        return Ok(out);
    }
    let threshold = cfg_base.ip / cfg_base.omega;
    if q_range.0 <= threshold || q_range.1 > 120.0 {
        return Err(OrbitsError::InvalidParameter(format!(
            "q_range must lie within ({threshold:.2}, 120)"
        )));
    }
    let mut carried: Vec<SaddleVars> = Vec::new();
    let mut q = q_range.0;
    let mut step_idx = 0usize;
    while q <= q_range.1 + 1e-9 {
        let cfg = cfg_base.with_order(q);
        cfg.validate()?;
        let mut seed_list: Vec<SaddleVars> = carried.clone();
        if step_idx % 5 == 0 {
            seed_list.extend(seeds.seeds(&cfg));
        }
        let raw: Vec<(SaddleVars, f64)> = seed_list
            .par_iter()
            .filter_map(|s| newton(*s, &cfg, tol, max_iter))
            .collect();
        let mut sols = collect_roots(raw, &cfg, seeds.window);
        classify_families(&mut sols, cfg.omega);
        carried =
            sols.iter().map(|s| [s.t_ion, s.t_re, s.p_par, s.p_perp, s.eps_fluct]).collect();
        out.push((q, sols));
        q += q_step;
        step_idx += 1;
    }
    Ok(out)
}

/// Real-space path of one orbit sampled on `Re(t) ∈ [Re(t_ion), Re(t_re)]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub r_par: Vec<f64>,
    pub r_perp: Vec<f64>,
}

impl Trajectory {
    /// Distance from the origin at the endpoint `Re(t_re)`.
    pub fn endpoint_distance(&self) -> f64 {
        match (self.r_par.last(), self.r_perp.last()) {
            (Some(&a), Some(&b)) => a.hypot(b),
            _ => 0.0,
        }
    }
}

fn trajectory_impl(
    sol: &SaddleSolution,
    cfg: &SaddleSystemConfig,
    n_points: usize,
    eps_fluct: C64,
) -> Result<Trajectory, OrbitsError> {
    if sol.residual_norm > 1e-6 {
        return Err(OrbitsError::Unconverged(sol.residual_norm));
    }
    let w = cfg.omega;
    let (px, py) = cfg.par_coeffs();
    let (qx, qy) = cfg.perp_coeffs(eps_fluct);
    // primitive of p + A; the integrand is holomorphic, so the contour from
    // t_ion down to the real axis and then along it collapses to a
    // difference of primitives
    let prim_par = |t: C64| sol.p_par * t + ia_component(px, py, w, t);
    let prim_perp = |t: C64| sol.p_perp * t + ia_component(qx, qy, w, t);
    let start = sol.t_ion.re;
    let end = sol.t_re.re;
    let n = n_points.max(2);
    let mut times = Vec::with_capacity(n);
    let mut r_par = Vec::with_capacity(n);
    let mut r_perp = Vec::with_capacity(n);
    for k in 0..n {
        let t = C64::new(start + (end - start) * k as f64 / (n - 1) as f64, 0.0);
        times.push(t.re);
        r_par.push((prim_par(t) - prim_par(sol.t_ion)).re);
        r_perp.push((prim_perp(t) - prim_perp(sol.t_ion)).re);
    }
    Ok(Trajectory { times, r_par, r_perp })
}

/// Real-space trajectory with the saddle-point field fluctuation inserted
/// into `A_⊥`: converged orbits return to within ~1 a.u. of the ion.
pub fn trajectory(
    sol: &SaddleSolution,
    cfg: &SaddleSystemConfig,
    n_points: usize,
) -> Result<Trajectory, OrbitsError> {
    trajectory_impl(sol, cfg, n_points, sol.eps_fluct)
}

/// Same orbit with the fluctuating quadrature frozen at its mean: the drift
/// of the circular mean field is no longer compensated and recombination
/// fails.
pub fn trajectory_frozen(
    sol: &SaddleSolution,
    cfg: &SaddleSystemConfig,
    n_points: usize,
) -> Result<Trajectory, OrbitsError> {
    trajectory_impl(sol, cfg, n_points, C64::new(cfg.fluct_mean(), 0.0))
}

/// Photon-statistics force terms acting on the perpendicular return
/// condition at time `t` along an orbit.
#[derive(Copy, Clone, Debug)]
pub struct ForceComponents {
    pub f1: C64,
    pub f2: C64,
}

impl ForceComponents {
    pub fn total(&self) -> C64 {
        self.f1 + self.f2
    }
}

/// Evaluates the photon-statistics force on an orbit at time `t`.
///
/// Phase squeezing carries two terms,
/// `F₁ = (i ε̄⁽ʸ⁾_⊥ σ/ω³) sin(ωt) ∫_{t_ion}^t sin²(ωτ) dτ` and
/// `F₂ = (i p_⊥ σ/ω²) sin(ωt) ∫_{t_ion}^t sin(ωτ) dτ`; amplitude squeezing
/// carries the single cos-kernel term
/// `(i σ/ω²) cos(ωt) ∫_{t_ion}^t [p_⊥ + (ε̄⁽ʸ⁾_⊥/ω) sin(ωτ)] cos(ωτ) dτ`.
pub fn photon_statistics_force(
    sol: &SaddleSolution,
    cfg: &SaddleSystemConfig,
    t: f64,
) -> ForceComponents {
    let w = cfg.omega;
    let tc = C64::new(t, 0.0);
    let t1 = sol.t_ion;
    let sigma = cfg.sigma;
    match cfg.squeezed_quadrature {
        Quadrature::X => {
            let inner = sol.p_perp * (int_cos(w, tc) - int_cos(w, t1))
                + cfg.eps_perp_y / w * (int_sincos(w, tc) - int_sincos(w, t1));
            let f1 = C64::i() * sigma / (w * w) * (w * t).cos() * inner;
            ForceComponents { f1, f2: C64::new(0.0, 0.0) }
        }
        Quadrature::Y => {
            let f1 = C64::i() * cfg.eps_perp_y * sigma / (w * w * w)
                * (w * t).sin()
                * (int_sin2(w, tc) - int_sin2(w, t1));
            let f2 = C64::i() * sol.p_perp * sigma / (w * w)
                * (w * t).sin()
                * (int_sin(w, tc) - int_sin(w, t1));
            ForceComponents { f1, f2 }
        }
    }
}
