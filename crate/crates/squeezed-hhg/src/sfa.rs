//! Single-atom SFA (Lewenstein-model) dipole response for one classical 2D
//! field realization.
//!
//! The time-domain dipole is the double sum over ionization and recombination
//! times with the momentum integral reduced by stationary phase about the
//! stationary momentum, and the spectrum its windowed discrete Fourier
//! transform. All closed-form field integrals are the exact trigonometric
//! antiderivatives, valid for complex time arguments where used.

use crate::driver::FieldRealization;
use num_complex::Complex64 as C64;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SfaError {
    #[error("degenerate-excursion: |t2 - t1| below 1e-12")]
    DegenerateExcursion,
    #[error("non-uniform time grid")]
    NonUniformGrid,
    #[error("numerical fault: {0}")]
    NumericalFault(String),
    #[error("invalid numerics: {0}")]
    InvalidNumerics(String),
}

/// Atomic system driven by the field.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    /// Ionization potential (a.u.).
    pub ip: f64,
    pub dipole_model: DipoleModel,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleModel {
    HydrogenLike1s,
}

impl AtomSpec {
    pub fn hydrogen() -> Self {
        AtomSpec { ip: 0.5, dipole_model: DipoleModel::HydrogenLike1s }
    }
}

/// Apodization window applied before the Fourier transform.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    None,
    Hann,
    Blackman,
}

impl Window {
    fn value(self, n: usize, len: usize) -> f64 {
        let x = 2.0 * PI * n as f64 / len as f64;
        match self {
            Window::None => 1.0,
            Window::Hann => 0.5 * (1.0 - x.cos()),
            Window::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
        }
    }
}

/// Discretization parameters for the dipole-response sums.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericsSpec {
    /// Time step (a.u.).
    pub dt: f64,
    /// Number of optical cycles in the record.
    pub n_cycles: u32,
    pub window: Window,
    /// Regularizer in the stationary-phase prefactor (a.u.).
    pub epsilon_reg: f64,
    /// Longest excursion `t2 - t1` kept in the double sum (a.u.).
    pub excursion_cap: f64,
}

impl NumericsSpec {
    /// Defaults for a carrier frequency: 400 steps/cycle, 5 cycles, Hann
    /// window, excursion capped at 1.5 cycles.
    pub fn for_omega(omega: f64) -> Self {
        let cycle = 2.0 * PI / omega;
        NumericsSpec {
            dt: cycle / 400.0,
            n_cycles: 5,
            window: Window::Hann,
            epsilon_reg: 1e-4,
            excursion_cap: 1.5 * cycle,
        }
    }

    pub fn validate(&self) -> Result<(), SfaError> {
        if !(self.dt > 0.0) {
            return Err(SfaError::InvalidNumerics("dt must be > 0".into()));
        }
        if self.n_cycles == 0 {
            return Err(SfaError::InvalidNumerics("n_cycles must be >= 1".into()));
        }
        if !(self.epsilon_reg > 0.0) {
            return Err(SfaError::InvalidNumerics("epsilon_reg must be > 0".into()));
        }
        if !(self.excursion_cap > 0.0) {
            return Err(SfaError::InvalidNumerics("excursion_cap must be > 0".into()));
        }
        Ok(())
    }
}

/// Time-domain dipole along both polarization axes.
#[derive(Clone, Debug)]
pub struct DipoleTimeSeries {
    pub times: Vec<f64>,
    pub d_par: Vec<C64>,
    pub d_perp: Vec<C64>,
    /// Carrier frequency of the driving realization (a.u.).
    pub omega0: f64,
}

/// Fourier-domain dipole on the positive-frequency half grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DipoleSpectrum {
    pub omegas: Vec<f64>,
    pub d_par: Vec<C64>,
    pub d_perp: Vec<C64>,
    /// Carrier frequency; harmonic order is `omega / omega0`.
    pub omega0: f64,
}

impl DipoleSpectrum {
    pub fn harmonic_orders(&self) -> Vec<f64> {
        self.omegas.iter().map(|w| w / self.omega0).collect()
    }
}

/// Hydrogenic 1s bound-continuum transition dipole, applied componentwise:
/// `d(p) = i · 2^{7/2} (2 Ip)^{5/4} / π · p / (p² + 2 Ip)³`.
pub fn transition_dipole(p: [C64; 2], ip: f64) -> [C64; 2] {
    let norm = 2.0f64.powf(3.5) * (2.0 * ip).powf(1.25) / PI;
    let p_sq = p[0] * p[0] + p[1] * p[1];
    let denom = (p_sq + 2.0 * ip).powi(3);
    [C64::i() * norm * p[0] / denom, C64::i() * norm * p[1] / denom]
}

/// Antiderivative of the vector potential component with quadratures
/// `(ex, ey)`: ∫A dt = (ex·sin(ωt) − ey·cos(ωt))/ω².
fn vec_pot_antideriv(ex: f64, ey: f64, omega: f64, t: C64) -> C64 {
    ((omega * t).sin() * ex - (omega * t).cos() * ey) / (omega * omega)
}

/// Antiderivative of `A_∥² + A_⊥²`.
fn vec_pot_sq_antideriv(r: &FieldRealization, t: C64) -> C64 {
    let w = r.omega;
    let mut acc = C64::new(0.0, 0.0);
    for eps in [r.eps_par, r.eps_perp] {
        let (ex, ey) = (eps.re, eps.im);
        let half_t = t / 2.0;
        let s2 = (2.0 * w * t).sin() / (4.0 * w);
        let c2 = (2.0 * w * t).cos() / (4.0 * w);
        acc += (ex * ex * (half_t + s2) - 2.0 * ex * ey * c2 + ey * ey * (half_t - s2))
            / (w * w);
    }
    acc
}

/// Momentum that zeroes the excursion drift:
/// `p_st = −(1/(t2−t1)) ∫_{t1}^{t2} A(τ) dτ`, componentwise.
pub fn stationary_momentum(
    r: &FieldRealization,
    t1: C64,
    t2: C64,
) -> Result<[C64; 2], SfaError> {
    let dt = t2 - t1;
    if dt.norm() < 1e-12 {
        return Err(SfaError::DegenerateExcursion);
    }
    let p = |eps: C64| {
        -(vec_pot_antideriv(eps.re, eps.im, r.omega, t2)
            - vec_pot_antideriv(eps.re, eps.im, r.omega, t1))
            / dt
    };
    Ok([p(r.eps_par), p(r.eps_perp)])
}

/// Semiclassical action
/// `S = ½∫_{t1}^{t2} [p + A(τ)]² dτ + Ip·(t2 − t1)`, in closed form.
pub fn semiclassical_action(
    r: &FieldRealization,
    p: [C64; 2],
    t1: C64,
    t2: C64,
    ip: f64,
) -> C64 {
    let dt = t2 - t1;
    let p_sq = p[0] * p[0] + p[1] * p[1];
    let mut cross = C64::new(0.0, 0.0);
    for (pc, eps) in p.iter().zip([r.eps_par, r.eps_perp]) {
        cross += *pc
            * (vec_pot_antideriv(eps.re, eps.im, r.omega, t2)
                - vec_pot_antideriv(eps.re, eps.im, r.omega, t1));
    }
    let a_sq = vec_pot_sq_antideriv(r, t2) - vec_pot_sq_antideriv(r, t1);
    0.5 * p_sq * dt + cross + 0.5 * a_sq + ip * dt
}

/// Time-domain SFA dipole response on a uniform grid spanning
/// `n_cycles` optical cycles.
///
/// For each recombination time the sum runs over earlier ionization times
/// within the excursion cap; the momentum integral is performed by
/// stationary phase about `p_st` with prefactor
/// `[π/(ε_reg + i(t2−t1)/2)]^{3/2}`. The conjugate contribution is added, so
/// the output is real-valued.
pub fn dipole_response(
    r: &FieldRealization,
    atom: &AtomSpec,
    num: &NumericsSpec,
) -> Result<DipoleTimeSeries, SfaError> {
    num.validate()?;
    let omega = r.omega;
    let duration = num.n_cycles as f64 * 2.0 * PI / omega;
    let n = (duration / num.dt).round() as usize;
    let dt = num.dt;
    let ip = atom.ip;

    // Per-node field tables; everything is real on the real time axis.
    let (mut a_par, mut a_perp) = (vec![0.0f64; n], vec![0.0f64; n]);
    let (mut e_par, mut e_perp) = (vec![0.0f64; n], vec![0.0f64; n]);
    let (mut ia_par, mut ia_perp) = (vec![0.0f64; n], vec![0.0f64; n]);
    let mut ia_sq = vec![0.0f64; n];
    for k in 0..n {
        let t = k as f64 * dt;
        let (c, s) = ((omega * t).cos(), (omega * t).sin());
        let (px, py) = (r.eps_par.re, r.eps_par.im);
        let (qx, qy) = (r.eps_perp.re, r.eps_perp.im);
        a_par[k] = (px * c + py * s) / omega;
        a_perp[k] = (qx * c + qy * s) / omega;
        e_par[k] = px * s - py * c;
        e_perp[k] = qx * s - qy * c;
        ia_par[k] = (px * s - py * c) / (omega * omega);
        ia_perp[k] = (qx * s - qy * c) / (omega * omega);
        ia_sq[k] = vec_pot_sq_antideriv(r, C64::new(t, 0.0)).re;
    }

    let max_lag = ((num.excursion_cap / dt).floor() as usize).min(n - 1).max(1);
    // Stationary-phase prefactor depends only on the lag.
    let pref: Vec<C64> = (0..=max_lag)
        .map(|lag| {
            let tau = lag as f64 * dt;
            (C64::new(PI, 0.0) / C64::new(num.epsilon_reg, 0.5 * tau)).powf(1.5)
        })
        .collect();

    let dip_norm = 2.0f64.powf(3.5) * (2.0 * ip).powf(1.25) / PI;

    let dip: Vec<(C64, C64)> = (0..n)
        .into_par_iter()
        .map(|i2| {
            let mut acc_par = C64::new(0.0, 0.0);
            let mut acc_perp = C64::new(0.0, 0.0);
            let lo = i2.saturating_sub(max_lag);
            for i1 in lo..i2 {
                let tau = (i2 - i1) as f64 * dt;
                // stationary momentum and action in closed form
                let ps_par = -(ia_par[i2] - ia_par[i1]) / tau;
                let ps_perp = -(ia_perp[i2] - ia_perp[i1]) / tau;
                let p_sq = ps_par * ps_par + ps_perp * ps_perp;
                let action =
                    -0.5 * p_sq * tau + 0.5 * (ia_sq[i2] - ia_sq[i1]) + ip * tau;

                // hydrogenic dipole at ionization and recombination; the
                // overall i / -i factors are folded in below
                let (vi_par, vi_perp) = (ps_par + a_par[i1], ps_perp + a_perp[i1]);
                let di = dip_norm / (vi_par * vi_par + vi_perp * vi_perp + 2.0 * ip).powi(3);
                let e_dot_d = e_par[i1] * di * vi_par + e_perp[i1] * di * vi_perp;

                let (vr_par, vr_perp) = (ps_par + a_par[i2], ps_perp + a_perp[i2]);
                let dr = dip_norm / (vr_par * vr_par + vr_perp * vr_perp + 2.0 * ip).powi(3);

                // conj(i·dr) * exp(-iS) * (i·e_dot_d) = dr * e_dot_d * exp(-iS)
                let (sin_s, cos_s) = action.sin_cos();
                let phase = C64::new(cos_s, -sin_s);
                let w = pref[i2 - i1] * (e_dot_d * phase);
                acc_par += w * (dr * vr_par);
                acc_perp += w * (dr * vr_perp);
            }
            // i·dt·Σ + c.c.
            let z_par = C64::i() * dt * acc_par;
            let z_perp = C64::i() * dt * acc_perp;
            (z_par + z_par.conj(), z_perp + z_perp.conj())
        })
        .collect();

    let mut d_par = Vec::with_capacity(n);
    let mut d_perp = Vec::with_capacity(n);
    for (p, q) in dip {
        if !p.re.is_finite() || !q.re.is_finite() {
            return Err(SfaError::NumericalFault("NaN in dipole response".into()));
        }
        d_par.push(p);
        d_perp.push(q);
    }
    let times = (0..n).map(|k| k as f64 * dt).collect();
    Ok(DipoleTimeSeries { times, d_par, d_perp, omega0: omega })
}

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

/// Windowed discrete Fourier transform of the dipole time series,
/// `d(ω) = dt·Σ_n w_n d(t_n) e^{iω t_n}`, kept on the positive-frequency
/// half grid `ω_k = 2πk/(N·dt)`, `k = 0..N/2`.
pub fn dipole_spectrum(
    series: &DipoleTimeSeries,
    window: Window,
) -> Result<DipoleSpectrum, SfaError> {
    let n = series.times.len();
    if n < 2 {
        return Err(SfaError::InvalidNumerics("series too short".into()));
    }
    let dt = series.times[1] - series.times[0];
    for k in 1..n {
        let step = series.times[k] - series.times[k - 1];
        if (step - dt).abs() > 1e-9 * dt.abs() {
            return Err(SfaError::NonUniformGrid);
        }
    }
    let fft = PLANNER.lock().unwrap().plan_fft_inverse(n);
    let transform = |data: &[C64]| -> Vec<C64> {
        let mut buf: Vec<C64> =
            data.iter().enumerate().map(|(k, d)| d * window.value(k, n)).collect();
        fft.process(&mut buf);
        buf.truncate(n / 2 + 1);
        buf.iter().map(|z| z * dt).collect()
    };
    let d_par = transform(&series.d_par);
    let d_perp = transform(&series.d_perp);
    let omegas = (0..=n / 2).map(|k| 2.0 * PI * k as f64 / (n as f64 * dt)).collect();
    Ok(DipoleSpectrum { omegas, d_par, d_perp, omega0: series.omega0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const OMEGA: f64 = 0.057;
    const EPS: f64 = 0.053;

    fn vec_pot(ex: f64, ey: f64, omega: f64, t: C64) -> C64 {
        ((omega * t).cos() * ex + (omega * t).sin() * ey) / omega
    }

    fn linear() -> FieldRealization {
        FieldRealization {
            eps_par: C64::new(EPS, 0.0),
            eps_perp: C64::new(0.0, 0.0),
            omega: OMEGA,
        }
    }

    fn random_realization(rng: &mut impl Rng) -> FieldRealization {
        FieldRealization {
            eps_par: C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)),
            eps_perp: C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)),
            omega: rng.gen_range(0.03..0.1),
        }
    }

    fn random_complex(rng: &mut impl Rng, scale: f64) -> C64 {
        C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    }

    /// Adaptive Simpson quadrature of a complex integrand along the straight
    /// segment from `t1` to `t2`.
    fn segment_quad<F: Fn(C64) -> C64>(f: &F, t1: C64, t2: C64, tol: f64) -> C64 {
        fn simpson<G: Fn(f64) -> C64>(g: &G, a: f64, b: f64, tol: f64, depth: u32) -> C64 {
            let eval = |a: f64, b: f64| {
                let m = 0.5 * (a + b);
                (b - a) / 6.0 * (g(a) + 4.0 * g(m) + g(b))
            };
            let m = 0.5 * (a + b);
            let whole = eval(a, b);
            let lr = eval(a, m) + eval(m, b);
            if depth == 0 || (lr - whole).norm() < 15.0 * tol {
                lr + (lr - whole) / 15.0
            } else {
                simpson(g, a, m, tol / 2.0, depth - 1) + simpson(g, m, b, tol / 2.0, depth - 1)
            }
        }
        let dt = t2 - t1;
        dt * simpson(&|s| f(t1 + s * dt), 0.0, 1.0, tol, 36)
    }

    #[test]
    fn transition_dipole_odd_and_zero() {
        let d0 = transition_dipole([C64::new(0.0, 0.0); 2], 0.5);
        assert_eq!(d0[0], C64::new(0.0, 0.0));
        assert_eq!(d0[1], C64::new(0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = [random_complex(&mut rng, 2.0), random_complex(&mut rng, 2.0)];
            let d = transition_dipole(p, 0.5);
            let dm = transition_dipole([-p[0], -p[1]], 0.5);
            for k in 0..2 {
                assert_abs_diff_eq!((d[k] + dm[k]).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn transition_dipole_constant_from_first_principles() {
        // Normalized 1s momentum wavefunction gives
        // d(p) = i * 2^(7/2) (2 Ip)^(5/4) / pi * p / (p^2 + 2 Ip)^3;
        // evaluated at |p| = sqrt(2 Ip) along one axis the magnitude is
        // 2^(7/2) (2 Ip)^(5/4) sqrt(2 Ip) / (pi (4 Ip)^3).
        let ip: f64 = 0.5;
        let p = (2.0 * ip).sqrt();
        let d = transition_dipole([C64::new(p, 0.0), C64::new(0.0, 0.0)], ip);
        let expect = 2.0f64.powf(3.5) * (2.0 * ip).powf(1.25) * p / (PI * (4.0 * ip).powi(3));
        assert_relative_eq!(d[0].im, expect, max_relative = 1e-12);
        assert_abs_diff_eq!(d[0].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn stationary_momentum_zero_field_and_full_cycle() {
        let z = FieldRealization {
            eps_par: C64::new(0.0, 0.0),
            eps_perp: C64::new(0.0, 0.0),
            omega: OMEGA,
        };
        let p = stationary_momentum(&z, C64::new(0.0, 0.0), C64::new(30.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p[0].norm(), 0.0, epsilon = 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let r = random_realization(&mut rng);
            let t1 = random_complex(&mut rng, 20.0);
            let t2 = t1 + 2.0 * PI / r.omega;
            let p = stationary_momentum(&r, t1, t2).unwrap();
            assert!(p[0].norm() < 1e-10 && p[1].norm() < 1e-10);
        }
    }

    #[test]
    fn stationary_momentum_residual_against_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let r = random_realization(&mut rng);
            let t1 = random_complex(&mut rng, 30.0);
            let t2 = t1 + random_complex(&mut rng, 40.0) + C64::new(5.0, 0.0);
            let p = stationary_momentum(&r, t1, t2).unwrap();
            for (k, eps) in [r.eps_par, r.eps_perp].into_iter().enumerate() {
                let res = segment_quad(
                    &|t| p[k] + vec_pot(eps.re, eps.im, r.omega, t),
                    t1,
                    t2,
                    1e-13,
                );
                assert!(res.norm() < 1e-10, "residual {}", res.norm());
            }
        }
    }

    #[test]
    fn stationary_momentum_degenerate() {
        let r = linear();
        let t = C64::new(3.0, 1.0);
        assert!(matches!(
            stationary_momentum(&r, t, t + C64::new(1e-13, 0.0)),
            Err(SfaError::DegenerateExcursion)
        ));
    }

    #[test]
    fn action_zero_field_and_quadrature() {
        let z = FieldRealization {
            eps_par: C64::new(0.0, 0.0),
            eps_perp: C64::new(0.0, 0.0),
            omega: OMEGA,
        };
        let s = semiclassical_action(
            &z,
            [C64::new(0.0, 0.0); 2],
            C64::new(1.0, 0.5),
            C64::new(7.0, -0.25),
            0.5,
        );
        assert_abs_diff_eq!(
            (s - 0.5 * (C64::new(7.0, -0.25) - C64::new(1.0, 0.5))).norm(),
            0.0,
            epsilon = 1e-12
        );

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let r = random_realization(&mut rng);
            let p = [random_complex(&mut rng, 1.0), random_complex(&mut rng, 1.0)];
            let t1 = random_complex(&mut rng, 30.0);
            let t2 = t1 + random_complex(&mut rng, 40.0) + C64::new(3.0, 0.0);
            let ip = 0.5;
            let closed = semiclassical_action(&r, p, t1, t2, ip);
            let quad = segment_quad(
                &|t| {
                    let ap = p[0] + vec_pot(r.eps_par.re, r.eps_par.im, r.omega, t);
                    let aq = p[1] + vec_pot(r.eps_perp.re, r.eps_perp.im, r.omega, t);
                    0.5 * (ap * ap + aq * aq) + ip
                },
                t1,
                t2,
                1e-13,
            );
            assert!(
                (closed - quad).norm() < 1e-10 * (1.0 + closed.norm()),
                "closed {closed} vs quad {quad}"
            );
        }
    }

    #[test]
    fn action_derivative_in_t2() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let h = 1e-5;
        for _ in 0..50 {
            let r = random_realization(&mut rng);
            let p = [random_complex(&mut rng, 1.0), random_complex(&mut rng, 1.0)];
            let t1 = random_complex(&mut rng, 10.0);
            let t2 = t1 + random_complex(&mut rng, 30.0) + C64::new(2.0, 0.0);
            let ip = 0.5;
            let num = (semiclassical_action(&r, p, t1, t2 + h, ip)
                - semiclassical_action(&r, p, t1, t2 - h, ip))
                / (2.0 * h);
            let ap = p[0] + vec_pot(r.eps_par.re, r.eps_par.im, r.omega, t2);
            let aq = p[1] + vec_pot(r.eps_perp.re, r.eps_perp.im, r.omega, t2);
            let expect = 0.5 * (ap * ap + aq * aq) + ip;
            assert!((num - expect).norm() < 1e-6, "{}", (num - expect).norm());
        }
    }

    #[test]
    fn dipole_response_zero_field() {
        let z = FieldRealization {
            eps_par: C64::new(0.0, 0.0),
            eps_perp: C64::new(0.0, 0.0),
            omega: OMEGA,
        };
        let num = NumericsSpec { n_cycles: 2, ..NumericsSpec::for_omega(OMEGA) };
        let series = dipole_response(&z, &AtomSpec::hydrogen(), &num).unwrap();
        assert!(series.d_par.iter().all(|d| d.norm() == 0.0));
        assert!(series.d_perp.iter().all(|d| d.norm() == 0.0));
    }

    #[test]
    fn dipole_response_parity_under_field_flip() {
        let num = NumericsSpec { n_cycles: 2, ..NumericsSpec::for_omega(OMEGA) };
        let r = FieldRealization {
            eps_par: C64::new(EPS, 0.01),
            eps_perp: C64::new(0.02, EPS),
            omega: OMEGA,
        };
        let flipped = FieldRealization { eps_par: -r.eps_par, eps_perp: -r.eps_perp, ..r };
        let a = dipole_response(&r, &AtomSpec::hydrogen(), &num).unwrap();
        let b = dipole_response(&flipped, &AtomSpec::hydrogen(), &num).unwrap();
        for k in 0..a.d_par.len() {
            assert_abs_diff_eq!((a.d_par[k] + b.d_par[k]).norm(), 0.0, epsilon = 1e-18);
            assert_abs_diff_eq!((a.d_perp[k] + b.d_perp[k]).norm(), 0.0, epsilon = 1e-18);
        }
    }

    #[test]
    fn dipole_response_is_real() {
        let num = NumericsSpec { n_cycles: 2, ..NumericsSpec::for_omega(OMEGA) };
        let series = dipole_response(&linear(), &AtomSpec::hydrogen(), &num).unwrap();
        let max_re = series.d_par.iter().map(|d| d.re.abs()).fold(0.0, f64::max);
        let max_im = series.d_par.iter().map(|d| d.im.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-10 * max_re);
    }

    #[test]
    fn spectrum_hann_leakage_and_dc_peak() {
        let n = 512;
        let dt = 0.5;
        let series = DipoleTimeSeries {
            times: (0..n).map(|k| k as f64 * dt).collect(),
            d_par: vec![C64::new(1.0, 0.0); n],
            d_perp: vec![C64::new(0.0, 0.0); n],
            omega0: OMEGA,
        };
        let spec = dipole_spectrum(&series, Window::Hann).unwrap();
        let dc = spec.d_par[0].norm();
        for k in 3..spec.d_par.len() {
            let db = 20.0 * (spec.d_par[k].norm() / dc).log10();
            assert!(db < -60.0, "bin {k}: {db} dB");
        }
    }

    #[test]
    fn spectrum_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 400;
        let dt = 0.3;
        let d: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let series = DipoleTimeSeries {
            times: (0..n).map(|k| k as f64 * dt).collect(),
            d_par: d.clone(),
            d_perp: vec![C64::new(0.0, 0.0); n],
            omega0: OMEGA,
        };
        let window = Window::Hann;
        let spec = dipole_spectrum(&series, window).unwrap();
        let time_side: f64 = d
            .iter()
            .enumerate()
            .map(|(k, v)| (v * window.value(k, n)).norm_sqr() * dt)
            .sum();
        // real series: negative-frequency bins mirror the stored half
        let dw = 2.0 * PI / (n as f64 * dt);
        let mut freq_side = spec.d_par[0].norm_sqr();
        for k in 1..spec.d_par.len() {
            let weight = if 2 * k == n { 1.0 } else { 2.0 };
            freq_side += weight * spec.d_par[k].norm_sqr();
        }
        freq_side *= dw / (2.0 * PI);
        assert_relative_eq!(time_side, freq_side, max_relative = 1e-8);
    }

    #[test]
    fn spectrum_pure_cosine_peaks_at_order_15() {
        let n = 2000;
        let dt = 2.0 * PI / OMEGA / 400.0;
        let d: Vec<C64> =
            (0..n).map(|k| C64::new((15.0 * OMEGA * k as f64 * dt).cos(), 0.0)).collect();
        let series = DipoleTimeSeries {
            times: (0..n).map(|k| k as f64 * dt).collect(),
            d_par: d,
            d_perp: vec![C64::new(0.0, 0.0); n],
            omega0: OMEGA,
        };
        let spec = dipole_spectrum(&series, Window::Hann).unwrap();
        let peak = spec
            .d_par
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        let orders = spec.harmonic_orders();
        assert_relative_eq!(orders[peak], 15.0, max_relative = 1e-9);
    }

    #[test]
    fn spectrum_rejects_non_uniform_grid() {
        let mut times: Vec<f64> = (0..64).map(|k| k as f64).collect();
        times[40] += 0.1;
        let series = DipoleTimeSeries {
            times,
            d_par: vec![C64::new(0.0, 0.0); 64],
            d_perp: vec![C64::new(0.0, 0.0); 64],
            omega0: OMEGA,
        };
        assert!(matches!(
            dipole_spectrum(&series, Window::None),
            Err(SfaError::NonUniformGrid)
        ));
    }

    #[test]
    fn spectrum_hermitian_symmetry_on_real_series() {
        // d(-w) = d(w)^* for real input; the stored half must match the
        // mirrored bins of a direct full transform.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let n = 128;
        let dt = 0.7;
        let d: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let series = DipoleTimeSeries {
            times: (0..n).map(|k| k as f64 * dt).collect(),
            d_par: d.clone(),
            d_perp: d.clone(),
            omega0: OMEGA,
        };
        let spec = dipole_spectrum(&series, Window::None).unwrap();
        for k in 1..n / 2 {
            // direct DFT at the negative frequency -w_k
            let mut neg = C64::new(0.0, 0.0);
            for (j, v) in d.iter().enumerate() {
                let phase = -2.0 * PI * (k * j) as f64 / n as f64;
                neg += v * C64::new(phase.cos(), phase.sin());
            }
            neg *= dt;
            assert!((neg - spec.d_par[k].conj()).norm() < 1e-9 * (1.0 + neg.norm()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn action_linear_in_ip(
            t2re in 5.0f64..40.0,
            ip in 0.2f64..1.0,
        ) {
            let r = linear();
            let t1 = C64::new(0.3, 0.2);
            let t2 = C64::new(t2re, -0.1);
            let p = [C64::new(0.1, 0.0), C64::new(-0.2, 0.05)];
            let s0 = semiclassical_action(&r, p, t1, t2, 0.0);
            let s1 = semiclassical_action(&r, p, t1, t2, ip);
            let diff = s1 - s0 - ip * (t2 - t1);
            prop_assert!(diff.norm() < 1e-12);
        }
    }
}
