//! Quantum driver states and their classical-limit field statistics.
//!
//! A two-polarization driver is described per component by a
//! [`PolarizationState`]: coherent, displaced squeezed vacuum (DSV) or
//! displaced thermal. In the classical limit the quantum statistics survive
//! only as Gaussian marginals over the classical field amplitude, with
//! variance `4·I_squ` along the fluctuating quadrature for DSV states and
//! `2·I_th` per quadrature for thermal states. This module produces the
//! classical field realizations and weights behind those marginals, samples
//! Lissajous figures at a finite display scale, and evaluates
//! ellipticity statistics from the quantum Stokes operators.
//!
//! All quantities are in atomic units.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for the circular-configuration check.
pub const CIRCULAR_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DriverError {
    /// The marginal of a coherent state is a point mass; callers must
    /// special-case it rather than ask for a density value.
    #[error("degenerate weight: coherent state marginal is a point mass")]
    DegenerateWeight,
    #[error("unsupported state: {0}")]
    UnsupportedState(&'static str),
    #[error("zero-intensity driver")]
    ZeroIntensity,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Electric-field quadrature labels.
///
/// For the circular configuration used throughout (`ε̄_⊥ = i·ε̄_∥`), enlarged
/// fluctuations along `X` correspond to amplitude squeezing and along `Y` to
/// phase squeezing.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    Y,
}

/// Quantum statistics of one driver polarization component.
///
/// The mean complex amplitude packs the two field quadratures as
/// `ε̄ = ε̄⁽ˣ⁾ + i·ε̄⁽ʸ⁾`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolarizationState {
    Coherent {
        mean: C64,
    },
    DisplacedSqueezedVacuum {
        mean: C64,
        /// Squeezing contribution to the intensity, `I_squ ≥ 0`.
        i_squ: f64,
        /// Quadrature carrying the enlarged classical-limit variance.
        quadrature: Quadrature,
    },
    DisplacedThermal {
        mean: C64,
        /// Thermal contribution to the intensity, `I_th ≥ 0`.
        i_th: f64,
    },
}

impl PolarizationState {
    pub fn coherent(mean: C64) -> Self {
        PolarizationState::Coherent { mean }
    }

    pub fn squeezed(mean: C64, i_squ: f64, quadrature: Quadrature) -> Self {
        assert!(i_squ >= 0.0, "I_squ must be nonnegative");
        PolarizationState::DisplacedSqueezedVacuum { mean, i_squ, quadrature }
    }

    pub fn thermal(mean: C64, i_th: f64) -> Self {
        assert!(i_th >= 0.0, "I_th must be nonnegative");
        PolarizationState::DisplacedThermal { mean, i_th }
    }

    pub fn mean(&self) -> C64 {
        match *self {
            PolarizationState::Coherent { mean }
            | PolarizationState::DisplacedSqueezedVacuum { mean, .. }
            | PolarizationState::DisplacedThermal { mean, .. } => mean,
        }
    }

    /// Fluctuation contribution to the intensity (`I_squ`, `I_th`, or zero).
    pub fn fluctuation_intensity(&self) -> f64 {
        match *self {
            PolarizationState::Coherent { .. } => 0.0,
            PolarizationState::DisplacedSqueezedVacuum { i_squ, .. } => i_squ,
            PolarizationState::DisplacedThermal { i_th, .. } => i_th,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        let mean = self.mean();
        if !mean.re.is_finite() || !mean.im.is_finite() {
            return Err(DriverError::InvalidParameter("non-finite mean amplitude".into()));
        }
        let fluct = self.fluctuation_intensity();
        if !(fluct >= 0.0) || !fluct.is_finite() {
            return Err(DriverError::InvalidParameter(
                "fluctuation intensity must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Evaluates the normalized classical-limit marginal density at `eps`.
    ///
    /// For a DSV state this is the 1D Gaussian along the fluctuating
    /// quadrature (variance `σ = 4·I_squ`, the other quadrature pinned at its
    /// mean); `eps` is read on that quadrature. For a thermal state it is the
    /// isotropic 2D Gaussian with per-axis variance `2·I_th`. A coherent
    /// state has no density to evaluate.
    pub fn marginal_weight(&self, eps: C64) -> Result<f64, DriverError> {
        match *self {
            PolarizationState::Coherent { .. } => Err(DriverError::DegenerateWeight),
            PolarizationState::DisplacedSqueezedVacuum { mean, i_squ, quadrature } => {
                let sigma = 4.0 * i_squ;
                if sigma == 0.0 {
                    return Err(DriverError::DegenerateWeight);
                }
                let (x, c) = match quadrature {
                    Quadrature::X => (eps.re, mean.re),
                    Quadrature::Y => (eps.im, mean.im),
                };
                let d = x - c;
                Ok((-(d * d) / (2.0 * sigma)).exp() / (2.0 * std::f64::consts::PI * sigma).sqrt())
            }
            PolarizationState::DisplacedThermal { mean, i_th } => {
                if i_th == 0.0 {
                    return Err(DriverError::DegenerateWeight);
                }
                let d2 = (eps - mean).norm_sqr();
                Ok((-d2 / (4.0 * i_th)).exp() / (4.0 * std::f64::consts::PI * i_th))
            }
        }
    }
}

/// Uniform quadrature grid over a state's classical-limit marginal.
///
/// Returns `(complex amplitude, weight)` pairs with weights renormalized to
/// sum to one after truncation at `n_sigma` standard deviations. DSV grids
/// are 1D along the fluctuating quadrature (`n_points` odd so the mean is a
/// node); thermal grids are the full `n_points × n_points` square. Coherent
/// states yield the single mean-field realization with weight one.
pub fn amplitude_grid(
    state: &PolarizationState,
    n_points: usize,
    n_sigma: f64,
) -> Result<Vec<(C64, f64)>, DriverError> {
    state.validate()?;
    match *state {
        PolarizationState::Coherent { mean } => Ok(vec![(mean, 1.0)]),
        PolarizationState::DisplacedSqueezedVacuum { mean, i_squ, quadrature } => {
            if n_points < 3 || n_points % 2 == 0 {
                return Err(DriverError::InvalidParameter(format!(
                    "DSV grid needs an odd n_points >= 3, got {n_points}"
                )));
            }
            if !(n_sigma > 0.0) {
                return Err(DriverError::InvalidParameter("n_sigma must be > 0".into()));
            }
            let sigma = 4.0 * i_squ;
            if sigma == 0.0 {
                return Ok(vec![(mean, 1.0)]);
            }
            let half = n_sigma * sigma.sqrt();
            let step = 2.0 * half / (n_points - 1) as f64;
            let center = match quadrature {
                Quadrature::X => mean.re,
                Quadrature::Y => mean.im,
            };
            let mut grid = Vec::with_capacity(n_points);
            let mut total = 0.0;
            for j in 0..n_points {
                let x = center - half + step * j as f64;
                let d = x - center;
                let w = (-(d * d) / (2.0 * sigma)).exp();
                let eps = match quadrature {
                    Quadrature::X => C64::new(x, mean.im),
                    Quadrature::Y => C64::new(mean.re, x),
                };
                grid.push((eps, w));
                total += w;
            }
            for (_, w) in &mut grid {
                *w /= total;
            }
            Ok(grid)
        }
        PolarizationState::DisplacedThermal { mean, i_th } => {
            if n_points < 2 {
                return Err(DriverError::InvalidParameter(format!(
                    "thermal grid needs n_points >= 2, got {n_points}"
                )));
            }
            if !(n_sigma > 0.0) {
                return Err(DriverError::InvalidParameter("n_sigma must be > 0".into()));
            }
            let var = 2.0 * i_th;
            if var == 0.0 {
                return Ok(vec![(mean, 1.0)]);
            }
            let half = n_sigma * var.sqrt();
            let step = 2.0 * half / (n_points - 1) as f64;
            let mut grid = Vec::with_capacity(n_points * n_points);
            let mut total = 0.0;
            for j in 0..n_points {
                let x = mean.re - half + step * j as f64;
                for k in 0..n_points {
                    let y = mean.im - half + step * k as f64;
                    let d2 = (x - mean.re).powi(2) + (y - mean.im).powi(2);
                    let w = (-d2 / (2.0 * var)).exp();
                    grid.push((C64::new(x, y), w));
                    total += w;
                }
            }
            for (_, w) in &mut grid {
                *w /= total;
            }
            Ok(grid)
        }
    }
}

/// Two-component driver configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverConfig {
    pub parallel: PolarizationState,
    pub perp: PolarizationState,
    /// Carrier angular frequency (a.u.).
    pub omega: f64,
}

impl DriverConfig {
    pub fn validate(&self) -> Result<(), DriverError> {
        self.parallel.validate()?;
        self.perp.validate()?;
        if !(self.omega > 0.0) {
            return Err(DriverError::InvalidParameter("omega must be > 0".into()));
        }
        Ok(())
    }

    /// True iff the mean fields form the circular configuration
    /// `ε̄_⊥ = i·ε̄_∥` within relative tolerance [`CIRCULAR_TOL`].
    pub fn is_circular(&self) -> bool {
        let ep = self.parallel.mean();
        let eq = self.perp.mean();
        let scale = ep.norm().max(eq.norm());
        (eq - C64::i() * ep).norm() <= CIRCULAR_TOL * scale
    }

    /// Mean-field realization (both components at their means).
    pub fn mean_realization(&self) -> FieldRealization {
        FieldRealization {
            eps_par: self.parallel.mean(),
            eps_perp: self.perp.mean(),
            omega: self.omega,
        }
    }

    /// All classical realizations of this driver with their weights, from the
    /// perpendicular component's marginal grid. The parallel component stays
    /// at its mean.
    pub fn realizations(
        &self,
        n_points: usize,
        n_sigma: f64,
    ) -> Result<Vec<(FieldRealization, f64)>, DriverError> {
        self.validate()?;
        let grid = amplitude_grid(&self.perp, n_points, n_sigma)?;
        let eps_par = self.parallel.mean();
        Ok(grid
            .into_iter()
            .map(|(eps_perp, w)| {
                (FieldRealization { eps_par, eps_perp, omega: self.omega }, w)
            })
            .collect())
    }
}

/// One classical 2D field sample.
///
/// The complex amplitudes pack the quadratures as `ε = ε⁽ˣ⁾ + i·ε⁽ʸ⁾`, so
/// that `A_μ(t) = (ε⁽ˣ⁾_μ/ω)·cos(ωt) + (ε⁽ʸ⁾_μ/ω)·sin(ωt)` and
/// `E_μ = −∂A_μ/∂t`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRealization {
    pub eps_par: C64,
    pub eps_perp: C64,
    pub omega: f64,
}

impl FieldRealization {
    /// Vector potential `(A_∥, A_⊥)` at time `t`.
    pub fn vector_potential(&self, t: f64) -> (C64, C64) {
        let (c, s) = ((self.omega * t).cos(), (self.omega * t).sin());
        let a = |eps: C64| C64::new((eps.re * c + eps.im * s) / self.omega, 0.0);
        (a(self.eps_par), a(self.eps_perp))
    }

    /// Electric field `(E_∥, E_⊥) = −∂A/∂t` at time `t`.
    pub fn electric_field(&self, t: f64) -> (C64, C64) {
        let (c, s) = ((self.omega * t).cos(), (self.omega * t).sin());
        let e = |eps: C64| C64::new(eps.re * s - eps.im * c, 0.0);
        (e(self.eps_par), e(self.eps_perp))
    }
}

/// Intensity-scaled Stokes statistics and the derived ellipticity.
///
/// `mean_ellipticity` is the magnitude `|𝖤|`; the helicity sign is kept in
/// `signed_ellipticity`.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct EllipticityStats {
    pub mean_ellipticity: f64,
    pub signed_ellipticity: f64,
    pub delta_ellipticity: f64,
    pub s0: f64,
    pub s3: f64,
    pub var_s0: f64,
    pub var_s3: f64,
}

/// Closed-form ellipticity statistics for a coherent-∥ driver whose ⊥
/// component is coherent or squeezed.
///
/// Uses the classical-limit Stokes moments: with `I = I_squ` of the ⊥
/// component,
///
/// ```text
/// S₀ = (|ε̄_∥|² + |ε̄_⊥|²)/4 + I
/// S₃ = i(ε̄_∥* ε̄_⊥ − ε̄_∥ ε̄_⊥*)/4
/// (ΔS₀)² = 2I² + |ε̄_⊥|²·I/2 ∓ Re(ε̄_⊥²)·I/2
/// (ΔS₃)² = |ε̄_∥|²·I/2 ± Re(ε̄_∥²)·I/2
/// (Δ𝖤)² = (ΔS₃)²/S₀² + S₃²·(ΔS₀)²/S₀⁴
/// ```
///
/// with the upper signs for amplitude squeezing (`Quadrature::X`) and the
/// lower signs for phase squeezing (`Quadrature::Y`).
pub fn ellipticity_stats(cfg: &DriverConfig) -> Result<EllipticityStats, DriverError> {
    cfg.validate()?;
    if !matches!(cfg.parallel, PolarizationState::Coherent { .. }) {
        return Err(DriverError::UnsupportedState(
            "ellipticity formulas require a coherent parallel component",
        ));
    }
    let (i_squ, sign) = match cfg.perp {
        PolarizationState::Coherent { .. } => (0.0, 1.0),
        PolarizationState::DisplacedSqueezedVacuum { i_squ, quadrature, .. } => {
            let sign = match quadrature {
                Quadrature::X => 1.0,
                Quadrature::Y => -1.0,
            };
            (i_squ, sign)
        }
        PolarizationState::DisplacedThermal { .. } => {
            return Err(DriverError::UnsupportedState(
                "ellipticity fluctuations are not derived for thermal drivers",
            ))
        }
    };
    let ep = cfg.parallel.mean();
    let eq = cfg.perp.mean();
    let s0 = (ep.norm_sqr() + eq.norm_sqr()) / 4.0 + i_squ;
    if s0 == 0.0 {
        return Err(DriverError::ZeroIntensity);
    }
    // i(z - z*) = -2 Im z with z = eps_par^* eps_perp
    let s3 = -(ep.conj() * eq).im / 2.0;
    let var_s0 = 2.0 * i_squ * i_squ + eq.norm_sqr() * i_squ / 2.0
        - sign * (eq * eq).re * i_squ / 2.0;
    let var_s3 = ep.norm_sqr() * i_squ / 2.0 + sign * (ep * ep).re * i_squ / 2.0;
    let signed = s3 / s0;
    let var_e = var_s3 / (s0 * s0) + s3 * s3 * var_s0 / s0.powi(4);
    Ok(EllipticityStats {
        mean_ellipticity: signed.abs(),
        signed_ellipticity: signed,
        delta_ellipticity: var_e.max(0.0).sqrt(),
        s0,
        s3,
        var_s0,
        var_s3,
    })
}

/// Monte-Carlo estimate of the same Stokes statistics from phase-space
/// sampling at a finite single-photon amplitude `eps0`.
///
/// Each mode is sampled from its Husimi distribution; normally ordered
/// moments are recovered from the sampled Gaussian moments through the exact
/// ordering identities, so the estimate is independent of the closed forms
/// in [`ellipticity_stats`] and converges to them as `eps0 → 0`. Pick
/// `eps0² ≪ I_squ` to keep the finite-size bias below the sampling noise.
pub fn monte_carlo_stokes<R: Rng + ?Sized>(
    cfg: &DriverConfig,
    n_samples: usize,
    eps0: f64,
    rng: &mut R,
) -> Result<EllipticityStats, DriverError> {
    cfg.validate()?;
    if !(eps0 > 0.0) {
        return Err(DriverError::InvalidParameter("eps0 must be > 0".into()));
    }
    if n_samples < 2 {
        return Err(DriverError::InvalidParameter("need at least 2 samples".into()));
    }
    // Per-axis Husimi variances in mode units (Wigner + 1/4 vacuum unit).
    let husimi_axes = |state: &PolarizationState| -> Result<(f64, f64), DriverError> {
        match *state {
            PolarizationState::Coherent { .. } => Ok((0.5, 0.5)),
            PolarizationState::DisplacedSqueezedVacuum { i_squ, quadrature, .. } => {
                let r = (i_squ.sqrt() / eps0).asinh();
                let (lo, hi) = (((-2.0 * r).exp() + 1.0) / 4.0, ((2.0 * r).exp() + 1.0) / 4.0);
                // The Stokes algebra anti-squeezes the mode quadrature along
                // the displacement for amplitude squeezing; see the sign
                // convention in `ellipticity_stats`.
                match quadrature {
                    Quadrature::X => Ok((lo, hi)),
                    Quadrature::Y => Ok((hi, lo)),
                }
            }
            PolarizationState::DisplacedThermal { .. } => Err(DriverError::UnsupportedState(
                "ellipticity fluctuations are not derived for thermal drivers",
            )),
        }
    };

    struct ModeMoments {
        mu: C64,
        v: f64,
        w: C64,
    }

    let mut sample_mode = |state: &PolarizationState| -> Result<ModeMoments, DriverError> {
        let (vx, vy) = husimi_axes(state)?;
        let mu_exact = state.mean() / (2.0 * eps0);
        let nx = Normal::new(0.0, vx.sqrt()).expect("valid std");
        let ny = Normal::new(0.0, vy.sqrt()).expect("valid std");
        let mut sum = C64::new(0.0, 0.0);
        let mut sum_sq = C64::new(0.0, 0.0);
        let mut sum_abs2 = 0.0;
        for _ in 0..n_samples {
            let d = C64::new(nx.sample(rng), ny.sample(rng));
            let a = mu_exact + d;
            sum += a;
            sum_sq += a * a;
            sum_abs2 += a.norm_sqr();
        }
        let n = n_samples as f64;
        let mu = sum / n;
        let v = (sum_abs2 / n - mu.norm_sqr()).max(0.0);
        let w = sum_sq / n - mu * mu;
        Ok(ModeMoments { mu, v, w })
    };

    let par = sample_mode(&cfg.parallel)?;
    let perp = sample_mode(&cfg.perp)?;

    // Normally ordered moments from Gaussian (mu, v, w); v and w are the
    // Husimi central moments E|δ|² and Eδ².
    let occupancy = |m: &ModeMoments| m.mu.norm_sqr() + m.v - 1.0;
    let occupancy_var = |m: &ModeMoments| {
        2.0 * m.mu.norm_sqr() * m.v + 2.0 * (m.mu.conj() * m.mu.conj() * m.w).re + m.v * m.v
            + m.w.norm_sqr()
            - m.mu.norm_sqr()
            - m.v
    };
    let a_sq = |m: &ModeMoments| m.mu * m.mu + m.w;

    let e2 = eps0 * eps0;
    let e4 = e2 * e2;
    let (np, nq) = (occupancy(&par), occupancy(&perp));
    let s0 = e2 * (np + nq);
    if s0 == 0.0 {
        return Err(DriverError::ZeroIntensity);
    }
    let var_s0 = e4 * (occupancy_var(&par) + occupancy_var(&perp));
    let s3 = -2.0 * e2 * (par.mu.conj() * perp.mu).im;
    let s3_sq = e4
        * (np * (nq + 1.0) + (np + 1.0) * nq - 2.0 * (a_sq(&par).conj() * a_sq(&perp)).re);
    let var_s3 = s3_sq - s3 * s3;
    let signed = s3 / s0;
    let var_e = var_s3 / (s0 * s0) + s3 * s3 * var_s0 / s0.powi(4);
    Ok(EllipticityStats {
        mean_ellipticity: signed.abs(),
        signed_ellipticity: signed,
        delta_ellipticity: var_e.max(0.0).sqrt(),
        s0,
        s3,
        var_s0,
        var_s3,
    })
}

/// Sampled electric-field pairs for Lissajous figures.
#[derive(Clone, Debug)]
pub struct LissajousSample {
    pub times: Vec<f64>,
    /// `(E_∥, E_⊥)` pairs, time-major: `n_samples` consecutive draws per
    /// entry of `times`.
    pub samples: Vec<(f64, f64)>,
}

/// Draws `(E_∥, E_⊥)` pairs at each requested time from the driver's
/// phase-space distribution at display scale `display_eps`.
///
/// The classical limit collapses all widths to zero, so a finite
/// single-photon amplitude is required purely for visualization. Field
/// quadrature variances per component are `display_eps²` for coherent states,
/// `display_eps²·e^{±2r}` for DSV states (enlarged along the state's
/// fluctuating quadrature, with `I_squ = display_eps²·sinh²r`), and
/// `display_eps²·(1 + 2·n_th)` with `n_th = I_th/display_eps²` for thermal
/// states.
pub fn sample_lissajous<R: Rng + ?Sized>(
    cfg: &DriverConfig,
    n_samples: usize,
    times: &[f64],
    display_eps: f64,
    rng: &mut R,
) -> Result<LissajousSample, DriverError> {
    cfg.validate()?;
    if !(display_eps > 0.0) {
        return Err(DriverError::InvalidParameter("display_eps must be > 0".into()));
    }
    let variances = |state: &PolarizationState| -> (f64, f64) {
        let e2 = display_eps * display_eps;
        match *state {
            PolarizationState::Coherent { .. } => (e2, e2),
            PolarizationState::DisplacedSqueezedVacuum { i_squ, quadrature, .. } => {
                let r = (i_squ.sqrt() / display_eps).asinh();
                let (hi, lo) = (e2 * (2.0 * r).exp(), e2 * (-2.0 * r).exp());
                match quadrature {
                    Quadrature::X => (hi, lo),
                    Quadrature::Y => (lo, hi),
                }
            }
            PolarizationState::DisplacedThermal { i_th, .. } => {
                let v = e2 + 2.0 * i_th;
                (v, v)
            }
        }
    };
    let make = |state: &PolarizationState| {
        let (vx, vy) = variances(state);
        (
            state.mean(),
            Normal::new(0.0, vx.sqrt()).expect("valid std"),
            Normal::new(0.0, vy.sqrt()).expect("valid std"),
        )
    };
    let (mp, px, py) = make(&cfg.parallel);
    let (mq, qx, qy) = make(&cfg.perp);

    let mut samples = Vec::with_capacity(n_samples * times.len());
    for &t in times {
        let (c, s) = ((cfg.omega * t).cos(), (cfg.omega * t).sin());
        for _ in 0..n_samples {
            let (ax, ay) = (mp.re + px.sample(rng), mp.im + py.sample(rng));
            let (bx, by) = (mq.re + qx.sample(rng), mq.im + qy.sample(rng));
            samples.push((ax * s - ay * c, bx * s - by * c));
        }
    }
    Ok(LissajousSample { times: times.to_vec(), samples })
}
