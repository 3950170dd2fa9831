//! HHG spectra for quantum drivers: Gaussian-weighted averages of
//! per-realization SFA spectra, cutoff detection, convergence diagnostics and
//! the time-zero second-order autocorrelation `g²(0)`.

use crate::cache::{CachedSpectrum, SpectrumCache};
use crate::driver::{DriverConfig, DriverError, PolarizationState};
use crate::sfa::{self, AtomSpec, NumericsSpec, SfaError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("grid too coarse: fluctuating states need at least 3 points")]
    GridTooCoarse,
    #[error("no-signal: zero spectral weight in the requested band")]
    NoSignal,
    #[error("unsupported driver: {0}")]
    UnsupportedDriver(&'static str),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Sfa(#[from] SfaError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Marginal-grid parameters for the weighted average.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Nodes per fluctuating quadrature (odd for DSV; squared for thermal).
    pub n_points: usize,
    /// Truncation of the Gaussian marginal, in standard deviations.
    pub n_sigma: f64,
    /// Highest harmonic order retained in the assembled spectrum.
    pub max_order: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_points: 241, n_sigma: 4.0, max_order: 160.0 }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    Max1,
}

/// Weighted-average HHG spectrum `S(q) = (qω₀)⁴ Σ_j w_j (|d_∥|² + |d_⊥|²)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub harmonic_orders: Vec<f64>,
    pub s: Vec<f64>,
    pub n_realizations: usize,
    pub weights_used: Vec<f64>,
    pub normalization: Normalization,
}

impl SpectrumResult {
    /// Same spectrum rescaled so its maximum is one.
    pub fn normalized(&self) -> SpectrumResult {
        let max = self.s.iter().cloned().fold(0.0, f64::max);
        let s = if max > 0.0 {
            self.s.iter().map(|v| v / max).collect()
        } else {
            self.s.clone()
        };
        SpectrumResult { s, normalization: Normalization::Max1, ..self.clone() }
    }
}

/// `g²(0)` over a harmonic band.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct G2Result {
    pub harmonic_band: (f64, f64),
    pub g2: f64,
}

fn realization_abs2(
    realization: &crate::driver::FieldRealization,
    atom: &AtomSpec,
    num: &NumericsSpec,
    max_order: f64,
    cache: Option<&SpectrumCache>,
) -> Result<CachedSpectrum, SpectrumError> {
    let key = cache.map(|_| SpectrumCache::key(realization, atom, num, max_order));
    if let (Some(c), Some(k)) = (cache, key.as_ref()) {
        if let Some(hit) = c.get(k) {
            return Ok(hit);
        }
    }
    let series = sfa::dipole_response(realization, atom, num)?;
    let spec = sfa::dipole_spectrum(&series, num.window)?;
    let domega = if spec.omegas.len() > 1 { spec.omegas[1] } else { 0.0 };
    let cap = max_order * realization.omega;
    let keep = spec.omegas.iter().take_while(|w| **w <= cap).count();
    let value = CachedSpectrum {
        omega0: realization.omega,
        domega,
        abs2_par: spec.d_par[..keep].iter().map(|d| d.norm_sqr()).collect(),
        abs2_perp: spec.d_perp[..keep].iter().map(|d| d.norm_sqr()).collect(),
    };
    if let (Some(c), Some(k)) = (cache, key.as_ref()) {
        // Cache write failures only cost a recompute later.
        let _ = c.put(k, &value);
    }
    Ok(value)
}

fn weighted_realizations(
    cfg: &DriverConfig,
    grid: &GridSpec,
) -> Result<Vec<(crate::driver::FieldRealization, f64)>, SpectrumError> {
    if !matches!(cfg.parallel, PolarizationState::Coherent { .. }) {
        return Err(SpectrumError::UnsupportedDriver(
            "parallel component must be coherent",
        ));
    }
    if !matches!(cfg.perp, PolarizationState::Coherent { .. }) && grid.n_points < 3 {
        return Err(SpectrumError::GridTooCoarse);
    }
    Ok(cfg.realizations(grid.n_points, grid.n_sigma)?)
}

fn all_abs2(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    grid: &GridSpec,
    cache: Option<&SpectrumCache>,
) -> Result<(Vec<f64>, Vec<CachedSpectrum>), SpectrumError> {
    let jobs = weighted_realizations(cfg, grid)?;
    let weights: Vec<f64> = jobs.iter().map(|(_, w)| *w).collect();
    let spectra: Result<Vec<CachedSpectrum>, SpectrumError> = jobs
        .par_iter()
        .map(|(r, _)| realization_abs2(r, atom, num, grid.max_order, cache))
        .collect();
    Ok((weights, spectra?))
}

/// Assembles the driver's HHG spectrum by weighted averaging of the
/// per-realization SFA spectra over the perpendicular marginal grid.
///
/// With a coherent perpendicular component this reduces to the
/// single-realization semiclassical spectrum (one job, weight one, same code
/// path).
pub fn hhg_spectrum_cached(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    grid: &GridSpec,
    cache: Option<&SpectrumCache>,
) -> Result<SpectrumResult, SpectrumError> {
    let (weights, spectra) = all_abs2(cfg, atom, num, grid, cache)?;
    let n_bins = spectra.iter().map(|c| c.abs2_par.len()).min().unwrap_or(0);
    let domega = spectra.first().map(|c| c.domega).unwrap_or(0.0);
    let omega0 = cfg.omega;
    let mut s = vec![0.0f64; n_bins];
    // Deterministic reduction in ascending grid order.
    for (w, spec) in weights.iter().zip(&spectra) {
        for k in 0..n_bins {
            s[k] += w * (spec.abs2_par[k] + spec.abs2_perp[k]);
        }
    }
    for (k, v) in s.iter_mut().enumerate() {
        let omega = k as f64 * domega;
        *v *= omega.powi(4);
    }
    let harmonic_orders = (0..n_bins).map(|k| k as f64 * domega / omega0).collect();
    Ok(SpectrumResult {
        harmonic_orders,
        s,
        n_realizations: weights.len(),
        weights_used: weights,
        normalization: Normalization::Raw,
    })
}

/// [`hhg_spectrum_cached`] without a disk cache.
pub fn hhg_spectrum(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    grid: &GridSpec,
) -> Result<SpectrumResult, SpectrumError> {
    hhg_spectrum_cached(cfg, atom, num, grid, None)
}

/// Weighted `g²(0)` ratio over per-realization band intensities.
pub(crate) fn g2_from_weighted(weights: &[f64], band_abs2: &[f64]) -> Result<f64, SpectrumError> {
    let num: f64 = weights.iter().zip(band_abs2).map(|(w, x)| w * x * x).sum();
    let den: f64 = weights.iter().zip(band_abs2).map(|(w, x)| w * x).sum();
    if den <= 0.0 {
        return Err(SpectrumError::NoSignal);
    }
    Ok(num / (den * den))
}

/// Time-zero second-order autocorrelation of the emitted band:
/// `g²(0) = Σ_j w_j |d_j|⁴ / (Σ_j w_j |d_j|²)²` with `|d_j|²` summed over the
/// harmonic band. Equals one for coherent drivers and is bounded below by one
/// for every classical statistical mixture.
pub fn g2_zero_cached(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    grid: &GridSpec,
    band: (f64, f64),
    cache: Option<&SpectrumCache>,
) -> Result<G2Result, SpectrumError> {
    if !(band.0 < band.1) || band.0 < 0.0 {
        return Err(SpectrumError::InvalidParameter(format!(
            "invalid band ({}, {})",
            band.0, band.1
        )));
    }
    let (weights, spectra) = all_abs2(cfg, atom, num, grid, cache)?;
    let band_abs2: Vec<f64> = spectra
        .iter()
        .map(|c| {
            let mut acc = 0.0;
            for k in 0..c.abs2_par.len() {
                let q = k as f64 * c.domega / c.omega0;
                if q >= band.0 && q <= band.1 {
                    acc += c.abs2_par[k] + c.abs2_perp[k];
                }
            }
            acc
        })
        .collect();
    let g2 = g2_from_weighted(&weights, &band_abs2)?;
    Ok(G2Result { harmonic_band: band, g2 })
}

pub fn g2_zero(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    grid: &GridSpec,
    band: (f64, f64),
) -> Result<G2Result, SpectrumError> {
    g2_zero_cached(cfg, atom, num, grid, band, None)
}

/// Peak envelope over integer harmonic orders: the maximum of `s` within
/// ±0.5 order of each integer.
pub fn harmonic_envelope(res: &SpectrumResult) -> Vec<(usize, f64)> {
    let max_q = res.harmonic_orders.last().copied().unwrap_or(0.0);
    let mut env = Vec::new();
    let mut q = 1usize;
    while (q as f64) + 0.5 <= max_q {
        let lo = q as f64 - 0.5;
        let hi = q as f64 + 0.5;
        let peak = res
            .harmonic_orders
            .iter()
            .zip(&res.s)
            .filter(|(o, _)| **o >= lo && **o <= hi)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        env.push((q, peak));
        q += 1;
    }
    env
}

/// Scans the harmonic peak envelope for plateau cutoffs.
///
/// An order qualifies when everything more than four orders past it stays at
/// least `drop_db` below its own level; maximal runs of consecutive
/// qualifying orders each yield one cutoff, the last run member within
/// `drop_db/2` of the run's top level. Up to two cutoffs are returned
/// (double-plateau support). A flat or empty spectrum yields none.
pub fn cutoff_detect(res: &SpectrumResult, drop_db: f64) -> Vec<f64> {
    assert!(drop_db > 0.0, "drop_db must be positive");
    let env = harmonic_envelope(res);
    if env.is_empty() {
        return Vec::new();
    }
    let level: Vec<f64> =
        env.iter().map(|&(_, v)| if v > 0.0 { 10.0 * v.log10() } else { f64::NEG_INFINITY }).collect();
    let n = env.len();
    // tail_max[i] = max level strictly beyond env[i]
    let mut tail_max = vec![f64::NEG_INFINITY; n];
    for i in (0..n - 1).rev() {
        tail_max[i] = tail_max[i + 1].max(level[i + 1]);
    }
    let span = 4usize;
    let qualifies: Vec<bool> = (0..n)
        .map(|i| {
            if !level[i].is_finite() {
                return false;
            }
            let j = i + span;
            if j >= n - 1 {
                return false;
            }
            tail_max[j] <= level[i] - drop_db
        })
        .collect();

    let mut cutoffs = Vec::new();
    let mut i = 0;
    while i < n {
        if qualifies[i] {
            let start = i;
            while i + 1 < n && qualifies[i + 1] {
                i += 1;
            }
            let top = (start..=i).map(|k| level[k]).fold(f64::NEG_INFINITY, f64::max);
            let pick = (start..=i)
                .rev()
                .find(|&k| level[k] >= top - drop_db / 2.0)
                .unwrap_or(i);
            cutoffs.push(env[pick].0 as f64);
            if cutoffs.len() == 2 {
                break;
            }
        }
        i += 1;
    }
    cutoffs
}

#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_points: usize,
    /// Max relative deviation of the spectrum against the finest grid, taken
    /// on the odd-harmonic envelope over orders 1..cutoff+10.
    pub deviation: f64,
}

/// Grid-refinement diagnostic: recomputes the spectrum for each grid size in
/// `n_points_list` (ascending) and reports each one's deviation from the
/// finest grid.
pub fn convergence_scan_cached(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    n_points_list: &[usize],
    n_sigma: f64,
    cache: Option<&SpectrumCache>,
) -> Result<Vec<ConvergenceRow>, SpectrumError> {
    if n_points_list.is_empty() {
        return Ok(Vec::new());
    }
    if n_points_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(SpectrumError::InvalidParameter(
            "n_points_list must be sorted ascending".into(),
        ));
    }
    let grid_for = |n: usize| GridSpec { n_points: n, n_sigma, ..GridSpec::default() };
    let finest = hhg_spectrum_cached(
        cfg,
        atom,
        num,
        &grid_for(*n_points_list.last().unwrap()),
        cache,
    )?;
    let cutoff = cutoff_detect(&finest, 20.0).first().copied().unwrap_or(21.0);
    let q_hi = cutoff + 10.0;
    let env_f = harmonic_envelope(&finest);
    let mut rows = Vec::with_capacity(n_points_list.len());
    for &n in n_points_list {
        let res = hhg_spectrum_cached(cfg, atom, num, &grid_for(n), cache)?;
        let env_n = harmonic_envelope(&res);
        let mut dev: f64 = 0.0;
        for (&(q, v_n), &(_, v_f)) in env_n.iter().zip(&env_f) {
            if q % 2 == 1 && (q as f64) <= q_hi && v_f > 0.0 {
                dev = dev.max((v_n / v_f - 1.0).abs());
            }
        }
        rows.push(ConvergenceRow { n_points: n, deviation: dev });
    }
    Ok(rows)
}

pub fn convergence_scan(
    cfg: &DriverConfig,
    atom: &AtomSpec,
    num: &NumericsSpec,
    n_points_list: &[usize],
    n_sigma: f64,
) -> Result<Vec<ConvergenceRow>, SpectrumError> {
    convergence_scan_cached(cfg, atom, num, n_points_list, n_sigma, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::Quadrature;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C64;

    const OMEGA: f64 = 0.057;
    const EPS: f64 = 0.053;

    fn synthetic(levels: &[(f64, f64)], floor: f64, q_max: f64) -> SpectrumResult {
        // step-wise envelope: level until each boundary order, then the next
        let mut orders = Vec::new();
        let mut s = Vec::new();
        let mut q = 0.0;
        while q <= q_max {
            let mut v = floor;
            for &(edge, level) in levels.iter().rev() {
                if q <= edge {
                    v = level;
                }
            }
            orders.push(q);
            s.push(v);
            q += 0.2;
        }
        SpectrumResult {
            harmonic_orders: orders,
            s,
            n_realizations: 1,
            weights_used: vec![1.0],
            normalization: Normalization::Raw,
        }
    }

    #[test]
    fn cutoff_detect_single_plateau() {
        let res = synthetic(&[(40.0, 1.0)], 1e-4, 80.0);
        assert_eq!(cutoff_detect(&res, 20.0), vec![40.0]);
    }

    #[test]
    fn cutoff_detect_double_plateau() {
        let res = synthetic(&[(25.0, 1.0), (60.0, 1e-2)], 1e-6, 90.0);
        assert_eq!(cutoff_detect(&res, 20.0), vec![25.0, 60.0]);
    }

    #[test]
    fn cutoff_detect_flat_spectrum_is_empty() {
        let res = synthetic(&[(100.0, 1.0)], 1.0, 80.0);
        assert!(cutoff_detect(&res, 20.0).is_empty());
        let empty = SpectrumResult {
            harmonic_orders: vec![],
            s: vec![],
            n_realizations: 0,
            weights_used: vec![],
            normalization: Normalization::Raw,
        };
        assert!(cutoff_detect(&empty, 20.0).is_empty());
    }

    #[test]
    fn cutoff_detect_tolerates_gradual_decay() {
        // plateau to 39, then an 8 dB/order roll-off into a floor
        let mut orders = Vec::new();
        let mut s = Vec::new();
        let mut q = 0.0;
        while q <= 80.0 {
            let drop: f64 = -8.0 * (q - 39.0);
            let db: f64 = if q <= 39.0 { 0.0 } else { drop.max(-90.0) };
            orders.push(q);
            s.push(10f64.powf(db / 10.0));
            q += 0.2;
        }
        let res = SpectrumResult {
            harmonic_orders: orders,
            s,
            n_realizations: 1,
            weights_used: vec![1.0],
            normalization: Normalization::Raw,
        };
        let cutoffs = cutoff_detect(&res, 20.0);
        assert_eq!(cutoffs.len(), 1);
        assert!((cutoffs[0] - 39.0).abs() <= 2.0, "got {:?}", cutoffs);
    }

    #[test]
    fn g2_toy_weights() {
        let g2 = g2_from_weighted(&[0.5, 0.5], &[1.0, 3.0]).unwrap();
        assert_relative_eq!(g2, 1.25, max_relative = 1e-14);
    }

    #[test]
    fn g2_zero_denominator_errors() {
        assert!(matches!(
            g2_from_weighted(&[0.5, 0.5], &[0.0, 0.0]),
            Err(SpectrumError::NoSignal)
        ));
    }

    fn cheap_numerics() -> NumericsSpec {
        let mut num = NumericsSpec::for_omega(OMEGA);
        num.dt = 2.0 * std::f64::consts::PI / OMEGA / 120.0;
        num.n_cycles = 2;
        num
    }

    fn dsv_cfg(i_squ: f64) -> DriverConfig {
        DriverConfig {
            parallel: PolarizationState::coherent(C64::new(EPS, 0.0)),
            perp: PolarizationState::squeezed(C64::new(0.0, EPS), i_squ, Quadrature::X),
            omega: OMEGA,
        }
    }

    #[test]
    fn coherent_perp_single_realization_same_path() {
        let cfg = DriverConfig {
            parallel: PolarizationState::coherent(C64::new(EPS, 0.0)),
            perp: PolarizationState::coherent(C64::new(0.0, EPS)),
            omega: OMEGA,
        };
        let num = cheap_numerics();
        let grid = GridSpec { n_points: 241, n_sigma: 4.0, max_order: 60.0 };
        let avg = hhg_spectrum(&cfg, &AtomSpec::hydrogen(), &num, &grid).unwrap();
        assert_eq!(avg.n_realizations, 1);
        assert_eq!(avg.weights_used, vec![1.0]);

        // identical to assembling by hand from the single realization
        let r = cfg.mean_realization();
        let series = sfa::dipole_response(&r, &AtomSpec::hydrogen(), &num).unwrap();
        let spec = sfa::dipole_spectrum(&series, num.window).unwrap();
        for (k, q) in avg.harmonic_orders.iter().enumerate() {
            let w = q * OMEGA;
            let expect =
                w.powi(4) * (spec.d_par[k].norm_sqr() + spec.d_perp[k].norm_sqr());
            assert_eq!(avg.s[k], expect);
        }
    }

    #[test]
    fn spectrum_is_convex_combination_times_omega4() {
        let cfg = dsv_cfg(5e-5);
        let num = cheap_numerics();
        let atom = AtomSpec::hydrogen();
        let grid = GridSpec { n_points: 5, n_sigma: 3.0, max_order: 60.0 };
        let avg = hhg_spectrum(&cfg, &atom, &num, &grid).unwrap();
        let jobs = cfg.realizations(5, 3.0).unwrap();
        let mut per: Vec<Vec<f64>> = Vec::new();
        for (r, _) in &jobs {
            let series = sfa::dipole_response(r, &atom, &num).unwrap();
            let spec = sfa::dipole_spectrum(&series, num.window).unwrap();
            per.push(
                (0..avg.s.len())
                    .map(|k| spec.d_par[k].norm_sqr() + spec.d_perp[k].norm_sqr())
                    .collect(),
            );
        }
        for k in 0..avg.s.len() {
            let w4 = (avg.harmonic_orders[k] * OMEGA).powi(4);
            let lo = per.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) * w4;
            let hi = per.iter().map(|p| p[k]).fold(0.0, f64::max) * w4;
            assert!(avg.s[k] >= lo - 1e-30 && avg.s[k] <= hi + 1e-30);
        }
    }

    #[test]
    fn g2_bounds_small_grid() {
        let num = cheap_numerics();
        let atom = AtomSpec::hydrogen();
        let grid = GridSpec { n_points: 9, n_sigma: 3.0, max_order: 60.0 };
        let coherent = DriverConfig {
            parallel: PolarizationState::coherent(C64::new(EPS, 0.0)),
            perp: PolarizationState::coherent(C64::new(0.0, EPS)),
            omega: OMEGA,
        };
        let g = g2_zero(&coherent, &atom, &num, &grid, (9.0, 21.0)).unwrap();
        assert_relative_eq!(g.g2, 1.0, max_relative = 1e-6);

        let g = g2_zero(&dsv_cfg(5e-5), &atom, &num, &grid, (9.0, 21.0)).unwrap();
        assert!(g.g2 >= 1.0 - 1e-9, "g2 = {}", g.g2);
    }

    #[test]
    fn grid_too_coarse_rejected() {
        let num = cheap_numerics();
        let grid = GridSpec { n_points: 1, n_sigma: 4.0, max_order: 60.0 };
        assert!(matches!(
            hhg_spectrum(&dsv_cfg(5e-5), &AtomSpec::hydrogen(), &num, &grid),
            Err(SpectrumError::GridTooCoarse)
        ));
    }

    #[test]
    fn convergence_deviation_zero_on_same_grid() {
        let num = cheap_numerics();
        let rows = convergence_scan(
            &dsv_cfg(5e-5),
            &AtomSpec::hydrogen(),
            &num,
            &[21, 21],
            4.0,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].deviation, 0.0);
    }

    #[test]
    fn cache_hit_matches_cold_run() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectrumCache::open(dir.path()).unwrap();
        let num = cheap_numerics();
        let atom = AtomSpec::hydrogen();
        let grid = GridSpec { n_points: 5, n_sigma: 3.0, max_order: 60.0 };
        let cfg = dsv_cfg(1e-5);
        let cold = hhg_spectrum_cached(&cfg, &atom, &num, &grid, Some(&cache)).unwrap();
        let warm = hhg_spectrum_cached(&cfg, &atom, &num, &grid, Some(&cache)).unwrap();
        assert_eq!(cold.s, warm.s);
        let no_cache = hhg_spectrum(&cfg, &atom, &num, &grid).unwrap();
        assert_eq!(cold.s, no_cache.s);
    }
}
