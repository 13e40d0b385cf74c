//! Fundamental-length line broadening.
//!
//! A point-like internal offset is replaced by a patch `0 <= r <= l/2`. Every
//! `r` in the patch shifts the quantized collective momentum through its
//! Berry phase; the spread of the resulting level energies is the Berry
//! broadening `ΔE`. For the two-level model `ΔE ≈ (ħ/16)(l/Rc)² H0'`, for the
//! SU(3) model (with `cos θ = r/Rc`) `ΔE ≈ (ħ/4)(l/Rc)² H0'`. Both are
//! quadratic in `l/Rc`, unlike the linear bound `Δν >= ν₀ (l/Rc) β`.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::berry::{analytic_su3_phase, analytic_two_level_phase, Branch, ParameterLoop};
use crate::error::{Error, Result};
use crate::models::{
    collective_derivative, three_level_spectrum, CollectiveModel, ThreeLevelModel, TwoLevelModel,
};
use crate::numerics::{fit_loglog, FitResult};

pub const DEFAULT_SAMPLES: usize = 101;
/// Largest accepted `l/Rc`.
pub const MAX_RATIO: f64 = 0.1;
/// Above this `l/Rc` the small-patch approximation is flagged.
pub const WARN_RATIO: f64 = 0.01;
/// Largest `l/Rc` admitted by [`scaling_study`].
pub const SCALING_MAX_RATIO: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchConfig {
    pub l: f64,
    pub rc: f64,
    pub n_samples: usize,
    pub collective: CollectiveModel,
    pub m: i64,
    pub branch: Branch,
}

impl PatchConfig {
    pub fn new(
        l: f64,
        rc: f64,
        n_samples: usize,
        collective: CollectiveModel,
        m: i64,
        branch: Branch,
    ) -> Result<Self> {
        if !(rc > 0.0 && rc.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "Rc must be finite and > 0, got {rc}"
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "l must be finite and > 0, got {l}"
            )));
        }
        if l / rc > MAX_RATIO {
            return Err(Error::InvalidModel(format!(
                "l/Rc = {} exceeds {MAX_RATIO}; the patch must be small against Rc",
                l / rc
            )));
        }
        if n_samples < 2 {
            return Err(Error::InvalidModel(format!(
                "need at least 2 samples, got {n_samples}"
            )));
        }
        Ok(Self {
            l,
            rc,
            n_samples,
            collective,
            m,
            branch,
        })
    }

    /// Convenience constructor: linear `H0` with `ω`, `m = 0`, upper branch,
    /// default sample count.
    pub fn linear(l: f64, rc: f64, omega: f64, hbar: f64) -> Result<Self> {
        Self::new(
            l,
            rc,
            DEFAULT_SAMPLES,
            CollectiveModel::linear(omega, hbar)?,
            0,
            Branch::Plus,
        )
    }

    pub fn ratio(&self) -> f64 {
        self.l / self.rc
    }

    pub fn with_l(self, l: f64) -> Result<Self> {
        Self::new(
            l,
            self.rc,
            self.n_samples,
            self.collective,
            self.m,
            self.branch,
        )
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.ratio() > WARN_RATIO {
            w.push(format!(
                "l/Rc = {:e} exceeds {WARN_RATIO}; quadratic approximation degrades",
                self.ratio()
            ));
        }
        w
    }

    /// Uniform grid over `[0, l/2]`.
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let last = (self.n_samples - 1) as f64;
        (0..self.n_samples).map(move |i| {
            if i + 1 == self.n_samples {
                0.5 * self.l
            } else {
                0.5 * self.l * i as f64 / last
            }
        })
    }

    fn slope(&self) -> f64 {
        collective_derivative(&self.collective, self.m as f64 * self.collective.hbar())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchSample {
    pub r: f64,
    /// Level shift relative to `r = 0` through the Berry phase alone.
    pub berry_shift: f64,
    /// Shift of the internal energy (the `±√(Rc²+r²)` term for two levels,
    /// `μ₁` for SU(3)) relative to `r = 0`.
    pub internal_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BroadeningReport {
    pub de_berry: f64,
    /// Spread of the internal-energy channel, reported but not part of `ΔE`.
    pub de_gap: f64,
    pub de_predicted: f64,
    pub relative_error: f64,
    /// `de_gap / de_berry`.
    pub gap_to_berry: f64,
    pub samples: Vec<PatchSample>,
    pub warnings: Vec<String>,
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

fn report(
    config: &PatchConfig,
    samples: Vec<PatchSample>,
    coefficient: f64,
) -> Result<BroadeningReport> {
    let hbar = config.collective.hbar();
    let de_predicted = coefficient * hbar * config.ratio().powi(2) * config.slope().abs();
    if !(de_predicted >= 1e-300) {
        return Err(Error::PredictionUnderflow(de_predicted));
    }
    let de_berry = spread(samples.iter().map(|s| s.berry_shift));
    let de_gap = spread(samples.iter().map(|s| s.internal_shift));
    Ok(BroadeningReport {
        de_berry,
        de_gap,
        de_predicted,
        relative_error: (de_berry - de_predicted).abs() / de_predicted,
        gap_to_berry: de_gap / de_berry,
        samples,
        warnings: config.warnings(),
    })
}

/// Two-level patch sweep; `ΔE` is compared with `(ħ/16)(l/Rc)² |H0'(mħ)|`.
pub fn sweep_patch(config: &PatchConfig) -> Result<BroadeningReport> {
    let hbar = config.collective.hbar();
    let p0 = config.m as f64 * hbar;
    let sign = config.branch.sign();
    let center = TwoLevelModel::new(config.rc, 0.0)?;
    let gamma0 = analytic_two_level_phase(&center, config.branch)?;

    let samples = config
        .radii()
        .map(|r| {
            let internal = TwoLevelModel::new(config.rc, r)?;
            let gamma = analytic_two_level_phase(&internal, config.branch)?;
            let dp = -(gamma - gamma0) / TAU * hbar;
            let h = internal.half_gap();
            Ok(PatchSample {
                r,
                berry_shift: config.collective.energy_difference(p0, dp),
                internal_shift: sign * r * r / (h + config.rc),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report(config, samples, 1.0 / 16.0)
}

/// SU(3) patch sweep with `cos θ = r/Rc` and a single `χ₁` winding;
/// `ΔE` is compared with `(ħ/4)(l/Rc)² |H0'(mħ)|`. `branch` is ignored: the
/// transported level is the one carrying `μ₁`.
pub fn sweep_patch_su3(config: &PatchConfig) -> Result<BroadeningReport> {
    let hbar = config.collective.hbar();
    let p0 = config.m as f64 * hbar;
    let phase_at = |cos_theta: f64| -> Result<(f64, f64)> {
        let theta = if cos_theta == 0.0 {
            FRAC_PI_2
        } else {
            cos_theta.acos()
        };
        let model = ThreeLevelModel::new(theta, 0.0, 0.0, 0.0)?;
        let lp = ParameterLoop::su3(model, 1, 0, crate::berry::MIN_LOOP_POINTS)?;
        Ok((analytic_su3_phase(&lp)?, three_level_spectrum(&model)[0]))
    };
    let (gamma0, mu0) = phase_at(0.0)?;

    let samples = config
        .radii()
        .map(|r| {
            let (gamma, mu) = phase_at(r / config.rc)?;
            let dp = -(gamma - gamma0) / TAU * hbar;
            Ok(PatchSample {
                r,
                berry_shift: config.collective.energy_difference(p0, dp),
                internal_shift: mu - mu0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report(config, samples, 0.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingModel {
    TwoLevel,
    Su3,
}

impl ScalingModel {
    pub fn label(self) -> &'static str {
        match self {
            ScalingModel::TwoLevel => "two-level",
            ScalingModel::Su3 => "su3",
        }
    }
}

impl std::str::FromStr for ScalingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-level" => Ok(ScalingModel::TwoLevel),
            "su3" => Ok(ScalingModel::Su3),
            other => Err(Error::BadInput(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub model: ScalingModel,
    /// `(l/Rc, ΔE)` in input order.
    pub points: Vec<(f64, f64)>,
    pub fit: FitResult,
}

fn check_ratios(ratios: &[f64], max: f64) -> Result<()> {
    if ratios.len() < 3 {
        return Err(Error::BadInput(format!(
            "need at least 3 ratios, got {}",
            ratios.len()
        )));
    }
    if let Some(bad) = ratios.iter().find(|x| !(**x > 0.0 && **x <= max)) {
        return Err(Error::BadInput(format!("ratio {bad} outside (0, {max}]")));
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::BadInput(format!(
            "ratios span {:.3} decades, need at least 2",
            (hi / lo).log10()
        )));
    }
    Ok(())
}

/// Fit `ΔE ∝ (l/Rc)^k` over `ratios`, taking `Rc`, `H0`, `m`, branch and
/// sample count from `base`.
pub fn scaling_study(
    ratios: &[f64],
    model: ScalingModel,
    base: &PatchConfig,
) -> Result<ScalingStudy> {
    check_ratios(ratios, SCALING_MAX_RATIO)?;
    let points = ratios
        .iter()
        .map(|&ratio| {
            let config = base.with_l(ratio * base.rc)?;
            let rep = match model {
                ScalingModel::TwoLevel => sweep_patch(&config)?,
                ScalingModel::Su3 => sweep_patch_su3(&config)?,
            };
            Ok((ratio, rep.de_berry))
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = fit_loglog(&xs, &ys)?;
    Ok(ScalingStudy { model, points, fit })
}

/// Linear frequency-spread bound `ν₀ (l/Rc) β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeadBound {
    pub nu0: f64,
    pub l_over_rc: f64,
    pub beta: f64,
    pub bound: f64,
}

pub fn mead_bound(nu0: f64, l_over_rc: f64, beta: f64) -> Result<MeadBound> {
    for (name, v) in [("nu0", nu0), ("l/Rc", l_over_rc), ("beta", beta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::BadInput(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    Ok(MeadBound {
        nu0,
        l_over_rc,
        beta,
        bound: nu0 * l_over_rc * beta,
    })
}

pub fn mead_scaling(ratios: &[f64], nu0: f64, beta: f64) -> Result<FitResult> {
    check_ratios(ratios, SCALING_MAX_RATIO)?;
    let ys = ratios
        .iter()
        .map(|&x| mead_bound(nu0, x, beta).map(|m| m.bound))
        .collect::<Result<Vec<_>>>()?;
    fit_loglog(ratios, &ys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeadComparison {
    pub mead: MeadBound,
    pub broadening: BroadeningReport,
    /// `ΔE / ħ`, the Berry broadening as a frequency spread.
    pub geometric_spread: f64,
    /// `geometric_spread / bound`.
    pub ratio: f64,
    /// Same quotient using the closed-form `ΔE`.
    pub predicted_ratio: f64,
}

/// Two-level Berry broadening at `config` against the linear bound at the same
/// `l/Rc`.
pub fn compare_with_mead(config: &PatchConfig, nu0: f64, beta: f64) -> Result<MeadComparison> {
    let mead = mead_bound(nu0, config.ratio(), beta)?;
    let broadening = sweep_patch(config)?;
    let hbar = config.collective.hbar();
    let geometric_spread = broadening.de_berry / hbar;
    Ok(MeadComparison {
        ratio: geometric_spread / mead.bound,
        predicted_ratio: broadening.de_predicted / hbar / mead.bound,
        geometric_spread,
        mead,
        broadening,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ratio: f64) -> PatchConfig {
        PatchConfig::linear(ratio, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn two_level_percent_patch() {
        let rep = sweep_patch(&cfg(1e-2)).unwrap();
        assert!((rep.de_predicted - 6.25e-6).abs() < 1e-20);
        assert!((rep.de_berry / 6.25e-6 - 1.0).abs() < 1e-3);
        assert!(rep.relative_error <= 1e-3);
        assert!(rep.warnings.is_empty());
    }

    #[test]
    fn vanishing_patch_is_exactly_quadratic() {
        let rep = sweep_patch(&cfg(1e-8)).unwrap();
        assert!(rep.relative_error <= 1e-10, "{}", rep.relative_error);
    }

    #[test]
    fn sixteenth_coefficient() {
        let ratio = 1e-3;
        let rep = sweep_patch(&cfg(ratio)).unwrap();
        let coef = rep.de_berry / (ratio * ratio);
        assert!((coef / 0.0625 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn su3_quarter_coefficient() {
        let ratio = 1e-3;
        let rep = sweep_patch_su3(&cfg(ratio)).unwrap();
        assert!((rep.de_berry / 2.5e-7 - 1.0).abs() < 1e-3);
        assert!((rep.de_berry / (ratio * ratio) / 0.25 - 1.0).abs() < 1e-3);
        assert_eq!(rep.samples[0].berry_shift, 0.0);
        assert_eq!(rep.samples[0].r, 0.0);
    }

    #[test]
    fn samples_cover_patch_in_order() {
        let rep = sweep_patch(&cfg(1e-2)).unwrap();
        assert_eq!(rep.samples.len(), DEFAULT_SAMPLES);
        assert_eq!(rep.samples.last().unwrap().r, 5e-3);
        assert!(rep.samples.windows(2).all(|w| w[0].r < w[1].r));
        assert!(rep
            .samples
            .windows(2)
            .all(|w| w[0].berry_shift.abs() <= w[1].berry_shift.abs()));
    }

    #[test]
    fn lower_branch_spreads_equally() {
        let mut c = cfg(1e-3);
        c.branch = Branch::Minus;
        let rep = sweep_patch(&c).unwrap();
        assert!(rep.samples.last().unwrap().berry_shift < 0.0);
        assert!((rep.de_berry / 6.25e-8 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gap_channel_reported_separately() {
        let rep = sweep_patch(&cfg(1e-2)).unwrap();
        let l = 1e-2;
        assert!((rep.de_gap / (l * l / 8.0) - 1.0).abs() < 1e-3);
        // l²/(8Rc) over ħ l² H0'/(16 Rc²) = 2 Rc / (ħ H0')
        assert!((rep.gap_to_berry / 2.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ratio_limits() {
        assert!(PatchConfig::linear(0.2, 1.0, 1.0, 1.0).is_err());
        let warned = PatchConfig::linear(0.05, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(warned.warnings().len(), 1);
        assert!(PatchConfig::new(
            1e-3,
            1.0,
            1,
            CollectiveModel::linear(1.0, 1.0).unwrap(),
            0,
            Branch::Plus
        )
        .is_err());
    }

    #[test]
    fn underflow_when_slope_vanishes() {
        let c = PatchConfig::new(
            1e-3,
            1.0,
            11,
            CollectiveModel::quadratic(1.0, 1.0).unwrap(),
            0,
            Branch::Plus,
        )
        .unwrap();
        assert!(matches!(
            sweep_patch(&c),
            Err(Error::PredictionUnderflow(_))
        ));
    }

    #[test]
    fn mead_examples() {
        assert_eq!(mead_bound(1.0, 1e-3, 1.0).unwrap().bound, 1e-3);
        assert!((mead_bound(2.5, 1e-3, 2.0).unwrap().bound - 5e-3).abs() < 1e-18);
        assert!(mead_bound(0.0, 1e-3, 1.0).is_err());
        assert!(mead_bound(1.0, -1e-3, 1.0).is_err());
    }

    #[test]
    fn geometric_over_mead() {
        let cmp = compare_with_mead(&cfg(1e-3), 1.0, 1.0).unwrap();
        assert!((cmp.ratio / 6.25e-5 - 1.0).abs() < 1e-3);
        assert!((cmp.predicted_ratio / 6.25e-5 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_input_checks() {
        let base = cfg(1e-3);
        assert!(scaling_study(&[1e-4, 1e-3], ScalingModel::TwoLevel, &base).is_err());
        assert!(scaling_study(&[1e-3, 2e-3, 5e-3], ScalingModel::TwoLevel, &base).is_err());
        assert!(scaling_study(&[1e-4, 1e-3, 2e-2], ScalingModel::TwoLevel, &base).is_err());
        assert!(scaling_study(&[1e-4, 1e-3, 1e-2], ScalingModel::TwoLevel, &base).is_ok());
    }

    #[test]
    fn quadratic_and_linear_exponents() {
        let ratios = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];
        let base = cfg(1e-3);
        for model in [ScalingModel::TwoLevel, ScalingModel::Su3] {
            let s = scaling_study(&ratios, model, &base).unwrap();
            assert!(
                (1.99..=2.01).contains(&s.fit.slope),
                "{model:?} {}",
                s.fit.slope
            );
        }
        assert!((mead_scaling(&ratios, 1.0, 1.0).unwrap().slope - 1.0).abs() < 1e-12);
    }
}
