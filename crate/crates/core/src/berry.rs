//! Geometric phases: closed forms and the discrete overlap-product engine.
//!
//! The numerical phase of a closed chain of states `v_0, …, v_{K-1}, v_K = v_0`
//! is `-arg Π_k ⟨v_k, v_{k+1}⟩`. Each state appears once as a bra and once as a
//! ket, so any per-point phase choice cancels from the product.
//!
//! Orientation: a two-level loop with winding `+1` carries the transverse
//! field `(r cos φ, -r sin φ)` once counter-clockwise, i.e. `φ(t) = -2π t`.
//! In that sense the upper level picks up `-π(1 - Rc/√(Rc²+r²))`. SU(3) loops
//! advance `χ₁, χ₂` by `+2π n₁, +2π n₂`, giving `-∮(cos²θ dχ₁ + sin²θ cos²φ dχ₂)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{
    three_level_hamiltonian, three_level_state, two_level_hamiltonian, ThreeLevelModel,
    TwoLevelModel,
};
use crate::numerics::{eig_hermitian, integrate_closed, ComplexMatrix};

pub const MIN_LOOP_POINTS: usize = 16;
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
pub const DEFAULT_PHASE_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reduce an angle to `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Upper (`Plus`) or lower (`Minus`) level of the two-level model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    /// Index into the ascending eigenvalue list.
    pub fn level(self) -> usize {
        match self {
            Branch::Plus => 1,
            Branch::Minus => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" | "upper" => Ok(Branch::Plus),
            "minus" | "-" | "lower" => Ok(Branch::Minus),
            other => Err(Error::BadInput(format!("unknown branch {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoopKind {
    /// `φ` winds `winding` times with `Rc`, `r` fixed.
    TwoLevelPhiWinding { model: TwoLevelModel, winding: i32 },
    /// `χ₁`, `χ₂` wind `(n₁, n₂)` times. `θ` and `φ` may oscillate as
    /// `θ₀ + a_θ sin 2πt`, `φ₀ + a_φ sin 2πt`; both amplitudes are zero for
    /// the fixed-shape loops that have a closed form.
    Su3ChiWinding {
        model: ThreeLevelModel,
        windings: (i32, i32),
        theta_wobble: f64,
        phi_wobble: f64,
    },
}

/// A closed curve in model parameter space sampled at `points` equally spaced
/// values of `t ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterLoop {
    kind: LoopKind,
    points: usize,
}

impl ParameterLoop {
    pub fn two_level(model: TwoLevelModel, winding: i32, points: usize) -> Result<Self> {
        Self::new(LoopKind::TwoLevelPhiWinding { model, winding }, points)
    }

    pub fn su3(model: ThreeLevelModel, n1: i32, n2: i32, points: usize) -> Result<Self> {
        Self::new(
            LoopKind::Su3ChiWinding {
                model,
                windings: (n1, n2),
                theta_wobble: 0.0,
                phi_wobble: 0.0,
            },
            points,
        )
    }

    pub fn new(kind: LoopKind, points: usize) -> Result<Self> {
        if points < MIN_LOOP_POINTS {
            return Err(Error::BadInput(format!(
                "loop needs K >= {MIN_LOOP_POINTS} points, got {points}"
            )));
        }
        if let LoopKind::Su3ChiWinding {
            model,
            theta_wobble,
            phi_wobble,
            ..
        } = kind
        {
            if !(theta_wobble.is_finite() && phi_wobble.is_finite()) {
                return Err(Error::BadInput("wobble amplitudes must be finite".into()));
            }
            let lo = model.theta - theta_wobble.abs();
            let hi = model.theta + theta_wobble.abs();
            if lo < 0.0 || hi > FRAC_PI_2 {
                return Err(Error::BadInput(format!(
                    "theta range [{lo}, {hi}] leaves [0, π/2]"
                )));
            }
        }
        Ok(Self { kind, points })
    }

    /// Add sinusoidal oscillation of `θ` and `φ` to an SU(3) loop.
    pub fn with_wobble(self, theta_amp: f64, phi_amp: f64) -> Result<Self> {
        match self.kind {
            LoopKind::Su3ChiWinding {
                model, windings, ..
            } => Self::new(
                LoopKind::Su3ChiWinding {
                    model,
                    windings,
                    theta_wobble: theta_amp,
                    phi_wobble: phi_amp,
                },
                self.points,
            ),
            LoopKind::TwoLevelPhiWinding { .. } => Err(Error::UnsupportedLoop),
        }
    }

    pub fn with_points(self, points: usize) -> Result<Self> {
        Self::new(self.kind, points)
    }

    /// The same curve traversed backwards.
    pub fn reversed(self) -> Self {
        let kind = match self.kind {
            LoopKind::TwoLevelPhiWinding { model, winding } => LoopKind::TwoLevelPhiWinding {
                model,
                winding: -winding,
            },
            LoopKind::Su3ChiWinding {
                model,
                windings: (n1, n2),
                theta_wobble,
                phi_wobble,
            } => LoopKind::Su3ChiWinding {
                model,
                windings: (-n1, -n2),
                theta_wobble: -theta_wobble,
                phi_wobble: -phi_wobble,
            },
        };
        Self { kind, ..self }
    }

    pub fn kind(&self) -> &LoopKind {
        &self.kind
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            LoopKind::TwoLevelPhiWinding { .. } => 2,
            LoopKind::Su3ChiWinding { .. } => 3,
        }
    }

    /// `true` for two-level loops and for SU(3) loops with `θ`, `φ` held fixed.
    pub fn is_fixed_shape(&self) -> bool {
        match self.kind {
            LoopKind::TwoLevelPhiWinding { .. } => true,
            LoopKind::Su3ChiWinding {
                theta_wobble,
                phi_wobble,
                ..
            } => theta_wobble == 0.0 && phi_wobble == 0.0,
        }
    }

    /// SU(3) parameters at `t`; `None` for two-level loops.
    pub fn su3_model_at(&self, t: f64) -> Option<ThreeLevelModel> {
        match self.kind {
            LoopKind::Su3ChiWinding {
                model,
                windings: (n1, n2),
                theta_wobble,
                phi_wobble,
            } => {
                let s = (TAU * t).sin();
                Some(ThreeLevelModel {
                    theta: (model.theta + theta_wobble * s).clamp(0.0, FRAC_PI_2),
                    phi: model.phi + phi_wobble * s,
                    chi1: model.chi1 + TAU * n1 as f64 * t,
                    chi2: model.chi2 + TAU * n2 as f64 * t,
                })
            }
            LoopKind::TwoLevelPhiWinding { .. } => None,
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<ComplexMatrix> {
        match self.kind {
            LoopKind::TwoLevelPhiWinding { model, winding } => {
                Ok(two_level_hamiltonian(&model, -TAU * winding as f64 * t))
            }
            LoopKind::Su3ChiWinding { .. } => {
                three_level_hamiltonian(&self.su3_model_at(t).expect("su3 loop"))
            }
        }
    }
}

/// `Γ_± = ∓π(1 - Rc/√(Rc²+r²))` for one positive winding.
pub fn analytic_two_level_phase(model: &TwoLevelModel, branch: Branch) -> Result<f64> {
    if model.rc() == 0.0 && model.r() == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    Ok(-branch.sign() * PI * model.one_minus_cos_polar())
}

/// `-2π(n₁ cos²θ + n₂ sin²θ cos²φ)` for a fixed-shape SU(3) loop.
pub fn analytic_su3_phase(lp: &ParameterLoop) -> Result<f64> {
    match lp.kind {
        LoopKind::Su3ChiWinding {
            model,
            windings: (n1, n2),
            ..
        } if lp.is_fixed_shape() => Ok(su3_one_form_phase(&model, n1 as f64, n2 as f64)),
        _ => Err(Error::UnsupportedLoop),
    }
}

fn su3_one_form_phase(model: &ThreeLevelModel, n1: f64, n2: f64) -> f64 {
    let (st, ct) = model.theta.sin_cos();
    let cp = model.phi.cos();
    -TAU * (n1 * ct * ct + n2 * st * st * cp * cp)
}

/// Midpoint quadrature of `-∮(cos²θ dχ₁ + sin²θ cos²φ dχ₂)` along an SU(3) loop.
pub fn connection_integral_su3(lp: &ParameterLoop, n: usize) -> Result<f64> {
    let (n1, n2) = match lp.kind {
        LoopKind::Su3ChiWinding {
            windings: (n1, n2), ..
        } => (n1 as f64, n2 as f64),
        LoopKind::TwoLevelPhiWinding { .. } => return Err(Error::UnsupportedLoop),
    };
    integrate_closed(
        |t| {
            let m = lp.su3_model_at(t).expect("su3 loop");
            su3_one_form_phase(&m, n1, n2)
        },
        n,
    )
}

/// Phase of a closed chain of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPhase {
    /// `-arg Π⟨v_k, v_{k+1}⟩` in `(-π, π]`.
    pub wrapped: f64,
    /// `-Σ arg⟨v_k, v_{k+1}⟩`; equals the continuous phase when the chain is
    /// smooth (per-step arguments well below π).
    pub unwrapped: f64,
}

/// Overlap-product phase of the closed chain `states[0], …, states[K-1], states[0]`.
pub fn overlap_phase<S: AsRef<[Complex64]>>(states: &[S]) -> Result<LoopPhase> {
    if states.len() < 2 {
        return Err(Error::BadInput("need at least two states".into()));
    }
    let mut product = Complex64::new(1.0, 0.0);
    let mut arg_sum = 0.0;
    for (k, a) in states.iter().enumerate() {
        let b = &states[(k + 1) % states.len()];
        let o: Complex64 = a
            .as_ref()
            .iter()
            .zip(b.as_ref())
            .map(|(x, y)| x.conj() * y)
            .sum();
        if o.norm() == 0.0 {
            return Err(Error::BadInput(format!(
                "orthogonal neighbours at index {k}"
            )));
        }
        arg_sum += o.arg();
        product *= o;
        let mag = product.norm();
        if !(1e-100..=1e100).contains(&mag) {
            product /= mag;
        }
    }
    Ok(LoopPhase {
        wrapped: wrap_phase(-product.arg()),
        unwrapped: -arg_sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracking {
    /// SU(3) top level follows `ψ₁` directly; everything else diagonalizes.
    Auto,
    /// Always diagonalize and check the gap.
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonOptions {
    pub gap_tol: f64,
    pub phase_tol: f64,
    pub tracking: Tracking,
}

impl Default for WilsonOptions {
    fn default() -> Self {
        Self {
            gap_tol: DEFAULT_GAP_TOL,
            phase_tol: DEFAULT_PHASE_TOL,
            tracking: Tracking::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryPhaseResult {
    /// Ascending-eigenvalue index of the transported level.
    pub level: usize,
    /// Closed form (unwrapped), when one applies.
    pub analytic: Option<f64>,
    /// Overlap-product phase at the loop's `K`, in `(-π, π]`.
    pub numerical: f64,
    /// Accumulated per-step phase at `K`.
    pub unwrapped: f64,
    /// `|wrap(numerical - analytic)|`.
    pub discrepancy: Option<f64>,
    pub points: usize,
    /// Wrapped phase at `2K`, used for the resolution check.
    pub refined: f64,
}

/// Transported states at `t_k = k/points`, zero-padded to length 3.
pub fn loop_states(
    lp: &ParameterLoop,
    level: usize,
    points: usize,
    opts: &WilsonOptions,
) -> Result<Vec<[Complex64; 3]>> {
    if level >= lp.dim() {
        return Err(Error::BadInput(format!(
            "level {level} out of range for a {}-level loop",
            lp.dim()
        )));
    }
    let tracked = matches!(lp.kind, LoopKind::Su3ChiWinding { .. })
        && level == 2
        && opts.tracking == Tracking::Auto;
    (0..points)
        .map(|k| {
            let t = k as f64 / points as f64;
            if tracked {
                return Ok(three_level_state(&lp.su3_model_at(t).expect("su3 loop")));
            }
            let es = eig_hermitian(&lp.hamiltonian_at(t)?)?;
            let values = es.values();
            let mut gap = f64::INFINITY;
            if level > 0 {
                gap = gap.min(values[level] - values[level - 1]);
            }
            if level + 1 < values.len() {
                gap = gap.min(values[level + 1] - values[level]);
            }
            if gap < opts.gap_tol {
                return Err(Error::GapCollapse {
                    t,
                    gap,
                    gap_tol: opts.gap_tol,
                });
            }
            let mut s = [ZERO; 3];
            s[..es.dim()].copy_from_slice(es.vector(level));
            Ok(s)
        })
        .collect()
}

/// Geometric phase of `level` around `lp` by the overlap product.
///
/// States are computed at `2K` points; the even ones give the reported phase
/// and the full set the resolution check.
pub fn wilson_loop_phase(
    lp: &ParameterLoop,
    level: usize,
    opts: &WilsonOptions,
) -> Result<BerryPhaseResult> {
    let fine = loop_states(lp, level, 2 * lp.points, opts)?;
    let coarse: Vec<[Complex64; 3]> = fine.iter().step_by(2).copied().collect();
    let at_k = overlap_phase(&coarse)?;
    let at_2k = overlap_phase(&fine)?;

    let change = wrap_phase(at_2k.wrapped - at_k.wrapped).abs();
    if change > opts.phase_tol {
        return Err(Error::InsufficientResolution {
            points: lp.points,
            change,
            phase_tol: opts.phase_tol,
        });
    }

    let analytic = match lp.kind {
        LoopKind::TwoLevelPhiWinding { model, winding } => {
            let branch = if level == 1 {
                Branch::Plus
            } else {
                Branch::Minus
            };
            Some(winding as f64 * analytic_two_level_phase(&model, branch)?)
        }
        LoopKind::Su3ChiWinding { .. } if level == 2 => analytic_su3_phase(lp).ok(),
        LoopKind::Su3ChiWinding { .. } => None,
    };
    Ok(BerryPhaseResult {
        level,
        analytic,
        numerical: at_k.wrapped,
        unwrapped: at_k.unwrapped,
        discrepancy: analytic.map(|a| wrap_phase(at_k.wrapped - a).abs()),
        points: lp.points,
        refined: at_2k.wrapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn two(rc: f64, r: f64) -> TwoLevelModel {
        TwoLevelModel::new_unchecked_scale(rc, r).unwrap()
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_phase(-PI), PI);
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-5.0 * PI / 4.0) - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!(wrap_phase(TAU).abs() < 1e-15);
    }

    #[test]
    fn analytic_two_level_examples() {
        for b in [Branch::Plus, Branch::Minus] {
            assert_eq!(analytic_two_level_phase(&two(2.0, 0.0), b).unwrap(), 0.0);
        }
        assert_eq!(
            analytic_two_level_phase(&two(0.0, 1.0), Branch::Plus).unwrap(),
            -PI
        );
        assert_eq!(
            analytic_two_level_phase(&two(0.0, 1.0), Branch::Minus).unwrap(),
            PI
        );
        let g = analytic_two_level_phase(&two(1.0, 1.0), Branch::Plus).unwrap();
        assert!((g + PI * (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
        assert!((g + 0.920_151_18).abs() < 1e-8);
        assert_eq!(
            analytic_two_level_phase(&two(0.0, 0.0), Branch::Plus),
            Err(Error::DegeneratePoint)
        );
    }

    #[test]
    fn analytic_su3_examples() {
        let lp = |theta, phi, n1, n2| {
            ParameterLoop::su3(
                ThreeLevelModel::new(theta, phi, 0.0, 0.0).unwrap(),
                n1,
                n2,
                64,
            )
            .unwrap()
        };
        assert!((analytic_su3_phase(&lp(0.0, 0.0, 1, 0)).unwrap() + TAU).abs() < 1e-15);
        assert!(analytic_su3_phase(&lp(FRAC_PI_2, 0.0, 1, 0)).unwrap().abs() < 1e-15);
        let v = analytic_su3_phase(&lp(FRAC_PI_3, FRAC_PI_4, 1, 1)).unwrap();
        assert!((v + 5.0 * PI / 4.0).abs() < 1e-14);
        let wobbly = lp(0.5, 0.2, 1, 0).with_wobble(0.1, 0.0).unwrap();
        assert_eq!(analytic_su3_phase(&wobbly), Err(Error::UnsupportedLoop));
        let tl = ParameterLoop::two_level(two(1.0, 1.0), 1, 64).unwrap();
        assert_eq!(analytic_su3_phase(&tl), Err(Error::UnsupportedLoop));
    }

    #[test]
    fn connection_integral_examples() {
        let lp = |theta, phi, n1, n2| {
            ParameterLoop::su3(
                ThreeLevelModel::new(theta, phi, 0.3, -0.2).unwrap(),
                n1,
                n2,
                64,
            )
            .unwrap()
        };
        assert!((connection_integral_su3(&lp(0.0, 0.0, 1, 0), 256).unwrap() + TAU).abs() < 1e-12);
        assert!(
            (connection_integral_su3(&lp(FRAC_PI_2, 0.0, 0, 1), 256).unwrap() + TAU).abs() < 1e-12
        );
        let v = connection_integral_su3(&lp(FRAC_PI_3, FRAC_PI_4, 1, 1), 256).unwrap();
        assert!((v + 5.0 * PI / 4.0).abs() < 1e-12);
        assert_eq!(
            connection_integral_su3(&lp(0.1, 0.0, 1, 0), 4),
            Err(Error::InvalidPanelCount(4))
        );
    }

    #[test]
    fn flat_loop_has_zero_phase() {
        let lp = ParameterLoop::two_level(two(1.0, 0.0), 1, 64).unwrap();
        let res = wilson_loop_phase(&lp, 1, &WilsonOptions::default()).unwrap();
        assert!(res.numerical.abs() < 1e-12);
        assert!(res.discrepancy.unwrap() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(ParameterLoop::two_level(two(1.0, 1.0), 1, 4).is_err());
    }

    #[test]
    fn degenerate_loop_collapses_gap() {
        let lp = ParameterLoop::two_level(two(0.0, 0.0), 1, 64).unwrap();
        assert!(matches!(
            wilson_loop_phase(&lp, 1, &WilsonOptions::default()),
            Err(Error::GapCollapse { .. })
        ));
    }

    #[test]
    fn coarse_loop_is_insufficiently_resolved() {
        let lp = ParameterLoop::two_level(two(1.0, 1.0), 1, 16).unwrap();
        assert!(matches!(
            wilson_loop_phase(&lp, 1, &WilsonOptions::default()),
            Err(Error::InsufficientResolution { .. })
        ));
    }

    #[test]
    fn near_degenerate_su3_tracked_state_still_works() {
        let m = ThreeLevelModel::new(FRAC_PI_2 - 1e-10, 0.3, 0.0, 0.0).unwrap();
        let lp = ParameterLoop::su3(m, 1, 0, 4096).unwrap();
        let res = wilson_loop_phase(&lp, 2, &WilsonOptions::default()).unwrap();
        assert!(res.discrepancy.unwrap() < 1e-12);
        let eigen = WilsonOptions {
            tracking: Tracking::Eigen,
            ..Default::default()
        };
        assert!(matches!(
            wilson_loop_phase(&lp, 2, &eigen),
            Err(Error::GapCollapse { .. })
        ));
    }

    #[test]
    fn eigen_tracking_of_top_su3_level_agrees_with_tracked_state() {
        let m = ThreeLevelModel::new(0.6, 0.9, 0.1, 0.4).unwrap();
        let lp = ParameterLoop::su3(m, 1, -1, 8192).unwrap();
        let a = wilson_loop_phase(&lp, 2, &WilsonOptions::default()).unwrap();
        let eigen = WilsonOptions {
            tracking: Tracking::Eigen,
            ..Default::default()
        };
        let b = wilson_loop_phase(&lp, 2, &eigen).unwrap();
        assert!(wrap_phase(a.numerical - b.numerical).abs() < 1e-12);
    }

    #[test]
    fn level_out_of_range() {
        let lp = ParameterLoop::two_level(two(1.0, 1.0), 1, 64).unwrap();
        assert!(matches!(
            wilson_loop_phase(&lp, 2, &WilsonOptions::default()),
            Err(Error::BadInput(_))
        ));
    }

    #[test]
    fn branch_parsing() {
        assert_eq!("plus".parse::<Branch>().unwrap(), Branch::Plus);
        assert_eq!("minus".parse::<Branch>().unwrap(), Branch::Minus);
        assert!("up".parse::<Branch>().is_err());
    }
}
