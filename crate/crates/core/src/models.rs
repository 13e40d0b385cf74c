//! Internal and collective Hamiltonians.
//!
//! The two-level model is `[[Rc, r e^{iφ}], [r e^{-iφ}, -Rc]]`. The three-level
//! model is built from the tracked state
//! `ψ₁ = (cosθ e^{iχ₁}, sinθ cosφ e^{iχ₂}, sinθ sinφ)` and the spectrum
//! `μ₁ = sinθ/√3 + cosθ`, `μ₂ = sinθ/√3 - cosθ`, `μ₃ = -2 sinθ/√3`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Rotationally symmetric two-level system with characteristic scale `Rc`
/// and transverse offset `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelModel {
    rc: f64,
    r: f64,
}

impl TwoLevelModel {
    pub fn new(rc: f64, r: f64) -> Result<Self> {
        Self::new_unchecked_scale(rc, r).and_then(|m| {
            if rc > 0.0 {
                Ok(m)
            } else {
                Err(Error::InvalidModel(format!("Rc must be > 0, got {rc}")))
            }
        })
    }

    /// Like [`TwoLevelModel::new`] but admits `Rc = 0` (the equatorial loop)
    /// and `Rc < 0`. Only finiteness and `r >= 0` are checked.
    pub fn new_unchecked_scale(rc: f64, r: f64) -> Result<Self> {
        if !rc.is_finite() {
            return Err(Error::InvalidModel(format!("Rc must be finite, got {rc}")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "r must be finite and >= 0, got {r}"
            )));
        }
        Ok(Self { rc, r })
    }

    pub fn rc(&self) -> f64 {
        self.rc
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Half the level splitting, `√(Rc² + r²)`.
    pub fn half_gap(&self) -> f64 {
        self.rc.hypot(self.r)
    }

    /// `1 - Rc/√(Rc²+r²)` evaluated without cancellation for small `r`.
    pub fn one_minus_cos_polar(&self) -> f64 {
        let h = self.half_gap();
        if self.rc >= 0.0 {
            self.r * self.r / (h * (h + self.rc))
        } else {
            1.0 - self.rc / h
        }
    }
}

pub fn two_level_hamiltonian(model: &TwoLevelModel, phi: f64) -> ComplexMatrix {
    let off = Complex64::from_polar(model.r, phi);
    ComplexMatrix::from_rows2([
        [Complex64::new(model.rc, 0.0), off],
        [off.conj(), Complex64::new(-model.rc, 0.0)],
    ])
}

/// Parameters of the SU(3) three-level model. Angles are kept as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelModel {
    pub theta: f64,
    pub phi: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl ThreeLevelModel {
    pub fn new(theta: f64, phi: f64, chi1: f64, chi2: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidModel(format!(
                "theta must lie in [0, π/2], got {theta}"
            )));
        }
        if ![phi, chi1, chi2].iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidModel("angles must be finite".into()));
        }
        Ok(Self {
            theta,
            phi,
            chi1,
            chi2,
        })
    }
}

pub fn three_level_state(model: &ThreeLevelModel) -> [Complex64; 3] {
    let (st, ct) = model.theta.sin_cos();
    let (sp, cp) = model.phi.sin_cos();
    [
        Complex64::from_polar(ct, model.chi1),
        Complex64::from_polar(st * cp, model.chi2),
        Complex64::new(st * sp, 0.0),
    ]
}

/// `(μ₁, μ₂, μ₃)`; `μ₁` belongs to the tracked state `ψ₁`.
pub fn three_level_spectrum(model: &ThreeLevelModel) -> [f64; 3] {
    let (st, ct) = model.theta.sin_cos();
    let s = st / 3f64.sqrt();
    [s + ct, s - ct, -2.0 * s]
}

/// Orthonormal frame `(ψ₁, ψ₂, ψ₃)` with `ψ₁` the tracked state and the
/// rest obtained by Gram–Schmidt against `e₁, e₂, e₃` in that order.
pub fn three_level_frame(model: &ThreeLevelModel) -> Result<[[Complex64; 3]; 3]> {
    let mut frame = [[ZERO; 3]; 3];
    frame[0] = three_level_state(model);
    let mut filled = 1;
    for axis in 0..3 {
        if filled == 3 {
            break;
        }
        let mut w = [ZERO; 3];
        w[axis] = Complex64::new(1.0, 0.0);
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for f in &frame[..filled] {
                let proj: Complex64 = f.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, fi) in w.iter_mut().zip(f) {
                    *wi -= proj * fi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        frame[filled] = w;
        filled += 1;
    }
    if filled < 3 {
        return Err(Error::FrameDegeneracy);
    }
    Ok(frame)
}

/// `Σ_k μ_k |ψ_k⟩⟨ψ_k|` over the Gram–Schmidt frame.
pub fn three_level_hamiltonian(model: &ThreeLevelModel) -> Result<ComplexMatrix> {
    let frame = three_level_frame(model)?;
    let mu = three_level_spectrum(model);
    let mut rows = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v: Complex64 = (0..3)
                .map(|k| frame[k][i] * frame[k][j].conj() * mu[k])
                .sum();
            if i == j {
                rows[i][i] = Complex64::new(v.re, 0.0);
            } else {
                rows[i][j] = v;
                rows[j][i] = v.conj();
            }
        }
    }
    Ok(ComplexMatrix::from_rows3(rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectiveKind {
    /// `H0 = ω P`
    Linear,
    /// `H0 = P² / 2I`
    Quadratic,
}

/// Collective Hamiltonian `H0(P)` together with the ħ used for quantization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveModel {
    kind: CollectiveKind,
    parameter: f64,
    hbar: f64,
}

impl CollectiveModel {
    pub fn new(kind: CollectiveKind, parameter: f64, hbar: f64) -> Result<Self> {
        if !(parameter > 0.0 && parameter.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "collective parameter must be finite and > 0, got {parameter}"
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "hbar must be finite and > 0, got {hbar}"
            )));
        }
        Ok(Self {
            kind,
            parameter,
            hbar,
        })
    }

    pub fn linear(omega: f64, hbar: f64) -> Result<Self> {
        Self::new(CollectiveKind::Linear, omega, hbar)
    }

    pub fn quadratic(inertia: f64, hbar: f64) -> Result<Self> {
        Self::new(CollectiveKind::Quadratic, inertia, hbar)
    }

    pub fn kind(&self) -> CollectiveKind {
        self.kind
    }

    /// `ω` for the linear kind, `I` for the quadratic kind.
    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(self.kind, self.parameter, hbar)
    }

    /// `H0(p + dp) - H0(p)` without cancellation when `dp` is tiny.
    pub fn energy_difference(&self, p: f64, dp: f64) -> f64 {
        match self.kind {
            CollectiveKind::Linear => self.parameter * dp,
            CollectiveKind::Quadratic => dp * (2.0 * p + dp) / (2.0 * self.parameter),
        }
    }
}

pub fn collective_energy(model: &CollectiveModel, p: f64) -> f64 {
    match model.kind {
        CollectiveKind::Linear => model.parameter * p,
        CollectiveKind::Quadratic => p * p / (2.0 * model.parameter),
    }
}

pub fn collective_derivative(model: &CollectiveModel, p: f64) -> f64 {
    match model.kind {
        CollectiveKind::Linear => model.parameter,
        CollectiveKind::Quadratic => p / model.parameter,
    }
}
