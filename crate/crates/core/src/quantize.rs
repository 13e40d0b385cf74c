//! Semiclassical levels from the Berry-corrected quantization rule
//! `P = (m - Γ/2π) ħ`, together with the spectrum expanded to first order in
//! ħ about `P = mħ`.

use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use crate::berry::{analytic_two_level_phase, Branch};
use crate::error::{Error, Result};
use crate::models::{collective_derivative, collective_energy, CollectiveModel, TwoLevelModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedLevel {
    pub m: i64,
    pub branch: Branch,
    /// Berry phase that shifts the quantized momentum.
    pub gamma: f64,
    /// `(m - gamma/2π) ħ`
    pub p_quantized: f64,
    /// `H0(p_quantized) ± √(Rc² + r²)`
    pub energy_exact: f64,
    /// `H0(mħ) ± √ ± (ħ/2) H0'(mħ) ∓ (ħ/2)(Rc/√) H0'(mħ)`
    pub energy_first_order: f64,
}

impl QuantizedLevel {
    pub fn truncation_residual(&self) -> f64 {
        (self.energy_exact - self.energy_first_order).abs()
    }
}

pub fn quantize_level(
    collective: &CollectiveModel,
    internal: &TwoLevelModel,
    m: i64,
    branch: Branch,
) -> Result<QuantizedLevel> {
    let hbar = collective.hbar();
    let gamma = analytic_two_level_phase(internal, branch)?;
    let p_quantized = (m as f64 - gamma / TAU) * hbar;
    let sign = branch.sign();
    let half_gap = internal.half_gap();
    let energy_exact = collective_energy(collective, p_quantized) + sign * half_gap;

    let p0 = m as f64 * hbar;
    let slope = collective_derivative(collective, p0);
    let cos_polar = internal.rc() / half_gap;
    let energy_first_order =
        collective_energy(collective, p0) + sign * half_gap + sign * 0.5 * hbar * slope
            - sign * 0.5 * hbar * cos_polar * slope;

    Ok(QuantizedLevel {
        m,
        branch,
        gamma,
        p_quantized,
        energy_exact,
        energy_first_order,
    })
}

/// Both branches for every `m` in `m_range`, sorted by exact energy (ties by
/// `m`, then lower branch first).
pub fn spectrum(
    collective: &CollectiveModel,
    internal: &TwoLevelModel,
    m_range: RangeInclusive<i64>,
) -> Result<Vec<QuantizedLevel>> {
    if m_range.is_empty() {
        return Err(Error::BadInput("empty m range".into()));
    }
    let mut levels = m_range
        .flat_map(|m| [Branch::Minus, Branch::Plus].map(|b| (m, b)))
        .map(|(m, b)| quantize_level(collective, internal, m, b))
        .collect::<Result<Vec<_>>>()?;
    levels.sort_by(|a, b| {
        a.energy_exact
            .total_cmp(&b.energy_exact)
            .then(a.m.cmp(&b.m))
            .then(a.branch.cmp(&b.branch))
    });
    Ok(levels)
}
