//! First-order battery model.
//!
//! The stored chemical energy `x` (kWh) follows `dx/dt = -x/τ + u` with
//! chemical charging power `u` (kW) held constant over each step. The bus
//! sees the electrical power `b = max(η·u, u/η)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values within this distance of the `[0, x̄]` bounds are clamped silently.
pub const SOC_TOLERANCE_KWH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryParams {
    /// Energy capacity x̄ (kWh).
    pub energy_capacity_kwh: f64,
    /// Symmetric limit b̄ on electrical power (kW).
    pub power_capacity_kw: f64,
    /// Self-dissipation time constant τ (h).
    pub dissipation_time_constant_h: f64,
    /// Charge and discharge efficiency η.
    pub efficiency: f64,
    /// Step length Δt (h).
    pub timestep_h: f64,
}

impl Default for BatteryParams {
    fn default() -> Self {
        Self {
            energy_capacity_kwh: 20.0,
            power_capacity_kw: 12.5,
            dissipation_time_constant_h: 1600.0,
            efficiency: 0.95,
            timestep_h: 1.0,
        }
    }
}

impl BatteryParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("energy_capacity_kwh", self.energy_capacity_kwh),
            ("power_capacity_kw", self.power_capacity_kw),
            (
                "dissipation_time_constant_h",
                self.dissipation_time_constant_h,
            ),
            ("efficiency", self.efficiency),
            ("timestep_h", self.timestep_h),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "battery {name} must be positive, got {v}"
                )));
            }
        }
        if self.efficiency > 1.0 {
            return Err(Error::invalid(format!(
                "battery efficiency must be <= 1, got {}",
                self.efficiency
            )));
        }
        let a = self.decay();
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid(format!(
                "decay factor exp(-dt/tau) = {a} outside (0, 1)"
            )));
        }
        Ok(())
    }

    /// `a = exp(-Δt/τ)`.
    pub fn decay(&self) -> f64 {
        (-self.timestep_h / self.dissipation_time_constant_h).exp()
    }

    /// `(1 - a)·τ`, the gain on `u` in the discrete update. Computed with
    /// `exp_m1` so that it stays accurate when Δt ≪ τ.
    pub fn input_gain(&self) -> f64 {
        -(-self.timestep_h / self.dissipation_time_constant_h).exp_m1()
            * self.dissipation_time_constant_h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BatteryState {
    pub stored_energy_kwh: f64,
}

impl BatteryState {
    pub fn new(stored_energy_kwh: f64) -> Self {
        Self { stored_energy_kwh }
    }

    /// Stored energy relative to capacity.
    pub fn soc(&self, params: &BatteryParams) -> f64 {
        self.stored_energy_kwh / params.energy_capacity_kwh
    }
}

/// Exact one-step solution of the battery ODE under constant `u`.
pub fn step(state: BatteryState, u_kw: f64, params: &BatteryParams) -> Result<BatteryState> {
    let x = state.stored_energy_kwh;
    if !x.is_finite() || !u_kw.is_finite() {
        return Err(Error::invalid(format!(
            "non-finite battery input (x = {x}, u = {u_kw})"
        )));
    }
    let next = params.decay() * x + params.input_gain() * u_kw;
    let cap = params.energy_capacity_kwh;
    if next < -SOC_TOLERANCE_KWH || next > cap + SOC_TOLERANCE_KWH {
        return Err(Error::ContractViolation {
            value: next,
            capacity: cap,
        });
    }
    Ok(BatteryState::new(next.clamp(0.0, cap)))
}

/// Electrical power drawn from the bus for a chemical charging power `u`.
pub fn electrical_power(u_kw: f64, params: &BatteryParams) -> f64 {
    let eta = params.efficiency;
    (eta * u_kw).max(u_kw / eta)
}

/// Inverse of [`electrical_power`].
pub fn chemical_power(b_kw: f64, params: &BatteryParams) -> f64 {
    let eta = params.efficiency;
    if b_kw > 0.0 {
        b_kw * eta
    } else {
        b_kw / eta
    }
}

/// Chemical power interval `[u_min, u_max]` that keeps the next state inside
/// `[0, x̄]` and the electrical power inside `[-b̄, b̄]`.
pub fn chemical_power_bounds(state: BatteryState, params: &BatteryParams) -> (f64, f64) {
    let (discharge_headroom, charge_headroom) = energy_headroom(state, params);
    let eta = params.efficiency;
    let b_max = params.power_capacity_kw;
    let u_max = (eta * b_max).min(charge_headroom);
    let u_min = (-b_max / eta).max(discharge_headroom);
    // Guard the degenerate case where rounding leaves the interval inverted.
    (u_min.min(0.0), u_max.max(0.0))
}

/// Energy-only headroom `(-a·x/((1-a)τ), (x̄ - a·x)/((1-a)τ))`, before any power cap.
pub fn energy_headroom(state: BatteryState, params: &BatteryParams) -> (f64, f64) {
    let a = params.decay();
    let gain = params.input_gain();
    let ax = a * state.stored_energy_kwh;
    (-ax / gain, (params.energy_capacity_kwh - ax) / gain)
}
