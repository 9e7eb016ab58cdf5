//! Deterministic synthetic year for a heating-dominated house at about
//! 40° N: weather, clear-sky-plus-cloud irradiance on the default roof,
//! a temperature-driven heat-pump load and a stochastic rest-of-house load.

use chrono::{DateTime, Datelike, Duration, FixedOffset, TimeZone, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{columns, AlignedSeries};
use crate::analysis::{FieldSample, Supply, DEFAULT_SETPOINT_C};
use crate::pvsolar::{array_power_kw, default_arrays, IrradianceRecord, DEFAULT_DERATE};

const LATITUDE_DEG: f64 = 40.4;
const LONGITUDE_DEG: f64 = -86.9;
const UTC_OFFSET_H: i32 = -5;
/// Heat-pump draw is capped below the 5 kW heat-pump path rating.
const HP_MAX_KW: f64 = 4.4;

fn local_offset() -> FixedOffset {
    FixedOffset::east_opt(UTC_OFFSET_H * 3600).expect("valid offset")
}

fn start_of_year() -> DateTime<FixedOffset> {
    local_offset()
        .with_ymd_and_hms(2024, 1, 1, 0, 0, 0)
        .single()
        .expect("unambiguous")
}

/// Solar zenith and azimuth (degrees, azimuth clockwise from north) at the
/// middle of the hour starting at `ts`.
fn solar_position(ts: DateTime<FixedOffset>) -> (f64, f64) {
    let day = ts.ordinal() as f64;
    let gamma = 2.0 * std::f64::consts::PI * (day - 1.0) / 365.0;
    let decl = 0.006918 - 0.399912 * gamma.cos() + 0.070257 * gamma.sin()
        - 0.006758 * (2.0 * gamma).cos()
        + 0.000907 * (2.0 * gamma).sin();
    let eot_min = 229.18
        * (0.000075 + 0.001868 * gamma.cos()
            - 0.032077 * gamma.sin()
            - 0.014615 * (2.0 * gamma).cos()
            - 0.040849 * (2.0 * gamma).sin());
    let clock_h = ts.hour() as f64 + 0.5;
    let solar_h = clock_h + (eot_min + 4.0 * LONGITUDE_DEG - 60.0 * UTC_OFFSET_H as f64) / 60.0;
    let omega = (15.0 * (solar_h - 12.0)).to_radians();
    let phi = LATITUDE_DEG.to_radians();
    let cos_z = (phi.sin() * decl.sin() + phi.cos() * decl.cos() * omega.cos()).clamp(-1.0, 1.0);
    let zenith = cos_z.acos();
    let az = omega
        .sin()
        .atan2(omega.cos() * phi.sin() - decl.tan() * phi.cos())
        .to_degrees()
        + 180.0;
    (zenith.to_degrees(), az.rem_euclid(360.0))
}

/// Clear-sky irradiance attenuated by a daily cloud fraction in [0, 1].
fn irradiance(zenith_deg: f64, azimuth_deg: f64, cloud: f64) -> IrradianceRecord {
    let cos_z = zenith_deg.to_radians().cos();
    if cos_z <= 0.01 {
        return IrradianceRecord {
            solar_zenith_deg: zenith_deg,
            solar_azimuth_deg: azimuth_deg,
            ..Default::default()
        };
    }
    let air_mass = 1.0 / cos_z;
    let dni_clear = 1353.0 * 0.7f64.powf(air_mass.powf(0.678));
    let dhi_clear = 0.12 * dni_clear * cos_z + 20.0 * cos_z;
    let dni = dni_clear * (1.0 - cloud).powf(1.6);
    let dhi = dhi_clear + 0.35 * cloud * (1.0 - 0.6 * cloud) * dni_clear * cos_z;
    IrradianceRecord {
        ghi_w_m2: dni * cos_z + dhi,
        dni_w_m2: dni,
        dhi_w_m2: dhi,
        solar_zenith_deg: zenith_deg,
        solar_azimuth_deg: azimuth_deg,
    }
}

/// Outdoor temperature model: seasonal and diurnal sinusoids plus a daily
/// AR(1) weather anomaly.
struct Weather {
    anomaly: f64,
    step: Normal<f64>,
}

impl Weather {
    fn new() -> Self {
        Self {
            anomaly: 0.0,
            step: Normal::new(0.0, 3.0).expect("valid sigma"),
        }
    }

    fn next_day(&mut self, rng: &mut ChaCha8Rng) {
        self.anomaly = 0.7 * self.anomaly + self.step.sample(rng);
    }

    fn temperature(&self, day_of_year: f64, hour: f64) -> f64 {
        let seasonal =
            11.0 - 13.5 * (2.0 * std::f64::consts::PI * (day_of_year - 18.0) / 365.0).cos();
        let diurnal = 4.5 * (2.0 * std::f64::consts::PI * (hour - 9.0) / 24.0).sin();
        seasonal + diurnal + self.anomaly
    }
}

/// Heat-pump electrical load (kW) for an outdoor temperature, quadratic in
/// the indoor-outdoor difference for heating, linear for cooling.
fn heat_pump_kw(t_out: f64) -> f64 {
    let heating = (DEFAULT_SETPOINT_C - 4.0 - t_out).max(0.0);
    let cooling = (t_out - 23.0).max(0.0);
    let p = if heating > 0.0 {
        0.25 + 0.10 * heating + 0.0045 * heating * heating
    } else if cooling > 0.0 {
        0.30 + 0.22 * cooling
    } else {
        0.06
    };
    p.min(HP_MAX_KW)
}

/// Rest-of-house load shape (kW) by hour, plus resistance backup heat in
/// very cold weather.
fn house_kw(hour: u32, t_out: f64) -> f64 {
    let shape = match hour {
        0..=5 => 0.45,
        6..=8 => 1.1,
        9..=15 => 0.7,
        16..=21 => 1.5,
        _ => 0.8,
    };
    let backup = if t_out < -4.0 {
        (0.8 * (-4.0 - t_out)).min(6.0)
    } else {
        0.0
    };
    shape + backup
}

/// A synthetic hourly scenario of `days` days starting 2024-01-01 at UTC-5.
///
/// Columns: `pv_dc_kw`, `hp_power_kw`, `house_power_kw`, `t_out_c`. The same
/// seed always yields the same series.
pub fn synth_scenario(seed: u64, days: u32) -> AlignedSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrays = default_arrays();
    let hours = days as usize * 24;
    let start = start_of_year();
    let mut weather = Weather::new();
    let noise: Normal<f64> = Normal::new(0.0, 0.08).expect("valid sigma");

    let mut pv = Vec::with_capacity(hours);
    let mut hp = Vec::with_capacity(hours);
    let mut house = Vec::with_capacity(hours);
    let mut temps = Vec::with_capacity(hours);
    let mut cloud = 0.0;
    for k in 0..hours {
        let ts = start + Duration::hours(k as i64);
        if k % 24 == 0 {
            weather.next_day(&mut rng);
            // Winter skies are cloudier on average.
            let winter = 0.5
                + 0.5 * (2.0 * std::f64::consts::PI * (ts.ordinal() as f64 - 10.0) / 365.0).cos();
            let u: f64 = rng.random();
            cloud = (u.powf(1.3 - 0.6 * winter)).clamp(0.0, 0.97);
        }
        let t_out = weather.temperature(ts.ordinal() as f64, ts.hour() as f64);
        let (zenith, azimuth) = solar_position(ts);
        let rec = irradiance(zenith, azimuth, cloud);
        pv.push(array_power_kw(&rec, &arrays, DEFAULT_DERATE));

        let jitter = (1.0 + noise.sample(&mut rng)).max(0.5_f64);
        hp.push((heat_pump_kw(t_out) * jitter).min(HP_MAX_KW));
        let spike: f64 = if rng.random::<f64>() < 0.06 {
            rng.random_range(0.5..2.5)
        } else {
            0.0
        };
        house
            .push(house_kw(ts.hour(), t_out) * (1.0 + noise.sample(&mut rng)).max(0.3_f64) + spike);
        temps.push(t_out);
    }

    AlignedSeries::new(start, 1.0)
        .with_column(columns::PV_DC_KW, pv)
        .and_then(|s| s.with_column(columns::HP_POWER_KW, hp))
        .and_then(|s| s.with_column(columns::HOUSE_POWER_KW, house))
        .and_then(|s| s.with_column(columns::T_OUT_C, temps))
        .expect("columns share one length")
}

/// Hourly outdoor-unit field samples for an AC campaign followed by a DC
/// campaign of `days` days each, both in early winter.
pub fn synth_field(seed: u64, days: u32) -> Vec<FieldSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f1e1d);
    let noise: Normal<f64> = Normal::new(0.0, 0.12).expect("valid sigma");
    let mut weather = Weather::new();
    let tz = local_offset();
    let ac_start = tz
        .with_ymd_and_hms(2023, 12, 1, 0, 0, 0)
        .single()
        .expect("valid");
    let dc_start = tz
        .with_ymd_and_hms(2024, 12, 18, 0, 0, 0)
        .single()
        .expect("valid");
    let mut out = Vec::with_capacity(2 * days as usize * 24);
    for (supply, start) in [(Supply::Ac, ac_start), (Supply::Dc, dc_start)] {
        for k in 0..days as i64 * 24 {
            let ts = start + Duration::hours(k);
            if k % 24 == 0 {
                weather.next_day(&mut rng);
            }
            let t_out = weather.temperature(ts.ordinal() as f64, ts.hour() as f64);
            let base = heat_pump_kw(t_out) * 0.92;
            out.push(FieldSample {
                timestamp: ts,
                supply,
                power_kw: (base * (1.0 + noise.sample(&mut rng))).max(0.0),
                t_out_c: t_out,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_series() {
        assert_eq!(synth_scenario(42, 30), synth_scenario(42, 30));
        assert_ne!(synth_scenario(42, 30), synth_scenario(43, 30));
        assert_eq!(synth_field(5, 10), synth_field(5, 10));
    }

    #[test]
    fn full_year_has_8760_rows() {
        let s = synth_scenario(1, 365);
        assert_eq!(s.len(), 8760);
        assert_eq!(s.timestep_h, 1.0);
    }

    #[test]
    fn pv_is_dark_at_night() {
        let s = synth_scenario(3, 365);
        let pv = s.column(columns::PV_DC_KW).unwrap();
        for (k, ts) in s.timestamps().enumerate() {
            if ts.hour() <= 3 || ts.hour() >= 22 {
                assert_eq!(pv[k], 0.0, "pv at {ts}");
            }
            assert!((0.0..=14.3 + 1e-9).contains(&pv[k]));
        }
    }

    #[test]
    fn solar_noon_points_south() {
        let ts = local_offset()
            .with_ymd_and_hms(2024, 6, 21, 12, 0, 0)
            .unwrap();
        let (zenith, azimuth) = solar_position(ts);
        // Mid-hour is 12:30 EST, near local solar noon at -86.9°.
        assert!((15.0..25.0).contains(&zenith), "{zenith}");
        assert!((150.0..210.0).contains(&azimuth), "{azimuth}");
    }
}
