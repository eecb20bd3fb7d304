//! Named sweeps for the standard figure axes.
//!
//! Trial counts are desk scale: each preset finishes in under five minutes
//! on a single core with `--method both` (about 135 ns per element and
//! trial). Pass `--trials` for deeper Monte-Carlo tails.
//!
//! | preset | axis | curves | trials |
//! |---|---|---|---|
//! | fig3 | `pt_ris_dbm` -70..-10 | alpha from power | 2e4 |
//! | fig4 | `ris_size` 32..512 | alpha 8.5, optimized | 5e4 |
//! | fig5 | `pt_user_dbm` 0..23 | M=N 128, 512 | 2e4 |
//! | fig6 | `rate_threshold_bps_hz` 0..4 | defaults | 2e4 |
//! | fig7 | `pt_ris_dbm` -70..-10 | eps 0, 1e-3, 1e-2, 1e-1 | 1e4 |
//! | fig8 | `epsilon_sic` 0..0.1 | M=N 128, 512 x alpha 8.5, optimized | 1e4 |

use risnoma_core::config::AlphaMode;

use crate::error::{Result, SimError};
use crate::sweep::{parse_values, SweepSpec};

pub const PRESETS: [&str; 6] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

fn values(s: &str) -> Vec<f64> {
    parse_values(s).expect("preset value lists are well formed")
}

fn series(list: &[&[&str]]) -> Vec<Vec<String>> {
    list.iter()
        .map(|s| s.iter().map(|o| (*o).to_owned()).collect())
        .collect()
}

pub fn preset(name: &str) -> Result<SweepSpec> {
    let spec = match name {
        "fig3" => SweepSpec {
            alpha_mode: Some(AlphaMode::FromPower),
            trials: Some(20_000),
            ..SweepSpec::new(name, "pt_ris_dbm", values("-70:-10:1"))
        },
        "fig4" => SweepSpec {
            series: series(&[
                &["alpha_mode=fixed", "alpha_linear=8.5"],
                &["alpha_mode=optimized"],
            ]),
            trials: Some(50_000),
            ..SweepSpec::new(
                name,
                "ris_size",
                values("32,64,128,192,256,320,384,448,512"),
            )
        },
        "fig5" => SweepSpec {
            series: series(&[&["ris_size=128"], &["ris_size=512"]]),
            trials: Some(20_000),
            ..SweepSpec::new(name, "pt_user_dbm", values("0:23:1"))
        },
        "fig6" => SweepSpec {
            trials: Some(20_000),
            ..SweepSpec::new(name, "rate_threshold_bps_hz", values("0:4:0.25"))
        },
        "fig7" => SweepSpec {
            alpha_mode: Some(AlphaMode::FromPower),
            series: series(&[
                &["epsilon_sic=0"],
                &["epsilon_sic=0.001"],
                &["epsilon_sic=0.01"],
                &["epsilon_sic=0.1"],
            ]),
            trials: Some(10_000),
            ..SweepSpec::new(name, "pt_ris_dbm", values("-70:-10:2"))
        },
        "fig8" => SweepSpec {
            series: series(&[
                &["ris_size=128", "alpha_mode=fixed", "alpha_linear=8.5"],
                &["ris_size=128", "alpha_mode=optimized"],
                &["ris_size=512", "alpha_mode=fixed", "alpha_linear=8.5"],
                &["ris_size=512", "alpha_mode=optimized"],
            ]),
            trials: Some(10_000),
            ..SweepSpec::new(
                name,
                "epsilon_sic",
                values("0,0.001,0.002,0.005,0.01,0.02,0.05,0.1"),
            )
        },
        other => return Err(SimError::UnknownPreset(other.to_owned())),
    };
    Ok(spec)
}
