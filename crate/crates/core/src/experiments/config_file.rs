//! Flat `key = value` configuration files.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Link
//! parameters use dotted keys `link.<id>.<field>` with `<id>` one of
//! `f, g, t, d, u_i, u_o` and `<field>` one of `m, omega, distance, alpha`.
//! Keys not present keep their reference-configuration value.

use std::collections::HashSet;
use std::path::Path;

use crate::config::{threshold_from_rate, LinkId, SystemConfig};
use crate::error::{Error, Result};

/// Bundled reference preset with the raw power pair (0.15, 0.75).
pub const REFERENCE_PRESET: &str = include_str!("../../presets/reference.preset");
/// Same parameters with the power pair rescaled to (1/6, 5/6).
pub const REFERENCE_NORMALIZED_PRESET: &str =
    include_str!("../../presets/reference_normalized.preset");

/// Named bundled presets.
pub const PRESETS: [(&str, &str); 2] = [
    ("reference", REFERENCE_PRESET),
    ("reference_normalized", REFERENCE_NORMALIZED_PRESET),
];

/// Text of a bundled preset by name.
pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}

/// Parses configuration text; `origin` names the source in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<SystemConfig> {
    let mut cfg = SystemConfig::reference();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: line_no,
            message,
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(format!("expected `key = value`, found `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("missing value for `{key}`")));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        apply(&mut cfg, key, value).map_err(err)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Sets one key on `cfg`. Shared with command-line overrides.
pub fn apply(cfg: &mut SystemConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    let real = || -> std::result::Result<f64, String> {
        value
            .parse::<f64>()
            .map_err(|_| format!("`{key}`: `{value}` is not a number"))
    };
    match key {
        "n_total" => {
            cfg.n_total = value
                .parse()
                .map_err(|_| format!("`{key}`: `{value}` is not a non-negative integer"))?
        }
        "eta" | "split_factor" => cfg.split_factor = real()?,
        "xi" => cfg.xi = real()?,
        "lambda_i" => cfg.lambda_i = real()?,
        "lambda_o" => cfg.lambda_o = real()?,
        "rho_db" => cfg.rho_db = real()?,
        "gamma_th_i" => cfg.gamma_th_i = real()?,
        "gamma_th_o" => cfg.gamma_th_o = real()?,
        "gamma_th" => cfg.set_thresholds(real()?),
        "target_rate_i" => cfg.gamma_th_i = threshold_from_rate(real()?),
        "target_rate_o" => cfg.gamma_th_o = threshold_from_rate(real()?),
        "d0" => cfg.d0 = real()?,
        "scenario" => cfg.scenario = value.parse().map_err(|e| format!("`{key}`: {e}"))?,
        "phase_design" => cfg.phase_design = value.parse().map_err(|e| format!("`{key}`: {e}"))?,
        "star_alignment" => {
            cfg.star_alignment = value.parse().map_err(|e| format!("`{key}`: {e}"))?
        }
        _ => {
            let Some(rest) = key.strip_prefix("link.") else {
                return Err(format!("unknown key `{key}`"));
            };
            let Some((id, field)) = rest.rsplit_once('.') else {
                return Err(format!("`{key}`: expected link.<id>.<field>"));
            };
            let id: LinkId = id.parse().map_err(|e| format!("`{key}`: {e}"))?;
            let link = cfg.links.get_mut(id);
            match field {
                "m" => link.m = real()?,
                "omega" => link.omega = real()?,
                "distance" => link.distance = real()?,
                "alpha" => link.alpha = real()?,
                _ => {
                    return Err(format!(
                        "`{key}`: unknown link field `{field}` (expected m, omega, distance, alpha)"
                    ))
                }
            }
        }
    }
    Ok(())
}

/// Serializes `cfg` in the same format; `parse_config` reads it back exactly.
pub fn render_config(cfg: &SystemConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put("n_total", cfg.n_total.to_string());
    put("eta", cfg.split_factor.to_string());
    put("xi", cfg.xi.to_string());
    put("lambda_i", cfg.lambda_i.to_string());
    put("lambda_o", cfg.lambda_o.to_string());
    put("rho_db", cfg.rho_db.to_string());
    put("gamma_th_i", cfg.gamma_th_i.to_string());
    put("gamma_th_o", cfg.gamma_th_o.to_string());
    put("d0", cfg.d0.to_string());
    put("scenario", cfg.scenario.to_string());
    put("phase_design", cfg.phase_design.to_string());
    put("star_alignment", cfg.star_alignment.to_string());
    for id in LinkId::ALL {
        let l = cfg.links.get(id);
        let k = id.key();
        put(&format!("link.{k}.m"), l.m.to_string());
        put(&format!("link.{k}.omega"), l.omega.to_string());
        put(&format!("link.{k}.distance"), l.distance.to_string());
        put(&format!("link.{k}.alpha"), l.alpha.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{power, PhaseDesign, Scenario};

    #[test]
    fn bundled_preset_is_the_reference_configuration() {
        let cfg = parse_config(REFERENCE_PRESET, "reference").unwrap();
        assert_eq!(cfg, SystemConfig::reference());
        assert_eq!(cfg.links.f.m, 8.0);
        assert_eq!(cfg.links.t.m, 1.5);
        assert_eq!(cfg.links.g.alpha, 2.8);
        let d: Vec<f64> = [
            LinkId::F,
            LinkId::UIndoor,
            LinkId::UOutdoor,
            LinkId::D,
            LinkId::G,
            LinkId::T,
        ]
        .iter()
        .map(|&id| cfg.links.get(id).distance)
        .collect();
        assert_eq!(d, vec![25.0, 5.0, 20.0, 15.0, 35.0, 35.0]);
    }

    #[test]
    fn normalized_preset_differs_only_in_power() {
        let cfg = parse_config(REFERENCE_NORMALIZED_PRESET, "n").unwrap();
        assert_eq!((cfg.lambda_i, cfg.lambda_o), power::REFERENCE_NORMALIZED);
        let mut reference = SystemConfig::reference();
        reference.set_power_split(power::REFERENCE_NORMALIZED);
        assert_eq!(cfg, reference);
    }

    #[test]
    fn comments_blank_lines_and_dotted_keys() {
        let text = "# header\n\n  rho_db = 20   # inline\nlink.t.alpha=2.8\nscenario = c\nphase_design = random\n";
        let cfg = parse_config(text, "x").unwrap();
        assert_eq!(cfg.rho_db, 20.0);
        assert_eq!(cfg.links.t.alpha, 2.8);
        assert_eq!(cfg.scenario, Scenario::C);
        assert_eq!(cfg.phase_design, PhaseDesign::Random);
    }

    #[test]
    fn inverted_power_split_names_the_constraint() {
        let e = parse_config("lambda_i = 0.6\nlambda_o = 0.4\n", "f").unwrap_err();
        assert!(e.to_string().contains("λ_I < λ_O"), "{e}");
    }

    #[test]
    fn eta_out_of_range_is_rejected() {
        let e = parse_config("eta = 1.2\n", "f").unwrap_err();
        assert!(e.to_string().contains("out of range"), "{e}");
    }

    #[test]
    fn diagnostics_carry_line_and_field() {
        let cases = [
            ("rho_db = 3\nxi = abc\n", 2, "xi"),
            ("\n\nfoo = 1\n", 3, "foo"),
            ("link.q.m = 2\n", 1, "link.q.m"),
            ("link.f.beta = 2\n", 1, "beta"),
            ("eta 0.3\n", 1, "key = value"),
            ("eta = 0.3\neta = 0.4\n", 2, "duplicate"),
            ("n_total = -3\n", 1, "n_total"),
            ("eta =\n", 1, "missing value"),
        ];
        for (text, line, needle) in cases {
            match parse_config(text, "cfg.txt") {
                Err(Error::Parse {
                    path,
                    line: l,
                    message,
                }) => {
                    assert_eq!(path, "cfg.txt");
                    assert_eq!(l, line, "{text:?}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn target_rate_maps_to_threshold() {
        let cfg = parse_config("target_rate_i = 1\ntarget_rate_o = 2\n", "x").unwrap();
        assert_eq!(cfg.gamma_th_i, 1.0);
        assert_eq!(cfg.gamma_th_o, 3.0);
        let cfg = parse_config("gamma_th = 0.5\n", "x").unwrap();
        assert_eq!((cfg.gamma_th_i, cfg.gamma_th_o), (0.5, 0.5));
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = SystemConfig::reference();
        cfg.set_power_split(power::REFERENCE_NORMALIZED);
        cfg.links.u_o.m = 7.3;
        cfg.scenario = Scenario::B;
        cfg.rho_db = 12.345_678_9;
        assert_eq!(parse_config(&render_config(&cfg), "r").unwrap(), cfg);
    }

    #[test]
    fn missing_file_reports_path() {
        let e = load_config("/nonexistent/dir/cfg.preset").unwrap_err();
        assert!(e.to_string().contains("/nonexistent/dir/cfg.preset"), "{e}");
    }

    #[test]
    fn presets_lookup() {
        assert!(preset("reference").is_some());
        assert!(preset("nope").is_none());
    }
}
