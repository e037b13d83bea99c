//! Scenario presets shipped with the crate.

pub const PRESET_NAMES: [&str; 3] = ["bell", "pointer_benchmark", "rank2_sector"];

/// TOML text of a named preset.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "bell" => Some(include_str!("../../presets/bell.toml")),
        "pointer_benchmark" => Some(include_str!("../../presets/pointer_benchmark.toml")),
        "rank2_sector" => Some(include_str!("../../presets/rank2_sector.toml")),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_config, Scenario};

    #[test]
    fn presets_parse_and_validate() {
        for name in PRESET_NAMES {
            let config = parse_config(preset(name).unwrap()).unwrap();
            assert_eq!(config.name, name);
            Scenario::build(config).unwrap();
        }
    }
}
