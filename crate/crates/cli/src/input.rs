//! Space descriptions: catalog names or JSON files of the form
//! `{"kind": ..., "params": ..., "core_radius": int, "padding": int}`.

use std::fs;
use std::path::Path;

use roelab::catalog;
use roelab::space::AmbientSpec;
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone)]
pub struct SpaceInput {
    pub spec: AmbientSpec,
    pub core_radius: Option<u32>,
    pub padding: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    kind: String,
    #[serde(default)]
    params: Value,
    core_radius: Option<u32>,
    padding: Option<u32>,
}

pub fn resolve(arg: &str) -> Result<SpaceInput, String> {
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        return parse(&text).map_err(|e| format!("{arg}: {e}"));
    }
    catalog::by_name(arg)
        .map(|spec| SpaceInput { spec, core_radius: None, padding: None })
        .ok_or_else(|| format!("{arg:?} is neither a file nor a catalog space"))
}

/// Parses a space file. Errors name the offending field path.
pub fn parse(text: &str) -> Result<SpaceInput, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SpaceFile = serde_path_to_error::deserialize(de).map_err(describe)?;
    let inner = serde_json::json!({ "kind": file.kind, "params": file.params });
    let spec: AmbientSpec = serde_path_to_error::deserialize(inner).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "kind".to_string() } else { path };
        format!("field `{path}`: {}", e.into_inner())
    })?;
    spec.validate().map_err(|e| format!("field `params`: {e}"))?;
    Ok(SpaceInput { spec, core_radius: file.core_radius, padding: file.padding })
}

fn describe(e: serde_path_to_error::Error<serde_json::Error>) -> String {
    let path = e.path().to_string();
    let inner = e.into_inner();
    format!("field `{path}` (line {}, column {}): {inner}", inner.line(), inner.column())
}

/// Default largest core radius for a space without one.
pub fn default_core(spec: &AmbientSpec) -> u32 {
    match spec {
        AmbientSpec::Grid { d: 1 } | AmbientSpec::Halfline => 12,
        AmbientSpec::Grid { .. } => 5,
        AmbientSpec::Finite { dist, .. } => dist.iter().flatten().copied().max().unwrap_or(0) + 3,
        AmbientSpec::FreeUnion(parts) => parts.iter().map(default_core).max().unwrap_or(0),
        AmbientSpec::Product(a, b) => default_core(a).min(default_core(b)).min(5),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files() {
        let s = parse(r#"{"kind": "grid", "params": {"d": 2}, "core_radius": 5, "padding": 10}"#).unwrap();
        assert_eq!(s.spec, AmbientSpec::grid(2));
        assert_eq!((s.core_radius, s.padding), (Some(5), Some(10)));
        let s = parse(r#"{"kind": "finite", "params": {"points": ["a", "b"], "dist": [[0, 1], [1, 0]]}}"#).unwrap();
        assert!(matches!(s.spec, AmbientSpec::Finite { .. }));
        let s = parse(r#"{"kind": "free_union", "params": [{"kind": "grid", "params": {"d": 1}}, {"kind": "halfline"}]}"#)
            .unwrap();
        assert!(matches!(s.spec, AmbientSpec::FreeUnion(ref v) if v.len() == 2));
    }

    #[test]
    fn reports_field_paths() {
        let e = parse(r#"{"kind": "grid", "params": {"d": "two"}}"#).unwrap_err();
        assert!(e.contains("params.d") || e.contains("d"), "{e}");
        let e = parse(r#"{"kind": "grid", "params": {"d": 1}, "core_radius": -1}"#).unwrap_err();
        assert!(e.contains("core_radius"), "{e}");
        let e = parse(r#"{"kind": "finite", "params": {"dist": [[0, 1], [2, 0]]}}"#).unwrap_err();
        assert!(e.contains("params"), "{e}");
        assert!(parse("{").unwrap_err().contains("line 1"));
    }
}
