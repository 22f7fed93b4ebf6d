//! `--set key=value` edits applied to the raw configuration document.

use anyhow::{anyhow, bail, Result};
use serde_json::{Map, Value};

/// Sets the dotted `key` to `value`, creating intermediate objects as needed.
/// The value is read as JSON when possible and as a plain string otherwise.
pub fn apply(doc: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got `{assignment}`"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        bail!("--set: malformed key `{key}`");
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let mut walked = Vec::new();
    for part in key.split('.') {
        walked.push(part);
        let obj = match node {
            Value::Object(m) => m,
            _ => bail!(
                "--set {key}: `{}` is not an object",
                walked[..walked.len() - 1].join(".")
            ),
        };
        node = obj.entry(part).or_insert_with(|| Value::Object(Map::new()));
    }
    *node = value;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_set() {
        let mut doc = json!({"solver": {"tol": 1e-8}, "eta": 1e-6});
        apply(&mut doc, "solver.mixing=0.25").unwrap();
        apply(&mut doc, "eta=1e-9").unwrap();
        apply(&mut doc, "phonons.coupling=[[0.3]]").unwrap();
        apply(&mut doc, "solver.interaction_order=born").unwrap();
        assert_eq!(
            doc,
            json!({
                "solver": {"tol": 1e-8, "mixing": 0.25, "interaction_order": "born"},
                "eta": 1e-9,
                "phonons": {"coupling": [[0.3]]}
            })
        );
    }

    #[test]
    fn rejects_bad_assignments() {
        let mut doc = json!({"eta": 1.0});
        assert!(apply(&mut doc, "eta").is_err());
        assert!(apply(&mut doc, "solver..tol=1").is_err());
        assert!(apply(&mut doc, "eta.x=1").is_err());
    }
}
