//! Shape of `report.json`, checked before the file is written.
//!
//! The schema is a small JSON document: every node has a `type` (`object`,
//! `array`, `number`, `integer`, `boolean`, `string`, `any`), optionally
//! `nullable`, objects list `required` keys in `properties`, and arrays give
//! their element schema in `items`. Objects may carry extra keys.

use serde_json::Value;

use crate::{Error, Result};

pub const REPORT_SCHEMA: &str = r#"{
  "type": "object",
  "properties": {
    "schema_version": {"type": "integer"},
    "config": {"type": "object", "properties": {
      "source": {"type": "string"},
      "label": {"type": "string"},
      "eta": {"type": "string", "nullable": true},
      "bad_primes": {"type": "array", "items": {"type": "integer"}},
      "curve": {"type": "array", "nullable": true, "items": {"type": "integer"}},
      "conductor": {"type": "integer", "nullable": true},
      "cross_check": {"type": "boolean"},
      "num_primes": {"type": "integer", "nullable": true},
      "prime_limit": {"type": "integer", "nullable": true},
      "k": {"type": "array", "items": {"type": "integer"}},
      "bins": {"type": "integer"},
      "spacing_bins": {"type": "integer"},
      "spacing_range": {"type": "number", "nullable": true},
      "pair_correlation": {"type": "boolean"},
      "strict_stats": {"type": "boolean"}
    }},
    "label": {"type": "string"},
    "weight": {"type": "integer"},
    "sample_size": {"type": "integer"},
    "prime_limit": {"type": "integer"},
    "n_max": {"type": "integer"},
    "cross_check": {"type": "object", "properties": {
      "enabled": {"type": "boolean"},
      "primes_checked": {"type": "integer"},
      "skipped_primes": {"type": "array", "items": {"type": "integer"}}
    }},
    "bad_primes": {"type": "array", "items": {"type": "object", "properties": {
      "prime": {"type": "integer"},
      "a_p": {"type": "string"}
    }}},
    "figures": {"type": "object", "properties": {
      "density": {"type": "object", "properties": {
        "bins": {"type": "integer"},
        "gof": {"$ref": "gof"}
      }},
      "unfolded": {"type": "object", "properties": {
        "gof": {"$ref": "gof"}
      }},
      "spacings": {"type": "array", "items": {"type": "object", "properties": {
        "k": {"type": "integer"},
        "range": {"type": "number"},
        "bins": {"type": "integer"},
        "mean_tolerance": {"type": "number"},
        "gof": {"$ref": "gof"}
      }}},
      "pair_correlation": {"type": "object", "nullable": true, "properties": {
        "bins": {"type": "integer"},
        "range": {"type": "number"},
        "max_abs_deviation": {"type": "number"}
      }}
    }},
    "acceptance": {"type": "object", "properties": {
      "density_chi_square_1pct": {"type": "boolean", "nullable": true},
      "uniformity_ks_1pct": {"type": "boolean"},
      "spacings": {"type": "array", "items": {"type": "object", "properties": {
        "k": {"type": "integer"},
        "ks_1pct": {"type": "boolean"},
        "mean_within_tolerance": {"type": "boolean"}
      }}},
      "all_passed": {"type": "boolean"}
    }},
    "artifacts": {"type": "object"}
  },
  "definitions": {
    "gof": {"type": "object", "properties": {
      "ks_statistic": {"type": "number", "nullable": true},
      "ks_critical_5pct": {"type": "number", "nullable": true},
      "chi_square": {"type": "number", "nullable": true},
      "degrees_of_freedom": {"type": "integer", "nullable": true},
      "chi_square_critical_5pct": {"type": "number", "nullable": true},
      "sample_mean": {"type": "number", "nullable": true},
      "sample_count": {"type": "integer"},
      "pass_at_5pct": {"type": "boolean"}
    }}
  }
}"#;

/// Checks `report` against [`REPORT_SCHEMA`]; the error names the first
/// offending path.
pub fn validate_report(report: &Value) -> Result<()> {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).expect("embedded schema parses");
    check(report, &schema, &schema["definitions"], "$")
}

fn check(value: &Value, schema: &Value, defs: &Value, path: &str) -> Result<()> {
    if let Some(name) = schema.get("$ref").and_then(Value::as_str) {
        return check(value, &defs[name], defs, path);
    }
    let fail = |msg: String| Err(Error::config("report.json", format!("{path}: {msg}")));
    if value.is_null() {
        return if schema["nullable"].as_bool() == Some(true) {
            Ok(())
        } else {
            fail("unexpected null".into())
        };
    }
    let kind = schema["type"].as_str().unwrap_or("any");
    let ok = match kind {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "number" => value.is_number(),
        "integer" => value.is_i64() || value.is_u64(),
        "boolean" => value.is_boolean(),
        "string" => value.is_string(),
        _ => true,
    };
    if !ok {
        return fail(format!("expected {kind}, got {value}"));
    }
    if let (Some(props), Some(obj)) = (
        schema.get("properties").and_then(Value::as_object),
        value.as_object(),
    ) {
        for (key, sub) in props {
            match obj.get(key) {
                Some(v) => check(v, sub, defs, &format!("{path}.{key}"))?,
                None => return fail(format!("missing key `{key}`")),
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check(v, items, defs, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn small_schema_check(value: Value, schema: Value) -> Result<()> {
        check(&value, &schema, &Value::Null, "$")
    }

    #[test]
    fn validator_basics() {
        let schema = json!({"type": "object", "properties": {
            "a": {"type": "integer"},
            "b": {"type": "array", "items": {"type": "number"}},
            "c": {"type": "string", "nullable": true}
        }});
        assert!(small_schema_check(
            json!({"a": 1, "b": [1.5, 2], "c": null, "extra": 0}),
            schema.clone()
        )
        .is_ok());
        assert!(small_schema_check(json!({"a": 1.5, "b": [], "c": "x"}), schema.clone()).is_err());
        assert!(small_schema_check(json!({"a": 1, "b": ["x"], "c": "x"}), schema.clone()).is_err());
        assert!(small_schema_check(json!({"a": 1, "c": "x"}), schema).is_err());
    }

    #[test]
    fn schema_is_valid_json() {
        let v: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert_eq!(v["type"], "object");
    }
}
