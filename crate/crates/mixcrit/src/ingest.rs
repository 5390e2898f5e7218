//! Sample ingestion: plain text (one decimal number per line) or a JSON
//! array of numbers. Non-finite values are rejected at the door.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mixture::Sample;

/// Parses sample text. A leading '[' selects the JSON-array form.
pub fn parse_sample(text: &str) -> Result<Sample> {
    let trimmed = text.trim_start();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("JSON sample: {e}")))?
    } else {
        let mut vals = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let tok = line.trim();
            if tok.is_empty() || tok.starts_with('#') {
                continue;
            }
            let v: f64 = tok
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            vals.push(v);
        }
        vals
    };
    Sample::new(values)
}

pub fn read_sample(path: &std::path::Path) -> Result<Sample> {
    let text = std::fs::read_to_string(path)?;
    parse_sample(&text)
}

/// SHA-256 over the little-endian bytes of the sorted sample values.
pub fn sample_digest(sample: &Sample) -> String {
    let mut hasher = Sha256::new();
    for v in sample.points() {
        hasher.update(v.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_and_json() {
        let a = parse_sample("1.0\n2.5\n-3\n").unwrap();
        assert_eq!(a.points(), &[-3.0, 1.0, 2.5]);
        let b = parse_sample("[1.0, 2.5, -3]").unwrap();
        assert_eq!(a.points(), b.points());
        // comments and blank lines are tolerated in the text form
        let c = parse_sample("# header\n1\n\n2\n").unwrap();
        assert_eq!(c.points(), &[1.0, 2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_sample("").is_err());
        assert!(parse_sample("abc\n").is_err());
        assert!(parse_sample("NaN\n").is_err());
        assert!(parse_sample("inf\n").is_err());
        assert!(parse_sample("[1, \"x\"]").is_err());
    }

    #[test]
    fn digest_is_order_insensitive_and_value_sensitive() {
        let a = parse_sample("1\n2\n3\n").unwrap();
        let b = parse_sample("3\n1\n2\n").unwrap();
        assert_eq!(sample_digest(&a), sample_digest(&b));
        let c = parse_sample("1\n2\n3.0001\n").unwrap();
        assert_ne!(sample_digest(&a), sample_digest(&c));
        assert_eq!(sample_digest(&a).len(), 64);
    }
}
