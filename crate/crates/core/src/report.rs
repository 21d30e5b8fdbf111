//! Number formatting shared by every machine-readable output.

/// Version of the JSON/CSV output schemas.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats a real with 12 significant digits in scientific notation.
/// Exact zero and non-finite values get fixed spellings so output stays
/// byte-stable.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// Rounds to 12 significant digits, for embedding reals in JSON where the
/// last few bits would otherwise make reports platform dependent.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    fmt12(x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(1.0), "1.00000000000e0");
        assert_eq!(fmt12(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(round12(std::f64::consts::PI), 3.14159265359);
    }
}
