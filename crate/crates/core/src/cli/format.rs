//! Fixed-precision number rendering shared by CSV, JSON and text output.

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// `%.12g`-style rendering: positional for exponents in `[-5, 12)`,
/// scientific otherwise, trailing zeros removed. NaN is spelled `nan`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent in scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exponent.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1e5), "100000");
        assert_eq!(format_number(1e12), "1e+12");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0 * 1e-7), "-6.66666666667e-08");
        assert_eq!(format_number(123456.7890123456), "123456.789012");
        assert_eq!(format_number(99999.99999999999), "100000");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1e-5), "0.00001");
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[0.1, 1.0 / 3.0, 7.123456789012345e-9, 6.02214076e23, -1.5e-300] {
            let r = round_sig(x);
            assert_eq!(round_sig(r), r);
            assert_eq!(format_number(r), format_number(x));
        }
    }
}
