//! Math aliases and number formatting shared across the crate.

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Quat = nalgebra::UnitQuaternion<f64>;

/// Format with shortest round-trip representation (`f64` Display).
/// Structure files use this so parse∘serialize is bit-exact.
pub fn fmt_exact(x: f64) -> String {
    format!("{x}")
}

/// Format with at most `sig` significant digits, trimming trailing zeros.
/// Used for CSV trajectories and report documents.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig.max(1) - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };

    let body = if exp >= 0 && (exp as usize) < sig + 3 {
        let point = exp as usize + 1;
        if digits.len() <= point {
            format!("{digits}{}", "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    } else if exp < 0 && exp >= -4 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let frac = &digits[1..];
        if frac.is_empty() {
            format!("{}e{exp}", &digits[..1])
        } else {
            format!("{}.{frac}e{exp}", &digits[..1])
        }
    };
    format!("{sign}{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_sig_trims_and_shifts() {
        assert_eq!(fmt_sig(-9.81, 9), "-9.81");
        assert_eq!(fmt_sig(0.0, 9), "0");
        assert_eq!(fmt_sig(1.0, 9), "1");
        assert_eq!(fmt_sig(149.0, 9), "149");
        assert_eq!(fmt_sig(0.0001, 9), "0.0001");
        assert_eq!(fmt_sig(1.23456789e-7, 9), "1.23456789e-7");
        assert_eq!(fmt_sig(123456789000.0, 9), "123456789000");
    }

    #[test]
    fn fmt_sig_rounds_to_requested_digits() {
        assert_eq!(fmt_sig(0.123456789123, 9), "0.123456789");
        assert_eq!(fmt_sig(std::f64::consts::PI, 4), "3.142");
    }

    #[test]
    fn fmt_sig_reparses_close() {
        for &x in &[1.0 / 3.0, 2.0_f64.sqrt() * 1e-3, -77.5e-3, 6.02e23] {
            let y: f64 = fmt_sig(x, 9).parse().unwrap();
            assert!((x - y).abs() <= 1e-8 * x.abs());
        }
    }
}
