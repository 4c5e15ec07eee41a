//! Number formatting shared by the CSV and text emitters.

/// Formats `x` with `digits` significant digits, in the style of C's `%.*g`
/// (trailing zeros removed, exponent form for very large or small values).
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.500047419736669, 15), "0.500047419736669");
        assert_eq!(sig(1.0, 15), "1");
        assert_eq!(sig(-2.5, 15), "-2.5");
        assert_eq!(sig(0.0, 15), "0");
        assert_eq!(sig(1.5e-7, 15), "1.5e-07");
        assert_eq!(sig(123456.0, 3), "1.23e+05");
        assert_eq!(sig(0.0001234, 15), "0.0001234");
        assert_eq!(sig(std::f64::consts::TAU, 15), "6.28318530717959");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -std::f64::consts::E, 1e-300, 6.02e23] {
            assert_eq!(sig(x, 17).parse::<f64>().unwrap(), x);
        }
    }
}
