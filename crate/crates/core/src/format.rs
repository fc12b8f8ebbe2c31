//! Decimal output. Reported digits are truncated toward zero, never rounded.

/// `v` with `digits` significant digits, truncated toward zero.
///
/// Fixed notation for decimal exponents in `-6..=20` when the kept digits
/// reach the decimal point, scientific otherwise, so that the last printed
/// digit is always the last significant one.
pub fn truncate_significant(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return if digits == 1 {
            "0".to_string()
        } else {
            format!("0.{}", "0".repeat(digits - 1))
        };
    }
    // 40 digits is far past the 17 an f64 carries, so rounding in the
    // formatter cannot reach the digits we keep.
    let sci = format!("{:.40e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let kept: String = mantissa
        .chars()
        .filter(char::is_ascii_digit)
        .take(digits)
        .collect();
    let sign = if v < 0.0 { "-" } else { "" };

    let body = if !(-6..=20).contains(&exp) || (exp >= 0 && exp as usize >= kept.len()) {
        let (head, tail) = kept.split_at(1);
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    } else if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len == kept.len() {
            kept
        } else {
            format!("{}.{}", &kept[..int_len], &kept[int_len..])
        }
    } else {
        format!("0.{}{kept}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}

/// Value of one unit in the last printed place of a decimal, e.g. `1e-10`
/// for `"3.0016045144"` and `1e3` for `"4.13e5"`.
pub fn last_place_unit(text: &str) -> f64 {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (text, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, frac)| frac.len());
    10f64.powi(exp - decimals as i32)
}

/// `v` truncated to as many significant digits as the decimal `template`
/// shows, so the two can be compared digit by digit.
pub fn truncate_like(v: f64, template: &str) -> String {
    let sig = template
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    truncate_significant(v, sig.max(1))
}

/// Shortest decimal that parses back to exactly `v`.
pub fn full_precision(v: f64) -> String {
    format!("{v:?}")
}

/// Whether the decimal `printed` is `v` truncated toward zero:
/// `|t| <= |v| < |t| + unit`, with matching signs.
pub fn is_truncation_of(printed: &str, v: f64) -> bool {
    let Ok(t) = printed.parse::<f64>() else {
        return false;
    };
    let unit = last_place_unit(printed);
    if t != 0.0 && v != 0.0 && t.signum() != v.signum() {
        return false;
    }
    // Allow one ulp of slack for the decimal-to-binary conversion of `t`.
    let slack = 4.0 * f64::EPSILON * v.abs();
    t.abs() <= v.abs() + slack && v.abs() < t.abs() + unit + slack
}
