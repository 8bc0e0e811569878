/// `x` with `digits` significant digits: positional notation for moderate
/// magnitudes, scientific otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let scientific = format!("{x:.prec$e}", prec = digits - 1);
    // exponent after rounding, so 9.9999996 counts as 10
    let exponent: i32 = scientific
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-4..digits as i32).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        scientific
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.7200674581768376, 6), "1.72007");
        assert_eq!(sig(1.350939, 6), "1.35094");
        assert_eq!(sig(0.001234567, 3), "0.00123");
        assert_eq!(sig(-2.5, 2), "-2.5");
        assert_eq!(sig(123456.7, 6), "123457");
        assert_eq!(sig(1234567.0, 6), "1.23457e6");
        assert_eq!(sig(2.45e-50, 3), "2.45e-50");
        assert_eq!(sig(0.0, 6), "0");
        assert_eq!(sig(9.9999996, 6), "10.0000");
        assert_eq!(sig(12.0, 6), "12.0000");
    }
}
