//! Fixed-width scientific formatting shared by the JSON and CSV writers.

/// Formats `x` like C's `%.{decimals}e`: signed exponent, at least two digits.
///
/// ```
/// use mpslab::format::sci;
/// assert_eq!(sci(451.0625, 16), "4.5106250000000000e+02");
/// assert_eq!(sci(-0.5, 3), "-5.000e-01");
/// ```
pub fn sci(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let raw = format!("{:.*e}", decimals, x);
    let (mantissa, exp) = raw.split_once('e').expect("`e` formatting has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// 17 significant digits: enough for a lossless `f64` round trip.
pub fn sci17(x: f64) -> String {
    sci(x, 16)
}
