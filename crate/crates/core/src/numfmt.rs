/// Formats `x` rounded to 9 significant digits, shortest form, no exponent.
///
/// Re-formatting the parsed output yields the same string.
pub(crate) fn sig9(x: f64) -> String {
    debug_assert!(x.is_finite());
    let rounded: f64 = format!("{x:.8e}").parse().expect("float formatting round-trips");
    if rounded == 0.0 {
        // Also folds -0 into 0.
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}
