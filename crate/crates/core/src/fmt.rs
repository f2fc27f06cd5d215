//! Number formatting for text artifacts.

/// Shortest round-trip form, in scientific notation outside `[1e-4, 1e15)`.
pub(crate) fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}
