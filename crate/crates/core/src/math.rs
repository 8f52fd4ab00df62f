/// Euclidean remainder of `x` by a positive modulus, always in `[0, m)`.
pub(crate) fn wrap(x: f64, m: f64) -> f64 {
    let r = x - m * libm::floor(x / m);
    if r >= m || r < 0.0 {
        0.0
    } else {
        r
    }
}
