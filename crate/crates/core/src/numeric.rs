/// Relative slack used when a float that should be an integer (such as
/// `100^0.5`) lands one ulp away from it.
const SNAP_REL: f64 = 1e-9;

fn snapped(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= SNAP_REL * r.abs().max(1.0)).then_some(r)
}

/// Ceiling that treats values within rounding noise of an integer as that integer.
pub(crate) fn ceil_snap(x: f64) -> f64 {
    snapped(x).unwrap_or_else(|| x.ceil())
}

/// Floor that treats values within rounding noise of an integer as that integer.
pub(crate) fn floor_snap(x: f64) -> f64 {
    snapped(x).unwrap_or_else(|| x.floor())
}

/// Returns the integer `x` represents if it is one up to rounding noise.
pub(crate) fn as_integer(x: f64) -> Option<u64> {
    snapped(x).filter(|r| *r >= 0.0).map(|r| r as u64)
}

/// Error-free sum of two floats (Knuth's TwoSum).
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    let err = (a - (s - bp)) + (b - bp);
    (s, err)
}

/// `1 - sum(values)` with the sum carried in double-double precision, so the
/// result is the float closest to the exact complement.
pub(crate) fn complement_of_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut hi = 0.0;
    let mut lo = 0.0;
    for v in values {
        let (s, e) = two_sum(hi, v);
        hi = s;
        lo += e;
    }
    let (d, e) = two_sum(1.0, -hi);
    d + (e - lo)
}

/// Median of an already sorted, non-empty slice.
pub(crate) fn median_sorted(xs: &[f64]) -> f64 {
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}
