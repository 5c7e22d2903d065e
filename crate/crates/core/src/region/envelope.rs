//! Monotone and convex post-processing of frontier samples.

/// Prefix minimum: `out[i] = min(values[..=i])`.
pub fn running_min(values: &[f64]) -> Vec<f64> {
    let mut acc = f64::INFINITY;
    values
        .iter()
        .map(|&v| {
            acc = acc.min(v);
            acc
        })
        .collect()
}

/// Lower convex envelope of the points `(xs[i], ys[i])`, evaluated at every
/// `xs[i]`. `xs` must be strictly increasing.
pub fn lower_convex_envelope(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b when it lies on or above the chord from a to i.
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(xs.len());
    let mut seg = 0;
    for (i, &x) in xs.iter().enumerate() {
        while seg + 1 < hull.len() && xs[hull[seg + 1]] < x {
            seg += 1;
        }
        if hull[seg] == i || seg + 1 >= hull.len() {
            out.push(ys[hull[seg]].min(ys[i]));
            continue;
        }
        let (a, b) = (hull[seg], hull[seg + 1]);
        let t = (x - xs[a]) / (xs[b] - xs[a]);
        out.push(ys[a] + t * (ys[b] - ys[a]));
    }
    out
}
