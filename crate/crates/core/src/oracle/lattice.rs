//! Simplex lattices: rows whose entries are multiples of `1/(levels-1)`.

/// Number of ways to write `total` as an ordered sum of `cells`
/// nonnegative integers, as `f64` so that huge counts do not overflow.
pub fn composition_count(total: usize, cells: usize) -> f64 {
    if cells == 0 {
        return if total == 0 { 1.0 } else { 0.0 };
    }
    // C(total + cells - 1, cells - 1)
    let k = cells - 1;
    (1..=k).fold(1.0, |acc, i| acc * (total + i) as f64 / i as f64).round()
}

/// All pmfs on `cells` symbols with entries in `{0, 1/(levels-1), .., 1}`,
/// in lexicographic order of the integer compositions (first cell largest
/// first).
pub fn simplex_lattice(levels: usize, cells: usize) -> Vec<Vec<f64>> {
    assert!(levels >= 2 && cells >= 1);
    let total = levels - 1;
    let mut out = Vec::new();
    let mut current = vec![0usize; cells];
    fill(total, 0, &mut current, &mut out, total as f64);
    out
}

fn fill(left: usize, pos: usize, current: &mut [usize], out: &mut Vec<Vec<f64>>, scale: f64) {
    if pos + 1 == current.len() {
        current[pos] = left;
        out.push(current.iter().map(|&c| c as f64 / scale).collect());
        return;
    }
    for take in (0..=left).rev() {
        current[pos] = take;
        fill(left - take, pos + 1, current, out, scale);
    }
}
