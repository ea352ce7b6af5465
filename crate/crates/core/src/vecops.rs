//! Small dense-vector helpers on slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise summation of `rows` consecutive records of length `width`.
pub fn pairwise_sum_rows(values: &[f64], width: usize, out: &mut [f64]) {
    let rows = values.len() / width;
    if rows <= 8 {
        out.iter_mut().for_each(|o| *o = 0.0);
        for r in 0..rows {
            for (o, v) in out.iter_mut().zip(&values[r * width..(r + 1) * width]) {
                *o += v;
            }
        }
        return;
    }
    let mid = rows / 2;
    let mut right = vec![0.0; width];
    pairwise_sum_rows(&values[..mid * width], width, out);
    pairwise_sum_rows(&values[mid * width..], width, &mut right);
    for (o, r) in out.iter_mut().zip(&right) {
        *o += r;
    }
}
