//! Small dense linear-algebra helpers over `Vec<f64>` points, backed by
//! nalgebra for the factorizations.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

/// `a + c b`.
pub fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Convex combination `sum w_i p_i`.
pub fn combine(weights: &[f64], points: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; points[0].len()];
    for (w, p) in weights.iter().zip(points) {
        for (o, x) in out.iter_mut().zip(p) {
            *o += w * x;
        }
    }
    out
}

pub fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let w = vec![1.0 / points.len() as f64; points.len()];
    combine(&w, points)
}

pub fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    DMatrix::from_fn(m, n, |i, j| rows[i][j])
}

/// Solves a square system; `None` when (numerically) singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = to_matrix(a);
    let rhs = DVector::from_column_slice(b);
    let lu = m.clone().full_piv_lu();
    let x = lu.solve(&rhs)?;
    let scale = 1.0 + m.abs().max() * x.abs().max() + rhs.abs().max();
    let r = (&m * &x - &rhs).abs().max();
    if !x.iter().all(|v| v.is_finite()) || r > 1e-9 * scale {
        return None;
    }
    Some(x.iter().copied().collect())
}

/// Least-squares solution of `A X = B` for several right-hand sides (SVD).
pub fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-15 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps).ok()
}

/// Unit normal of the hyperplane through `points` (exactly `d` points in
/// `R^d`), or `None` when they are affinely dependent.
pub fn hyperplane_normal(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let d = points[0].len();
    if points.len() != d {
        return None;
    }
    if d == 1 {
        return Some(vec![1.0]);
    }
    let mut m = DMatrix::zeros(d, d);
    for k in 1..d {
        for j in 0..d {
            m[(k - 1, j)] = points[k][j] - points[0][j];
        }
    }
    let size = m.abs().max().max(1e-300);
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    // the zero padding row guarantees one vanishing singular value; the
    // next one must be clearly positive for affine independence
    if svd.singular_values[idx[1]] <= 1e-9 * size {
        return None;
    }
    let row = vt.row(idx[0]);
    let n: Vec<f64> = row.iter().copied().collect();
    let len = norm(&n);
    Some(scale(&n, 1.0 / len))
}

/// Numerical rank of a set of vectors.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = to_matrix(rows);
    m.svd(false, false)
        .singular_values
        .iter()
        .filter(|s| **s > tol)
        .count()
}

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerate_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn normal_of_a_line() {
        let n = hyperplane_normal(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((n[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((n[0] - n[1]).abs() < 1e-14);
        assert!(hyperplane_normal(&[vec![1.0, 1.0], vec![1.0, 1.0]]).is_none());
    }

    #[test]
    fn solve_and_singular() {
        let x = solve(&[vec![2.0, 0.0], vec![0.0, 4.0]], &[2.0, 2.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.5]);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0]).is_none());
    }
}
