//! Numerical rank and null spaces of small dense complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Singular values are treated as zero below this fraction of the largest.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Entries below this magnitude are cleared after canonicalizing a basis.
const CLEAN_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

impl RankInfo {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

/// Pads with zero rows so the thin SVD yields a full set of right singular
/// vectors.
fn padded(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (r, c) = a.shape();
    if r >= c {
        return a.clone();
    }
    let mut p = DMatrix::zeros(c, c);
    p.view_mut((0, 0), (r, c)).copy_from(a);
    p
}

pub fn numerical_rank(a: &DMatrix<Complex64>, rel: f64) -> RankInfo {
    if a.ncols() == 0 || a.nrows() == 0 {
        return RankInfo {
            rank: 0,
            singular_values: vec![0.0; a.ncols()],
        };
    }
    let svd = padded(a).svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv.truncate(a.ncols());
    let cut = rel * sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > cut).count();
    RankInfo {
        rank,
        singular_values: sv,
    }
}

/// Copy of `a` with every nonzero column scaled to unit Euclidean norm.
pub fn column_normalized(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = a.clone();
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    out
}

/// Basis of `ker a`, returned in reduced row echelon form so that the basis
/// is canonical (independent of the SVD's choice of rotation).
pub fn null_space(a: &DMatrix<Complex64>, rel: f64) -> Vec<Vec<Complex64>> {
    let k = a.ncols();
    if k == 0 {
        return Vec::new();
    }
    if a.nrows() == 0 || a.iter().all(|x| *x == Complex64::new(0.0, 0.0)) {
        return (0..k)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); k];
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
    }
    let svd = padded(a).svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = rel * sigma_max;
    let rows: Vec<Vec<Complex64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        // rows of V^H are conjugated right singular vectors
        .map(|(i, _)| (0..k).map(|j| v_t[(i, j)].conj()).collect())
        .collect();
    rref(rows)
}

fn rref(mut rows: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let m = rows.len();
    if m == 0 {
        return rows;
    }
    let k = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..k {
        if pivot_row == m {
            break;
        }
        let (best, mag) = (pivot_row..m)
            .map(|r| (r, rows[r][col].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= CLEAN_THRESHOLD {
            continue;
        }
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        rows[pivot_row].iter_mut().for_each(|x| *x /= p);
        for r in 0..m {
            if r != pivot_row {
                let f = rows[r][col];
                if f.norm() > 0.0 {
                    for j in 0..k {
                        let delta = f * rows[pivot_row][j];
                        rows[r][j] -= delta;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            if x.re.abs() <= CLEAN_THRESHOLD {
                x.re = 0.0;
            }
            if x.im.abs() <= CLEAN_THRESHOLD {
                x.im = 0.0;
            }
        }
    }
    rows.truncate(pivot_row);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rank_of_wide_and_tall() {
        let a = DMatrix::from_row_slice(1, 3, &[c(0.0), c(0.0), c(4.0)]);
        assert_eq!(numerical_rank(&a, RANK_THRESHOLD).rank, 1);
        let t = DMatrix::from_row_slice(3, 2, &[c(1.0), c(0.0), c(0.0), c(1.0), c(1.0), c(1.0)]);
        assert_eq!(numerical_rank(&t, RANK_THRESHOLD).rank, 2);
    }

    #[test]
    fn null_space_is_canonical() {
        // 4a − 8b = 0 on (a, b, c)
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[c(0.0), c(0.0), c(0.0), c(0.0), c(0.0), c(0.0), c(4.0), c(-8.0), c(0.0)],
        );
        let ns = null_space(&a, RANK_THRESHOLD);
        assert_eq!(ns.len(), 2);
        let close = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14);
        assert!(close(&ns[0], &[c(1.0), c(0.5), c(0.0)]));
        assert!(close(&ns[1], &[c(0.0), c(0.0), c(1.0)]));
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let a = DMatrix::<Complex64>::zeros(2, 3);
        assert_eq!(null_space(&a, RANK_THRESHOLD).len(), 3);
    }
}
