//! Small dense linear algebra helpers on 9x9 systems.

use crate::constraints::{Mat9, Vec9};

/// Singular values (descending) with the matching left and right singular vectors.
pub struct Svd9 {
    pub sigma: [f64; 9],
    pub u: Mat9,
    pub v: Mat9,
}

pub fn svd9(m: &Mat9) -> Svd9 {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut sigma = [0.0; 9];
    let mut uu = Mat9::zeros();
    let mut vv = Mat9::zeros();
    for (k, &i) in order.iter().enumerate() {
        sigma[k] = svd.singular_values[i];
        uu.set_column(k, &u.column(i));
        vv.set_column(k, &vt.row(i).transpose());
    }
    Svd9 { sigma, u: uu, v: vv }
}

/// Numerical rank with cutoff `rel * sigma_max`.
pub fn rank(sigma: &[f64; 9], rel: f64) -> usize {
    let cut = rel * sigma[0];
    sigma.iter().filter(|s| **s > cut).count()
}

pub fn det(m: &Mat9) -> f64 {
    m.determinant()
}

pub fn max_abs(v: &Vec9) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn to_array(v: &Vec9) -> [f64; 9] {
    std::array::from_fn(|i| v[i])
}
