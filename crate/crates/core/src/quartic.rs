//! Characteristic quartic of the dimer and its real roots.
//!
//! Roots are seeded from the eigenvalues of the companion matrix and then
//! polished with Newton's method. Multiple roots scatter under rounding (a
//! double root by ~sqrt(eps), a triple root by ~eps^(1/3)), so clusters of
//! eigenvalues are collapsed onto the matching zero of a derivative before
//! the multiplicity is confirmed.

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

use crate::model::ModelParams;

/// Monic quartic coefficients, highest degree first.
pub type Quartic = [f64; 5];

/// A real root and how many times it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// A root is treated as real when `|Im| < REALNESS_TOL * (1 + |Re|)` after polishing.
pub const REALNESS_TOL: f64 = 1e-9;

/// Radius (relative to `1 + |z|`) within which companion eigenvalues are
/// candidates for a single multiple root.
const CLUSTER_RADIUS: f64 = 1e-4;

const MAX_NEWTON: usize = 80;

/// `E^4 + c E^3 + (c^2 - v^2 - R^2)/4 E^2 - (v^2 c/4) E - v^2 c^2/16`.
pub fn quartic_coefficients(params: &ModelParams) -> Quartic {
    let (r, c, v) = (params.bias(), params.nonlinearity(), params.coupling());
    [1.0, c, 0.25 * (c * c - v * v - r * r), -0.25 * v * v * c, -v * v * c * c / 16.0]
}

/// Coefficients of the `order`-th derivative, highest degree first.
fn derivative(coeffs: &[f64], order: usize) -> Vec<f64> {
    let mut cur = coeffs.to_vec();
    for _ in 0..order {
        let deg = cur.len() - 1;
        if deg == 0 {
            return vec![0.0];
        }
        cur = cur[..deg].iter().enumerate().map(|(i, a)| a * (deg - i) as f64).collect();
    }
    cur
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &a| acc * x + a)
}

fn horner_c(coeffs: &[f64], z: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Magnitude scale of the terms of `p(x)`, used to judge "numerically zero".
fn term_scale(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().fold(0.0, |acc, &a| acc * ax + a.abs())
}

fn numerically_zero(coeffs: &[f64], x: f64) -> bool {
    horner(coeffs, x).abs() <= 256.0 * f64::EPSILON * term_scale(coeffs, x).max(f64::MIN_POSITIVE)
}

/// Newton iteration on a real polynomial, keeping the best iterate seen.
fn polish_real(coeffs: &[f64], x0: f64) -> f64 {
    let dc = derivative(coeffs, 1);
    let mut x = x0;
    let mut best = (horner(coeffs, x).abs(), x);
    for _ in 0..MAX_NEWTON {
        let p = horner(coeffs, x);
        let dp = horner(&dc, x);
        if p == 0.0 || dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        x -= step;
        let px = horner(coeffs, x).abs();
        if px < best.0 {
            best = (px, x);
        }
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
    }
    best.1
}

fn polish_complex(coeffs: &[f64], z0: C64) -> C64 {
    let dc = derivative(coeffs, 1);
    let mut z = z0;
    let mut best = (horner_c(coeffs, z).norm(), z);
    for _ in 0..MAX_NEWTON {
        let p = horner_c(coeffs, z);
        let dp = horner_c(&dc, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        let pz = horner_c(coeffs, z).norm();
        if pz < best.0 {
            best = (pz, z);
        }
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    best.1
}

fn companion_eigenvalues(coeffs: &Quartic) -> [C64; 4] {
    // Frobenius companion: ones on the subdiagonal, -a_k/a_0 in the first row.
    let mut m = Matrix4::<f64>::zeros();
    for j in 0..4 {
        m[(0, j)] = -coeffs[j + 1];
    }
    for i in 1..4 {
        m[(i, i - 1)] = 1.0;
    }
    let ev = m.complex_eigenvalues();
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Group eigenvalues whose mutual distance is below the cluster radius
/// (transitively).
fn clusters(z: &[C64; 4]) -> Vec<Vec<C64>> {
    let mut label: [usize; 4] = [0, 1, 2, 3];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let rad = CLUSTER_RADIUS * (1.0 + z[i].norm().max(z[j].norm()));
            if (z[i] - z[j]).norm() < rad {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<C64>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..4 {
        match seen.iter().position(|&l| l == label[i]) {
            Some(k) => groups[k].push(z[i]),
            None => {
                seen.push(label[i]);
                groups.push(vec![z[i]]);
            }
        }
    }
    groups
}

/// Try to confirm a cluster of `k` eigenvalues as one real root of
/// multiplicity `k`.
fn merge_cluster(coeffs: &Quartic, members: &[C64]) -> Option<f64> {
    let k = members.len();
    let centroid = members.iter().sum::<C64>() / k as f64;
    let rad = CLUSTER_RADIUS * (1.0 + centroid.norm());
    if centroid.im.abs() > rad {
        return None;
    }
    // The (k-1)-th derivative has a simple zero at a k-fold root.
    let dk = derivative(coeffs, k - 1);
    let x = polish_real(&dk, centroid.re);
    (0..k - 1).all(|j| numerically_zero(&derivative(coeffs, j), x)).then_some(x)
}

/// All real roots of a monic quartic, ascending, with multiplicities.
///
/// Each root satisfies `|p(E)| < tol * max(1, |E|^4)`; conjugate pairs whose
/// imaginary part survives polishing are dropped.
pub fn solve_quartic_real_roots(coeffs: &Quartic, tol: f64) -> Vec<RealRoot> {
    assert!(coeffs[0] != 0.0, "quartic must have a nonzero leading coefficient");
    let c: Quartic = if coeffs[0] == 1.0 { *coeffs } else { coeffs.map(|a| a / coeffs[0]) };
    let accept = |x: f64| horner(&c, x).abs() < tol * x.abs().powi(4).max(1.0);

    let mut roots: Vec<RealRoot> = Vec::new();
    for group in clusters(&companion_eigenvalues(&c)) {
        if group.len() > 1 {
            if let Some(x) = merge_cluster(&c, &group) {
                if accept(x) {
                    roots.push(RealRoot { value: x, multiplicity: group.len() });
                    continue;
                }
            }
        }
        for z0 in group {
            let z = polish_complex(&c, z0);
            if z.im.abs() >= REALNESS_TOL * (1.0 + z.re.abs()) {
                continue;
            }
            let x = polish_real(&c, z.re);
            if accept(x) {
                roots.push(RealRoot { value: x, multiplicity: 1 });
            }
        }
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));

    // Separately polished members of one cluster can land on the same root.
    let mut merged: Vec<RealRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r.value - last.value).abs() <= 1e-12 * (1.0 + r.value.abs()) => {
                last.multiplicity += r.multiplicity;
            }
            _ => merged.push(r),
        }
    }
    merged
}
