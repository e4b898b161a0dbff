//! First-order covariant field model behind the scheme.
//!
//! The short pulse equation `u_xt = u + (1/6)(u^3)_xx` is written for the
//! potential `phi` (`u = phi_x`) as a first-order system in the triple
//! `Z = (phi, p_x, p_t)`:
//!
//! ```text
//! d_x p_x + d_t p_t =  phi
//! d_x phi           =  2 p_t
//! d_t phi           =  2 p_x + (8/3) p_t^3
//! ```
//!
//! with generating density `H(Z) = 2 p_x p_t + (2/3) p_t^4 - phi^2 / 2`.
//! The same system reads `B_x d_x Z + B_t d_t Z = grad H(Z)` with a pair of
//! antisymmetric coefficient matrices returned by [`beta_matrices`]; those
//! matrices also satisfy a Duffin-Kemmer-Petiau-type algebra, checked by
//! [`dkp_residual`]. The conserved two-form flux densities evaluated by
//! [`kappa_eval`] are bilinear in tangent (variation) triples.

/// Pointwise state `(phi, p_x, p_t)` of the first-order system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DWTriple {
    pub phi: f64,
    pub p_x: f64,
    pub p_t: f64,
}

impl DWTriple {
    pub fn new(phi: f64, p_x: f64, p_t: f64) -> Self {
        DWTriple { phi, p_x, p_t }
    }
}

/// Space-time direction label for directional quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    T,
}

/// 3x3 coefficient matrix in `Z = (phi, p_x, p_t)` ordering.
pub type Mat3 = [[f64; 3]; 3];

/// Generating density `H = 2 p_x p_t + (2/3) p_t^4 - phi^2 / 2`.
pub fn dw_hamiltonian(z: DWTriple) -> f64 {
    let pt2 = z.p_t * z.p_t;
    2.0 * z.p_x * z.p_t + (2.0 / 3.0) * pt2 * pt2 - 0.5 * z.phi * z.phi
}

/// Gradient of [`dw_hamiltonian`] in `(phi, p_x, p_t)` ordering.
pub fn dw_gradient(z: DWTriple) -> [f64; 3] {
    [
        -z.phi,
        2.0 * z.p_t,
        2.0 * z.p_x + (8.0 / 3.0) * z.p_t * z.p_t * z.p_t,
    ]
}

/// Legendre map from potential derivatives to polymomenta.
///
/// Returns `(p_t, p_x)` with `p_t = phi_x / 2` and
/// `p_x = phi_t / 2 - phi_x^3 / 6`.
pub fn polymomenta_from_derivatives(phi_t: f64, phi_x: f64) -> (f64, f64) {
    let p_t = 0.5 * phi_x;
    let p_x = 0.5 * phi_t - phi_x * phi_x * phi_x / 6.0;
    (p_t, p_x)
}

/// Inverse Legendre map: recovers `(phi_t, phi_x)` from the polymomenta.
pub fn derivatives_from_polymomenta(z: DWTriple) -> (f64, f64) {
    let phi_x = 2.0 * z.p_t;
    let phi_t = 2.0 * z.p_x + (8.0 / 3.0) * z.p_t * z.p_t * z.p_t;
    (phi_t, phi_x)
}

/// Antisymmetric coefficient matrices `(B_x, B_t)` of the matrix form
/// `B_x d_x Z + B_t d_t Z = grad H(Z)`.
pub fn beta_matrices() -> (Mat3, Mat3) {
    let beta_x = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
    let beta_t = [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
    (beta_x, beta_t)
}

fn beta(axis: Axis) -> Mat3 {
    let (bx, bt) = beta_matrices();
    match axis {
        Axis::X => bx,
        Axis::T => bt,
    }
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn delta(a: Axis, b: Axis) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Max-entry residual of the Duffin-Kemmer-Petiau-type relation
/// `B_a B_b B_c + B_c B_b B_a + delta(b,c) B_a + delta(a,b) B_c = 0`.
///
/// Every entry of the matrices is 0 or +-1, so the residual is exact in
/// floating point; all eight axis triples must give exactly zero.
pub fn dkp_residual(a: Axis, b: Axis, c: Axis) -> f64 {
    let (ba, bb, bc) = (beta(a), beta(b), beta(c));
    let abc = mat_mul(&mat_mul(&ba, &bb), &bc);
    let cba = mat_mul(&mat_mul(&bc, &bb), &ba);
    let (dbc, dab) = (delta(b, c), delta(a, b));
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let r = abc[i][j] + cba[i][j] + dbc * ba[i][j] + dab * bc[i][j];
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Directional two-form flux density on a pair of tangent triples.
///
/// `kappa_eval(T, v1, v2) = dp_t ^ dphi` and
/// `kappa_eval(X, v1, v2) = -(dp_x ^ dphi)`, where
/// `da ^ db (v1, v2) = a1 * b2 - a2 * b1`.
pub fn kappa_eval(axis: Axis, v1: DWTriple, v2: DWTriple) -> f64 {
    match axis {
        Axis::T => v1.p_t * v2.phi - v2.p_t * v1.phi,
        Axis::X => -(v1.p_x * v2.phi - v2.p_x * v1.phi),
    }
}
