//! Discrete two-form conservation across cells: the structural property
//! the box scheme is built around. Tangent pairs propagated through the
//! linearized scheme satisfy the per-cell flux balance to rounding level;
//! arbitrary (non-propagated) tangents do not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spe_core::march::{propagate_tangent, simulate_trace, SchemeTrace, TangentTrace};
use spe_core::metrics::msl_residual;
use spe_core::soliton::{sakovich_profile, SolitonParams};
use spe_core::state::TangentColumn;
use spe_core::GridSpec;

const BOUNDARY_TOL: f64 = 1e-4;

fn pulse_base() -> (GridSpec, SchemeTrace) {
    let grid = GridSpec::new(100.0, 256, 0.05, 40).expect("valid grid");
    let p = SolitonParams::new(0.2).expect("valid m");
    let u0 = sakovich_profile(&p, &grid, 0.0, BOUNDARY_TOL).expect("pulse fits window");
    let trace = simulate_trace(&grid, &u0.u, BOUNDARY_TOL).expect("base run");
    (grid, trace)
}

fn random_seed_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    *row.last_mut().expect("nonempty row") = 0.0;
    row
}

fn propagated(grid: &GridSpec, trace: &SchemeTrace, seed: u64) -> TangentTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_p_t = random_seed_row(&mut rng, grid.n_x() + 1);
    let d_phi = random_seed_row(&mut rng, grid.n_x() + 1);
    propagate_tangent(grid, trace, &d_p_t, &d_phi).expect("tangent run")
}

#[test]
fn propagated_tangents_conserve_the_two_form_flux() {
    let (grid, trace) = pulse_base();
    let v1 = propagated(&grid, &trace, 101);
    let v2 = propagated(&grid, &trace, 202);
    let r = msl_residual(&trace, &v1, &v2, &grid).expect("matching shapes");
    assert!(
        r < 1e-12,
        "propagated tangents must satisfy the discrete law, residual {r:e}"
    );
}

#[test]
fn non_propagated_tangents_break_the_law() {
    let (grid, trace) = pulse_base();
    let v1 = propagated(&grid, &trace, 303);
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let noise = TangentTrace {
        columns: (0..=grid.n_x())
            .map(|i| {
                let mut col = TangentColumn::zeros(i, grid.n_t());
                for v in col
                    .d_p_t
                    .iter_mut()
                    .chain(col.d_phi.iter_mut())
                    .chain(col.d_s_x.iter_mut())
                {
                    *v = rng.gen_range(-1.0..1.0);
                }
                col
            })
            .collect(),
    };
    let r = msl_residual(&trace, &v1, &noise, &grid).expect("matching shapes");
    assert!(
        r > 1e-3,
        "off-shell tangents should badly violate the law, residual {r:e}"
    );
}

#[test]
fn normalized_residual_is_scale_invariant() {
    let (grid, trace) = pulse_base();
    let v1 = propagated(&grid, &trace, 505);
    let v2 = propagated(&grid, &trace, 606);
    let r = msl_residual(&trace, &v1, &v2, &grid).unwrap();

    let scaled = TangentTrace {
        columns: v1
            .columns
            .iter()
            .map(|c| TangentColumn {
                i: c.i,
                d_p_t: c.d_p_t.iter().map(|v| 8.0 * v).collect(),
                d_phi: c.d_phi.iter().map(|v| 8.0 * v).collect(),
                d_s_x: c.d_s_x.iter().map(|v| 8.0 * v).collect(),
            })
            .collect(),
    };
    let r_scaled = msl_residual(&trace, &scaled, &v2, &grid).unwrap();
    let gap = (r - r_scaled).abs();
    assert!(
        gap <= 1e-12 * r.max(1e-300),
        "normalization must cancel tangent scaling: {r:e} vs {r_scaled:e}"
    );
}

#[test]
fn tangent_propagation_is_linear() {
    let (grid, trace) = pulse_base();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let a_pt = random_seed_row(&mut rng, grid.n_x() + 1);
    let a_phi = random_seed_row(&mut rng, grid.n_x() + 1);
    let b_pt = random_seed_row(&mut rng, grid.n_x() + 1);
    let b_phi = random_seed_row(&mut rng, grid.n_x() + 1);

    let ta = propagate_tangent(&grid, &trace, &a_pt, &a_phi).unwrap();
    let tb = propagate_tangent(&grid, &trace, &b_pt, &b_phi).unwrap();

    let sum_pt: Vec<f64> = a_pt.iter().zip(&b_pt).map(|(x, y)| 2.5 * x + y).collect();
    let sum_phi: Vec<f64> = a_phi.iter().zip(&b_phi).map(|(x, y)| 2.5 * x + y).collect();
    let tsum = propagate_tangent(&grid, &trace, &sum_pt, &sum_phi).unwrap();

    let scale = ta.magnitude().max(tb.magnitude()).max(1.0);
    for i in 0..=grid.n_x() {
        let (ca, cb, cs) = (&ta.columns[i], &tb.columns[i], &tsum.columns[i]);
        for j in 0..=grid.n_t() {
            let expect = 2.5 * ca.d_p_t[j] + cb.d_p_t[j];
            assert!(
                (cs.d_p_t[j] - expect).abs() <= 1e-10 * scale,
                "linearity broke at column {i}, level {j}"
            );
        }
    }
}
