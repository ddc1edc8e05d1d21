use core::f64::consts::PI;

use onshell_core::greens::ComplexEnergy;
use onshell_core::lippmann::{
    solve_offshell_t, suggest_p_max, vl_kernel, GridSpec, KernelMatrices, MomentumGrid, CONVENTION,
};
use onshell_core::potentials::Potential;
use onshell_core::radial::{onshell_t_lm, phase_shift};

const WELL: Potential = Potential::SquareWell { v0: -1.0, a: 1.0 };

fn grid_for(p: &Potential, k0: f64, eps: f64, p_max: f64) -> MomentumGrid {
    MomentumGrid::new(k0, GridSpec::for_energy(k0, eps, p_max, p.range())).unwrap()
}

#[test]
fn square_well_s_wave_kernel_closed_form() {
    let v = vl_kernel(&WELL, 0, 1.0, 1.0).unwrap();
    // j_0(r)^2 r^2 = sin^2 r, and int_0^1 sin^2 r dr = (1 - sin 1 cos 1) / 2.
    let expect = (2.0 / PI) * -1.0 * (1.0 - 1f64.sin() * 1f64.cos()) / 2.0;
    assert!((v - expect).abs() < 1e-13, "{v} vs {expect}");
    let a = vl_kernel(&WELL, 2, 0.7, 3.1).unwrap();
    let b = vl_kernel(&WELL, 2, 3.1, 0.7).unwrap();
    assert!((a - b).abs() < 1e-15);
}

#[test]
fn kernel_matrices_agree_with_adaptive_kernel() {
    let p = Potential::Exponential { v0: -1.5, a: 0.7 };
    let momenta = [0.3, 1.0, 4.5, 17.0];
    let km = KernelMatrices::build(&p, 3, &momenta).unwrap();
    for l in 0..=3 {
        for a in 0..4 {
            for b in 0..4 {
                let v = vl_kernel(&p, l, momenta[a], momenta[b]).unwrap();
                assert!((km.get(l, a, b) - v).abs() < 1e-11, "l={l} ({a},{b})");
            }
        }
    }
}

#[test]
fn weak_coupling_reduces_to_born() {
    let lambda = 1e-4;
    let p = Potential::Gaussian {
        v0: -1.0 * lambda,
        a: 1.0,
    };
    let z = ComplexEnergy::new(1.0, 0.05).unwrap();
    let grid = grid_for(&p, 1.0, 0.05, 12.0);
    let momenta = grid.augmented();
    for l in 0..3 {
        let t = solve_offshell_t(&p, l, &z, &grid).unwrap();
        let unit = Potential::Gaussian { v0: -1.0, a: 1.0 };
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &(a, b) in &[
            (0usize, 0usize),
            (5, 9),
            (momenta.len() - 1, momenta.len() - 1),
            (12, 3),
        ] {
            let v = vl_kernel(&unit, l, momenta[a], momenta[b]).unwrap();
            worst = worst.max((t.get(a, b) / lambda - v).norm());
            scale = scale.max(v.abs());
        }
        assert!(
            worst < 10.0 * lambda * scale,
            "l={l}: {worst} vs scale {scale}"
        );
    }
}

fn onshell_pv(
    p: &Potential,
    l: usize,
    k0: f64,
    per_panel: usize,
    p_max: f64,
) -> onshell_core::Complex64 {
    let z = ComplexEnergy::on_shell(k0).unwrap();
    let mut spec = GridSpec::for_energy(k0, 0.0, p_max, p.range());
    spec.per_panel = per_panel;
    let grid = MomentumGrid::new(k0, spec).unwrap();
    solve_offshell_t(p, l, &z, &grid).unwrap().onshell()
}

#[test]
fn principal_value_matches_phase_shift() {
    for (p, l, k0) in [
        (WELL, 0, 1.0),
        (WELL, 1, 1.0),
        (Potential::Gaussian { v0: -2.0, a: 1.0 }, 0, 1.3),
        (Potential::Gaussian { v0: -2.0, a: 1.0 }, 2, 0.8),
    ] {
        let t = onshell_pv(&p, l, k0, 12, 60.0);
        let eta = phase_shift(&p, l, k0).unwrap();
        let expect = CONVENTION * onshell_t_lm(eta, k0);
        assert!((t - expect).norm() < 1e-4, "{p:?} l={l}: {t} vs {expect}");
    }
}

#[test]
fn offshell_table_is_symmetric() {
    let p = Potential::Exponential { v0: -2.0, a: 0.5 };
    for eps in [0.0, 0.1] {
        let z = ComplexEnergy::new(1.1, eps).unwrap();
        let grid = grid_for(&p, 1.1, eps.max(0.05), 25.0);
        for l in 0..3 {
            let t = solve_offshell_t(&p, l, &z, &grid).unwrap();
            let mut worst: f64 = 0.0;
            for a in 0..t.len() {
                for b in 0..t.len() {
                    worst = worst.max((t.get(a, b) - t.get(b, a)).norm());
                }
            }
            assert!(worst <= 1e-10 * t.values.max_abs());
        }
    }
}

#[test]
fn eps_continuity_near_shell() {
    let p = Potential::Gaussian { v0: -2.0, a: 1.0 };
    let k0 = 1.0;
    let grid = grid_for(&p, k0, 0.025, 14.0);
    let km = KernelMatrices::build(&p, 0, &grid.augmented()).unwrap();
    let solve = |eps: f64| {
        let z = ComplexEnergy::new(k0, eps).unwrap();
        onshell_core::lippmann::solve_with_kernels(&km, 0, &z, &grid).unwrap()
    };
    let ts: Vec<_> = [0.1, 0.05, 0.025, 0.0].iter().map(|&e| solve(e)).collect();
    let near: Vec<usize> = (0..grid.len())
        .filter(|&i| (grid.nodes[i] - k0).abs() < 0.3)
        .chain([grid.len()])
        .collect();
    let sup = |a: usize, b: usize| {
        let mut m: f64 = 0.0;
        for &i in &near {
            m = m.max((ts[a].get(i, grid.len()) - ts[b].get(i, grid.len())).norm());
        }
        m
    };
    let d1 = sup(0, 1);
    let d2 = sup(1, 2);
    assert!(d2 < 0.7 * d1, "{d1} {d2}");
    // Linear in eps: the ratio of successive differences approaches 1/2.
    assert!((d2 / d1 - 0.5).abs() < 0.1, "{}", d2 / d1);
    // And the boundary value is approached at the same rate.
    assert!(sup(2, 3) < 1.5 * d2);
}

#[test]
fn grid_refinement_is_converged() {
    let p = Potential::Gaussian { v0: -2.0, a: 1.0 };
    let coarse = onshell_pv(&p, 0, 1.0, 10, 14.0);
    let fine = onshell_pv(&p, 0, 1.0, 20, 14.0);
    assert!((coarse - fine).norm() < 1e-5, "{}", (coarse - fine).norm());
    let coarse = onshell_pv(&WELL, 0, 1.0, 10, 40.0);
    let fine = onshell_pv(&WELL, 0, 1.0, 20, 40.0);
    assert!((coarse - fine).norm() < 1e-5, "{}", (coarse - fine).norm());
}

#[test]
fn unitarity_on_shell() {
    let p = Potential::Gaussian { v0: -2.0, a: 1.0 };
    let k0 = 1.2;
    let t = onshell_pv(&p, 0, k0, 10, 14.0) / CONVENTION;
    assert!((t.im + k0 * t.norm_sqr()).abs() < 1e-4);
}

#[test]
fn p_max_suggestion_decays() {
    let p = Potential::Gaussian { v0: -2.0, a: 1.0 };
    let (pm, resid) = suggest_p_max(&p, 2, 1.0, 1e-10, 60.0).unwrap();
    assert!(pm < 60.0 && resid < 1e-10, "{pm} {resid}");
    // Square wells decay algebraically, so the cap is reached.
    let (pm, resid) = suggest_p_max(&WELL, 0, 1.0, 1e-10, 40.0).unwrap();
    assert_eq!(pm, 40.0);
    assert!(resid > 1e-10);
}
