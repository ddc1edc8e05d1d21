use core::f64::consts::PI;

use onshell_core::potentials::Potential;
use onshell_core::radial::{
    onshell_t_lm, phase_shift, phase_shift_with, PhaseShiftTable, RadialOptions,
};
use onshell_core::specfun::{bessel_j, bessel_y};

/// s-wave square-well phase shift from the matching condition
/// `K cot(K a) = k cot(k a + eta)`, solved by bisection in `eta`.
fn square_well_s_wave(v0: f64, a: f64, k: f64) -> f64 {
    let kin = (k * k - v0).sqrt();
    let g = |eta: f64| {
        kin * (kin * a).cos() * (k * a + eta).sin() - k * (kin * a).sin() * (k * a + eta).cos()
    };
    // g has exactly one zero per interval of length pi.
    let (mut lo, mut hi) = (-PI / 2.0, PI / 2.0);
    let glo = g(lo);
    assert!(glo * g(hi) <= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) * glo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn same_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b) / PI;
    (d - d.round()).abs() * PI
}

#[test]
fn square_well_matches_bisection_oracle() {
    for (v0, k) in [(-1.0, 1.0), (-1.0, 0.3), (-5.0, 2.0), (2.0, 1.5)] {
        let p = Potential::SquareWell { v0, a: 1.0 };
        let eta = phase_shift(&p, 0, k).unwrap();
        let oracle = square_well_s_wave(v0, 1.0, k);
        assert!(
            same_mod_pi(eta, oracle) < 1e-8,
            "v0={v0} k={k}: {eta} vs {oracle}"
        );
    }
}

#[test]
fn hard_sphere_limit() {
    // Richardson extrapolation in 1/kappa, kappa = sqrt(V0), towards the hard sphere.
    let kappas = [250.0, 500.0, 1000.0];
    for l in 0..3 {
        let etas: Vec<f64> = kappas
            .iter()
            .map(|&kap| {
                phase_shift(
                    &Potential::SquareWell {
                        v0: kap * kap,
                        a: 1.0,
                    },
                    l,
                    1.0,
                )
                .unwrap()
            })
            .collect();
        // Quadratic in h = 1/kappa with nodes h, h/2, h/4.
        let r1 = [2.0 * etas[1] - etas[0], 2.0 * etas[2] - etas[1]];
        let limit = (4.0 * r1[1] - r1[0]) / 3.0;
        let oracle = (bessel_j(l, 1.0).unwrap() / bessel_y(l, 1.0).unwrap()).atan();
        assert!(
            same_mod_pi(limit, oracle) < 1e-6,
            "l={l}: {limit} vs {oracle}"
        );
        if l == 0 {
            assert!(same_mod_pi(limit, -1.0) < 1e-6);
        }
    }
}

#[test]
fn matching_radius_independence() {
    let cases = [
        Potential::SquareWell { v0: -1.0, a: 1.0 },
        Potential::Gaussian { v0: -2.0, a: 1.0 },
        Potential::Exponential { v0: -1.0, a: 0.7 },
        Potential::TruncatedCoulomb {
            v0: -1.0,
            a: 1.0,
            rc: 0.1,
        },
    ];
    for p in cases {
        let support = p.effective_radius();
        for l in [0, 1, 3] {
            let base = RadialOptions {
                r_match: Some(support * 1.01),
                ..Default::default()
            };
            let far = RadialOptions {
                r_match: Some(support * 1.51),
                ..Default::default()
            };
            let a = phase_shift_with(&p, l, 1.2, &base).unwrap();
            let b = phase_shift_with(&p, l, 1.2, &far).unwrap();
            assert!(same_mod_pi(a, b) < 1e-8, "{p:?} l={l}: {a} vs {b}");
        }
    }
}

#[test]
fn higher_partial_waves_of_square_well() {
    // tan eta_l = [k j_l'(ka) j_l(Ka) - K j_l(ka) j_l'(Ka)] / [k y_l'(ka) j_l(Ka) - K y_l(ka) j_l'(Ka)]
    let (v0, a, k): (f64, f64, f64) = (-3.0, 1.0, 1.1);
    let kin = (k * k - v0).sqrt();
    let d = |f: &dyn Fn(usize, f64) -> f64, l: usize, x: f64| l as f64 / x * f(l, x) - f(l + 1, x);
    let j = |l: usize, x: f64| bessel_j(l, x).unwrap();
    let y = |l: usize, x: f64| bessel_y(l, x).unwrap();
    for l in 1..5 {
        let num = k * d(&j, l, k * a) * j(l, kin * a) - kin * j(l, k * a) * d(&j, l, kin * a);
        let den = k * d(&y, l, k * a) * j(l, kin * a) - kin * y(l, k * a) * d(&j, l, kin * a);
        let oracle = (num / den).atan();
        let eta = phase_shift(&Potential::SquareWell { v0, a }, l, k).unwrap();
        assert!(same_mod_pi(eta, oracle) < 1e-8, "l={l}: {eta} vs {oracle}");
    }
}

#[test]
fn levinson_jump_with_one_bound_state() {
    // A well of depth 4 (K a = 2 > pi/2) binds exactly one s state.
    let p = Potential::SquareWell { v0: -4.0, a: 1.0 };
    let momenta: Vec<f64> = (1..=200)
        .map(|i| 0.02 * i as f64)
        .chain([1e-3, 8.0, 12.0, 20.0, 30.0, 100.0, 400.0])
        .collect();
    let table = PhaseShiftTable::build(p, 0, &momenta).unwrap();
    let low = table.get(0, 0);
    let high = *table.entries[0].last().unwrap();
    assert!(high.abs() < 0.1, "high-k branch {high}");
    assert!(
        (low - high - PI).abs() < 0.01,
        "eta(0+) - eta(inf) = {}",
        low - high
    );
}

#[test]
fn onshell_amplitude_is_unitary() {
    let p = Potential::Gaussian { v0: -2.0, a: 1.0 };
    for l in 0..4 {
        for k in [0.2, 1.0, 3.0] {
            let eta = phase_shift(&p, l, k).unwrap();
            let t = onshell_t_lm(eta, k);
            assert!((t.im + k * t.norm_sqr()).abs() < 1e-12, "l={l} k={k}");
        }
    }
}
