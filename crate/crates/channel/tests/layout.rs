//! Layout round-trips and energy conservation across the tone grid.

use channel::{
    flat_index, gen_realization, tone_grid, unflatten_index, PropagationConfig,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn index_roundtrip(m in 1usize..16, tone in 0usize..16, ant_frac in 0usize..16) {
        let ant = ant_frac % m;
        let idx = flat_index(m, tone, ant);
        prop_assert_eq!(unflatten_index(m, idx), (tone, ant));
    }
}

#[test]
fn sum_over_tones_conserves_energy() {
    // sum_n E|H(f_n)|^2 = N * path gain, pooled over antennas and trials
    let n = 4usize;
    let base = PropagationConfig {
        n_tones: n,
        n_antennas: 2,
        ..Default::default()
    };
    let lambda = gen_realization(&base).unwrap().lambda(0);
    let trials = 3000;
    let mut acc = 0.0;
    for seed in 0..trials {
        let cfg = PropagationConfig {
            seed,
            ..base.clone()
        };
        let r = gen_realization(&cfg).unwrap();
        acc += r.h(0).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    let mean = acc / (trials as f64 * 2.0); // per antenna
    let expect = n as f64 * lambda;
    assert!(
        (mean - expect).abs() / expect < 0.03,
        "mean {mean:.3e} vs {expect:.3e}"
    );
}

#[test]
fn grid_matches_layout_dimensions() {
    let cfg = PropagationConfig {
        n_tones: 5,
        n_antennas: 3,
        ..Default::default()
    };
    let grid = tone_grid(&cfg).unwrap();
    let r = gen_realization(&cfg).unwrap();
    assert_eq!(grid.len(), 5);
    assert_eq!(r.h(0).len(), 15);
}
