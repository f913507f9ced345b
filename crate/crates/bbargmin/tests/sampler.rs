use bbargmin::brownian::{bessel3_running_max, bessel3_tail_min, bm_running_max, simulate_bessel3};
use bbargmin::stats::ks_two_sample;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

const N: usize = 4000;

fn rng(i: usize, tag: u64) -> SmallRng {
    SmallRng::seed_from_u64(tag.wrapping_mul(1_000_003) + i as u64)
}

#[test]
fn pruned_tail_min_matches_full_simulation() {
    let (dt, horizon) = (1e-2, 8.0);
    let full: Vec<f64> = (0..N)
        .map(|i| {
            let p = simulate_bessel3(dt, horizon, &mut rng(i, 1)).unwrap();
            p.values[100..]
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let pruned: Vec<f64> = (0..N)
        .map(|i| bessel3_tail_min(1.0, horizon, dt, &mut rng(i, 2)).unwrap())
        .collect();
    assert!(ks_two_sample(&full, &pruned).passes(0.01));
}

#[test]
fn pruned_running_max_matches_full_simulation() {
    let dt = 1e-3;
    let full: Vec<f64> = (0..N)
        .map(|i| {
            let p = simulate_bessel3(dt, 1.0, &mut rng(i, 3)).unwrap();
            p.values.iter().cloned().fold(0.0, f64::max)
        })
        .collect();
    let pruned: Vec<f64> = (0..N)
        .map(|i| bessel3_running_max(1.0, dt, &mut rng(i, 4)).unwrap())
        .collect();
    assert!(ks_two_sample(&full, &pruned).passes(0.01));
}

#[test]
fn pruned_bm_max_matches_random_walk() {
    let dt: f64 = 1e-3;
    let full: Vec<f64> = (0..N)
        .map(|i| {
            let mut r = rng(i, 5);
            let (mut w, mut best) = (0.0f64, 0.0f64);
            for _ in 0..1000 {
                w += dt.sqrt() * r.sample::<f64, _>(StandardNormal);
                best = best.max(w);
            }
            best
        })
        .collect();
    let pruned: Vec<f64> = (0..N)
        .map(|i| bm_running_max(1.0, dt, &mut rng(i, 6)).unwrap())
        .collect();
    assert!(ks_two_sample(&full, &pruned).passes(0.01));
}
