use criterion::{black_box, criterion_group, criterion_main, Criterion};
use fxvol_bench::synthetic_problem;
use fxvol_core::mcmc::{
    linearize, run_chain, step_latent_x, step_mixture_indicators, MixtureTable, Schedule, Variant,
};
use fxvol_core::model::PriorConfig;
use fxvol_core::portfolio::gmvp_weight;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_ffbs(c: &mut Criterion) {
    let t_len = 10_000;
    let (series, _) = synthetic_problem(t_len, 0);
    let obs = linearize(&series.values);
    let obs_var = vec![1.2; t_len];
    c.bench_function("ffbs_t10k", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| {
            let x = step_latent_x(black_box(&obs), &obs_var, 0.97, 0.02, &mut rng).unwrap();
            black_box(x)
        })
    });
}

fn bench_mixture_indicators(c: &mut Criterion) {
    let t_len = 10_000;
    let (series, _) = synthetic_problem(t_len, 0);
    let y_star = linearize(&series.values);
    let h = vec![-6.0; t_len];
    let table = MixtureTable::ksc();
    c.bench_function("mixture_indicators_t10k", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        b.iter(|| {
            let s = step_mixture_indicators(black_box(&y_star), &h, &table, &mut rng);
            black_box(s)
        })
    });
}

fn bench_full_sweeps(c: &mut Criterion) {
    let (series, design) = synthetic_problem(4 * 288, 60);
    let priors = PriorConfig::default();
    c.bench_function("full_chain_20_sweeps_t1152_m60", |b| {
        b.iter(|| {
            let schedule = Schedule {
                n_iter: 20,
                burn_in: 10,
                thin: 1,
                seed: 3,
            };
            let draws =
                run_chain(black_box(&series), &design, &priors, &schedule, Variant::Full).unwrap();
            black_box(draws.len())
        })
    });
}

fn bench_gmvp(c: &mut Criterion) {
    c.bench_function("gmvp_weight", |b| {
        b.iter(|| {
            let w = gmvp_weight(black_box(0.8), black_box(1.3), black_box(0.4)).unwrap();
            black_box(w)
        })
    });
}

criterion_group!(
    benches,
    bench_ffbs,
    bench_mixture_indicators,
    bench_full_sweeps,
    bench_gmvp
);
criterion_main!(benches);
