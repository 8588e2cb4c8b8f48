use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use polarfc::sim::{decoder_rng, trial_input};
use polarfc::{
    build_hypothesis, check_hypothesis, de_run, decode_sc, decode_with_fc, CodeSpec,
    ConstraintCache, CrcKind, DeDecoder, Engine, ReliabilityProfile, SearchOptions,
};

fn nr_code() -> CodeSpec {
    CodeSpec::nr(6, 32, &ReliabilityProfile::nr(), CrcKind::Nr11.outer_code()).unwrap()
}

fn hypothesis_checks(c: &mut Criterion) {
    let spec = nr_code();
    let cache = ConstraintCache::new(&spec);
    let (a, _, y) = trial_input(&spec, 0.4, 7, 0).unwrap();
    let (u, _) = spec.encode(&a).unwrap();
    let i = spec.info_set()[spec.dimension() / 2];
    let hyp = build_hypothesis(&spec, &u.bits()[..i], i, 0).unwrap();
    for (name, engine) in [("scc", Engine::Scc), ("bpscc5", Engine::BpScc { i_max: 5 })] {
        c.bench_function(&format!("check_{name}"), |b| {
            b.iter(|| {
                check_hypothesis(&spec, &cache, black_box(&y), &hyp, engine.options()).unwrap()
            })
        });
    }
}

fn decoders(c: &mut Criterion) {
    let spec = nr_code();
    let cache = ConstraintCache::new(&spec);
    let inputs: Vec<_> = (0..64)
        .map(|k| trial_input(&spec, 0.45, 11, k).unwrap().2)
        .collect();
    c.bench_function("decode_sc", |b| {
        let mut k = 0;
        b.iter(|| {
            k = (k + 1) % inputs.len();
            decode_sc(&spec, &inputs[k], &mut decoder_rng(11, k as u64)).unwrap()
        })
    });
    let sbj = SearchOptions {
        engine: Engine::BpScc { i_max: 5 },
        sbj: true,
        max_visits: None,
    };
    c.bench_function("decode_bpscc_sbj5", |b| {
        b.iter_batched(
            || {
                (0..inputs.len())
                    .map(|k| decoder_rng(11, k as u64))
                    .collect::<Vec<_>>()
            },
            |mut rngs| {
                for (y, rng) in inputs.iter().zip(rngs.iter_mut()) {
                    black_box(decode_with_fc(&spec, &cache, y, sbj, rng).unwrap());
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn density_evolution(c: &mut Criterion) {
    let spec = nr_code();
    let cache = ConstraintCache::new(&spec);
    c.bench_function("de_bpscc1", |b| {
        b.iter(|| de_run(&spec, &cache, DeDecoder::BpScc1, black_box(0.45)).unwrap())
    });
}

fn gf2(c: &mut Criterion) {
    let spec = CodeSpec::nr(
        8,
        128,
        &ReliabilityProfile::nr(),
        CrcKind::Nr11.outer_code(),
    )
    .unwrap();
    let g = spec.generator();
    c.bench_function("tg_product_n256", |b| {
        b.iter(|| spec.precoder().mat_mul(black_box(&g)).unwrap())
    });
    c.bench_function("rank_n256", |b| b.iter(|| black_box(&g).rank()));
}

criterion_group!(benches, hypothesis_checks, decoders, density_evolution, gf2);
criterion_main!(benches);
