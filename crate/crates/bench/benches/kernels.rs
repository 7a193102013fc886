use condcodes::decoders::{brute_force_decode, erasure_decode, exact_error_probability};
use condcodes::gf2::rank_u64;
use condcodes::{
    BitVec, Channel, CodeEnsemble, ConcatenatedCode, EnsembleKind, ExtField, FiniteDistribution, FlatDistribution,
    LinearCondenser, ReedSolomonCode, RngStream,
};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use std::hint::black_box;

fn gf2(c: &mut Criterion) {
    let mut rng = RngStream::new(1);
    let rows: Vec<u64> = (0..32).map(|_| rng.gen::<u64>() & 0xffff_ffff).collect();
    c.bench_function("rank_u64 32x32", |b| b.iter(|| rank_u64(black_box(&rows))));
    let f = ExtField::new(16).unwrap();
    c.bench_function("gf(2^16) mul", |b| b.iter(|| f.mul(black_box(0x1234), black_box(0xbeef))));
    c.bench_function("gf(2^16) inv", |b| b.iter(|| f.inv(black_box(0x1234))));
}

fn decoders(c: &mut Criterion) {
    let ens = CodeEnsemble::new(EnsembleKind::G, LinearCondenser::linear_hash_family(12, 6).unwrap()).unwrap();
    let code = ens.code(5).unwrap();
    let bec = Channel::bec(0.3).unwrap();
    let mut rng = RngStream::new(2);
    c.bench_function("erasure_decode n=12", |b| {
        b.iter_batched(
            || bec.transmit(&code.encode(&rng.bits(code.k())), &mut rng).unwrap(),
            |rx| erasure_decode(&code, &rx),
            BatchSize::SmallInput,
        )
    });
    let sphere = FlatDistribution::hamming_sphere(12, 2).unwrap();
    let y = BitVec::from_u64(0b1000_0001_0000, 12);
    c.bench_function("brute_force_decode n=12 w=2", |b| {
        b.iter(|| brute_force_decode(&code, black_box(&y), &sphere).unwrap())
    });
    let noise = FiniteDistribution::binomial_noise(12, 0.05).unwrap();
    c.bench_function("exact_error_probability n=12", |b| b.iter(|| exact_error_probability(&code, &noise).unwrap()));
}

fn outer(c: &mut Criterion) {
    let rs = ReedSolomonCode::new(ExtField::new(6).unwrap(), 64, 48).unwrap();
    let mut rng = RngStream::new(3);
    let msg: Vec<u64> = (0..48).map(|_| rng.below(64)).collect();
    let mut word = rs.encode(&msg).unwrap();
    for i in 0..8 {
        word[i * 7] ^= 5;
    }
    c.bench_function("reed_solomon decode s=64 k=48 e=8", |b| b.iter(|| rs.decode(black_box(&word)).unwrap()));

    let ens = CodeEnsemble::new(EnsembleKind::G, LinearCondenser::linear_hash_family(10, 6).unwrap()).unwrap();
    let cc = ConcatenatedCode::from_ensemble(&ens, 6, 32, 24).unwrap();
    let m = rng.bits(cc.dimension());
    c.bench_function("concat encode s=32", |b| b.iter(|| cc.encode(black_box(&m)).unwrap()));
}

criterion_group!(benches, gf2, decoders, outer);
criterion_main!(benches);
