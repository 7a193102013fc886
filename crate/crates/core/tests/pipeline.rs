//! End-to-end paths through the public API, plus property checks that cross
//! module boundaries.

use condcodes::channels::Received;
use condcodes::decoders::{erasure_decode, exact_error_probability, syndrome};
use condcodes::ensembles::tolerates_erasure;
use condcodes::harness::{ExperimentConfig, ExperimentKind};
use condcodes::{
    BitVec, Channel, CodeEnsemble, ConcatenatedCode, DecodeStatus, EnsembleKind, ExtField, FiniteDistribution,
    LinearCondenser, ReedSolomonCode, RngStream,
};
use proptest::prelude::*;

#[test]
fn erasure_channel_round_trip_through_g_ensemble() {
    let ens = CodeEnsemble::new(EnsembleKind::G, LinearCondenser::linear_hash_family(10, 5).unwrap()).unwrap();
    let bec = Channel::bec(0.2).unwrap();
    let mut rng = RngStream::new(7);
    let (mut ok, mut total) = (0, 0);
    for seed in 0..ens.size().min(64) {
        let code = ens.code(seed).unwrap();
        for _ in 0..20 {
            let msg = rng.bits(code.k());
            let rx = bec.transmit(&code.encode(&msg), &mut rng).unwrap();
            let out = erasure_decode(&code, &rx);
            // Success is exactly the tolerance test, and success means the right message.
            assert_eq!(out.status == DecodeStatus::Success, tolerates_erasure(&code, &rx.erasures));
            if out.status == DecodeStatus::Success {
                assert_eq!(out.message, msg);
                ok += 1;
            }
            total += 1;
        }
    }
    assert!(ok > total / 2, "{ok}/{total}");
}

#[test]
fn confusable_error_dominates_decoder_error() {
    let ens = CodeEnsemble::new(EnsembleKind::F, LinearCondenser::linear_hash_family(8, 5).unwrap()).unwrap();
    let noise = FiniteDistribution::binomial_noise(8, 0.05).unwrap();
    for seed in 0..ens.size() {
        let e = exact_error_probability(&ens.code(seed).unwrap(), &noise).unwrap();
        assert!(e.decoder <= e.confusable + 1e-12);
        assert!((0.0..=1.0).contains(&e.confusable));
    }
}

#[test]
fn concatenated_code_survives_a_quiet_channel() {
    let ens = CodeEnsemble::new(EnsembleKind::G, LinearCondenser::linear_hash_family(10, 6).unwrap()).unwrap();
    let cc = ConcatenatedCode::from_ensemble(&ens, 6, 16, 8).unwrap();
    let mut rng = RngStream::new(3);
    let msg = rng.bits(cc.dimension());
    let word = cc.encode(&msg).unwrap();
    let rx = Received { data: word, erasures: BitVec::zeros(cc.block_len()) };
    let out = condcodes::concat::naive_decode(&cc, &rx, &condcodes::concat::InnerDecoder::Erasure).unwrap();
    assert_eq!(out.message, Some(msg));
}

#[test]
fn config_round_trip_keeps_digest() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::DualityScan);
    cfg.trials = 12;
    cfg.seed = 99;
    let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back.digest(), cfg.digest());
    cfg.seed = 100;
    assert_ne!(back.digest(), cfg.digest());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codewords_have_zero_syndrome(seed in 0u64..256, bits in any::<u64>()) {
        let ens = CodeEnsemble::new(EnsembleKind::F, LinearCondenser::linear_hash_family(8, 4).unwrap()).unwrap();
        let code = ens.code(seed).unwrap();
        let msg = BitVec::from_u64(bits, code.k());
        prop_assert!(syndrome(code.parity(), &code.encode(&msg)).is_zero());
    }

    #[test]
    fn concat_encoding_is_linear(seed in any::<u64>()) {
        let ens = CodeEnsemble::new(EnsembleKind::G, LinearCondenser::linear_hash_family(8, 5).unwrap()).unwrap();
        let cc = ConcatenatedCode::from_ensemble(&ens, 3, 8, 4).unwrap();
        let mut rng = RngStream::new(seed);
        let (a, b) = (rng.bits(cc.dimension()), rng.bits(cc.dimension()));
        let sum = cc.encode(&a.xor(&b)).unwrap();
        prop_assert_eq!(sum, cc.encode(&a).unwrap().xor(&cc.encode(&b).unwrap()));
        prop_assert_eq!(cc.encoding_matrix().unwrap().vec_mul(&a), cc.encode(&a).unwrap());
    }

    #[test]
    fn reed_solomon_corrects_up_to_radius(seed in any::<u64>(), errors in 0usize..=6) {
        let rs = ReedSolomonCode::new(ExtField::new(4).unwrap(), 16, 4).unwrap();
        let mut rng = RngStream::new(seed);
        let msg: Vec<u64> = (0..4).map(|_| rng.below(16)).collect();
        let mut word = rs.encode(&msg).unwrap();
        for i in rand::seq::index::sample(&mut rng, 16, errors) {
            word[i] ^= 1 + rng.below(15);
        }
        prop_assert_eq!(rs.decode(&word).unwrap(), Some(msg));
    }
}
