use leo_handover::channel_g2s::ChannelParamTable;
use leo_handover::channel_isl::IslConfig;
use leo_handover::cli::SAMPLE_TABLE;
use leo_handover::orbital::Satellite;
use leo_handover::relay::RelayStrategy;
use leo_handover::sim::{estimate_bler, estimate_curves, with_threads, IslBand, PassSimulator, Scenario, Variant};

fn table() -> ChannelParamTable {
    ChannelParamTable::parse(SAMPLE_TABLE, "suburban").unwrap()
}

fn small(m: u32, blocks: usize) -> Scenario {
    let mut s = Scenario::reference(m);
    s.blocks_per_pass = blocks;
    s
}

fn all_variants(p_dbw: f64) -> Vec<Variant> {
    let isl = IslConfig::optical(p_dbw, 0.0);
    RelayStrategy::ALL
        .iter()
        .map(|&s| Variant::new(s, s.uses_isl().then_some(isl)).unwrap())
        .collect()
}

#[test]
fn huge_reference_snr_decodes_every_block() {
    let t = table();
    let sc = small(42, 100);
    let sim = PassSimulator::new(&sc, &t, 5).unwrap();
    let variants = all_variants(20.0);
    let requests: Vec<_> = (0..variants.len()).map(|v| (v, 200.0)).collect();
    for trial in 0..3 {
        for errs in sim.trial_errors(trial, &variants, &requests) {
            assert_eq!(errs.len(), 100);
            assert!(errs.iter().all(|e| !e));
        }
    }
}

#[test]
fn zero_reference_snr_fails_every_block() {
    let t = table();
    let sc = small(63, 60);
    let sim = PassSimulator::new(&sc, &t, 5).unwrap();
    let mut variants = all_variants(20.0);
    // Even a perfect ISL cannot help when the relay heard nothing.
    variants.push(Variant::new(RelayStrategy::Df, Some(IslConfig::optical(200.0, 0.0))).unwrap());
    let requests: Vec<_> = (0..variants.len()).map(|v| (v, f64::NEG_INFINITY)).collect();
    for errs in sim.trial_errors(0, &variants, &requests) {
        assert!(errs.iter().all(|&e| e));
    }
}

#[test]
fn mid_pass_elevation_depends_on_constellation_size() {
    let t = table();
    for (m, expected) in [(42, 45), (63, 60)] {
        let sc = small(m, 500);
        let sim = PassSimulator::new(&sc, &t, 1).unwrap();
        let pass = sim.pass();
        let c = pass.crossover_index();
        assert!(c > 0 && c < pass.len() - 1, "crossover inside the window for M={m}");
        for sat in [Satellite::Serving, Satellite::Target] {
            assert_eq!(pass.quantized_elevation(sat, c), expected, "M={m} {sat:?}");
        }
    }
}

#[test]
fn requests_share_draws_across_variants_and_snr_points() {
    let t = table();
    let sc = small(42, 80);
    let sim = PassSimulator::new(&sc, &t, 11).unwrap();
    let variants = all_variants(10.0);
    let requests: Vec<_> = [4.0, 12.0, 20.0]
        .iter()
        .flat_map(|&s| (0..variants.len()).map(move |v| (v, s)))
        .collect();
    let together = sim.trial_errors(2, &variants, &requests);
    for (k, &(v, snr)) in requests.iter().enumerate() {
        assert_eq!(sim.run_pass(2, &variants[v], snr), together[k], "variant {v} at {snr} dB");
    }
}

#[test]
fn thread_count_does_not_change_counts() {
    let t = table();
    let sc = small(42, 50);
    let sim = PassSimulator::new(&sc, &t, 13).unwrap();
    let variants = all_variants(10.0);
    let snrs = [0.0, 8.0, 16.0];
    let one = with_threads(Some(1), || estimate_curves(&sim, &variants, &snrs, 6)).unwrap();
    let three = with_threads(Some(3), || estimate_curves(&sim, &variants, &snrs, 6)).unwrap();
    assert_eq!(one, three);
}

#[test]
fn noiseless_af_matches_af_at_very_high_isl_power() {
    let t = table();
    let sc = small(42, 200);
    let sim = PassSimulator::new(&sc, &t, 17).unwrap();
    let naf = Variant::new(RelayStrategy::NoiselessAf, None).unwrap();
    let af = Variant::new(RelayStrategy::Af, Some(IslBand::optical().config(150.0, 0.0).unwrap())).unwrap();
    for snr in [6.0, 14.0] {
        let a = estimate_bler(&sim, &naf, snr, 10);
        let b = estimate_bler(&sim, &af, snr, 10);
        let se = a.stderr.max(b.stderr).max(1e-12);
        assert!((a.bler - b.bler).abs() <= 2.0 * se, "{a:?} vs {b:?}");
    }
}

#[test]
fn soft_handover_ordering_on_paired_draws() {
    let t = table();
    let sc = small(42, 200);
    let sim = PassSimulator::new(&sc, &t, 19).unwrap();
    let isl = IslConfig::optical(10.0, 0.0);
    let v = |s: RelayStrategy| Variant::new(s, s.uses_isl().then_some(isl)).unwrap();
    let variants = [
        v(RelayStrategy::HardHandover),
        v(RelayStrategy::Af),
        v(RelayStrategy::NoiselessAf),
        v(RelayStrategy::Df),
        v(RelayStrategy::NoiselessDf),
    ];
    let snrs: Vec<f64> = (0..=30).step_by(3).map(f64::from).collect();
    let curves = estimate_curves(&sim, &variants, &snrs, 5);
    for i in 0..snrs.len() {
        let b: Vec<f64> = curves.iter().map(|c| c[i].bler).collect();
        assert!(b[1] <= b[0], "AF <= HH at {} dB", snrs[i]);
        assert!(b[2] <= b[1], "noiseless AF <= AF at {} dB", snrs[i]);
        // A DF relay only adds when it decodes, and noiseless DF needs one success.
        assert!(b[3] <= b[0], "DF <= HH at {} dB", snrs[i]);
        assert!(b[4] <= b[3], "noiseless DF <= DF at {} dB", snrs[i]);
    }
}

#[test]
fn isl_misalignment_only_hurts() {
    let t = table();
    let sc = small(42, 200);
    let sim = PassSimulator::new(&sc, &t, 23).unwrap();
    let band = IslBand::optical();
    let variants: Vec<Variant> = [0.0, 1e-10, 1e-9, 1e-8, 1e-6]
        .iter()
        .map(|&var| Variant::new(RelayStrategy::Af, Some(band.config(20.0, var).unwrap())).unwrap())
        .collect();
    let curves = estimate_curves(&sim, &variants, &[18.0, 24.0], 5);
    for w in curves.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            assert!(a.bler <= b.bler, "{a:?} then {b:?}");
        }
    }
}
