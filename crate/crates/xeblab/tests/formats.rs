//! Round trips and error paths of the file formats and reports.

use proptest::prelude::*;
use xeblab::format::{parse_circuit, parse_samples, read_distribution, serialize_circuit, serialize_samples, write_distribution};
use xeblab::report::{self, Fields, Format, TrialRow};
use xeblab::ParseError;
use xeblab_core::circuit::{append_not_mask, sample_circuit, CircuitDistribution};
use xeblab_core::simulator::full_distribution;
use xeblab_core::xeb::check_xhog;
use xeblab_core::{Circuit, SampleSet};

fn ensemble(n: usize, depth: usize, grid: bool, mask: bool) -> CircuitDistribution {
    let dist = if grid && n % 2 == 0 { CircuitDistribution::grid(2, n / 2, depth) } else { CircuitDistribution::chain(n, depth) };
    if mask {
        dist
    } else {
        dist.without_mask()
    }
}

#[test]
fn thousand_random_circuits_round_trip() {
    for seed in 0..1000u64 {
        let dist = ensemble(1 + (seed % 8) as usize, (seed % 7) as usize, seed % 3 == 0, seed % 2 == 0);
        let c = sample_circuit(&dist, seed).unwrap();
        assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c, "seed {seed}");
    }
}

proptest! {
    #[test]
    fn circuits_round_trip(n in 1usize..=8, depth in 0usize..8, grid: bool, mask: bool, seed: u64, z: u64) {
        let c = sample_circuit(&ensemble(n, depth, grid, mask), seed).unwrap();
        let c = append_not_mask(&c, z & ((1 << n) - 1)).unwrap();
        let text = serialize_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(serialize_circuit(&back), text);
    }

    #[test]
    fn sample_sets_round_trip(n in 1usize..=63, raw in prop::collection::vec(any::<u64>(), 1..50), distinct: bool) {
        let mask = if n == 63 { u64::MAX >> 1 } else { (1u64 << n) - 1 };
        let mut samples: Vec<u64> = raw.iter().map(|z| z & mask).collect();
        if distinct {
            samples.sort_unstable();
            samples.dedup();
        }
        let s = SampleSet::new(n, samples, distinct).unwrap();
        prop_assert_eq!(parse_samples(&serialize_samples(&s)).unwrap(), s);
    }

    #[test]
    fn trial_rows_round_trip(rows in prop::collection::vec((any::<u64>(), 0.0f64..1.0, -1.0f64..1.0, any::<f64>()), 0..20)) {
        let rows: Vec<TrialRow> = rows.into_iter().map(|(seed, p0, p, gain)| TrialRow { seed, p0, p, gain }).collect();
        let back = report::parse_trials_csv(&report::trials_csv(rows.iter().copied())).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            prop_assert_eq!(a.seed, b.seed);
            prop_assert_eq!(a.p0.to_bits(), b.p0.to_bits());
            prop_assert_eq!(a.p.to_bits(), b.p.to_bits());
            prop_assert!(a.gain.to_bits() == b.gain.to_bits() || (a.gain.is_nan() && b.gain.is_nan()));
        }
    }
}

#[test]
fn header_only_text_is_the_identity() {
    let c = parse_circuit("qubits 3\nseed 12\n").unwrap();
    assert_eq!(c, Circuit::new(3, 12, Vec::new()).unwrap());
}

fn line_of(err: ParseError) -> usize {
    match err {
        ParseError::Line { line, .. } => line,
        other => panic!("expected a line error, got {other}"),
    }
}

#[test]
fn malformed_gate_lines_name_the_line() {
    let base = "qubits 2\nseed 0\n0 X 0\n";
    assert_eq!(line_of(parse_circuit(&format!("{base}1 CZ 0\n")).unwrap_err()), 4);
    assert_eq!(line_of(parse_circuit(&format!("{base}# note\n1 SWAP 0 1\n")).unwrap_err()), 5);
    assert_eq!(line_of(parse_circuit(&format!("{base}1 X 2\n")).unwrap_err()), 4);
    assert_eq!(line_of(parse_circuit(&format!("{base}x X 1\n")).unwrap_err()), 4);
    assert_eq!(line_of(parse_circuit(&format!("{base}1 U 0 1 0 0 0 0 0 1 nan-ish\n")).unwrap_err()), 4);
    assert_eq!(line_of(parse_circuit("seed 0\nqubits 2\n").unwrap_err()), 1);
    let msg = parse_circuit(&format!("{base}1 CZ 0\n")).unwrap_err().to_string();
    assert!(msg.starts_with("line 4:"), "{msg}");
}

#[test]
fn non_unitary_gate_is_rejected() {
    let err = parse_circuit("qubits 1\nseed 0\n0 U 0 2 0 0 0 0 0 1 0\n").unwrap_err();
    assert!(matches!(err, ParseError::Invalid(_)), "{err}");
}

#[test]
fn malformed_sample_files() {
    assert_eq!(line_of(parse_samples("n 3 k 2 distinct 1\n010\n01\n").unwrap_err()), 3);
    assert_eq!(line_of(parse_samples("n 3 k 2 distinct 1\n010\n").unwrap_err()), 2);
    assert_eq!(line_of(parse_samples("n 3 k 1 distinct 2\n010\n").unwrap_err()), 1);
    assert!(matches!(parse_samples("n 3 k 2 distinct 1\n010\n010\n"), Err(ParseError::Invalid(_))));
    let s = parse_samples("n 4 k 2 distinct 0 # header\n0011\n\n1000 # top qubit set\n").unwrap();
    assert_eq!(s.samples(), &[0b0011, 0b1000]);
}

#[test]
fn distribution_dump_round_trips() {
    let dist = full_distribution(&sample_circuit(&CircuitDistribution::chain(5, 4), 2).unwrap()).unwrap();
    let mut bytes = Vec::new();
    write_distribution(&dist, &mut bytes).unwrap();
    assert_eq!(bytes.len(), 8 + 8 * 32);
    assert_eq!(&bytes[..8], &5u64.to_le_bytes());
    assert_eq!(read_distribution(bytes.as_slice()).unwrap(), dist);
    assert!(read_distribution(&bytes[..100]).is_err());
}

#[test]
fn xeb_report_round_trips_in_both_renderings() {
    let c = sample_circuit(&CircuitDistribution::chain(6, 5), 4).unwrap();
    let s = xeblab_core::samplers::sample_ideal(&c, 20, 1, true).unwrap();
    let r = check_xhog(&c, &s, 1.5).unwrap();
    let fields = report::xeb_fields(&r);
    let text = fields.render(Format::Text);
    let csv = fields.render(Format::Csv);
    assert!(csv.starts_with("n,k,score,b_implied,threshold_b,xhog_pass,fidelity_estimate,seed\n"));
    assert_eq!(report::parse_xeb_report(&Fields::parse_key_values(&text).unwrap()).unwrap(), r);
    assert_eq!(report::parse_xeb_report(&Fields::parse_csv(&csv).unwrap()).unwrap(), r);
}
