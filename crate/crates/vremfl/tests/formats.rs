use proptest::prelude::*;
use vremfl::formats::*;
use vremfl_core::fl::gen_synthetic;
use vremfl_core::mobility::{interpolate_traces, synth_trajectories, MobilityConfig};
use vremfl_core::rem::{BitrateTable, GridSpec, RemKind, SinrGrid};
use vremfl_core::scheduler::Policy;
use vremfl_core::{Bounds, Point};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raster_round_trip_within_print_precision(
        w in 1usize..12,
        h in 1usize..12,
        ox in -100i32..100,
        cell in 1u32..50,
        vals in prop::collection::vec(-40.0f64..60.0, 144),
        truth in any::<bool>(),
    ) {
        let spec = GridSpec::new(Point::new(ox as f64 * 0.5, -(ox as f64)), cell as f64, w, h).unwrap();
        let kind = if truth { RemKind::GroundTruth } else { RemKind::Estimated };
        let rem = SinrGrid::new(spec, kind, vals[..w * h].to_vec()).unwrap();
        let mut buf = Vec::new();
        write_raster(&mut buf, &rem).unwrap();
        let back = read_raster(buf.as_slice()).unwrap();
        prop_assert_eq!(back.spec(), rem.spec());
        prop_assert_eq!(back.kind(), kind);
        for (a, b) in back.values().iter().zip(rem.values()) {
            prop_assert!((a - b).abs() <= 5e-7 + 1e-12);
        }
        let mut again = Vec::new();
        write_raster(&mut again, &back).unwrap();
        prop_assert_eq!(again, buf);
    }

    #[test]
    fn synthetic_traces_survive_dump_and_reload(seed in 0u64..1000, half in any::<bool>(), n in 1usize..6) {
        let slot_s = if half { 0.5 } else { 1.0 };
        let bounds = Bounds::new(Point::new(0.0, 0.0), Point::new(400.0, 300.0));
        let cfg = MobilityConfig { bounds, n_vehicles: n, seed, horizon_slots: 120, slot_s, ..MobilityConfig::default() };
        let trajs = synth_trajectories(&cfg).unwrap();
        let mut buf = Vec::new();
        write_traces(&mut buf, &trajs, slot_s, 1_600_000_000.0).unwrap();
        let fixes = read_traces(buf.as_slice()).unwrap();
        let load = interpolate_traces(&fixes, slot_s, &bounds).unwrap();
        prop_assert!(load.excluded.is_empty());
        prop_assert_eq!(load.dropped_fixes, 0);
        prop_assert_eq!(load.trajectories, trajs);
    }

    #[test]
    fn bitrate_tables_round_trip_exactly(steps in prop::collection::vec((0.01f64..5.0, 0.0f64..2.0), 1..30), start in -20.0f64..0.0) {
        let mut s = start;
        let mut e = 0.0;
        let bp: Vec<(f64, f64)> = steps.iter().map(|(ds, de)| { s += ds; e += de; (s, e) }).collect();
        let t = BitrateTable::new(bp).unwrap();
        let mut buf = Vec::new();
        write_bitrate_table(&mut buf, &t).unwrap();
        prop_assert_eq!(read_bitrate_table(buf.as_slice()).unwrap(), t);
    }
}

#[test]
fn dataset_dump_round_trips_bit_for_bit() {
    let sigma = [0.01, 0.1, 1.0];
    let data = gen_synthetic(40, &sigma, 4, 11).unwrap();
    let refs: Vec<_> = data.datasets.iter().collect();
    let mut buf = Vec::new();
    write_dataset(&mut buf, &refs).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("# n=4 S=40 dim=3\nvehicle_id,y,x0,x1,x2\n"));
    let back = read_dataset(buf.as_slice()).unwrap();
    assert_eq!(back, data.datasets);
}

#[test]
fn dataset_parse_errors_carry_line_numbers() {
    let text = "# n=1 S=2 dim=1\nvehicle_id,y,x0\n0,1.5,2\n0,oops,3\n";
    assert!(matches!(read_dataset(text.as_bytes()), Err(FormatError::Parse { line: 4, .. })));
}

fn small_run() -> vremfl_core::sim::ExperimentMetrics {
    let mut c = vremfl::Config::default();
    c.mobility.n_vehicles = 12;
    c.sim.max_scheduled = 3;
    c.sim.rounds = 4;
    let env = vremfl::runner::build_environment(&c, 3).unwrap();
    vremfl_core::sim::run_experiment(&env, &c.sim_config(3)).unwrap()
}

#[test]
fn metrics_rows_sum_to_the_totals() {
    let m = small_run();
    let mut buf = Vec::new();
    write_metrics(&mut buf, &m.records).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), METRICS_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let col = |i: usize| rows.iter().map(|r| r[i].parse::<f64>().unwrap()).collect::<Vec<_>>();
    assert_eq!(col(5).iter().sum::<f64>(), m.total_tx_slots() as f64);
    assert_eq!(col(6).iter().sum::<f64>(), m.total_gd_steps() as f64);
    assert_eq!(*col(2).last().unwrap(), m.total_latency_s());
    assert_eq!(*col(7).last().unwrap(), m.final_dist_sq());
    for w in rows.windows(2) {
        assert_eq!(w[0][2], w[1][1], "rounds are back to back");
    }
}

#[test]
fn bid_log_has_one_row_per_active_vehicle_and_marks_the_schedule() {
    let m = small_run();
    let mut buf = Vec::new();
    write_bids(&mut buf, &m.records).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), m.records.iter().map(|r| r.bids.len()).sum::<usize>());
    for r in &m.records {
        let marked: Vec<u32> = rows
            .iter()
            .filter(|row| row[0] == *r.round.to_string() && &row[2] == "1")
            .map(|row| row[1].parse().unwrap())
            .collect();
        assert_eq!(marked, r.scheduled);
    }
    for row in &rows {
        let feasible = &row[3] == "1";
        assert_eq!(feasible, !row[6].is_empty(), "allocation columns present exactly for feasible bids");
    }
}

#[test]
fn summary_lists_every_aggregate() {
    let m = small_run();
    let kv = parse_summary(&summary(&m, Policy::VremFl, 3)).unwrap();
    let keys: Vec<&str> = kv.iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(
        keys,
        [
            "policy",
            "seed",
            "rounds",
            "total_latency_s",
            "total_tx_slots",
            "total_gd_steps",
            "initial_dist_sq",
            "final_dist_sq",
            "tx_rate"
        ]
    );
    assert_eq!(kv[4].1, m.total_tx_slots().to_string());
    assert_eq!(kv[7].1.parse::<f64>().unwrap(), m.final_dist_sq());
}

#[test]
fn sweep_files_align_labels_and_rows() {
    let m = small_run();
    let runs = [
        Labelled { value: "a", seed: 1, metrics: &m },
        Labelled { value: "a", seed: 2, metrics: &m },
        Labelled { value: "b", seed: 1, metrics: &m },
    ];
    let mut series = Vec::new();
    write_series(&mut series, "policy", &runs).unwrap();
    let text = String::from_utf8(series).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 4);
    assert!(text.starts_with("policy,seed,t,"));
    let mut med = Vec::new();
    write_medians(&mut med, "policy", &runs).unwrap();
    let med = String::from_utf8(med).unwrap();
    let rows: Vec<&str> = med.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("a,2,"));
    assert!(rows[2].starts_with("b,1,"));
}
