use proptest::prelude::*;

use dramcam::cam::{CamArray, Mode, Query, SearchKind, TernaryWord, Trit};
use dramcam::dram::{Command, Subarray, Trace, Warning};
use dramcam::timing_ops::{majority, ComputeRows};
use dramcam::{BitRow, DeviceConfig, Error, TimingModel};

fn device() -> DeviceConfig {
    DeviceConfig {
        rows_per_subarray: 128,
        cols_per_subarray: 64,
        ..DeviceConfig::default()
    }
}

fn trit() -> impl Strategy<Value = Trit> {
    prop_oneof![Just(Trit::Zero), Just(Trit::One), Just(Trit::X)]
}

fn case(ternary: bool) -> impl Strategy<Value = (Vec<TernaryWord>, Vec<bool>, Vec<bool>)> {
    (1usize..=20).prop_flat_map(move |m| {
        let w = if ternary {
            prop::collection::vec(trit(), m).boxed()
        } else {
            prop::collection::vec(any::<bool>().prop_map(Trit::from_bit), m).boxed()
        };
        (
            prop::collection::vec(w.prop_map(TernaryWord), 1..40),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(any::<bool>(), m),
        )
    })
}

fn oracle(w: &TernaryWord, q: &[bool], mask: Option<&[bool]>) -> bool {
    w.0.iter().enumerate().all(|(j, t)| {
        mask.is_some_and(|m| !m[j])
            || match t {
                Trit::X => true,
                Trit::One => q[j],
                Trit::Zero => !q[j],
            }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nand_equals_equality_and_nor_is_its_complement((words, q, _) in case(false)) {
        let mut cam = CamArray::new(&device(), q.len(), Mode::Nand).unwrap();
        cam.store(&words).unwrap();
        let query = Query::new(q.clone());
        let nand = cam.search(&query, SearchKind::Nand).unwrap();
        let nor = cam.search(&query, SearchKind::Nor).unwrap();
        for (c, w) in words.iter().enumerate() {
            prop_assert_eq!(nand.verdicts.get(c), oracle(w, &q, None));
            prop_assert_eq!(nor.verdicts.get(c), !nand.verdicts.get(c));
        }
    }

    #[test]
    fn tcam_masked_equality((words, q, mask) in case(true), nor in any::<bool>()) {
        let mode = if nor { Mode::Nor } else { Mode::Nand };
        let mut cam = CamArray::new(&device(), q.len(), mode).unwrap();
        cam.store(&words).unwrap();
        let query = Query::with_mask(q.clone(), mask.clone()).unwrap();
        let hits = cam.search(&query, SearchKind::Tcam).unwrap().matches();
        for (c, w) in words.iter().enumerate() {
            prop_assert_eq!(hits.get(c), oracle(w, &q, Some(&mask)));
        }
    }

    #[test]
    fn hd1_is_hamming_at_most_one((words, q, _) in case(false)) {
        let mut cam = CamArray::new(&device(), q.len(), Mode::Nand).unwrap();
        cam.store(&words).unwrap();
        let hits = cam.search(&Query::new(q.clone()), SearchKind::Hd1).unwrap().matches();
        for (c, w) in words.iter().enumerate() {
            let d = w.0.iter().zip(&q).filter(|(t, &b)| **t != Trit::from_bit(b)).count();
            prop_assert_eq!(hits.get(c), d <= 1);
        }
    }

    #[test]
    fn stored_words_read_back_after_searches((words, q, _) in case(true)) {
        let mut cam = CamArray::new(&device(), q.len(), Mode::Nand).unwrap();
        cam.store(&words).unwrap();
        cam.search(&Query::new(q.clone()), SearchKind::Tcam).unwrap();
        prop_assert_eq!(cam.read_back().unwrap(), words);
    }

    #[test]
    fn compiled_traces_survive_text_roundtrip((words, q, _) in case(false)) {
        let cam = {
            let mut c = CamArray::new(&device(), q.len(), Mode::Nand).unwrap();
            c.store(&words).unwrap();
            c
        };
        for kind in [SearchKind::Nand, SearchKind::Nor, SearchKind::Hd1] {
            let t = cam.compile(&Query::new(q.clone()), kind).unwrap().trace;
            prop_assert_eq!(Trace::parse(&t.emit()).unwrap(), t);
        }
    }
}

#[test]
fn query_length_is_checked() {
    let mut cam = CamArray::new(&device(), 4, Mode::Nand).unwrap();
    cam.store(&["0101".parse().unwrap()]).unwrap();
    let err = cam.search(&"01".parse().unwrap(), SearchKind::Nand).unwrap_err();
    assert!(matches!(err, Error::LengthMismatch { expected: 4, got: 2 }));
}

#[test]
fn capacity_and_word_length_faults() {
    let mut cam = CamArray::new(&device(), 4, Mode::Nand).unwrap();
    let too_many: Vec<TernaryWord> = (0..65).map(|_| "0000".parse().unwrap()).collect();
    assert!(cam.store(&too_many).is_err());
    assert!(matches!(
        cam.store(&["010".parse().unwrap()]),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(matches!(
        CamArray::new(&device(), 60, Mode::Nand),
        Err(Error::Layout(_))
    ));
}

#[test]
fn majority_reuse_without_rewrite_warns() {
    let t = TimingModel::default();
    let rows = ComputeRows::at(8, 6, 7);
    let mut sub = Subarray::new(16, 4, t.clone()).unwrap();
    sub.write_row(rows.r1, &BitRow::parse("0011").unwrap()).unwrap();
    let mut tr = Trace::new();
    tr.push(Command::pre(t.t_rp));
    tr.extend(majority(&rows, &t).unwrap());
    sub.execute(&tr).unwrap();
    assert!(sub.warnings().is_empty());
    sub.execute(&tr).unwrap();
    assert!(matches!(sub.warnings(), [Warning::StalePreset { .. }]));
}

#[test]
fn cut_short_activation_is_rejected_in_strict_mode() {
    let t = TimingModel::default();
    let mut sub = Subarray::new(16, 4, t.clone()).unwrap();
    let tr = Trace::parse("PRE gap=13750\nACT 1 gap=20000\nPRE gap=3750\nACT 2 gap=35000\n").unwrap();
    assert!(matches!(sub.execute(&tr), Err(Error::UndefinedTiming { .. })));
}
