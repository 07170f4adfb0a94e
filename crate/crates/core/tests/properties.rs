mod common;

use std::collections::BTreeSet;
use std::path::Path;

use proptest::prelude::*;

use gestalt_core::detect::{detect_widgets, DetectorConfig};
use gestalt_core::eval::tokens::{is_balanced, parse, to_string};
use gestalt_core::eval::{block_sequences, edit_distance, match_blocks, optimal_matches, serialize, Token};
use gestalt_core::geometry::{iou, BBox, Widget, WidgetClass, WidgetId};
use gestalt_core::group::{dbscan_1d, pair_groups, widget_map, GroupingConfig, PositionalGroup};
use gestalt_core::hierarchy::{Hierarchy, Node, Orientation};
use gestalt_core::pipeline::{run_detection, run_metadata};
use gestalt_core::raster::{connected_components, BinaryMap};
use gestalt_core::synth::{generate, LayoutKind, SynthSpec};

use common::*;

fn kind() -> impl Strategy<Value = LayoutKind> {
    prop::sample::select(LayoutKind::ALL.to_vec())
}

fn bits(max: usize) -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<bool>(), w * h)))
}

fn tokens() -> impl Strategy<Value = Vec<Token>> {
    let t = prop::sample::select(vec![
        Token::BlockOpen,
        Token::BlockClose,
        Token::GroupOpen,
        Token::GroupClose,
        Token::Text,
        Token::NonText,
    ]);
    prop::collection::vec(t, 0..30)
}

/// Random tree of blocks, groups and leaves with distinct widget ids.
fn hierarchy() -> impl Strategy<Value = Hierarchy> {
    let leaf = (0u32..1000, 0u32..1000, 1u32..100, 1u32..100, any::<bool>()).prop_map(|(x, y, w, h, text)| {
        let b = BBox::from_origin(x, y, w, h).unwrap();
        if text {
            Node::Leaf(Widget::text(WidgetId(0), b, "label"))
        } else {
            Node::Leaf(Widget::non_text(WidgetId(0), b))
        }
    });
    let tree = leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Node::Group),
            (prop::collection::vec(inner, 1..4), any::<bool>()).prop_map(|(c, v)| {
                Node::block(Some(if v { Orientation::Vertical } else { Orientation::Horizontal }), c)
            }),
        ]
    });
    prop::collection::vec(tree, 0..5).prop_map(|mut nodes| {
        let mut next = 0;
        nodes.iter_mut().for_each(|n| renumber(n, &mut next));
        Hierarchy::new(Some(1200), Some(1200), nodes)
    })
}

fn renumber(n: &mut Node, next: &mut u32) {
    match n {
        Node::Leaf(w) => {
            w.id = WidgetId(*next);
            *next += 1;
        }
        Node::Group(c) | Node::Block { children: c, .. } => c.iter_mut().for_each(|c| renumber(c, next)),
    }
}

fn ids(ws: &[&Widget]) -> Vec<u32> {
    let mut v: Vec<u32> = ws.iter().map(|w| w.id.0).collect();
    v.sort_unstable();
    v
}

proptest! {
    #[test]
    fn dbscan_matches_oracle(
        raw in prop::collection::vec(0u32..400, 0..50),
        eps in 1u32..80,
        min_pts in 1usize..6,
    ) {
        let values: Vec<(usize, f64)> = raw.iter().enumerate().map(|(i, &v)| (i, f64::from(v) / 4.0)).collect();
        let eps = f64::from(eps) / 8.0;
        prop_assert_eq!(canonical(&dbscan_1d(&values, eps, min_pts)), canonical(&dbscan_oracle(&values, eps, min_pts)));
    }

    #[test]
    fn components_partition_foreground((w, h, bits) in bits(40)) {
        let map = BinaryMap::new(w as u32, h as u32, bits.clone());
        let cc = connected_components(&map);
        let area: u64 = cc.regions.iter().map(|r| r.area).sum();
        prop_assert_eq!(area as usize, bits.iter().filter(|&&b| b).count());
        for r in &cc.regions {
            prop_assert_eq!(cc.pixels(r).count() as u64, r.area);
        }
        prop_assert!(same_partition(cc.labels(), &flood_fill_labels(w, h, &bits)));
    }

    #[test]
    fn edit_distance_matches_oracle(a in tokens(), b in tokens()) {
        prop_assert_eq!(edit_distance(&a, &b), edit_distance_oracle(&a, &b));
    }

    #[test]
    fn matching_is_optimal_and_monotone(
        dist in (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(0usize..8, c), r)),
    ) {
        let mut last = 0;
        for t in 0..=4 {
            let m = optimal_matches(&dist, t);
            let total: usize = m.iter().map(|x| x.distance).sum();
            prop_assert_eq!((m.len(), total), matching_oracle(&dist, t));
            prop_assert!(m.len() >= last);
            last = m.len();
        }
    }

    #[test]
    fn serialization_is_balanced_and_parses(h in hierarchy()) {
        let seq = serialize(&h);
        prop_assert!(is_balanced(&seq));
        prop_assert_eq!(parse(&to_string(&seq)).unwrap(), seq);
        for b in block_sequences(&h) {
            prop_assert!(is_balanced(&b));
        }
    }

    #[test]
    fn hierarchy_json_round_trips(h in hierarchy()) {
        let back = Hierarchy::from_json(&h.to_json(), Path::new("mem.json")).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn pairing_respects_count_difference(a in 2u32..14, b in 2u32..14) {
        let icons: Vec<Widget> =
            (0..a).map(|i| Widget::non_text(WidgetId(i), BBox::from_origin(0, i * 60, 40, 40).unwrap())).collect();
        let texts: Vec<Widget> = (0..b)
            .map(|i| Widget::text(WidgetId(100 + i), BBox::from_origin(60, i * 60 + 10, 200, 20).unwrap(), "x"))
            .collect();
        let all: Vec<Widget> = icons.iter().chain(&texts).cloned().collect();
        let map = widget_map(&all);
        let group = |ws: &[Widget]| PositionalGroup {
            orientation: Orientation::Vertical,
            class: ws[0].class(),
            members: ws.iter().map(|w| w.id).collect(),
        };
        let blocks = pair_groups(&[group(&icons), group(&texts)], &[], &map, &GroupingConfig::default(), 1.0);
        prop_assert_eq!(blocks.len() == 1, a.abs_diff(b) < 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detection_invariants(k in kind(), seed in any::<u64>()) {
        let gui = generate(&SynthSpec { occlusion: seed % 2 == 0, ..SynthSpec::new(k, seed) }).unwrap();
        let cfg = DetectorConfig::default();
        let a = detect_widgets(&gui.image, &gui.ocr, &cfg).unwrap();
        let b = detect_widgets(&gui.image, &gui.ocr, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        let (w, h) = gui.image.dimensions();
        for x in &a {
            prop_assert!(x.bbox.right() <= w && x.bbox.bottom() <= h);
        }
        let nontext: Vec<&Widget> = a.iter().filter(|x| x.class() == WidgetClass::NonText).collect();
        for (i, x) in nontext.iter().enumerate() {
            for y in &nontext[i + 1..] {
                prop_assert!(iou(&x.bbox, &y.bbox) <= 0.9);
            }
        }
        // card contents survive next to their frames
        for c in a.iter().filter(|x| x.is_container) {
            for id in &c.children {
                prop_assert!(a.iter().any(|x| x.id == *id));
            }
        }
    }

    #[test]
    fn grouping_keeps_every_widget(k in kind(), seed in any::<u64>(), occlusion in any::<bool>()) {
        let gui = generate(&SynthSpec { occlusion, ..SynthSpec::new(k, seed) }).unwrap();
        let (det, grp) = (DetectorConfig::default(), GroupingConfig::default());
        let detected = detect_widgets(&gui.image, &gui.ocr, &det).unwrap();
        let out = run_detection(&gui.image, &gui.ocr, &det, &grp).unwrap();
        let again = run_detection(&gui.image, &gui.ocr, &det, &grp).unwrap();
        prop_assert_eq!(serialize(&out.hierarchy), serialize(&again.hierarchy));

        let mut expected: Vec<u32> = detected.iter().map(|w| w.id.0).collect();
        expected.extend(out.recovered.iter().map(|id| id.0));
        expected.sort_unstable();
        prop_assert_eq!(ids(&out.hierarchy.widgets()), expected);

        // corrections reclassify but never move a box
        let before: BTreeSet<BBox> = detected.iter().map(|w| w.bbox).collect();
        for w in out.widgets.iter().filter(|w| !out.recovered.contains(&w.id)) {
            prop_assert!(before.contains(&w.bbox));
        }
    }

    #[test]
    fn grouping_is_translation_equivariant(k in kind(), seed in any::<u64>(), fx in 0.0..1.0f64, fy in 0.0..1.0f64) {
        let gui = generate(&SynthSpec::new(k, seed)).unwrap();
        let size = gui.image.dimensions();
        let (det, grp) = (DetectorConfig::default(), GroupingConfig::default());
        let right = gui.widgets.iter().map(|w| w.bbox.right()).max().unwrap();
        let bottom = gui.widgets.iter().map(|w| w.bbox.bottom()).max().unwrap();
        let dx = (f64::from(size.0 - right) * fx) as i64;
        let dy = (f64::from(size.1 - bottom) * fy) as i64;
        let shifted: Vec<Widget> = gui
            .widgets
            .iter()
            .map(|w| {
                let mut w = w.clone();
                w.bbox = w.bbox.translate(dx, dy).unwrap();
                w
            })
            .collect();
        let a = run_metadata(gui.widgets.clone(), size, &det, &grp).unwrap();
        let b = run_metadata(shifted, size, &det, &grp).unwrap();
        prop_assert_eq!(serialize(&a.hierarchy), serialize(&b.hierarchy));
    }

    #[test]
    fn synthesis_is_deterministic(k in kind(), seed in any::<u64>()) {
        let spec = SynthSpec::new(k, seed);
        let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
        prop_assert!(a.image.as_raw() == b.image.as_raw());
        prop_assert_eq!(a.ground_truth.to_json(), b.ground_truth.to_json());
        prop_assert_eq!(a.ocr_json(), b.ocr_json());
    }

    #[test]
    fn metadata_grouping_reproduces_ground_truth(k in kind(), seed in any::<u64>()) {
        let gui = generate(&SynthSpec::new(k, seed)).unwrap();
        let out = run_metadata(gui.widgets.clone(), gui.image.dimensions(), &DetectorConfig::default(), &GroupingConfig::default()).unwrap();
        let report = match_blocks(&block_sequences(&gui.ground_truth), &block_sequences(&out.hierarchy), 0);
        prop_assert_eq!(report.fp + report.fn_, 0, "{}", to_string(&serialize(&out.hierarchy)));
    }
}
