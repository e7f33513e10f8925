use deltaconf::hex::{ortho_to_hex, resolve_overlaps};
use deltaconf::ortho::{layout_upward_ortho, root_at_leaf};
use deltaconf::radial::{layout_radial_trident, DEFAULT_RATIO};
use deltaconf::render::{
    build_drawing, check_smoothness, parse_svg, render_svg, LayoutRef, TrackDrawing,
};
use deltaconf::tree::build_delta_tree;
use deltaconf::{
    eliminate, gen_dh_random, DeltaTree, ExtensionWeights, JunctionKind, RenderOptions, Theme,
};
use proptest::prelude::*;

fn drawings(t: &DeltaTree, opts: &RenderOptions) -> Vec<(String, TrackDrawing)> {
    let ortho = layout_upward_ortho(&root_at_leaf(t, None).unwrap());
    let hex = resolve_overlaps(&ortho_to_hex(&ortho)).unwrap();
    let radial = layout_radial_trident(t, DEFAULT_RATIO).unwrap();
    [
        ("ortho", LayoutRef::from(&ortho)),
        ("hex", LayoutRef::from(&hex)),
        ("radial", LayoutRef::from(&radial)),
    ]
    .into_iter()
    .map(|(name, l)| (name.to_owned(), build_drawing(t, l, opts).unwrap()))
    .collect()
}

fn opts(labels: bool, dark: bool) -> RenderOptions {
    RenderOptions {
        labels,
        theme: if dark { Theme::Dark } else { Theme::Light },
        ..RenderOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn drawings_are_planar_and_smooth(n in 2usize..90, seed in any::<u64>(), labels: bool, dark: bool) {
        let (g, _) = gen_dh_random(n, seed, ExtensionWeights::UNIFORM).unwrap();
        let t = build_delta_tree(&g, &eliminate(&g).unwrap()).unwrap();
        let o = opts(labels, dark);
        for (name, d) in drawings(&t, &o) {
            prop_assert!(d.crossings().is_empty(), "{} crossings", name);
            prop_assert!(check_smoothness(&d.smoothness_paths(), 5.0), "{} not smooth", name);
            for c in &d.connectors {
                let kind = d.junctions.iter().find(|(j, _)| *j == c.junction).unwrap().1;
                if let JunctionKind::Lambda { head } = kind {
                    prop_assert!(c.ports.0 == head || c.ports.1 == head, "{}: tail-tail connector", name);
                }
            }
            let svg = d.to_svg(&o);
            let back = parse_svg(&svg).unwrap();
            prop_assert_eq!(back.tracks.len(), d.tracks.len());
            prop_assert_eq!(back.connectors.len(), d.connectors.len());
            prop_assert!(back.crossings().is_empty());
            prop_assert!(check_smoothness(&back.smoothness_paths(), 5.0));
        }
    }

    #[test]
    fn svg_is_byte_deterministic(leaves in 2usize..60, seed in any::<u64>()) {
        let t = DeltaTree::random(leaves, seed);
        let hex = resolve_overlaps(&ortho_to_hex(&layout_upward_ortho(&root_at_leaf(&t, None).unwrap()))).unwrap();
        let o = RenderOptions::default();
        prop_assert_eq!(render_svg(&t, (&hex).into(), &o).unwrap(), render_svg(&t, (&hex).into(), &o).unwrap());
    }
}

#[test]
fn every_junction_has_its_permitted_connectors() {
    let t = DeltaTree::random(40, 3);
    for (_, d) in drawings(&t, &RenderOptions::default()) {
        for &(j, kind) in &d.junctions {
            let count = d.connectors.iter().filter(|c| c.junction == j).count();
            let expected = match kind {
                JunctionKind::Delta => 3,
                JunctionKind::Lambda { .. } => 2,
            };
            assert_eq!(count, expected);
        }
    }
}
