mod common;

use common::*;
use fxtopo::stats::SymmetricMatrix;
use fxtopo::tda::{PersistenceDiagram, PersistencePair};
use fxtopo_cli::error::Stage;
use fxtopo_cli::plot::{diagram_svg, escape, heatmap_svg, line_svg, render_plots};

fn parse(svg: &str) -> roxmltree::Document<'_> {
    roxmltree::Document::parse(svg).unwrap_or_else(|e| panic!("malformed svg: {e}\n{svg}"))
}

fn count(doc: &roxmltree::Document, tag: &str, class: Option<&str>) -> usize {
    doc.descendants().filter(|n| n.has_tag_name(tag) && class.is_none_or(|c| n.attribute("class") == Some(c))).count()
}

#[test]
fn two_by_two_heatmap_has_four_cells() {
    let m = SymmetricMatrix::from_fn(vec!["A".into(), "B".into()], |i, j| if i == j { 1.0 } else { -0.4 });
    let svg = heatmap_svg("corr", &m);
    let doc = parse(&svg);
    assert_eq!(count(&doc, "rect", Some("cell")), 4);
}

#[test]
fn empty_diagram_draws_axes_and_diagonal_only() {
    let svg = diagram_svg("nothing", &[PersistenceDiagram::<f64>::empty(0, 1.0), PersistenceDiagram::empty(1, 1.0)]);
    let doc = parse(&svg);
    assert_eq!(count(&doc, "circle", None), 0);
    // two axes, ten ticks, one diagonal
    assert_eq!(count(&doc, "line", None), 13);
}

#[test]
fn diagram_points_include_essential_classes() {
    let d0 = PersistenceDiagram::new(0, vec![PersistencePair::new(0.0, 0.5)], vec![0.0], 2.0);
    let d1 = PersistenceDiagram::new(1, vec![PersistencePair::new(1.0, 1.5)], vec![], 2.0);
    let doc_text = diagram_svg("d", &[d0, d1]);
    assert_eq!(count(&parse(&doc_text), "circle", None), 3);
}

#[test]
fn labels_are_escaped() {
    assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    let svg = line_svg("x < y & z", "t", "v", &[("s<1>".into(), vec![(0.0, 1.0), (1.0, 2.0)])]);
    let doc = parse(&svg);
    assert!(doc.descendants().any(|n| n.text() == Some("x < y & z")));
}

#[test]
fn every_report_figure_is_well_formed_and_rerenderable() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_config(tmp.path(), &CODES[..4], 4);
    cfg.sensitivity.enabled = true;
    cfg.sensitivity.grid = fxtopo_cli::config::default_grid();
    let (dir, _) = fxtopo_cli::run_pipeline(&cfg).unwrap();
    let svgs: Vec<_> = files_under(&dir).into_iter().filter(|f| f.extension().is_some_and(|e| e == "svg")).collect();
    assert!(svgs.len() > 30, "{svgs:?}");
    for f in &svgs {
        let text = std::fs::read_to_string(dir.join(f)).unwrap();
        let doc = parse(&text);
        assert_eq!(doc.root_element().tag_name().name(), "svg", "{}", f.display());
    }
    for f in [
        "stats/pearson_heatmap.svg",
        "tda/wasserstein_heatmap.svg",
        "tda/pca.svg",
        "clusters/mds.svg",
        "clusters/elbow.svg",
        "clusters/stat_dendrogram.svg",
        "tda/barcodes/AAA.svg",
        "sensitivity/sensitivity.svg",
    ] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let before = std::fs::read(dir.join("tda/diagrams/BBB.svg")).unwrap();
    std::fs::remove_file(dir.join("tda/diagrams/BBB.svg")).unwrap();
    let written = render_plots(&dir).unwrap();
    assert_eq!(written.len(), svgs.len());
    assert_eq!(std::fs::read(dir.join("tda/diagrams/BBB.svg")).unwrap(), before);

    std::fs::remove_file(dir.join("tda/wasserstein.csv")).unwrap();
    let err = render_plots(&dir).unwrap_err();
    assert_eq!(err.stage, Stage::Plot);
    assert!(err.to_string().contains("wasserstein.csv"), "{err}");
}
