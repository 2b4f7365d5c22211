//! SVG figures rendered from the report CSVs.

use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use fxtopo::cluster::{ClusterAssignment, Dendrogram, FeatureSpace, Method};
use fxtopo::stats::{StlDecomposition, SymmetricMatrix};
use fxtopo::summaries::{barcode, BettiCurve, PersistenceLandscape};
use fxtopo::tda::{read_diagrams_csv, PersistenceDiagram};

use crate::error::{AtStage, Stage, StageError};
use crate::pipeline::StageResult;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Tick label with precision tied to the axis span.
fn fmt_tick(v: f64, span: f64) -> String {
    if v.abs() <= span.abs() * 1e-9 {
        return "0".into();
    }
    if v.abs() >= 1e5 || span.abs() < 1e-4 {
        return format!("{v:.2e}");
    }
    let decimals = (2.0 - span.abs().log10().floor()).clamp(0.0, 6.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    fn new(width: f64, height: f64, title: &str) -> Self {
        let mut s = Self { width, height, body: String::new() };
        s.text(width / 2.0, 22.0, title, "middle", 15.0);
        s
    }

    fn text(&mut self, x: f64, y: f64, text: &str, anchor: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            escape(text)
        );
    }

    fn rotated_text(&mut self, x: f64, y: f64, text: &str, anchor: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" text-anchor="{anchor}" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            escape(text)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, class: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect class="{class}" x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}" fill-opacity="0.8"/>"#);
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Plot area with data-to-pixel mapping.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

impl Frame {
    fn new(left: f64, top: f64, width: f64, height: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        Self { left, top, width, height, x: padded(x.0, x.1), y: padded(y.0, y.1) }
    }

    fn px(&self, v: f64) -> f64 {
        self.left + (v - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, v: f64) -> f64 {
        self.top + self.height - (v - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    fn axes(&self, svg: &mut Svg, xlabel: &str, ylabel: &str) {
        self.axes_with(svg, xlabel, ylabel, true, true);
    }

    fn axes_with(&self, svg: &mut Svg, xlabel: &str, ylabel: &str, xticks: bool, yticks: bool) {
        let bottom = self.top + self.height;
        svg.line(self.left, bottom, self.left + self.width, bottom, "black", 1.0);
        svg.line(self.left, self.top, self.left, bottom, "black", 1.0);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let (xp, yp) = (self.px(xv), self.py(yv));
            if xticks {
                svg.line(xp, bottom, xp, bottom + 4.0, "black", 1.0);
                svg.text(xp, bottom + 16.0, &fmt_tick(xv, self.x.1 - self.x.0), "middle", 10.0);
            }
            if yticks {
                svg.line(self.left - 4.0, yp, self.left, yp, "black", 1.0);
                svg.text(self.left - 6.0, yp + 3.0, &fmt_tick(yv, self.y.1 - self.y.0), "end", 10.0);
            }
        }
        svg.text(self.left + self.width / 2.0, bottom + 34.0, xlabel, "middle", 12.0);
        svg.rotated_text(self.left - 42.0, self.top + self.height / 2.0, ylabel, "middle", 12.0);
    }
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn legend(svg: &mut Svg, x: f64, y: f64, names: &[String]) {
    for (i, n) in names.iter().enumerate() {
        let yy = y + i as f64 * 16.0;
        svg.rect(x, yy - 9.0, 10.0, 10.0, color(i), "legend");
        svg.text(x + 14.0, yy, n, "start", 11.0);
    }
}

/// Matrix heatmap: diverging palette when values go negative, sequential otherwise.
pub fn heatmap_svg(title: &str, m: &SymmetricMatrix<f64>) -> String {
    let n = m.len();
    let cell = (420.0 / n.max(1) as f64).clamp(12.0, 48.0);
    let left = 70.0;
    let top = 70.0;
    let size = cell * n as f64;
    let mut svg = Svg::new(left + size + 90.0, top + size + 30.0, title);
    let (lo, hi) = bounds((0..n).flat_map(|i| m.row(i).iter()));
    let diverging = lo < 0.0;
    let scale = if diverging { lo.abs().max(hi.abs()) } else { hi };
    let colour = |v: f64| -> String {
        let t = if scale > 0.0 { v / scale } else { 0.0 };
        if diverging && t < 0.0 {
            let c = (255.0 * (1.0 + t)) as u8;
            format!("rgb({c},{c},255)")
        } else {
            let c = (255.0 * (1.0 - t.clamp(0.0, 1.0))) as u8;
            format!("rgb(255,{c},{c})")
        }
    };
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            svg.rect(left + j as f64 * cell, top + i as f64 * cell, cell, cell, &colour(v), "cell");
            if cell >= 28.0 {
                svg.text(
                    left + (j as f64 + 0.5) * cell,
                    top + (i as f64 + 0.6) * cell,
                    &format!("{v:.2}"),
                    "middle",
                    9.0,
                );
            }
        }
    }
    for (i, l) in m.labels().iter().enumerate() {
        svg.text(left - 6.0, top + (i as f64 + 0.6) * cell, l, "end", 11.0);
        svg.rotated_text(left + (i as f64 + 0.6) * cell, top - 6.0, l, "start", 11.0);
    }
    svg.text(left + size + 10.0, top + 10.0, &format!("max {hi:.3}"), "start", 10.0);
    svg.text(left + size + 10.0, top + 26.0, &format!("min {lo:.3}"), "start", 10.0);
    svg.finish()
}

pub fn line_svg(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut svg = Svg::new(640.0, 400.0, title);
    let xs = bounds(series.iter().flat_map(|(_, p)| p.iter().map(|(x, _)| x)));
    let ys = bounds(series.iter().flat_map(|(_, p)| p.iter().map(|(_, y)| y)));
    let f = Frame::new(70.0, 40.0, 440.0, 300.0, xs, (ys.0.min(0.0), ys.1));
    f.axes(&mut svg, xlabel, ylabel);
    for (i, (_, pts)) in series.iter().enumerate() {
        let mapped: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (f.px(x), f.py(y))).collect();
        svg.polyline(&mapped, color(i));
    }
    legend(&mut svg, 525.0, 50.0, &series.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
    svg.finish()
}

/// One panel per series, stacked, each with its own y range.
pub fn stacked_svg(title: &str, xlabel: &str, panels: &[(String, Vec<(f64, f64)>)]) -> String {
    let panel_h = 120.0;
    let gap = 30.0;
    let height = 40.0 + panels.len() as f64 * (panel_h + gap) + 30.0;
    let mut svg = Svg::new(640.0, height, title);
    let xs = bounds(panels.iter().flat_map(|(_, p)| p.iter().map(|(x, _)| x)));
    for (i, (name, pts)) in panels.iter().enumerate() {
        let ys = bounds(pts.iter().map(|(_, y)| y));
        let top = 40.0 + i as f64 * (panel_h + gap);
        let f = Frame::new(80.0, top, 520.0, panel_h, xs, ys);
        let last = i + 1 == panels.len();
        f.axes_with(&mut svg, if last { xlabel } else { "" }, name, last, true);
        let mapped: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (f.px(x), f.py(y))).collect();
        svg.polyline(&mapped, color(i));
    }
    svg.finish()
}

/// Persistence diagram: one colour per degree, diagonal, essential classes at the top edge.
pub fn diagram_svg(title: &str, diagrams: &[PersistenceDiagram<f64>]) -> String {
    let mut svg = Svg::new(520.0, 460.0, title);
    let top = diagrams.iter().map(|d| d.eps_max).fold(0.0, f64::max);
    let hi = if top > 0.0 { top } else { 1.0 };
    let f = Frame::new(70.0, 40.0, 340.0, 340.0, (0.0, hi), (0.0, hi));
    f.axes(&mut svg, "birth", "death");
    svg.line(f.px(0.0), f.py(0.0), f.px(hi), f.py(hi), "#888888", 1.0);
    for d in diagrams {
        for p in &d.pairs {
            svg.circle(f.px(p.birth), f.py(p.death), 3.0, color(d.dimension));
        }
        for &b in &d.essential {
            svg.circle(f.px(b), f.py(hi), 3.0, color(d.dimension));
        }
    }
    legend(&mut svg, 425.0, 50.0, &diagrams.iter().map(|d| format!("H{}", d.dimension)).collect::<Vec<_>>());
    svg.finish()
}

pub fn barcode_svg(title: &str, diagrams: &[PersistenceDiagram<f64>]) -> String {
    let bars: Vec<(usize, f64, f64)> = diagrams
        .iter()
        .flat_map(|d| {
            let essential = d.essential.iter().map(move |&b| (d.dimension, b, d.eps_max));
            barcode(d).into_iter().map(move |iv| (d.dimension, iv.birth, iv.death)).chain(essential)
        })
        .collect();
    let row = (360.0 / bars.len().max(1) as f64).clamp(1.0, 8.0);
    let height = 80.0 + row * bars.len() as f64 + 40.0;
    let mut svg = Svg::new(560.0, height.max(200.0), title);
    let hi = diagrams.iter().map(|d| d.eps_max).fold(0.0, f64::max);
    let f = Frame::new(
        70.0,
        40.0,
        420.0,
        row * bars.len().max(1) as f64,
        (0.0, if hi > 0.0 { hi } else { 1.0 }),
        (0.0, 1.0),
    );
    f.axes_with(&mut svg, "filtration value", "", true, false);
    for (i, &(dim, b, d)) in bars.iter().enumerate() {
        let y = 40.0 + i as f64 * row;
        svg.rect(f.px(b), y, (f.px(d) - f.px(b)).max(0.5), (row * 0.8).max(0.8), color(dim), "bar");
    }
    legend(&mut svg, 500.0, 50.0, &diagrams.iter().map(|d| format!("H{}", d.dimension)).collect::<Vec<_>>());
    svg.finish()
}

pub fn scatter_svg(title: &str, xlabel: &str, ylabel: &str, points: &[(String, f64, f64, usize)]) -> String {
    let mut svg = Svg::new(560.0, 440.0, title);
    let xs = bounds(points.iter().map(|p| &p.1));
    let ys = bounds(points.iter().map(|p| &p.2));
    let pad = |(lo, hi): (f64, f64)| {
        let m = (hi - lo).abs().max(1e-9) * 0.08;
        (lo - m, hi + m)
    };
    let f = Frame::new(70.0, 40.0, 420.0, 320.0, pad(xs), pad(ys));
    f.axes(&mut svg, xlabel, ylabel);
    for (label, x, y, group) in points {
        svg.circle(f.px(*x), f.py(*y), 4.5, color(*group));
        svg.text(f.px(*x) + 6.0, f.py(*y) - 6.0, label, "start", 10.0);
    }
    svg.finish()
}

/// Dendrogram with leaves ordered so that no branches cross.
pub fn dendrogram_svg(title: &str, d: &Dendrogram<f64>) -> String {
    let n = d.n_leaves;
    let mut children: Vec<Option<(usize, usize)>> = vec![None; n + d.merges.len()];
    for (s, m) in d.merges.iter().enumerate() {
        children[n + s] = Some((m.a, m.b));
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![if d.merges.is_empty() { 0 } else { n + d.merges.len() - 1 }];
    while let Some(node) = stack.pop() {
        match children[node] {
            Some((a, b)) => {
                stack.push(b);
                stack.push(a);
            }
            None => order.push(node),
        }
    }
    // Disconnected leaves (only possible for n == 1) still get a slot.
    for leaf in 0..n {
        if !order.contains(&leaf) {
            order.push(leaf);
        }
    }
    let width = 80.0 + 40.0 * n as f64;
    let mut svg = Svg::new(width.max(400.0), 440.0, title);
    let hmax = d.merges.iter().map(|m| m.height).fold(0.0, f64::max);
    let f = Frame::new(70.0, 40.0, 40.0 * n as f64, 300.0, (0.0, n as f64), (0.0, if hmax > 0.0 { hmax } else { 1.0 }));
    f.axes_with(&mut svg, "", "height", false, true);
    let mut xpos = vec![0.0; n + d.merges.len()];
    let mut ypos = vec![0.0; n + d.merges.len()];
    for (slot, &leaf) in order.iter().enumerate() {
        xpos[leaf] = slot as f64 + 0.5;
        svg.rotated_text(f.px(xpos[leaf]) + 4.0, f.py(0.0) + 8.0, &d.labels[leaf], "end", 11.0);
    }
    for (s, m) in d.merges.iter().enumerate() {
        let node = n + s;
        xpos[node] = (xpos[m.a] + xpos[m.b]) / 2.0;
        ypos[node] = m.height;
        let top = f.py(m.height);
        svg.line(f.px(xpos[m.a]), f.py(ypos[m.a]), f.px(xpos[m.a]), top, "#333333", 1.2);
        svg.line(f.px(xpos[m.b]), f.py(ypos[m.b]), f.px(xpos[m.b]), top, "#333333", 1.2);
        svg.line(f.px(xpos[m.a]), top, f.px(xpos[m.b]), top, "#333333", 1.2);
    }
    svg.finish()
}

/// Grouped bars, one group per row label.
pub fn grouped_bars_svg(title: &str, groups: &[(String, Vec<f64>)], series: &[&str]) -> String {
    let group_w = 30.0 * series.len() as f64 + 20.0;
    let width = 100.0 + group_w * groups.len() as f64 + 120.0;
    let mut svg = Svg::new(width.max(420.0), 560.0, title);
    let (lo, hi) = bounds(groups.iter().flat_map(|(_, v)| v.iter()));
    let f = Frame::new(70.0, 40.0, group_w * groups.len().max(1) as f64, 280.0, (0.0, 1.0), (lo.min(0.0), hi.max(1.0)));
    f.axes_with(&mut svg, "", "", false, true);
    let bar = 30.0;
    for (g, (label, values)) in groups.iter().enumerate() {
        let x0 = f.left + g as f64 * group_w + 10.0;
        for (s, v) in values.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let (y0, y1) = (f.py(0.0), f.py(*v));
            svg.rect(x0 + s as f64 * bar, y0.min(y1), bar - 4.0, (y1 - y0).abs(), color(s), "bar");
        }
        svg.rotated_text(x0 + (group_w - 20.0) / 2.0 + 3.0, f.top + f.height + 8.0, label, "end", 10.0);
    }
    legend(&mut svg, f.left + f.width + 15.0, 50.0, &series.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    svg.finish()
}

fn open(path: &Path) -> StageResult<File> {
    File::open(path).map_err(|e| StageError::msg(Stage::Plot, format!("missing or unreadable {}: {e}", path.display())))
}

fn save(path: PathBuf, svg: String, written: &mut Vec<PathBuf>) -> StageResult<()> {
    std::fs::write(&path, svg).map_err(|e| StageError::msg(Stage::Plot, format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

fn table(path: &Path) -> StageResult<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(open(path)?);
    let header = r.headers().map_err(|e| StageError::msg(Stage::Plot, format!("{}: {e}", path.display())))?;
    let header = header.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()
        .map_err(|e| StageError::msg(Stage::Plot, format!("{}: {e}", path.display())))?;
    Ok((header, rows))
}

fn num(path: &Path, s: &str) -> StageResult<f64> {
    s.parse().map_err(|_| StageError::msg(Stage::Plot, format!("{}: `{s}` is not a number", path.display())))
}

fn currencies(root: &Path) -> StageResult<Vec<String>> {
    let path = root.join("tda/diagrams/manifest.csv");
    Ok(table(&path)?.1.into_iter().filter_map(|r| r.into_iter().next()).collect())
}

fn assignment(root: &Path, name: &str, method: Method, space: FeatureSpace) -> StageResult<ClusterAssignment> {
    let path = root.join("clusters").join(format!("{name}.csv"));
    ClusterAssignment::read_csv(open(&path)?, method, space)
        .map_err(|e| StageError::msg(Stage::Plot, format!("{}: {e}", path.display())))
}

fn plot_err<T>(path: &Path, r: fxtopo::Result<T>) -> StageResult<T> {
    r.map_err(|e| StageError::msg(Stage::Plot, format!("{}: {e}", path.display())))
}

/// Render every figure of a report directory; returns the files written.
pub fn render_plots(root: &Path) -> StageResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let codes = currencies(root)?;

    for name in ["covariance", "pearson", "spearman", "cross_correlation"] {
        let path = root.join("stats").join(format!("{name}.csv"));
        let m = plot_err(&path, SymmetricMatrix::<f64>::read_csv(open(&path)?))?;
        save(
            root.join("stats").join(format!("{name}_heatmap.svg")),
            heatmap_svg(&name.replace('_', "-"), &m),
            &mut written,
        )?;
    }
    let vpath = root.join("stats/variance.csv");
    let (_, rows) = table(&vpath)?;
    let groups = rows.iter().map(|r| Ok((r[0].clone(), vec![num(&vpath, &r[1])?]))).collect::<StageResult<Vec<_>>>()?;
    save(
        root.join("stats/variance.svg"),
        grouped_bars_svg("variance of monthly log-returns", &groups, &["variance"]),
        &mut written,
    )?;

    for code in &codes {
        let path = root.join("stats/stl").join(format!("{code}.csv"));
        let d = plot_err(&path, StlDecomposition::<f64>::read_csv(open(&path)?, 12))?;
        let idx = |v: &[f64]| v.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect::<Vec<_>>();
        let observed: Vec<f64> = (0..d.trend.len()).map(|i| d.trend[i] + d.seasonal[i] + d.residual[i]).collect();
        let series = vec![
            ("observed".to_string(), idx(&observed)),
            ("trend".to_string(), idx(&d.trend)),
            ("seasonal".to_string(), idx(&d.seasonal)),
            ("residual".to_string(), idx(&d.residual)),
        ];
        save(
            root.join("stats/stl").join(format!("{code}.svg")),
            stacked_svg(&format!("STL decomposition: {code}"), "month", &series),
            &mut written,
        )?;
    }

    let tda = root.join("tda");
    std::fs::create_dir_all(tda.join("barcodes")).at(Stage::Plot)?;
    for code in &codes {
        let path = tda.join("diagrams").join(format!("{code}.csv"));
        let dgms = plot_err(&path, read_diagrams_csv::<_, f64>(open(&path)?, 1))?;
        save(
            tda.join("diagrams").join(format!("{code}.svg")),
            diagram_svg(&format!("persistence diagram: {code}"), &dgms),
            &mut written,
        )?;
        save(
            tda.join("barcodes").join(format!("{code}.svg")),
            barcode_svg(&format!("barcode: {code}"), &dgms),
            &mut written,
        )?;

        let mut betti = Vec::new();
        for d in &dgms {
            let k = d.dimension;
            let lpath = tda.join("landscapes").join(format!("{code}_h{k}.csv"));
            let l = plot_err(&lpath, PersistenceLandscape::<f64>::read_csv(open(&lpath)?))?;
            let series: Vec<(String, Vec<(f64, f64)>)> = l
                .layers
                .iter()
                .enumerate()
                .map(|(j, layer)| {
                    (format!("lambda_{}", j + 1), l.grid.iter().copied().zip(layer.iter().copied()).collect())
                })
                .collect();
            save(
                tda.join("landscapes").join(format!("{code}_h{k}.svg")),
                line_svg(&format!("landscape H{k}: {code}"), "filtration value", "lambda", &series),
                &mut written,
            )?;
            let bpath = tda.join("betti").join(format!("{code}_h{k}.csv"));
            let b = plot_err(&bpath, BettiCurve::<f64>::read_csv(open(&bpath)?, k))?;
            betti.push((format!("H{k}"), b.grid.iter().zip(&b.counts).map(|(&t, &c)| (t, c as f64)).collect()));
        }
        save(
            tda.join("betti").join(format!("{code}.svg")),
            line_svg(&format!("Betti curves: {code}"), "filtration value", "count", &betti),
            &mut written,
        )?;
    }
    let wpath = tda.join("wasserstein.csv");
    let w = plot_err(&wpath, SymmetricMatrix::<f64>::read_csv(open(&wpath)?))?;
    save(tda.join("wasserstein_heatmap.svg"), heatmap_svg("Wasserstein distances", &w), &mut written)?;

    let tda_km = assignment(root, "tda_kmeans", Method::Kmeans, FeatureSpace::Tda)?;
    let ppath = tda.join("pca.csv");
    let (_, rows) = table(&ppath)?;
    let pts = rows
        .iter()
        .map(|r| Ok((r[0].clone(), num(&ppath, &r[1])?, num(&ppath, &r[2])?, tda_km.label_of(&r[0]).unwrap_or(0))))
        .collect::<StageResult<Vec<_>>>()?;
    save(tda.join("pca.svg"), scatter_svg("PCA of stacked landscapes", "PC1", "PC2", &pts), &mut written)?;

    let clusters = root.join("clusters");
    for (name, space) in [("stat", FeatureSpace::Statistical), ("tda", FeatureSpace::Tda)] {
        let labels = assignment(root, &format!("{name}_hierarchical"), Method::Hierarchical, space)?.items;
        let path = clusters.join(format!("{name}_dendrogram.csv"));
        let d = plot_err(&path, Dendrogram::<f64>::read_csv(open(&path)?, labels))?;
        save(
            clusters.join(format!("{name}_dendrogram.svg")),
            dendrogram_svg(&format!("complete linkage ({space})"), &d),
            &mut written,
        )?;
    }
    let epath = clusters.join("elbow.csv");
    let (header, rows) = table(&epath)?;
    let mut series = Vec::new();
    for col in 1..header.len() {
        let pts =
            rows.iter().map(|r| Ok((num(&epath, &r[0])?, num(&epath, &r[col])?))).collect::<StageResult<Vec<_>>>()?;
        series.push((header[col].clone(), pts));
    }
    save(clusters.join("elbow.svg"), line_svg("elbow curve", "k", "inertia", &series), &mut written)?;
    let mpath = clusters.join("mds_embedding.csv");
    let (header, rows) = table(&mpath)?;
    if header.len() >= 3 {
        let pts = rows
            .iter()
            .map(|r| Ok((r[0].clone(), num(&mpath, &r[1])?, num(&mpath, &r[2])?, tda_km.label_of(&r[0]).unwrap_or(0))))
            .collect::<StageResult<Vec<_>>>()?;
        save(
            clusters.join("mds.svg"),
            scatter_svg("MDS embedding of Wasserstein distances", "x1", "x2", &pts),
            &mut written,
        )?;
    }

    if root.join("sensitivity/sensitivity_report.csv").exists() {
        written.extend(render_sensitivity(&root.join("sensitivity"))?);
    }
    Ok(written)
}

pub fn render_sensitivity(dir: &Path) -> StageResult<Vec<PathBuf>> {
    let path = dir.join("sensitivity_report.csv");
    let report = plot_err(&path, fxtopo::eval::SensitivityReport::read_csv(open(&path)?))?;
    let groups: Vec<(String, Vec<f64>)> = report
        .rows
        .iter()
        .map(|r| (r.param_change.clone(), [r.mantel, r.ari, r.nmi].iter().map(|v| v.unwrap_or(f64::NAN)).collect()))
        .collect();
    let mut written = Vec::new();
    save(
        dir.join("sensitivity.svg"),
        grouped_bars_svg("sensitivity vs. baseline", &groups, &["Mantel", "ARI", "NMI"]),
        &mut written,
    )?;
    Ok(written)
}
