//! Standalone SVG rendering for the four chart kinds. No raster, no
//! external references, byte-identical output for identical input.

use std::fs;
use std::path::Path;

use crate::report::ReportError;
use crate::result::RunResult;
use crate::stats;

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 500;
pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    LatencyHistogram,
    MetricTrend,
    ConfidenceTrend,
    PredictionBar,
}

impl ChartKind {
    /// File-name stem used by the CLI when emitting the standard set.
    pub fn slug(self) -> &'static str {
        match self {
            ChartKind::LatencyHistogram => "latency_histogram",
            ChartKind::MetricTrend => "metric_trend",
            ChartKind::ConfidenceTrend => "confidence_trend",
            ChartKind::PredictionBar => "prediction_bar",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub width: u32,
    pub height: u32,
    /// Histogram only; other kinds ignore it.
    pub bins: usize,
}

impl ChartSpec {
    pub fn new(kind: ChartKind, title: impl Into<String>) -> Self {
        Self {
            kind,
            title: title.into(),
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            bins: DEFAULT_BINS,
        }
    }

    fn validate(&self) -> Result<(), ReportError> {
        if self.width < 100 || self.height < 100 {
            return Err(ReportError::InvalidChart(format!(
                "chart must be at least 100x100 pixels, got {}x{}",
                self.width, self.height
            )));
        }
        if self.bins == 0 {
            return Err(ReportError::InvalidChart("bins must be at least 1".into()));
        }
        Ok(())
    }
}

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const CPU_COLOR: &str = "#c0392b";
const MEM_COLOR: &str = "#2980b9";
const BAR_COLOR: &str = "#5b8def";
const LINE_COLOR: &str = "#2c7a4b";
const AXIS_COLOR: &str = "#333333";

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

/// Plot-area geometry plus primitive emitters shared by all chart kinds.
struct Canvas {
    svg: String,
    height: f64,
    plot_x: f64,
    plot_y: f64,
    plot_w: f64,
    plot_h: f64,
}

impl Canvas {
    fn new(spec: &ChartSpec) -> Self {
        let width = spec.width as f64;
        let height = spec.height as f64;
        let mut svg = String::with_capacity(4096);
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
             viewBox=\"0 0 {} {}\" font-family=\"monospace\" font-size=\"12\">\n",
            spec.width, spec.height, spec.width, spec.height
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" fill=\"{AXIS_COLOR}\">{}</text>\n",
            fmt(width / 2.0),
            xml_escape(&spec.title)
        ));
        Self {
            svg,
            height,
            plot_x: MARGIN_LEFT,
            plot_y: MARGIN_TOP,
            plot_w: width - MARGIN_LEFT - MARGIN_RIGHT,
            plot_h: height - MARGIN_TOP - MARGIN_BOTTOM,
        }
    }

    fn baseline(&self) -> f64 {
        self.plot_y + self.plot_h
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, color: &str) {
        self.svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"1\"/>\n",
            fmt(x1),
            fmt(y1),
            fmt(x2),
            fmt(y2)
        ));
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, content: &str) {
        self.svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" fill=\"{AXIS_COLOR}\">{}</text>\n",
            fmt(x),
            fmt(y),
            xml_escape(content)
        ));
    }

    /// Bars are the only rect elements in any chart, each tagged with the
    /// count it represents so tooling can audit totals.
    fn bar(&mut self, x: f64, w: f64, h: f64, count: u64) {
        let y = self.baseline() - h;
        self.svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{BAR_COLOR}\" data-count=\"{count}\"/>\n",
            fmt(x),
            fmt(y),
            fmt(w.max(0.5)),
            fmt(h)
        ));
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str) {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(x), fmt(y)))
            .collect();
        self.svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    }

    fn axes(&mut self, x_label: &str, y_label: &str) {
        let base = self.baseline();
        self.line(self.plot_x, self.plot_y, self.plot_x, base, AXIS_COLOR);
        self.line(self.plot_x, base, self.plot_x + self.plot_w, base, AXIS_COLOR);
        self.text(
            self.plot_x + self.plot_w / 2.0,
            self.height - 12.0,
            "middle",
            x_label,
        );
        self.text(14.0, self.plot_y - 8.0, "start", y_label);
    }

    fn y_tick(&mut self, y: f64, label: &str) {
        self.line(self.plot_x - 4.0, y, self.plot_x, y, AXIS_COLOR);
        self.text(self.plot_x - 7.0, y + 4.0, "end", label);
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// Maps iteration index to an x coordinate; a single-record run sits in
/// the middle of the plot.
fn x_at(canvas: &Canvas, i: usize, n: usize) -> f64 {
    if n <= 1 {
        canvas.plot_x + canvas.plot_w / 2.0
    } else {
        canvas.plot_x + canvas.plot_w * i as f64 / (n - 1) as f64
    }
}

/// Uniform bins over [min, max]. A constant series collapses to a single
/// bin holding every record, whatever the requested bin count.
fn histogram_counts(values: &[f64], requested: usize) -> (Vec<u64>, f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return (vec![values.len() as u64], min, max);
    }
    let mut counts = vec![0u64; requested];
    let span = max - min;
    for &v in values {
        let bin = (((v - min) / span) * requested as f64) as usize;
        counts[bin.min(requested - 1)] += 1;
    }
    (counts, min, max)
}

fn render_latency_histogram(r: &RunResult, spec: &ChartSpec) -> String {
    let values: Vec<f64> = r.records.iter().map(|rec| rec.latency_ms).collect();
    let (counts, min, max) = histogram_counts(&values, spec.bins);
    let max_count = counts.iter().copied().max().unwrap_or(1).max(1);

    let mut c = Canvas::new(spec);
    let bar_w = c.plot_w / counts.len() as f64;
    for (i, &count) in counts.iter().enumerate() {
        let h = c.plot_h * count as f64 / max_count as f64;
        c.bar(c.plot_x + i as f64 * bar_w + bar_w * 0.05, bar_w * 0.9, h, count);
    }
    c.axes("latency (ms)", "count");
    let base = c.baseline();
    c.y_tick(base, "0");
    c.y_tick(c.plot_y, &max_count.to_string());
    c.text(c.plot_x, base + 16.0, "start", &fmt(min));
    c.text(c.plot_x + c.plot_w, base + 16.0, "end", &fmt(max));
    c.finish()
}

fn render_metric_trend(r: &RunResult, spec: &ChartSpec) -> Result<String, ReportError> {
    let n = r.records.len();
    let cpu: Vec<(usize, f64)> = r
        .records
        .iter()
        .enumerate()
        .filter_map(|(i, rec)| rec.cpu_pct.map(|v| (i, v)))
        .collect();
    if cpu.is_empty() {
        return Err(ReportError::MissingMetric("cpu_pct".into()));
    }

    let mut c = Canvas::new(spec);
    // utilization lives on a fixed 0..100 scale
    let y_of = |pct: f64, c: &Canvas| c.baseline() - c.plot_h * (pct / 100.0).clamp(0.0, 1.0);
    for tick in [0.0, 25.0, 50.0, 75.0, 100.0] {
        let y = y_of(tick, &c);
        c.y_tick(y, &fmt(tick));
    }
    let cpu_points: Vec<(f64, f64)> = cpu
        .iter()
        .map(|&(i, v)| (x_at(&c, i, n), y_of(v, &c)))
        .collect();
    let mem_points: Vec<(f64, f64)> = r
        .records
        .iter()
        .enumerate()
        .map(|(i, rec)| (x_at(&c, i, n), y_of(rec.mem_pct_after, &c)))
        .collect();
    c.polyline(&cpu_points, CPU_COLOR);
    c.polyline(&mem_points, MEM_COLOR);

    let legend_y = c.plot_y - 8.0;
    let legend_x = c.plot_x + c.plot_w - 170.0;
    c.line(legend_x, legend_y, legend_x + 18.0, legend_y, CPU_COLOR);
    c.text(legend_x + 24.0, legend_y + 4.0, "start", "cpu %");
    c.line(legend_x + 90.0, legend_y, legend_x + 108.0, legend_y, MEM_COLOR);
    c.text(legend_x + 114.0, legend_y + 4.0, "start", "mem %");

    c.axes("iteration", "utilization %");
    let base = c.baseline();
    c.text(c.plot_x, base + 16.0, "start", "0");
    c.text(
        c.plot_x + c.plot_w,
        base + 16.0,
        "end",
        &n.saturating_sub(1).to_string(),
    );
    Ok(c.finish())
}

fn render_confidence_trend(r: &RunResult, spec: &ChartSpec) -> String {
    let n = r.records.len();
    let values: Vec<f64> = r.records.iter().map(|rec| rec.confidence).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut c = Canvas::new(spec);
    // a constant series draws flat through the middle of the plot
    let y_of = |v: f64, c: &Canvas| {
        if min == max {
            c.plot_y + c.plot_h / 2.0
        } else {
            c.baseline() - c.plot_h * (v - min) / (max - min)
        }
    };
    let y_min = y_of(min, &c);
    let y_max = y_of(max, &c);
    c.y_tick(y_min, &fmt(min));
    if max != min {
        c.y_tick(y_max, &fmt(max));
    }
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (x_at(&c, i, n), y_of(v, &c)))
        .collect();
    c.polyline(&points, LINE_COLOR);
    c.axes("iteration", "confidence");
    let base = c.baseline();
    c.text(c.plot_x, base + 16.0, "start", "0");
    c.text(
        c.plot_x + c.plot_w,
        base + 16.0,
        "end",
        &n.saturating_sub(1).to_string(),
    );
    c.finish()
}

fn render_prediction_bar(r: &RunResult, spec: &ChartSpec) -> String {
    let stability = stats::stability(&r.records);
    let histogram = stability.map(|s| s.label_histogram).unwrap_or_default();
    let max_count = histogram.values().copied().max().unwrap_or(1).max(1);

    let mut c = Canvas::new(spec);
    let bar_w = c.plot_w / histogram.len().max(1) as f64;
    let base = c.baseline();
    for (i, (label, &count)) in histogram.iter().enumerate() {
        let x = c.plot_x + i as f64 * bar_w;
        let h = c.plot_h * count as f64 / max_count as f64;
        c.bar(x + bar_w * 0.1, bar_w * 0.8, h, count);
        c.text(x + bar_w / 2.0, base + 16.0, "middle", label);
        c.text(x + bar_w / 2.0, (base - h - 5.0).max(12.0), "middle", &count.to_string());
    }
    c.axes("predicted label", "count");
    c.y_tick(base, "0");
    c.y_tick(c.plot_y, &max_count.to_string());
    c.finish()
}

/// Renders one chart to an SVG string. Output depends only on the run
/// result and spec: no timestamps, fixed float formatting throughout.
pub fn render_chart_svg(r: &RunResult, spec: &ChartSpec) -> Result<String, ReportError> {
    spec.validate()?;
    if r.records.is_empty() {
        return Err(ReportError::InvalidChart("run has no records to plot".into()));
    }
    match spec.kind {
        ChartKind::LatencyHistogram => Ok(render_latency_histogram(r, spec)),
        ChartKind::MetricTrend => render_metric_trend(r, spec),
        ChartKind::ConfidenceTrend => Ok(render_confidence_trend(r, spec)),
        ChartKind::PredictionBar => Ok(render_prediction_bar(r, spec)),
    }
}

pub fn render_chart(r: &RunResult, spec: &ChartSpec, path: &Path) -> Result<(), ReportError> {
    let svg = render_chart_svg(r, spec)?;
    fs::write(path, svg).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}
