//! Minimal static SVG line charts: axes, optional log-log scaling, one
//! polyline per series, and a legend. No external assets; figures are for
//! eyeballing sweeps, not an interactive UI.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub struct Series {
    pub name: String,
    /// (x, y) pairs; non-finite points are skipped.
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_ticks(min: f64, max: f64, n: usize) -> Vec<f64> {
    if max.is_nan() || min.is_nan() || max <= min {
        return vec![min];
    }
    let step = (max - min) / n as f64;
    (0..=n).map(|i| min + step * i as f64).collect()
}

impl Plot {
    pub fn to_svg(&self) -> String {
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                let (x, y) = (tx(x), ty(y));
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        let (xmin, xmax) = bounds_of(&xs);
        let (ymin, ymax) = bounds_of(&ys);
        let xspan = (xmax - xmin).max(1e-12);
        let yspan = (ymax - ymin).max(1e-12);
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let px = |x: f64| MARGIN_L + (x - xmin) / xspan * plot_w;
        let py = |y: f64| HEIGHT - MARGIN_B - (y - ymin) / yspan * plot_h;

        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            esc(&self.title)
        ));

        // axes
        out.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
            l = MARGIN_L,
            r = WIDTH - MARGIN_R,
            t = MARGIN_T,
            b = HEIGHT - MARGIN_B
        ));
        for v in nice_ticks(xmin, xmax, 6) {
            let x = px(v);
            let label = if self.log_x {
                format!("1e{v:.2}")
            } else {
                format!("{v:.4}")
            };
            out.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\n<text x=\"{x}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{label}</text>\n",
                b = HEIGHT - MARGIN_B,
                b2 = HEIGHT - MARGIN_B + 5.0,
                ty = HEIGHT - MARGIN_B + 18.0
            ));
        }
        for v in nice_ticks(ymin, ymax, 6) {
            let y = py(v);
            let label = if self.log_y {
                format!("1e{v:.2}")
            } else {
                format!("{v:.4}")
            };
            out.push_str(&format!(
                "<line x1=\"{l2}\" y1=\"{y}\" x2=\"{l}\" y2=\"{y}\" stroke=\"black\"/>\n<text x=\"{lx}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{label}</text>\n",
                l = MARGIN_L,
                l2 = MARGIN_L - 5.0,
                lx = MARGIN_L - 8.0
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 10.0,
            esc(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            esc(&self.y_label)
        ));

        // series
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut coords = String::new();
            for &(x, y) in &s.points {
                let (x, y) = (tx(x), ty(y));
                if x.is_finite() && y.is_finite() {
                    coords.push_str(&format!("{:.3},{:.3} ", px(x), py(y)));
                }
            }
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                coords.trim_end()
            ));
            // legend entry
            let ly = MARGIN_T + 14.0 + 16.0 * i as f64;
            out.push_str(&format!(
                "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{lx2}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n<text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                esc(&s.name),
                lx = WIDTH - MARGIN_R + 10.0,
                lx2 = WIDTH - MARGIN_R + 30.0,
                tx = WIDTH - MARGIN_R + 35.0,
                ty = ly + 4.0
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds_of(vals: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in vals {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        (0.0, 1.0)
    } else {
        (min, max)
    }
}
