//! Static SVG line charts with confidence-interval error bars.

use std::fmt::Write;

use super::GroupStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// Wall time in ms on a log10 ordinate.
    RuntimeLog,
    CostRatio,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1b6ca8", "#d1495b", "#edae49", "#00798c"];
/// Floor for non-positive values on the log axis, in ms.
const LOG_FLOOR: f64 = 1e-3;

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders `stats` (one series per solver). Empty input gives an empty chart.
pub fn emit_chart(stats: &[GroupStats], kind: ChartKind) -> Vec<u8> {
    let mut solvers: Vec<&str> = Vec::new();
    for g in stats {
        if !solvers.contains(&g.solver.as_str()) {
            solvers.push(&g.solver);
        }
    }
    let mut xs: Vec<usize> = stats.iter().map(|g| g.axis_value).collect();
    xs.sort_unstable();
    xs.dedup();

    let log = kind == ChartKind::RuntimeLog;
    let tf = |v: f64| if log { v.max(LOG_FLOOR).log10() } else { v };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for g in stats {
        let (a, b) = g.stats.ci().unwrap_or((g.stats.mean, g.stats.mean));
        lo = lo.min(tf(a));
        hi = hi.max(tf(b));
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let ticks: Vec<f64> = if log {
        lo = lo.floor();
        hi = hi.ceil().max(lo + 1.0);
        (lo as i32..=hi as i32).map(f64::from).collect()
    } else {
        if hi - lo < 1e-9 {
            lo -= 0.05;
            hi += 0.05;
        }
        let step = nice_step(hi - lo);
        lo = (lo / step).floor() * step;
        hi = (hi / step).ceil() * step;
        let n = ((hi - lo) / step).round() as i32;
        (0..=n).map(|i| lo + i as f64 * step).collect()
    };

    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let px = |i: usize| {
        if xs.len() <= 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * i as f64 / (xs.len() - 1) as f64
        }
    };
    let py = |v: f64| TOP + plot_h * (1.0 - (v - lo) / (hi - lo));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let title = if log { "Wall time (ms, log scale)" } else { "Cost ratio to exact optimum" };
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle">{title}</text>"#, fmt_num(LEFT + plot_w / 2.0));
    for &t in &ticks {
        let y = fmt_num(py(t));
        let label = if log { format!("1e{}", t as i32) } else { fmt_num(t) };
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{y}" text-anchor="end" dy="4">{label}</text>"##,
            fmt_num(LEFT + plot_w),
            fmt_num(LEFT - 6.0)
        );
    }
    for (i, x) in xs.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#,
            fmt_num(px(i)),
            fmt_num(TOP + plot_h + 18.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        fmt_num(plot_w),
        fmt_num(plot_h)
    );

    for (k, solver) in solvers.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut points = Vec::new();
        for g in stats.iter().filter(|g| g.solver == *solver) {
            let i = xs.binary_search(&g.axis_value).expect("axis value listed");
            let x = px(i);
            let y = py(tf(g.stats.mean));
            if let Some((a, b)) = g.stats.ci() {
                let (ya, yb) = (py(tf(a)), py(tf(b)));
                let _ = writeln!(
                    s,
                    r#"<path d="M{0} {1}V{2}M{3} {1}H{4}M{3} {2}H{4}" stroke="{color}" fill="none"/>"#,
                    fmt_num(x),
                    fmt_num(ya),
                    fmt_num(yb),
                    fmt_num(x - 4.0),
                    fmt_num(x + 4.0)
                );
            }
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, fmt_num(x), fmt_num(y));
            points.push(format!("{},{}", fmt_num(x), fmt_num(y)));
        }
        if points.len() > 1 {
            let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, points.join(" "));
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{solver}</text>"#,
            fmt_num(W - RIGHT + 14.0),
            fmt_num(ly - 9.0),
            fmt_num(W - RIGHT + 30.0),
            fmt_num(ly)
        );
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}
