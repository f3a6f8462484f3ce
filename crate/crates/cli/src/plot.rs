//! SVG line plots of success rate against evaluation corridor count.
//!
//! One panel per T-Maze training config; one series per agent, with SEM error
//! bars.

use std::collections::BTreeMap;
use std::fmt::Write;

use memrw_core::agents::AgentKind;
use memrw_core::eval::EvalReport;
use memrw_core::{EnvConfig, Family, Regime};

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub eval_count: u32,
    pub mean: f64,
    pub sem: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub agent: AgentKind,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub train_config: EnvConfig,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn title(&self) -> String {
        self.train_config.label()
    }

    /// File stem safe for any filesystem, e.g. `tmaze_fixed_l5_n3`.
    pub fn file_stem(&self) -> String {
        self.title().replace('/', "_")
    }

    pub fn series_for(&self, agent: AgentKind) -> Option<&Series> {
        self.series.iter().find(|s| s.agent == agent)
    }
}

/// Groups T-Maze reports by training config. The first report for each
/// (train config, agent) pair wins; points are sorted by evaluation count.
pub fn build_panels(reports: &[EvalReport]) -> Vec<Panel> {
    type Key = (Regime, u32, u32);
    let mut panels: BTreeMap<Key, (EnvConfig, BTreeMap<AgentKind, Vec<Point>>)> = BTreeMap::new();
    for r in reports
        .iter()
        .filter(|r| r.train_config.family == Family::TMaze)
    {
        let t = &r.train_config;
        let key = (t.regime_or_default(), t.corridor_length, t.corridor_count);
        let (_, by_agent) = panels
            .entry(key)
            .or_insert_with(|| (t.clone(), BTreeMap::new()));
        if by_agent.contains_key(&r.agent) {
            continue;
        }
        let mut points: Vec<Point> = r
            .entries
            .iter()
            .map(|e| Point {
                eval_count: e.eval_config.corridor_count,
                mean: e.success_mean,
                sem: e.success_sem,
            })
            .collect();
        points.sort_by_key(|p| p.eval_count);
        by_agent.insert(r.agent, points);
    }
    panels
        .into_values()
        .map(|(train_config, by_agent)| Panel {
            train_config,
            series: by_agent
                .into_iter()
                .map(|(agent, points)| Series { agent, points })
                .collect(),
        })
        .collect()
}

const WIDTH: f64 = 420.0;
const HEIGHT: f64 = 300.0;
const LEFT: f64 = 50.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 40.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

pub fn render_svg(panel: &Panel) -> String {
    let counts: Vec<u32> = {
        let mut v: Vec<u32> = panel
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.eval_count))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let x_max = f64::from(counts.last().copied().unwrap_or(1).max(1));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |n: u32| LEFT + plot_w * f64::from(n) / x_max;
    let sy = |v: f64| TOP + plot_h * (1.0 - v.clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">train {}</text>"#,
        LEFT + plot_w / 2.0,
        panel.title()
    );
    // axes
    let (x0, y0, x1, y1) = (LEFT, TOP + plot_h, LEFT + plot_w, TOP);
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{y1:.1}" stroke="black"/>"#
    );
    for v in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = sy(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"##,
            x0 - 4.0,
            y + 4.0
        );
    }
    for &n in &counts {
        let x = sx(n);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
            y0 + 4.0,
            y0 + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">eval corridor count</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 6.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{:.1}" text-anchor="middle" transform="rotate(-90 12 {:.1})">success rate</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, series) in panel.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(s, r#"<g class="series" data-agent="{}">"#, series.agent);
        if series.points.len() > 1 {
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|p| format!("{:.1},{:.1}", sx(p.eval_count), sy(p.mean)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        for p in &series.points {
            let (x, y) = (sx(p.eval_count), sy(p.mean));
            let (lo, hi) = (sy(p.mean - p.sem), sy(p.mean + p.sem));
            let _ = writeln!(
                s,
                r#"<line class="errorbar" x1="{x:.1}" y1="{lo:.1}" x2="{x:.1}" y2="{hi:.1}" stroke="{color}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"><title>{} n={} {:.2}±{:.2}</title></circle>"#,
                series.agent, p.eval_count, p.mean, p.sem
            );
        }
        let ly = TOP + 14.0 * i as f64 + 8.0;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            ly - 8.0,
            lx + 14.0,
            ly + 1.0,
            series.agent
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use memrw_core::eval::{run_eval, EvalSpec};

    fn spec(train: EnvConfig, evals: &[u32], agent: AgentKind) -> EvalReport {
        let mut s = EvalSpec::matched(train.clone(), agent).with_runs(2, 20);
        s.eval_configs = evals
            .iter()
            .map(|&n| EnvConfig::tmaze(train.regime_or_default(), train.corridor_length, n))
            .collect();
        run_eval(&s, 1).unwrap()
    }

    #[test]
    fn panels_group_by_train_config() {
        let a = EnvConfig::tmaze(Regime::Fixed, 5, 3);
        let b = EnvConfig::tmaze(Regime::Fixed, 5, 1);
        let reports = vec![
            spec(a.clone(), &[10, 1, 3], AgentKind::Oracle),
            spec(a.clone(), &[1, 3, 10], AgentKind::Stale),
            spec(b, &[1], AgentKind::Oracle),
        ];
        let panels = build_panels(&reports);
        assert_eq!(panels.len(), 2);
        assert_eq!(panels[0].title(), "tmaze/fixed/l5/n1");
        let oracle = panels[1].series_for(AgentKind::Oracle).unwrap();
        let counts: Vec<u32> = oracle.points.iter().map(|p| p.eval_count).collect();
        assert_eq!(counts, [1, 3, 10]);
        assert_eq!(panels[1].file_stem(), "tmaze_fixed_l5_n3");
    }

    #[test]
    fn svg_has_one_marker_per_point() {
        let reports = vec![spec(
            EnvConfig::tmaze(Regime::Uniform, 5, 3),
            &[1, 3, 5],
            AgentKind::Oracle,
        )];
        let svg = render_svg(&build_panels(&reports)[0]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("class=\"errorbar\"").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
