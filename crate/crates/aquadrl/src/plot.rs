//! Standalone SVG figures rendered from previously written CSV files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use plotters::coord::Shift;
use plotters::prelude::*;

use crate::io::write_atomic;
use crate::records::{read_csv, AggregateRow, RewardRow, TrajectoryRow};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Per-episode reward and moving average from `rewards.csv`.
    Reward,
    /// Pose components over time from `trajectories.csv`.
    Pose,
    /// Planar projections of the path from `trajectories.csv`.
    Traj3d,
    /// Mean power with standard deviation from `aggregate.csv`.
    Power,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reward" => Ok(PlotKind::Reward),
            "pose" => Ok(PlotKind::Pose),
            "traj3d" => Ok(PlotKind::Traj3d),
            "power" => Ok(PlotKind::Power),
            other => Err(Error::Plot(format!("unknown plot kind '{other}' (expected reward, pose, traj3d or power)"))),
        }
    }
}

fn pe(e: impl std::fmt::Display) -> Error {
    Error::Plot(e.to_string())
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

/// Renders `kind` from `inputs` into the SVG file `out`.
pub fn plot(kind: PlotKind, inputs: &[PathBuf], out: &Path) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::Plot("no input CSV given".into()));
    }
    let svg = match kind {
        PlotKind::Reward => reward_svg(&read_all(inputs)?)?,
        PlotKind::Pose => pose_svg(&read_all(inputs)?)?,
        PlotKind::Traj3d => traj_svg(&read_all(inputs)?)?,
        PlotKind::Power => power_svg(&read_all(inputs)?)?,
    };
    write_atomic(out, svg.as_bytes())
}

fn read_all<T: serde::de::DeserializeOwned>(inputs: &[PathBuf]) -> Result<Vec<T>> {
    let mut rows = Vec::new();
    for p in inputs {
        rows.extend(read_csv::<T>(p)?);
    }
    if rows.is_empty() {
        return Err(Error::csv(&inputs[0], "no data rows"));
    }
    Ok(rows)
}

pub fn reward_svg(rows: &[RewardRow]) -> Result<String> {
    let mut by_algo: BTreeMap<&str, Vec<&RewardRow>> = BTreeMap::new();
    for r in rows {
        by_algo.entry(&r.algo).or_default().push(r);
    }
    let x_max = rows.iter().map(|r| r.episode).max().unwrap_or(1) as f64;
    let (y0, y1) = bounds(rows.iter().map(|r| r.reward));
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (900, 560)).into_drawing_area();
        root.fill(&WHITE).map_err(pe)?;
        let mut chart = ChartBuilder::on(&root)
            .caption("Episode reward", ("sans-serif", 22))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(0.0..x_max.max(1.0), y0..y1)
            .map_err(pe)?;
        chart.configure_mesh().x_desc("episode").y_desc("total reward").draw().map_err(pe)?;
        for (i, (algo, rs)) in by_algo.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            chart.draw_series(LineSeries::new(rs.iter().map(|r| (r.episode as f64, r.reward)), color.mix(0.25))).map_err(pe)?;
            let ma: Vec<(f64, f64)> = rs.iter().filter_map(|r| r.moving_average.map(|m| (r.episode as f64, m))).collect();
            chart
                .draw_series(LineSeries::new(ma, color.stroke_width(2)))
                .map_err(pe)?
                .label(format!("{algo} (moving average)"))
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(pe)?;
        root.present().map_err(pe)?;
    }
    Ok(buf)
}

fn episodes(rows: &[TrajectoryRow]) -> BTreeMap<usize, Vec<&TrajectoryRow>> {
    let mut m: BTreeMap<usize, Vec<&TrajectoryRow>> = BTreeMap::new();
    for r in rows {
        m.entry(r.episode).or_default().push(r);
    }
    m
}

type Getter = fn(&TrajectoryRow) -> f64;
/// A plotted quantity and its axis label.
type Axis = (Getter, &'static str);

fn panel_lines(area: &DrawingArea<SVGBackend<'_>, Shift>, title: &str, xs: (Getter, &str), ys: (Getter, &str), eps: &BTreeMap<usize, Vec<&TrajectoryRow>>) -> Result<()> {
    let all = || eps.values().flatten();
    let (x0, x1) = bounds(all().map(|r| xs.0(r)));
    let (y0, y1) = bounds(all().map(|r| ys.0(r)));
    let mut chart = ChartBuilder::on(area)
        .caption(title, ("sans-serif", 16))
        .margin(8)
        .x_label_area_size(32)
        .y_label_area_size(50)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(pe)?;
    chart.configure_mesh().x_desc(xs.1).y_desc(ys.1).draw().map_err(pe)?;
    for (i, rs) in eps.values().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart.draw_series(LineSeries::new(rs.iter().map(|r| (xs.0(r), ys.0(r))), color)).map_err(pe)?;
    }
    Ok(())
}

pub fn pose_svg(rows: &[TrajectoryRow]) -> Result<String> {
    let eps = episodes(rows);
    let panels: [(&str, Getter, &str); 6] = [
        ("x", |r| r.x, "m"),
        ("y", |r| r.y, "m"),
        ("z", |r| r.z, "m"),
        ("roll", |r| r.roll, "rad"),
        ("pitch", |r| r.pitch, "rad"),
        ("heading", |r| r.heading, "rad"),
    ];
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (1200, 720)).into_drawing_area();
        root.fill(&WHITE).map_err(pe)?;
        for (area, (name, get, unit)) in root.split_evenly((2, 3)).iter().zip(panels) {
            panel_lines(area, name, (|r| r.t, "t [s]"), (get, unit), &eps)?;
        }
        root.present().map_err(pe)?;
    }
    Ok(buf)
}

pub fn traj_svg(rows: &[TrajectoryRow]) -> Result<String> {
    let eps = episodes(rows);
    let views: [(&str, Axis, Axis); 3] = [
        ("top (x-y)", (|r| r.x, "x [m]"), (|r| r.y, "y [m]")),
        ("side (x-z)", (|r| r.x, "x [m]"), (|r| r.z, "z [m]")),
        ("front (y-z)", (|r| r.y, "y [m]"), (|r| r.z, "z [m]")),
    ];
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (1350, 450)).into_drawing_area();
        root.fill(&WHITE).map_err(pe)?;
        for (area, (title, xs, ys)) in root.split_evenly((1, 3)).iter().zip(views) {
            panel_lines(area, title, xs, ys, &eps)?;
        }
        root.present().map_err(pe)?;
    }
    Ok(buf)
}

pub fn power_svg(rows: &[AggregateRow]) -> Result<String> {
    let bars: Vec<&AggregateRow> = rows.iter().filter(|r| r.metric == "mean_power").collect();
    if bars.is_empty() {
        return Err(Error::Plot("aggregate CSV has no mean_power rows".into()));
    }
    let n = bars.len();
    let top = bars.iter().map(|b| b.mean + b.std).fold(0.0, f64::max).max(1.0) * 1.1;
    let labels: Vec<String> = bars.iter().map(|b| b.controller.clone()).collect();
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (800, 520)).into_drawing_area();
        root.fill(&WHITE).map_err(pe)?;
        let mut chart = ChartBuilder::on(&root)
            .caption("Average power consumption", ("sans-serif", 22))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(-0.5..n as f64 - 0.5, 0.0..top)
            .map_err(pe)?;
        chart
            .configure_mesh()
            .disable_x_mesh()
            .x_labels(n)
            .x_label_formatter(&|x| {
                let i = x.round();
                if (x - i).abs() < 1e-6 && i >= 0.0 && (i as usize) < labels.len() {
                    labels[i as usize].clone()
                } else {
                    String::new()
                }
            })
            .y_desc("power [W]")
            .draw()
            .map_err(pe)?;
        for (i, b) in bars.iter().enumerate() {
            let x = i as f64;
            let color = Palette99::pick(i).to_rgba();
            chart.draw_series(std::iter::once(Rectangle::new([(x - 0.3, 0.0), (x + 0.3, b.mean)], color.filled()))).map_err(pe)?;
            let (lo, hi) = ((b.mean - b.std).max(0.0), b.mean + b.std);
            chart
                .draw_series([
                    PathElement::new(vec![(x, lo), (x, hi)], BLACK.stroke_width(2)),
                    PathElement::new(vec![(x - 0.08, lo), (x + 0.08, lo)], BLACK.stroke_width(2)),
                    PathElement::new(vec![(x - 0.08, hi), (x + 0.08, hi)], BLACK.stroke_width(2)),
                ])
                .map_err(pe)?;
        }
        root.present().map_err(pe)?;
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_chart_has_one_bar_per_controller() {
        let rows = vec![
            AggregateRow { controller: "pid".into(), metric: "mean_power".into(), mean: 60.0, std: 5.0, n: 3 },
            AggregateRow { controller: "tqc-ea".into(), metric: "mean_power".into(), mean: 40.0, std: 8.0, n: 3 },
            AggregateRow { controller: "pid".into(), metric: "rmse_x".into(), mean: 1.0, std: 0.1, n: 3 },
        ];
        let svg = power_svg(&rows).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("tqc-ea"));
        assert!(power_svg(&rows[2..]).is_err());
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!("heatmap".parse::<PlotKind>().is_err());
        assert_eq!("traj3d".parse::<PlotKind>().unwrap(), PlotKind::Traj3d);
    }
}
