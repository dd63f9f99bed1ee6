use std::f64::consts::PI;
use std::fmt::Write;

use thiserror::Error;

use super::{leaf_label, Locale};
use crate::engine::{Breakdown, SyntheticFootprint, SyntheticLeaf, TravelAxis};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("nothing to draw: total is 0")]
    EmptyChart,
}

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Degrees, clockwise from 12 o'clock.
#[derive(Debug, Clone, PartialEq)]
pub struct PieSlice {
    pub leaf: SyntheticLeaf,
    pub start_deg: f64,
    pub sweep_deg: f64,
    pub co2e_kg: f64,
    pub share: f64,
}

/// One slice per non-zero leaf, in display order.
pub fn pie_slices(s: &SyntheticFootprint) -> Vec<PieSlice> {
    let mut start = 0.0;
    let mut out = Vec::new();
    if s.total_kg <= 0.0 {
        return out;
    }
    for (leaf, e) in s.leaves() {
        if e.co2e_kg <= 0.0 {
            continue;
        }
        let sweep = 360.0 * e.co2e_kg / s.total_kg;
        out.push(PieSlice { leaf, start_deg: start, sweep_deg: sweep, co2e_kg: e.co2e_kg, share: e.share });
        start += sweep;
    }
    out
}

fn point(cx: f64, cy: f64, r: f64, deg: f64) -> (f64, f64) {
    let t = deg * PI / 180.0;
    (cx + r * t.sin(), cy - r * t.cos())
}

fn header(out: &mut String, width: u32, height: u32) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

fn value_label(label: &str, kg: f64, share: f64) -> String {
    format!("{}: {} kg ({:.1}%)", escape(label), kg.round() + 0.0, share * 100.0)
}

pub fn render_pie_svg(s: &SyntheticFootprint, locale: Locale) -> Result<Vec<u8>, ChartError> {
    let slices = pie_slices(s);
    if slices.is_empty() {
        return Err(ChartError::EmptyChart);
    }
    let (cx, cy, r) = (160.0, 160.0, 140.0);
    let height = 320.max(40 + 24 * slices.len() as u32);
    let mut out = String::new();
    header(&mut out, 680, height);
    for (i, sl) in slices.iter().enumerate() {
        let color = PALETTE[SyntheticLeaf::ALL.iter().position(|l| *l == sl.leaf).unwrap_or(i) % PALETTE.len()];
        if slices.len() == 1 {
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="{r}" fill="{color}" stroke="white"/>"#);
        } else {
            let (x0, y0) = point(cx, cy, r, sl.start_deg);
            let (x1, y1) = point(cx, cy, r, sl.start_deg + sl.sweep_deg);
            let large = u8::from(sl.sweep_deg > 180.0);
            let _ = writeln!(
                out,
                r#"<path d="M {cx:.3} {cy:.3} L {x0:.3} {y0:.3} A {r:.3} {r:.3} 0 {large} 1 {x1:.3} {y1:.3} Z" fill="{color}" stroke="white" data-leaf="{}" data-sweep="{:.6}"/>"#,
                sl.leaf, sl.sweep_deg
            );
        }
        let y = 40 + 24 * i;
        let _ = writeln!(out, r#"<rect x="330" y="{}" width="14" height="14" fill="{color}"/>"#, y - 11);
        let _ = writeln!(out, r#"<text x="352" y="{y}">{}</text>"#, value_label(leaf_label(sl.leaf, locale), sl.co2e_kg, sl.share));
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}

fn axis_title(axis: TravelAxis) -> &'static str {
    match axis {
        TravelAxis::Purpose => "Professional travel by purpose (kg CO2e)",
        TravelAxis::Status => "Professional travel by status (kg CO2e)",
        TravelAxis::Mode => "Professional travel by mode (kg CO2e)",
        TravelAxis::Haul => "Professional travel by flight haul (kg CO2e)",
    }
}

/// Horizontal bar chart, one bar per non-zero row.
pub fn render_bar_svg(b: &Breakdown) -> Result<Vec<u8>, ChartError> {
    let rows: Vec<_> = b.rows.iter().filter(|r| r.co2e_kg > 0.0).collect();
    if b.total_kg <= 0.0 || rows.is_empty() {
        return Err(ChartError::EmptyChart);
    }
    let max = rows.iter().map(|r| r.co2e_kg).fold(0.0, f64::max);
    let (left, bar_max, step) = (240.0, 300.0, 28u32);
    let height = 60 + step * rows.len() as u32;
    let mut out = String::new();
    header(&mut out, 760, height);
    let _ = writeln!(out, r#"<text x="10" y="24" font-size="15">{}</text>"#, axis_title(b.axis));
    for (i, r) in rows.iter().enumerate() {
        let y = 44 + step * i as u32;
        let width = bar_max * r.co2e_kg / max;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 8.0, y + 14, escape(&r.label));
        let _ = writeln!(
            out,
            r#"<rect x="{left}" y="{y}" width="{width:.3}" height="{}" fill="{color}" data-key="{}"/>"#,
            step - 8,
            escape(&r.key)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{}">{} kg ({:.1}%)</text>"#,
            left + width + 6.0,
            y + 14,
            r.co2e_kg.round() + 0.0,
            r.share * 100.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}
