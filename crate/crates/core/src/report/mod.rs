//! Rendering of a footprint result: regulatory CSV, synthetic table, charts.

mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use svg::{pie_slices, render_bar_svg, render_pie_svg, ChartError, PieSlice};

use crate::engine::{Entry, FootprintResult, RegulatoryTable, Scope, SyntheticFootprint, SyntheticGroup, SyntheticLeaf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locale {
    Fr,
    #[default]
    En,
}

impl Locale {
    pub fn as_str(self) -> &'static str {
        match self {
            Locale::Fr => "fr",
            Locale::En => "en",
        }
    }
}

impl fmt::Display for Locale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Locale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fr" => Ok(Locale::Fr),
            "en" => Ok(Locale::En),
            other => Err(format!("unknown locale '{other}', expected fr or en")),
        }
    }
}

fn whole_kg(v: f64) -> String {
    format!("{}", v.round() + 0.0)
}

fn scope_label(s: Scope, locale: Locale) -> String {
    match locale {
        Locale::Fr => format!("Sous-total scope {}", s.number()),
        Locale::En => format!("Scope {} subtotal", s.number()),
    }
}

/// 23 category rows interleaved with the 3 scope subtotals, then the total.
/// No header line; numbers are whole kg.
pub fn render_regulatory_csv(t: &RegulatoryTable, locale: Locale) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut write = |cols: [&str; 4]| w.write_record(cols).expect("writing to memory");
    for row in &t.rows {
        let label = match locale {
            Locale::Fr => row.category.label_fr(),
            Locale::En => row.category.label_en(),
        };
        write([&row.category.number().to_string(), label, &whole_kg(row.co2e_kg), &whole_kg(row.uncertainty_kg)]);
        let last_of_scope = matches!(row.category.number(), 5 | 7 | 23);
        if last_of_scope {
            let s = t.scope(row.scope);
            write([&format!("S{}", s.scope.number()), &scope_label(s.scope, locale), &whole_kg(s.co2e_kg), &whole_kg(s.uncertainty_kg)]);
        }
    }
    write(["T", "Total", &whole_kg(t.total_kg), &whole_kg(t.uncertainty_kg)]);
    w.into_inner().expect("in-memory writer")
}

pub fn leaf_label(leaf: SyntheticLeaf, locale: Locale) -> &'static str {
    match (locale, leaf) {
        (Locale::En, SyntheticLeaf::Heating) => "Heating",
        (Locale::En, SyntheticLeaf::Electricity) => "Electricity",
        (Locale::En, SyntheticLeaf::Refrigerants) => "Refrigerant gases",
        (Locale::En, SyntheticLeaf::Commutes) => "Commutes",
        (Locale::En, SyntheticLeaf::Vehicles) => "Vehicles",
        (Locale::En, SyntheticLeaf::ProfessionalTravel) => "Professional travel",
        (Locale::Fr, SyntheticLeaf::Heating) => "Chauffage",
        (Locale::Fr, SyntheticLeaf::Electricity) => "Électricité",
        (Locale::Fr, SyntheticLeaf::Refrigerants) => "Gaz réfrigérants",
        (Locale::Fr, SyntheticLeaf::Commutes) => "Déplacements domicile-travail",
        (Locale::Fr, SyntheticLeaf::Vehicles) => "Véhicules",
        (Locale::Fr, SyntheticLeaf::ProfessionalTravel) => "Missions",
    }
}

pub fn group_label(group: SyntheticGroup, locale: Locale) -> &'static str {
    match (locale, group) {
        (Locale::En, SyntheticGroup::Buildings) => "Carbon footprint of the buildings",
        (Locale::En, SyntheticGroup::Travel) => "Travel carbon footprint",
        (Locale::Fr, SyntheticGroup::Buildings) => "Empreinte carbone des bâtiments",
        (Locale::Fr, SyntheticGroup::Travel) => "Empreinte carbone des déplacements",
    }
}

/// Share of total in whole percent, or a dash when the total is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SharePercent {
    Percent(u32),
    Undefined(&'static str),
}

impl fmt::Display for SharePercent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SharePercent::Percent(p) => write!(f, "{p}%"),
            SharePercent::Undefined(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticRow {
    pub key: String,
    pub label: String,
    /// 0 for a group line, 1 for a leaf under it.
    pub level: u8,
    pub co2e_kg: u64,
    pub share: SharePercent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticDocument {
    pub locale: Locale,
    pub rows: Vec<SyntheticRow>,
    pub total_kg: u64,
    pub uncertainty_kg: u64,
}

fn share(e: &Entry, total: f64) -> SharePercent {
    if total > 0.0 {
        SharePercent::Percent((e.share * 100.0).round() as u32)
    } else {
        SharePercent::Undefined("–")
    }
}

pub fn synthetic_rows(s: &SyntheticFootprint, locale: Locale) -> SyntheticDocument {
    let mut rows = Vec::new();
    for group in [SyntheticGroup::Buildings, SyntheticGroup::Travel] {
        let e = s.group(group);
        rows.push(SyntheticRow {
            key: match group {
                SyntheticGroup::Buildings => "buildings".into(),
                SyntheticGroup::Travel => "travel".into(),
            },
            label: group_label(group, locale).into(),
            level: 0,
            co2e_kg: e.co2e_kg.round() as u64,
            share: share(e, s.total_kg),
        });
        for leaf in SyntheticLeaf::ALL.into_iter().filter(|l| l.group() == group) {
            let e = s.leaf(leaf);
            rows.push(SyntheticRow {
                key: leaf.as_str().into(),
                label: leaf_label(leaf, locale).into(),
                level: 1,
                co2e_kg: e.co2e_kg.round() as u64,
                share: share(e, s.total_kg),
            });
        }
    }
    SyntheticDocument {
        locale,
        rows,
        total_kg: s.total_kg.round() as u64,
        uncertainty_kg: s.uncertainty_kg.round() as u64,
    }
}

/// Synthetic table as JSON (pretty, trailing newline) and as aligned text.
pub fn render_synthetic(s: &SyntheticFootprint, locale: Locale) -> (Vec<u8>, String) {
    let doc = synthetic_rows(s, locale);
    let mut json = serde_json::to_vec_pretty(&doc).expect("synthetic table serializes");
    json.push(b'\n');

    let (head, kg, pct, total) = match locale {
        Locale::En => ("Carbon footprint", "Emissions in kg CO2e", "Share of total footprint", "Total"),
        Locale::Fr => ("Empreinte carbone", "Émissions en kg CO2e", "Part de l'empreinte totale", "Total"),
    };
    let mut lines = vec![(head.to_owned(), kg.to_owned(), pct.to_owned())];
    for r in &doc.rows {
        let label = if r.level == 0 { r.label.clone() } else { format!("- {}", r.label) };
        lines.push((label, r.co2e_kg.to_string(), r.share.to_string()));
    }
    lines.push((total.to_owned(), format!("{} ± {}", doc.total_kg, doc.uncertainty_kg), String::new()));
    let width = |f: fn(&(String, String, String)) -> &String| lines.iter().map(|l| f(l).chars().count()).max().unwrap_or(0);
    let (w0, w1) = (width(|l| &l.0), width(|l| &l.1));
    let mut text = String::new();
    for (a, b, c) in &lines {
        let line = format!("{a:<w0$}  {b:>w1$}  {c}");
        text.push_str(line.trim_end());
        text.push('\n');
    }
    (json, text)
}

/// Replaces characters that are awkward in file names.
pub fn file_name(lab: &str, year: i32, report: &str, ext: &str) -> String {
    let lab: String = lab
        .trim()
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    let lab = if lab.is_empty() { "lab".to_owned() } else { lab };
    format!("{lab}_{year}_{report}.{ext}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub regulatory_csv: Vec<u8>,
    pub synthetic_json: Vec<u8>,
    pub synthetic_text: String,
    /// Chart name to SVG document. Charts with nothing to draw are left out.
    pub charts: BTreeMap<String, Vec<u8>>,
}

pub const PIE_CHART: &str = "pie";
pub const PURPOSE_CHART: &str = "travel_purpose";
pub const STATUS_CHART: &str = "travel_status";

impl ReportBundle {
    pub fn render(result: &FootprintResult, locale: Locale) -> Self {
        let (synthetic_json, synthetic_text) = render_synthetic(&result.synthetic, locale);
        let mut charts = BTreeMap::new();
        if let Ok(svg) = render_pie_svg(&result.synthetic, locale) {
            charts.insert(PIE_CHART.to_owned(), svg);
        }
        if let Ok(svg) = render_bar_svg(&result.breakdowns.purpose) {
            charts.insert(PURPOSE_CHART.to_owned(), svg);
        }
        if let Ok(svg) = render_bar_svg(&result.breakdowns.status) {
            charts.insert(STATUS_CHART.to_owned(), svg);
        }
        ReportBundle {
            regulatory_csv: render_regulatory_csv(&result.regulatory, locale),
            synthetic_json,
            synthetic_text,
            charts,
        }
    }

    /// Named files for the bundle, excluding the result JSON itself.
    pub fn files(&self, lab: &str, year: i32) -> Vec<(String, Vec<u8>)> {
        let mut out = vec![
            (file_name(lab, year, "regulatory", "csv"), self.regulatory_csv.clone()),
            (file_name(lab, year, "synthetic", "json"), self.synthetic_json.clone()),
        ];
        for (name, svg) in &self.charts {
            out.push((file_name(lab, year, name, "svg"), svg.clone()));
        }
        out
    }
}
