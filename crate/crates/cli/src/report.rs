//! Deterministic JSON and CSV serialization of protocol reports.
//!
//! JSON is written by hand so that every number carries 17 significant digits
//! and the key order is fixed.

use std::fmt::Write as _;

use twophoton_core::measurement::PAIR_LABELS;
use twophoton_core::protocol::{Branch, ProtocolReport};
use twophoton_core::{Amplitude, Ket};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// `%.17g`: shortest of fixed and scientific, trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn complex(a: Amplitude) -> String {
    format!("[{}, {}]", format_number(a.re), format_number(a.im))
}

fn quoted(s: &str) -> String {
    // labels and names are plain ASCII, but escape anyway
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn ket_object(ket: &Ket, indent: &str) -> String {
    let inner = format!("{indent}  ");
    let entries: Vec<String> = ket
        .components()
        .map(|(label, a)| format!("{inner}{}: {}", quoted(&label), complex(a)))
        .collect();
    if entries.is_empty() {
        return "{}".to_string();
    }
    format!("{{\n{}\n{indent}}}", entries.join(",\n"))
}

fn number_list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format_number(*v)).collect();
    format!("[{}]", items.join(", "))
}

fn branch_json(b: &Branch) -> String {
    let mut fields = vec![
        format!("\"bell15\": {}", quoted(b.bell15.name())),
        format!("\"bell26\": {}", quoted(b.bell26.name())),
        format!(
            "\"register_result\": {}",
            b.register_result
                .as_deref()
                .map_or_else(|| "null".to_string(), quoted)
        ),
        format!("\"probability\": {}", format_number(b.probability)),
        format!("\"classification\": {}", quoted(&b.classification.label())),
    ];
    let corrections: Vec<String> = b
        .corrections
        .iter()
        .map(|c| format!("[{}, {}]", c.photon.0, quoted(c.op.name())))
        .collect();
    fields.push(format!("\"corrections\": [{}]", corrections.join(", ")));
    if let Some(res) = &b.residual {
        fields.push(format!("\"residual\": {}", ket_object(res, "      ")));
    }
    let body: Vec<String> = fields.iter().map(|f| format!("      {f}")).collect();
    format!("    {{\n{}\n    }}", body.join(",\n"))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json(report: &ProtocolReport, preset: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"mode\": {},", quoted(report.mode.name()));
    let _ = writeln!(out, "  \"analyzer\": {},", quoted(report.analyzer.name()));

    let input = report.input.to_pair().expect("input is a photon pair");
    let input_entries: Vec<String> = PAIR_LABELS
        .iter()
        .zip(input)
        .map(|(l, a)| format!("    {}: {}", quoted(l), complex(a)))
        .collect();
    let _ = writeln!(out, "  \"input\": {{\n{}\n  }},", input_entries.join(",\n"));

    let basis: Vec<String> = report
        .family
        .basis()
        .states()
        .iter()
        .map(|s| {
            let comps: Vec<String> = s.iter().map(|a| complex(*a)).collect();
            format!("      [{}]", comps.join(", "))
        })
        .collect();
    let assignment: Vec<String> = report
        .family
        .assignment()
        .to_matrix()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            format!("      [{}]", cells.join(", "))
        })
        .collect();
    out.push_str("  \"family\": {\n");
    let _ = writeln!(
        out,
        "    \"preset\": {},",
        preset.map_or_else(|| "null".to_string(), quoted)
    );
    let _ = writeln!(out, "    \"basis\": [\n{}\n    ],", basis.join(",\n"));
    let _ = writeln!(
        out,
        "    \"assignment\": [\n{}\n    ]",
        assignment.join(",\n")
    );
    out.push_str("  },\n");

    let branches: Vec<String> = report.branches.iter().map(branch_json).collect();
    let _ = writeln!(out, "  \"branches\": [\n{}\n  ],", branches.join(",\n"));

    let t = &report.totals;
    out.push_str("  \"totals\": {\n");
    let _ = writeln!(
        out,
        "    \"success_probability\": {},",
        format_number(t.success_probability)
    );
    let _ = writeln!(
        out,
        "    \"conditional_j\": {},",
        number_list(&t.conditional_j)
    );
    let _ = writeln!(
        out,
        "    \"inconclusive_probability\": {}",
        format_number(t.inconclusive_probability)
    );
    out.push_str("  }\n}\n");
    out
}

pub const CSV_HEADER: [&str; 7] = [
    "bell15",
    "bell26",
    "register_result",
    "probability",
    "classification",
    "corrections",
    "residual",
];

/// One row per branch; corrections as `3:Z;4:Z`, residual as `label:re:im;...`.
pub fn to_csv(report: &ProtocolReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for b in &report.branches {
        let corrections: Vec<String> = b
            .corrections
            .iter()
            .map(|c| format!("{}:{}", c.photon.0, c.op.name()))
            .collect();
        let residual: Vec<String> = b
            .residual
            .iter()
            .flat_map(Ket::components)
            .map(|(label, a)| format!("{label}:{}:{}", format_number(a.re), format_number(a.im)))
            .collect();
        w.write_record([
            b.bell15.name(),
            b.bell26.name(),
            b.register_result.as_deref().unwrap_or(""),
            &format_number(b.probability),
            &b.classification.label(),
            &corrections.join(";"),
            &residual.join(";"),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
