//! Unit annotations for scenario quantities.
//!
//! Quantities are written as strings, `"0.44 mm"` or `"0.155 /mm"`; bare
//! numbers are dimensionless.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    InverseLength,
    Dimensionless,
}

impl Dimension {
    pub fn symbol(self) -> &'static str {
        match self {
            Dimension::Length => "mm",
            Dimension::InverseLength => "mm^-1",
            Dimension::Dimensionless => "",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Dimensionless => f.write_str("dimensionless"),
            d => f.write_str(d.symbol()),
        }
    }
}

fn unit_dimension(unit: &str) -> Option<Dimension> {
    match unit {
        "" => Some(Dimension::Dimensionless),
        "mm" => Some(Dimension::Length),
        "/mm" | "1/mm" | "mm^-1" | "mm-1" | "mm⁻¹" => Some(Dimension::InverseLength),
        _ => None,
    }
}

/// Split `"<number> <unit>"` into its value and dimension.
pub fn parse_quantity(text: &str) -> Result<(f64, Dimension), String> {
    let text = text.trim();
    // longest numeric prefix, so "1.5e2mm" splits after the exponent
    let (value, unit) = text
        .char_indices()
        .map(|(i, _)| i)
        .chain([text.len()])
        .rev()
        .find_map(|i| text[..i].trim().parse::<f64>().ok().map(|v| (v, &text[i..])))
        .ok_or_else(|| format!("`{text}` does not start with a number"))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not a finite number"));
    }
    let unit = unit.trim();
    let dim = unit_dimension(unit).ok_or_else(|| format!("unknown unit `{unit}`"))?;
    Ok((value, dim))
}

/// Render a value with its unit the way scenario files write it.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    match dim {
        Dimension::Dimensionless => format!("{value:?}"),
        Dimension::Length => format!("{value:?} mm"),
        Dimension::InverseLength => format!("{value:?} /mm"),
    }
}
