//! Raw shipment records and their delimited-text form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::schema::{ModeClass, SchemaRegistry, Vocab, FIELDS};
use crate::error::{Error, Result};

/// One surveyed shipment. Categorical fields hold vocabulary codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShipmentRecord {
    pub mode: ModeClass,
    pub size_lb: f64,
    pub value_usd: f64,
    pub distance_mi: f64,
    pub commodity: usize,
    pub hazmat: usize,
    pub temp_controlled: bool,
    pub export: bool,
    pub origin_cfs: usize,
    pub dest_cfs: usize,
    pub naics: usize,
    pub origin_employee_density: f64,
    pub origin_warehouse_count: u32,
    pub origin_highway_density: f64,
    pub origin_railway_density: f64,
    pub origin_temp_over_60f: bool,
    pub dest_population_density: f64,
    pub dest_income_under_50k: bool,
    pub dest_temp_over_60f: bool,
    pub dest_highway_density: f64,
    pub dest_railway_density: f64,
    pub weight: f64,
}

impl ShipmentRecord {
    /// Checks numeric ranges and that categorical codes exist in `registry`.
    /// On failure returns the offending field name and a message.
    pub fn check(&self, registry: &SchemaRegistry) -> Result<(), (&'static str, String)> {
        let nonneg = [
            ("size_lb", self.size_lb),
            ("value_usd", self.value_usd),
            ("distance_mi", self.distance_mi),
            ("origin_employee_density", self.origin_employee_density),
            ("origin_highway_density", self.origin_highway_density),
            ("origin_railway_density", self.origin_railway_density),
            ("dest_population_density", self.dest_population_density),
            ("dest_highway_density", self.dest_highway_density),
            ("dest_railway_density", self.dest_railway_density),
        ];
        for (field, x) in nonneg {
            if !x.is_finite() || x < 0.0 {
                return Err((field, format!("expected a finite value ≥ 0, got {x}")));
            }
        }
        if !self.weight.is_finite() || self.weight <= 0.0 {
            return Err(("weight", format!("expected a finite value > 0, got {}", self.weight)));
        }
        let cats = [
            ("commodity", Vocab::Commodity, self.commodity),
            ("hazmat", Vocab::Hazmat, self.hazmat),
            ("origin_cfs", Vocab::CfsArea, self.origin_cfs),
            ("dest_cfs", Vocab::CfsArea, self.dest_cfs),
            ("naics", Vocab::Naics, self.naics),
        ];
        for (field, vocab, code) in cats {
            let len = registry.vocabularies.get(vocab).len();
            if code >= len {
                return Err((field, format!("code {code} outside vocabulary of {len}")));
            }
        }
        Ok(())
    }
}

/// Reads comma-separated records with a header row. Row order is preserved.
///
/// The `mode` column accepts either a consolidated class id (`parcel`) or a
/// raw survey mode code or name (`14`, `rail`), which is consolidated.
pub fn ingest_table<R: Read>(source: R, registry: &SchemaRegistry) -> Result<Vec<ShipmentRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers()?.clone();

    let mut position = [0usize; FIELDS.len()];
    for (field, slot) in position.iter_mut().enumerate() {
        let name = registry.column(field);
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))?;
    }

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        let cell = |field: usize| -> Result<&str> {
            let text = row.get(position[field]).unwrap_or("");
            if text.is_empty() {
                return Err(ingest_err(row_no, registry.column(field), "missing value"));
            }
            Ok(text)
        };
        let real = |field: usize| -> Result<f64> {
            let text = cell(field)?;
            text.parse::<f64>()
                .map_err(|_| ingest_err(row_no, registry.column(field), format!("not a number: `{text}`")))
        };
        let cat = |field: usize, vocab: Vocab| -> Result<usize> {
            let text = cell(field)?;
            registry.code_of(vocab, text).ok_or_else(|| {
                ingest_err(
                    row_no,
                    registry.column(field),
                    format!("`{text}` is not in the vocabulary"),
                )
            })
        };
        let flag = |field: usize| -> Result<bool> { Ok(cat(field, Vocab::Flag)? == 1) };

        let mode_text = cell(0)?;
        let mode = match ModeClass::from_id(mode_text) {
            Some(m) => m,
            None => registry
                .consolidate_mode(mode_text)
                .map_err(|e| ingest_err(row_no, registry.column(0), e.to_string()))?,
        };
        let warehouses = real(12)?;
        if warehouses.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&warehouses) {
            return Err(ingest_err(
                row_no,
                registry.column(12),
                format!("expected a nonnegative integer, got {warehouses}"),
            ));
        }

        let record = ShipmentRecord {
            mode,
            size_lb: real(1)?,
            value_usd: real(2)?,
            distance_mi: real(3)?,
            commodity: cat(4, Vocab::Commodity)?,
            hazmat: cat(5, Vocab::Hazmat)?,
            temp_controlled: flag(6)?,
            export: flag(7)?,
            origin_cfs: cat(8, Vocab::CfsArea)?,
            dest_cfs: cat(9, Vocab::CfsArea)?,
            naics: cat(10, Vocab::Naics)?,
            origin_employee_density: real(11)?,
            origin_warehouse_count: warehouses as u32,
            origin_highway_density: real(13)?,
            origin_railway_density: real(14)?,
            origin_temp_over_60f: flag(15)?,
            dest_population_density: real(16)?,
            dest_income_under_50k: flag(17)?,
            dest_temp_over_60f: flag(18)?,
            dest_highway_density: real(19)?,
            dest_railway_density: real(20)?,
            weight: real(21)?,
        };
        record.check(registry).map_err(|(field, msg)| {
            let column = FIELDS
                .iter()
                .position(|f| *f == field)
                .map_or(field, |i| registry.column(i));
            ingest_err(row_no, column, msg)
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes records in the format [`ingest_table`] reads.
pub fn write_table<W: Write>(records: &[ShipmentRecord], registry: &SchemaRegistry, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&registry.columns)?;
    let label = |vocab: Vocab, code: usize| -> Result<&str> {
        registry
            .label_of(vocab, code)
            .ok_or_else(|| Error::Schema(format!("code {code} outside vocabulary {vocab:?}")))
    };
    let flag = |b: bool| &registry.vocabularies.flag[b as usize];
    for r in records {
        let row: [String; FIELDS.len()] = [
            r.mode.id().to_string(),
            r.size_lb.to_string(),
            r.value_usd.to_string(),
            r.distance_mi.to_string(),
            label(Vocab::Commodity, r.commodity)?.to_string(),
            label(Vocab::Hazmat, r.hazmat)?.to_string(),
            flag(r.temp_controlled).clone(),
            flag(r.export).clone(),
            label(Vocab::CfsArea, r.origin_cfs)?.to_string(),
            label(Vocab::CfsArea, r.dest_cfs)?.to_string(),
            label(Vocab::Naics, r.naics)?.to_string(),
            r.origin_employee_density.to_string(),
            r.origin_warehouse_count.to_string(),
            r.origin_highway_density.to_string(),
            r.origin_railway_density.to_string(),
            flag(r.origin_temp_over_60f).clone(),
            r.dest_population_density.to_string(),
            flag(r.dest_income_under_50k).clone(),
            flag(r.dest_temp_over_60f).clone(),
            r.dest_highway_density.to_string(),
            r.dest_railway_density.to_string(),
            r.weight.to_string(),
        ];
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn ingest_err(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Ingest {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}
