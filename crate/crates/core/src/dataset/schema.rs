//! Schema registry: column names, categorical vocabularies and the raw
//! survey-mode consolidation table.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of consolidated mode classes.
pub const N_CLASSES: usize = 5;

/// The five consolidated shipment modes. Integer codes follow declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    ForHireTruck,
    PrivateTruck,
    Parcel,
    Air,
    Other,
}

impl ModeClass {
    pub const ALL: [ModeClass; N_CLASSES] = [
        ModeClass::ForHireTruck,
        ModeClass::PrivateTruck,
        ModeClass::Parcel,
        ModeClass::Air,
        ModeClass::Other,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<ModeClass> {
        Self::ALL.get(code).copied()
    }

    /// Identifier used in data files and the registry.
    pub fn id(self) -> &'static str {
        match self {
            ModeClass::ForHireTruck => "for_hire_truck",
            ModeClass::PrivateTruck => "private_truck",
            ModeClass::Parcel => "parcel",
            ModeClass::Air => "air",
            ModeClass::Other => "other",
        }
    }

    pub fn from_id(id: &str) -> Option<ModeClass> {
        Self::ALL.into_iter().find(|m| m.id() == id)
    }

    pub fn class_names() -> Vec<String> {
        Self::ALL.iter().map(|m| m.id().to_string()).collect()
    }
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One raw survey mode code and its consolidated group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfsMode {
    pub code: u32,
    pub name: String,
    pub group: ModeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vocabularies {
    pub commodity: Vec<String>,
    pub hazmat: Vec<String>,
    /// Two-entry vocabulary shared by every boolean column: `[false, true]`.
    pub flag: Vec<String>,
    pub cfs_area: Vec<String>,
    pub naics: Vec<String>,
}

/// Which vocabulary a categorical field draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vocab {
    Commodity,
    Hazmat,
    Flag,
    CfsArea,
    Naics,
}

impl Vocabularies {
    pub fn get(&self, vocab: Vocab) -> &[String] {
        match vocab {
            Vocab::Commodity => &self.commodity,
            Vocab::Hazmat => &self.hazmat,
            Vocab::Flag => &self.flag,
            Vocab::CfsArea => &self.cfs_area,
            Vocab::Naics => &self.naics,
        }
    }
}

/// Canonical record fields, in column order.
pub const FIELDS: [&str; 22] = [
    "mode",
    "size_lb",
    "value_usd",
    "distance_mi",
    "commodity",
    "hazmat",
    "temp_controlled",
    "export",
    "origin_cfs",
    "dest_cfs",
    "naics",
    "origin_employee_density",
    "origin_warehouse_count",
    "origin_highway_density",
    "origin_railway_density",
    "origin_temp_over_60f",
    "dest_population_density",
    "dest_income_under_50k",
    "dest_temp_over_60f",
    "dest_highway_density",
    "dest_railway_density",
    "weight",
];

const DEFAULT_REGISTRY: &str = include_str!("../../schema/registry.toml");

/// Column names, vocabularies in code order, and the raw-mode consolidation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaRegistry {
    pub version: u32,
    /// Column header for each entry of [`FIELDS`], positionally.
    pub columns: Vec<String>,
    pub vocabularies: Vocabularies,
    pub cfs_modes: Vec<CfsMode>,
}

impl Default for SchemaRegistry {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_REGISTRY).expect("bundled registry is valid")
    }
}

impl SchemaRegistry {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let registry: SchemaRegistry = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        registry.validate()?;
        Ok(registry)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// The bundled registry text, for writing next to run outputs.
    pub fn default_toml() -> &'static str {
        DEFAULT_REGISTRY
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(Error::Schema(format!("unsupported registry version {}", self.version)));
        }
        if self.columns.len() != FIELDS.len() {
            return Err(Error::Schema(format!(
                "registry lists {} columns, expected {}",
                self.columns.len(),
                FIELDS.len()
            )));
        }
        check_unique("columns", &self.columns)?;

        let v = &self.vocabularies;
        for (name, list, max) in [
            ("commodity", &v.commodity, 9),
            ("hazmat", &v.hazmat, 3),
            ("flag", &v.flag, 2),
            ("cfs_area", &v.cfs_area, 132),
            ("naics", &v.naics, 45),
        ] {
            if list.is_empty() || list.len() > max {
                return Err(Error::Schema(format!(
                    "vocabulary `{name}` must have between 1 and {max} entries, found {}",
                    list.len()
                )));
            }
            check_unique(name, list)?;
        }
        if v.flag.len() != 2 {
            return Err(Error::Schema("vocabulary `flag` must have exactly 2 entries".into()));
        }

        let mut codes = HashSet::new();
        let mut names = HashSet::new();
        for m in &self.cfs_modes {
            if !codes.insert(m.code) {
                return Err(Error::Schema(format!("duplicate CFS mode code {}", m.code)));
            }
            if !names.insert(m.name.to_lowercase()) {
                return Err(Error::Schema(format!("duplicate CFS mode name `{}`", m.name)));
            }
        }
        for class in ModeClass::ALL {
            if !self.cfs_modes.iter().any(|m| m.group == class) {
                return Err(Error::Schema(format!("no CFS mode consolidates into `{class}`")));
            }
        }
        Ok(())
    }

    pub fn column(&self, field: usize) -> &str {
        &self.columns[field]
    }

    /// Maps a raw survey mode, given by numeric code or by name, to its group.
    pub fn consolidate_mode(&self, raw: &str) -> Result<ModeClass> {
        let raw = raw.trim();
        let found = match raw.parse::<u32>() {
            Ok(code) => self.cfs_modes.iter().find(|m| m.code == code),
            Err(_) => self.cfs_modes.iter().find(|m| m.name.eq_ignore_ascii_case(raw)),
        };
        found
            .map(|m| m.group)
            .ok_or_else(|| Error::Schema(format!("unregistered CFS mode code `{raw}`")))
    }

    /// Position of `value` in the vocabulary, i.e. its integer code.
    pub fn code_of(&self, vocab: Vocab, value: &str) -> Option<usize> {
        self.vocabularies.get(vocab).iter().position(|v| v == value)
    }

    pub fn label_of(&self, vocab: Vocab, code: usize) -> Option<&str> {
        self.vocabularies.get(vocab).get(code).map(String::as_str)
    }
}

fn check_unique(what: &str, list: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for item in list {
        if !seen.insert(item) {
            return Err(Error::Schema(format!("duplicate entry `{item}` in `{what}`")));
        }
    }
    Ok(())
}
