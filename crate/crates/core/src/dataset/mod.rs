//! Shipment records, the schema registry, banding, encoding and synthetic data.

mod binning;
mod encode;
mod record;
mod schema;
mod synthetic;

pub use binning::{Bands, BinningScheme, Cut};
pub use encode::{encode_dataset, EncodedDataset, FEATURE_NAMES};
pub use record::{ingest_table, write_table, ShipmentRecord};
pub use schema::{CfsMode, ModeClass, SchemaRegistry, Vocab, Vocabularies, FIELDS, N_CLASSES};
pub use synthetic::{generate_synthetic, survey_mode_shares_normalized, SyntheticSpec, SURVEY_MODE_SHARES};

/// Weighted share of each consolidated mode.
pub fn weighted_mode_shares(data: &EncodedDataset) -> [f64; N_CLASSES] {
    data.weighted_mode_shares()
}
