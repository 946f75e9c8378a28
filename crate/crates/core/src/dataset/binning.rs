//! Ordinal banding of shipment size, value and distance.
//!
//! Each variable is cut at an ascending list of boundaries. A boundary is
//! either *upper-inclusive* (a value equal to it stays in the lower band, as
//! in "≤ 30" followed by "31–200") or *lower-inclusive* (a value equal to it
//! moves up, as in "< 300" followed by "300–1000"). The default bands follow
//! the published labels exactly, boundary by boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One band boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cut {
    pub at: f64,
    /// `true`: `x == at` belongs to the band below the cut.
    pub upper_inclusive: bool,
}

impl Cut {
    const fn upper(at: f64) -> Cut {
        Cut {
            at,
            upper_inclusive: true,
        }
    }

    const fn lower(at: f64) -> Cut {
        Cut {
            at,
            upper_inclusive: false,
        }
    }

    fn is_above(&self, x: f64) -> bool {
        if self.upper_inclusive {
            x > self.at
        } else {
            x >= self.at
        }
    }
}

/// Band boundaries for the three continuous shipment attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinningScheme {
    pub size_bounds: Vec<Cut>,
    pub value_bounds: Vec<Cut>,
    pub distance_bounds: Vec<Cut>,
}

impl Default for BinningScheme {
    fn default() -> Self {
        BinningScheme {
            // ≤30, 31–200, 201–1000, 1001–5000, 5001–30000, 30001–45000, >45000 lb
            size_bounds: vec![
                Cut::upper(30.0),
                Cut::upper(200.0),
                Cut::upper(1000.0),
                Cut::upper(5000.0),
                Cut::upper(30000.0),
                Cut::upper(45000.0),
            ],
            // <300, 300–1000, 1001–5000, >5000 dollars
            value_bounds: vec![Cut::lower(300.0), Cut::upper(1000.0), Cut::upper(5000.0)],
            // <100, 100–249, 250–499, 500–749, 750–999, 1000–1499, 1500–2000, >2000 miles
            distance_bounds: vec![
                Cut::lower(100.0),
                Cut::lower(250.0),
                Cut::lower(500.0),
                Cut::lower(750.0),
                Cut::lower(1000.0),
                Cut::lower(1500.0),
                Cut::upper(2000.0),
            ],
        }
    }
}

/// Band indices of one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bands {
    pub size_band: usize,
    pub value_band: usize,
    pub distance_band: usize,
}

impl BinningScheme {
    pub fn validate(&self) -> Result<()> {
        for (name, cuts) in [
            ("size_bounds", &self.size_bounds),
            ("value_bounds", &self.value_bounds),
            ("distance_bounds", &self.distance_bounds),
        ] {
            if cuts.iter().any(|c| !c.at.is_finite()) {
                return Err(Error::validation(format!("{name}: non-finite boundary")));
            }
            if cuts.windows(2).any(|w| w[0].at >= w[1].at) {
                return Err(Error::validation(format!(
                    "{name}: boundaries must be strictly ascending"
                )));
            }
        }
        Ok(())
    }

    pub fn size_band(&self, pounds: f64) -> usize {
        band(&self.size_bounds, pounds)
    }

    pub fn value_band(&self, dollars: f64) -> usize {
        band(&self.value_bounds, dollars)
    }

    pub fn distance_band(&self, miles: f64) -> usize {
        band(&self.distance_bounds, miles)
    }

    pub fn bands(&self, size_lb: f64, value_usd: f64, distance_mi: f64) -> Bands {
        Bands {
            size_band: self.size_band(size_lb),
            value_band: self.value_band(value_usd),
            distance_band: self.distance_band(distance_mi),
        }
    }
}

/// Number of cuts the value lies above; band 0 is the lowest.
fn band(cuts: &[Cut], x: f64) -> usize {
    cuts.iter().take_while(|c| c.is_above(x)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn band_counts() {
        let s = BinningScheme::default();
        s.validate().unwrap();
        assert_eq!(s.size_bounds.len() + 1, 7);
        assert_eq!(s.value_bounds.len() + 1, 4);
        assert_eq!(s.distance_bounds.len() + 1, 8);
    }

    #[test]
    fn labelled_boundaries() {
        let s = BinningScheme::default();
        assert_eq!(s.size_band(30.0), 0);
        assert_eq!(s.size_band(31.0), 1);
        assert_eq!(s.size_band(150.0), 1);
        assert_eq!(s.size_band(1000.0), 2);
        assert_eq!(s.size_band(30001.0), 5);
        assert_eq!(s.size_band(45000.0), 5);
        assert_eq!(s.size_band(45001.0), 6);

        assert_eq!(s.value_band(299.99), 0);
        assert_eq!(s.value_band(300.0), 1);
        assert_eq!(s.value_band(1000.0), 1);
        assert_eq!(s.value_band(1001.0), 2);
        assert_eq!(s.value_band(5000.0), 2);
        assert_eq!(s.value_band(5000.5), 3);

        assert_eq!(s.distance_band(0.0), 0);
        assert_eq!(s.distance_band(99.0), 0);
        assert_eq!(s.distance_band(100.0), 1);
        assert_eq!(s.distance_band(999.0), 4);
        assert_eq!(s.distance_band(1000.0), 5);
        assert_eq!(s.distance_band(2000.0), 6);
        assert_eq!(s.distance_band(2000.1), 7);
    }

    #[test]
    fn rejects_unsorted_bounds() {
        let mut s = BinningScheme::default();
        s.value_bounds.swap(0, 1);
        assert!(s.validate().is_err());
    }

    proptest! {
        #[test]
        fn banding_is_monotone(a in 0.0f64..1e6, b in 0.0f64..1e6) {
            let s = BinningScheme::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(s.size_band(lo) <= s.size_band(hi));
            prop_assert!(s.value_band(lo) <= s.value_band(hi));
            prop_assert!(s.distance_band(lo) <= s.distance_band(hi));
            prop_assert!(s.size_band(hi) <= 6);
            prop_assert!(s.value_band(hi) <= 3);
            prop_assert!(s.distance_band(hi) <= 7);
        }
    }
}
