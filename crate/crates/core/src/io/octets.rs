use super::{IoError, Result};
use crate::field::{Field, Symbol};

/// Octets to symbols: bitwise (MSB first) over GF(2), one octet per symbol
/// when `q >= 257`. Other fields cannot hold octets without skewing the
/// symbol distribution and are rejected.
pub fn octets_to_symbols(bytes: &[u8], field: &Field) -> Result<Vec<Symbol>> {
    match field.order() {
        2 => Ok(bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| ((b >> i) & 1) as Symbol))
            .collect()),
        q if q >= 257 => Ok(bytes.iter().map(|&b| b as Symbol).collect()),
        q => Err(IoError::Unsupported(format!("GF({q}); use q = 2 or q >= 257"))),
    }
}

/// Inverse of [`octets_to_symbols`].
pub fn symbols_to_octets(symbols: &[Symbol], field: &Field) -> Result<Vec<u8>> {
    match field.order() {
        2 => {
            if !symbols.len().is_multiple_of(8) {
                return Err(IoError::FormatError(format!(
                    "{} bits is not a whole number of octets",
                    symbols.len()
                )));
            }
            symbols
                .chunks(8)
                .map(|c| {
                    c.iter().try_fold(0u8, |acc, &b| match b {
                        0 | 1 => Ok(acc << 1 | b as u8),
                        _ => Err(IoError::FormatError(format!("bit value {b}"))),
                    })
                })
                .collect()
        }
        q if q >= 257 => symbols
            .iter()
            .map(|&v| u8::try_from(v).map_err(|_| IoError::FormatError(format!("symbol {v} is not an octet"))))
            .collect(),
        q => Err(IoError::Unsupported(format!("GF({q}); use q = 2 or q >= 257"))),
    }
}
