//! Packed bitstreams: a big-endian `u64` bit count followed by the bits,
//! most significant bit first, zero padded to a whole byte.

use crate::alphabet::Sym;
use crate::error::{Error, Result};

pub fn write_bits(bits: &[Sym]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(8 + bits.len().div_ceil(8));
    out.extend_from_slice(&(bits.len() as u64).to_be_bytes());
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidArgument(format!("symbol {b} is not a bit")));
            }
            byte |= (b as u8) << (7 - i);
        }
        out.push(byte);
    }
    Ok(out)
}

pub fn read_bits(bytes: &[u8]) -> Result<Vec<Sym>> {
    let header: [u8; 8] = bytes
        .get(..8)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| Error::Decode("bitstream shorter than its 8-byte header".into()))?;
    let len = u64::from_be_bytes(header);
    let body = &bytes[8..];
    let expected = len.div_ceil(8);
    if body.len() as u64 != expected {
        return Err(Error::Decode(format!("header announces {len} bits but {} bytes follow", body.len())));
    }
    let len = len as usize;
    if len % 8 != 0 {
        let pad = 8 - len % 8;
        if body[body.len() - 1] & ((1u8 << pad) - 1) != 0 {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
    }
    Ok((0..len).map(|i| ((body[i / 8] >> (7 - i % 8)) & 1) as Sym).collect())
}
