//! Decoder entry points driven by the fuzz targets and the corpus test.
//!
//! Each takes raw bytes, returns `Err` for input that does not decode, and
//! panics only when a decoded value fails to survive its own round trip.

use crate::error::Result;
use crate::invariants::{homology, HomologySummary};
use crate::slp::{Slp, SlpJson};
use crate::street::{DiagramJson, HeegaardDiagram};
use crate::surface::{CellularSurface, MarkedSurface, SurfaceJson};
use crate::word::parse_word;

/// Crossing cap for anything a decoder expands.
const GUARD: u64 = 10_000;

fn text(data: &[u8]) -> Result<&str> {
    std::str::from_utf8(data).map_err(|e| crate::Error::ParseWord(e.to_string()))
}

/// First byte picks the genus (1 to 4), the rest is word text.
pub fn word(data: &[u8]) -> Result<()> {
    let Some((&g, rest)) = data.split_first() else { return Ok(()) };
    let g = u32::from(g % 4) + 1;
    let w = parse_word(g, text(rest)?)?;
    assert_eq!(parse_word(g, &w.to_string())?, w);
    Ok(())
}

pub fn slp_json(data: &[u8]) -> Result<()> {
    let j: SlpJson = serde_json::from_slice(data)?;
    let s = Slp::from_json(&j)?;
    let back = Slp::from_json(&s.to_json())?;
    assert_eq!(back.len(), s.len());
    if let Ok(w) = s.expand(GUARD) {
        assert_eq!(back.expand(GUARD)?, w);
        assert_eq!(s.inverse().inverse().expand(GUARD)?, w);
    }
    Ok(())
}

pub fn surface_json(data: &[u8]) -> Result<()> {
    let j: SurfaceJson = serde_json::from_slice(data)?;
    let s = CellularSurface::from_json(&j)?;
    assert_eq!(CellularSurface::from_json(&s.to_json())?, s);
    Ok(())
}

pub fn marked_surface_json(data: &[u8]) -> Result<()> {
    let m: MarkedSurface = serde_json::from_slice(data)?;
    let again: MarkedSurface = serde_json::from_str(&serde_json::to_string(&m)?)?;
    assert_eq!(again, m);
    Ok(())
}

/// Decodes a diagram and, when it is small, computes its homology.
pub fn diagram_json(data: &[u8]) -> Result<()> {
    let j: DiagramJson = serde_json::from_slice(data)?;
    let d = HeegaardDiagram::from_json(&j)?;
    let again = d.to_json();
    assert_eq!(HeegaardDiagram::from_json(&again)?.to_json(), again);
    homology(&d, GUARD)?;
    Ok(())
}

pub fn homology_json(data: &[u8]) -> Result<()> {
    let h: HomologySummary = serde_json::from_slice(data)?;
    let again: HomologySummary = serde_json::from_str(&serde_json::to_string(&h)?)?;
    assert_eq!(again, h);
    Ok(())
}
