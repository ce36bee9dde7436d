use std::io::{self, Write};

use super::ForceFieldMap;

/// Explored cells as CSV preceded by `#` grid metadata lines.
pub fn write_csv<W: Write>(map: &ForceFieldMap, mut out: W) -> io::Result<()> {
    writeln!(out, "# origin_x_m={}", map.spec.origin.0)?;
    writeln!(out, "# origin_y_m={}", map.spec.origin.1)?;
    writeln!(out, "# resolution_m={}", map.spec.resolution)?;
    writeln!(out, "row,col,mean_n,count")?;
    for (row, col, mean, count) in map.explored() {
        writeln!(out, "{row},{col},{mean},{count}")?;
    }
    out.flush()
}

/// Plain (P2) 8-bit PGM of cell means, `0 N → 0` and `force_limit → 255`.
/// The top image row is the grid's highest row. Unexplored cells are 0.
pub fn write_pgm<W: Write>(map: &ForceFieldMap, force_limit: f64, out: W) -> io::Result<()> {
    write_raster(map, out, |mean| match mean {
        Some(m) => (m / force_limit * 255.0).round().clamp(0.0, 255.0) as u8,
        None => 0,
    })
}

/// Companion PGM: 255 for explored cells, 0 for unexplored.
pub fn write_mask_pgm<W: Write>(map: &ForceFieldMap, out: W) -> io::Result<()> {
    write_raster(map, out, |mean| if mean.is_some() { 255 } else { 0 })
}

fn write_raster<W: Write>(map: &ForceFieldMap, mut out: W, pixel: impl Fn(Option<f64>) -> u8) -> io::Result<()> {
    let spec = &map.spec;
    writeln!(out, "P2")?;
    writeln!(out, "{} {}", spec.width, spec.height)?;
    writeln!(out, "255")?;
    for row in (0..spec.height).rev() {
        let line: Vec<String> = (0..spec.width)
            .map(|col| pixel(map.mean(row, col)).to_string())
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()
}
