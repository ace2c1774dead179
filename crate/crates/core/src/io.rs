//! CSV serialization of sampled functions, maximal fields and vector fields.
//!
//! Nodes are written in row-major order (the first axis varies slowest) with
//! LF line endings. Reals use 17 significant digits so files round-trip
//! bit-exactly.

use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::grid::{SampledFunction, UniformGrid};
use crate::maximal::MaximalField;
use crate::sobolev::VectorField;

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn coord_header(dim: usize) -> Vec<&'static str> {
    ["x", "y"][..dim].to_vec()
}

fn coords(grid: &UniformGrid, node: usize) -> Vec<String> {
    let p = grid.node(node);
    p[..grid.dim()].iter().map(|&c| fmt_real(c)).collect()
}

pub fn write_function<W: Write>(f: &SampledFunction, out: W) -> Result<()> {
    let grid = f.grid();
    let mut w = writer(out);
    let mut header = coord_header(grid.dim());
    header.push("value");
    w.write_record(&header)?;
    for (i, v) in f.values().iter().enumerate() {
        let mut row = coords(grid, i);
        row.push(fmt_real(*v));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field<W: Write>(m: &MaximalField, out: W) -> Result<()> {
    let grid = m.grid();
    let mut w = writer(out);
    let mut header = coord_header(grid.dim());
    header.extend(["value", "good_radii"]);
    w.write_record(&header)?;
    for i in 0..grid.len() {
        let mut row = coords(grid, i);
        row.push(fmt_real(m.value(i)));
        let radii: Vec<String> = m.good_radii(i).iter().map(|&r| fmt_real(r)).collect();
        row.push(radii.join(";"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_vector_field<W: Write>(v: &VectorField, out: W) -> Result<()> {
    let grid = v.grid();
    let dim = grid.dim();
    let mut w = writer(out);
    let mut header = coord_header(dim);
    header.extend(["d1", "d2"][..dim].iter());
    w.write_record(&header)?;
    for i in 0..grid.len() {
        let mut row = coords(grid, i);
        row.extend((0..dim).map(|a| fmt_real(v.component(a)[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Distinct sorted values of one coordinate column and the spacing between them.
fn axis_from_column(col: &[f64], name: &str) -> Result<(f64, f64, usize)> {
    let mut xs = col.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
    if xs.len() < 2 {
        return Err(Error::Parse(format!(
            "column {name} needs at least two distinct coordinates"
        )));
    }
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    for (j, x) in xs.iter().enumerate() {
        if (x - (xs[0] + j as f64 * h)).abs() > 1e-6 * h {
            return Err(Error::Parse(format!("column {name} is not uniformly spaced")));
        }
    }
    Ok((xs[0], h, n))
}

/// Reads a sampled function written by [`write_function`], recovering its grid.
pub fn read_function<R: Read>(input: R) -> Result<SampledFunction> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    let dim = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "value"] => 1,
        ["x", "y", "value"] => 2,
        _ => {
            return Err(Error::Parse(format!(
                "expected header x,value or x,y,value, got {}",
                header.join(",")
            )))
        }
    };
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut row = [0.0; 3];
        for (k, field) in rec.iter().enumerate().take(dim + 1) {
            row[k] = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: cannot parse {field:?} as a real", line + 2)))?;
        }
        if rec.len() != dim + 1 {
            return Err(Error::Parse(format!("row {}: expected {} fields", line + 2, dim + 1)));
        }
        rows.push(row);
    }
    let (o0, h0, n0) = axis_from_column(&rows.iter().map(|r| r[0]).collect::<Vec<_>>(), "x")?;
    let (origin, counts) = if dim == 1 {
        (vec![o0], vec![n0])
    } else {
        let (o1, h1, n1) = axis_from_column(&rows.iter().map(|r| r[1]).collect::<Vec<_>>(), "y")?;
        if (h0 - h1).abs() > 1e-9 * h0 {
            return Err(invalid(format!("axes have different spacings {h0} and {h1}")));
        }
        (vec![o0, o1], vec![n0, n1])
    };
    let grid = UniformGrid::new(dim, &origin, h0, &counts)?;
    if rows.len() != grid.len() {
        return Err(Error::Parse(format!(
            "expected {} rows for the grid, found {}",
            grid.len(),
            rows.len()
        )));
    }
    let mut values = vec![f64::NAN; grid.len()];
    for row in &rows {
        let node = grid
            .locate(&row[..dim])
            .ok_or_else(|| Error::Parse(format!("point {:?} is not a grid node", &row[..dim])))?;
        if !values[node].is_nan() {
            return Err(Error::Parse(format!("node {:?} appears twice", &row[..dim])));
        }
        values[node] = row[dim];
    }
    SampledFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample;
    use crate::maximal::hl_maximal;
    use crate::radius::RadiusGrid;
    use crate::sobolev::gradient;

    #[test]
    fn function_round_trips_bit_exactly() {
        let g = UniformGrid::interval(-1.0, 1.0, 0.1).unwrap();
        let f = sample(|x| (3.0 * x[0]).sin() / 7.0, &g).unwrap();
        let mut buf = Vec::new();
        write_function(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,value\n"));
        assert!(!text.contains('\r'));
        let back = read_function(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.grid().counts(), g.counts());
    }

    #[test]
    fn two_dimensional_round_trip() {
        let g = UniformGrid::new(2, &[0.0, -1.0], 0.25, &[3, 5]).unwrap();
        let f = sample(|x| x[0] + 10.0 * x[1], &g).unwrap();
        let mut buf = Vec::new();
        write_function(&f, &mut buf).unwrap();
        let back = read_function(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.grid().counts(), &[3, 5]);
    }

    #[test]
    fn field_rows_list_good_radii() {
        let g = UniformGrid::interval(-1.0, 1.0, 0.5).unwrap();
        let f = SampledFunction::constant(&g, 1.0);
        let m = hl_maximal(&f, &RadiusGrid::multiples_of(0.5, 2, false).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_field(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,value,good_radii");
        assert_eq!(lines.len(), 6);
        assert!(lines[3].ends_with(&format!("{};{}", fmt_real(0.5), fmt_real(1.0))));
    }

    #[test]
    fn vector_field_header() {
        let g = UniformGrid::square(0.0, 1.0, 0.5).unwrap();
        let f = sample(|x| x[0] * x[1], &g).unwrap();
        let mut buf = Vec::new();
        write_vector_field(&gradient(&f), &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,y,d1,d2\n"));
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(read_function("t,value\n0,1\n1,2\n".as_bytes()).is_err());
        assert!(read_function("x,value\n0,1\n1,abc\n".as_bytes()).is_err());
        assert!(read_function("x,value\n0,1\n1,2\n3,4\n".as_bytes()).is_err());
    }
}
