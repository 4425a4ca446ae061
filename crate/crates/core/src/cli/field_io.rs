//! Plain-text grid files: a header line `nx ny`, then `nx·ny` whitespace
//! separated values, row-major starting from the bottom-left entry.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::PermeabilityField;
use crate::grid::GridPair;

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(src: &str) -> impl Iterator<Item = Token<'_>> {
    src.lines().enumerate().flat_map(|(l, line)| {
        let base = line.as_ptr() as usize;
        line.split_whitespace().map(move |t| Token {
            text: t,
            line: l + 1,
            column: t.as_ptr() as usize - base + 1,
        })
    })
}

/// Parses a permeability field from the text format.
pub fn parse_field(path: &Path, src: &str) -> Result<PermeabilityField> {
    let parse_err = |line, column, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut toks = tokens(src);
    let mut dim = |what: &str| -> Result<usize> {
        let t = toks
            .next()
            .ok_or_else(|| parse_err(1, 1, format!("missing {what} in header")))?;
        if t.line != 1 {
            return Err(parse_err(
                t.line,
                t.column,
                format!("header must hold `nx ny` on line 1 (missing {what})"),
            ));
        }
        match t.text.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(parse_err(
                t.line,
                t.column,
                format!("{what} must be a positive integer, found `{}`", t.text),
            )),
        }
    };
    let nx = dim("nx")?;
    let ny = dim("ny")?;
    let mut values = Vec::with_capacity(nx * ny);
    let mut last = (1, 1);
    for t in toks {
        if t.line == 1 {
            return Err(parse_err(
                t.line,
                t.column,
                "unexpected token after `nx ny` header".into(),
            ));
        }
        last = (t.line, t.column);
        if values.len() == nx * ny {
            return Err(parse_err(t.line, t.column, format!("more than {} values", nx * ny)));
        }
        let v: f64 = t
            .text
            .parse()
            .map_err(|_| parse_err(t.line, t.column, format!("`{}` is not a number", t.text)))?;
        if !(v > 0.0) || !v.is_finite() {
            let k = values.len();
            return Err(Error::FieldValue {
                path: path.to_path_buf(),
                line: t.line,
                column: t.column,
                ix: k % nx,
                iy: k / nx,
                value: v,
            });
        }
        values.push(v);
    }
    if values.len() != nx * ny {
        return Err(parse_err(
            last.0,
            last.1,
            format!("expected {} values, found {}", nx * ny, values.len()),
        ));
    }
    PermeabilityField::new(nx, ny, values)
}

pub fn load_field(path: &Path) -> Result<PermeabilityField> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field(path, &src)
}

/// Text rendering of a row-major grid of values, one grid row per line.
pub fn format_grid(nx: usize, ny: usize, values: &[f64]) -> String {
    assert_eq!(values.len(), nx * ny);
    let mut out = format!("{nx} {ny}\n");
    for row in values.chunks(nx) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn save_field(path: &Path, field: &PermeabilityField) -> Result<()> {
    std::fs::write(path, format_grid(field.nx(), field.ny(), field.values())).map_err(|e| Error::io(path, e))
}

/// Writes free-DOF values as a full nodal grid (zeros on `∂Ω`).
pub fn save_nodal(path: &Path, grid: &GridPair, free: &[f64]) -> Result<()> {
    let (nx, ny) = (grid.fine_nx() + 1, grid.fine_ny() + 1);
    let mut all = vec![0.0; nx * ny];
    for (d, &v) in free.iter().enumerate() {
        let (ix, iy) = grid.free_coords(d);
        all[grid.node_index(ix, iy)] = v;
    }
    std::fs::write(path, format_grid(nx, ny, &all)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("k.txt")
    }

    #[test]
    fn uniform_and_roundtrip() {
        let src = format!("4 4\n{}\n", vec!["1"; 16].join(" "));
        let f = parse_field(p(), &src).unwrap();
        assert_eq!(f.values(), &[1.0; 16]);

        let f = PermeabilityField::new(3, 2, vec![1.0, 0.1, 1e4, 2.5, 1e-7, 3.0]).unwrap();
        let text = format_grid(3, 2, f.values());
        let back = parse_field(p(), &text).unwrap();
        assert_eq!(back, f);
        assert_eq!(format_grid(3, 2, back.values()), text);
    }

    #[test]
    fn zero_value_names_cell() {
        let err = parse_field(p(), "2 2\n1 1\n0 1\n").unwrap_err();
        match err {
            Error::FieldValue {
                line, column, ix, iy, ..
            } => {
                assert_eq!((line, column, ix, iy), (3, 1, 0, 1));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_inputs_carry_positions() {
        let cases = [
            ("2\n1 1 1 1\n", 2, 1),
            ("2 x\n1 1 1 1\n", 1, 3),
            ("2 2\n1 1\n1\n", 3, 1),
            ("2 2\n1 1 1 1 1\n", 2, 9),
            ("2 2\n1 a 1 1\n", 2, 3),
        ];
        for (src, line, col) in cases {
            match parse_field(p(), src).unwrap_err() {
                Error::Parse { line: l, column: c, .. } => assert_eq!((l, c), (line, col), "{src:?}"),
                e => panic!("unexpected {e} for {src:?}"),
            }
        }
    }
}
