//! Plain-text mesh format.
//!
//! ```text
//! nv nt
//! x y          (nv lines)
//! i j k        (nt lines, 0-based vertex indices, counter-clockwise)
//! ```
//!
//! Vertex indices are 0-based. Refinement edges are not stored; reading a mesh
//! assigns the longest edge of every triangle.

use std::io::{BufRead, Write};

use super::Mesh;
use crate::{Error, Result};

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l)),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            }),
        }
    };

    let (n, header) = next("header")?;
    let counts = parse_fields::<usize>(&header, 2, n)?;
    let (nv, nt) = (counts[0], counts[1]);

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = next("vertex")?;
        let v = parse_fields::<f64>(&l, 2, n)?;
        coords.push([v[0], v[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, l) = next("triangle")?;
        let v = parse_fields::<usize>(&l, 3, n)?;
        triangles.push([v[0], v[1], v[2]]);
    }
    Mesh::new(coords, triangles)
}

pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", mesh.num_vertices(), mesh.num_triangles())?;
    for p in &mesh.coords {
        writeln!(w, "{:.16e} {:.16e}", p[0], p[1])?;
    }
    for t in &mesh.triangles {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

fn parse_fields<T: std::str::FromStr>(line: &str, count: usize, n: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != count {
        return Err(Error::Parse {
            line: n,
            message: format!("expected {count} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>().map_err(|_| Error::Parse {
                line: n,
                message: format!("cannot parse '{f}'"),
            })
        })
        .collect()
}
