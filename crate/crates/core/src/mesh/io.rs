//! ASCII mesh format.
//!
//! ```text
//! # comment
//! $Nodes n
//! id x y            (n lines)
//! $Elements k
//! id v1 v2 v3       (k lines, 1-based vertex ids)
//! $Boundary m
//! va vb tag         (m lines, tag 1 = inflow, 2 = outflow, 3 = wall)
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{BoundaryTag, Mesh};
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_content().ok_or_else(|| Error::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn header(lines: &mut Lines<'_>, name: &str) -> Result<usize> {
    let (ln, l) = lines.expect(name)?;
    let mut it = l.split_whitespace();
    if it.next() != Some(name) {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected section header '{name}'"),
        });
    }
    let count = it.next().and_then(|c| c.parse::<usize>().ok());
    match (count, it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse {
            line: ln,
            msg: format!("'{name}' must be followed by a single count"),
        }),
    }
}

fn fields<const K: usize>(ln: usize, l: &str) -> Result<[&str; K]> {
    let v: Vec<&str> = l.split_whitespace().collect();
    v.try_into().map_err(|v: Vec<&str>| Error::Parse {
        line: ln,
        msg: format!("expected {K} fields, found {}", v.len()),
    })
}

fn num<T: std::str::FromStr>(ln: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line: ln,
        msg: format!("cannot parse '{s}'"),
    })
}

/// Parses mesh-file content.
pub fn load_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let n = header(&mut lines, "$Nodes")?;
    let mut ids = HashMap::with_capacity(n);
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = lines.expect("node line")?;
        let [id, x, y] = fields::<3>(ln, l)?;
        let id: usize = num(ln, id)?;
        if ids.insert(id, vertices.len()).is_some() {
            return Err(Error::Parse {
                line: ln,
                msg: format!("duplicate node id {id}"),
            });
        }
        let (x, y): (f64, f64) = (num(ln, x)?, num(ln, y)?);
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse {
                line: ln,
                msg: "non-finite coordinate".into(),
            });
        }
        vertices.push([x, y]);
    }
    let lookup = |ln: usize, s: &str| -> Result<usize> {
        let id: usize = num(ln, s)?;
        ids.get(&id).copied().ok_or_else(|| Error::Parse {
            line: ln,
            msg: format!("unknown node id {id}"),
        })
    };
    let k = header(&mut lines, "$Elements")?;
    let mut triangles = Vec::with_capacity(k);
    for _ in 0..k {
        let (ln, l) = lines.expect("element line")?;
        let [_, a, b, c] = fields::<4>(ln, l)?;
        triangles.push([lookup(ln, a)?, lookup(ln, b)?, lookup(ln, c)?]);
    }
    let m = header(&mut lines, "$Boundary")?;
    let mut boundary = HashMap::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = lines.expect("boundary line")?;
        let [a, b, tag] = fields::<3>(ln, l)?;
        let code: u32 = num(ln, tag)?;
        let tag = BoundaryTag::from_code(code).ok_or_else(|| Error::Parse {
            line: ln,
            msg: format!("unknown boundary tag {code}"),
        })?;
        boundary.insert((lookup(ln, a)?, lookup(ln, b)?), tag);
    }
    if let Some((ln, _)) = lines.next_content() {
        return Err(Error::Parse {
            line: ln,
            msg: "trailing content after $Boundary section".into(),
        });
    }
    Mesh::new(vertices, triangles, boundary)
}

/// Serialises a mesh in the format read by [`load_mesh`].
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "$Nodes {}", mesh.vertices.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{} {:.17e} {:.17e}", i + 1, v[0], v[1]);
    }
    let _ = writeln!(s, "$Elements {}", mesh.triangles.len());
    for (i, t) in mesh.triangles.iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {}", i + 1, t[0] + 1, t[1] + 1, t[2] + 1);
    }
    let mut edges: Vec<_> = mesh.boundary.iter().collect();
    edges.sort_by_key(|(k, _)| **k);
    let _ = writeln!(s, "$Boundary {}", edges.len());
    for (&(a, b), tag) in edges {
        let _ = writeln!(s, "{} {} {}", a + 1, b + 1, tag.code());
    }
    s
}
