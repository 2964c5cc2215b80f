//! Plain-text body descriptions.
//!
//! ```text
//! # a disk
//! type = ball
//! center = 0.0, 0.0
//! radius = 1.0
//! ```
//!
//! Polytopes list vertices as `x,y; x,y; ...`; raw support samplings give
//! `dim`, `directions` (the uniform grid count) and a matching `values`
//! list.  Every body in a run is sampled on the caller's direction grid.

use std::sync::Arc;

use super::body::ConvexBody;
use super::grid::DirectionGrid;
use super::{GeometryError, Point};

pub fn parse_body_file(
    text: &str,
    grid: &Arc<DirectionGrid>,
) -> Result<ConvexBody, GeometryError> {
    let mut kind: Option<(usize, String)> = None;
    let mut center: Option<(usize, (Point, usize))> = None;
    let mut radius: Option<(usize, f64)> = None;
    let mut vertices: Option<(usize, Vec<(Point, usize)>)> = None;
    let mut dim: Option<(usize, usize)> = None;
    let mut directions: Option<(usize, usize)> = None;
    let mut values: Option<(usize, Vec<f64>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(line_no, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "type" => set(&mut kind, line_no, key, value.to_string())?,
            "center" => set(&mut center, line_no, key, parse_point(line_no, value)?)?,
            "radius" => set(&mut radius, line_no, key, parse_f64(line_no, "radius", value)?)?,
            "vertices" => {
                let pts = value
                    .split(';')
                    .map(|chunk| parse_point(line_no, chunk))
                    .collect::<Result<Vec<_>, _>>()?;
                set(&mut vertices, line_no, key, pts)?;
            }
            "dim" => {
                let d = parse_usize(line_no, "dim", value)?;
                set(&mut dim, line_no, key, d)?;
            }
            "directions" => {
                let d = parse_usize(line_no, "directions", value)?;
                set(&mut directions, line_no, key, d)?;
            }
            "values" => {
                let vals = value
                    .split(',')
                    .map(|v| parse_f64(line_no, "values", v))
                    .collect::<Result<Vec<_>, _>>()?;
                set(&mut values, line_no, key, vals)?;
            }
            other => return Err(err(line_no, &format!("unknown key `{other}`"))),
        }
    }

    let (type_line, kind) = kind.ok_or_else(|| err(0, "missing `type`"))?;
    match kind.as_str() {
        "ball" => {
            forbid(&vertices, "vertices", &kind)?;
            forbid(&directions, "directions", &kind)?;
            forbid(&values, "values", &kind)?;
            let (cl, (c, cd)) = center.ok_or_else(|| err(0, "ball requires `center`"))?;
            let (_, r) = radius.ok_or_else(|| err(0, "ball requires `radius`"))?;
            check_dim(&dim, cd, cl)?;
            if cd != grid.dim() {
                return Err(err(
                    cl,
                    &format!("center has {cd} components, run uses dim {}", grid.dim()),
                ));
            }
            ConvexBody::ball(c, r, grid)
        }
        "polytope" => {
            forbid(&center, "center", &kind)?;
            forbid(&radius, "radius", &kind)?;
            forbid(&directions, "directions", &kind)?;
            forbid(&values, "values", &kind)?;
            let (vl, verts) = vertices.ok_or_else(|| err(0, "polytope requires `vertices`"))?;
            let d = verts[0].1;
            if verts.iter().any(|&(_, vd)| vd != d) {
                return Err(err(vl, "vertices mix 2 and 3 components"));
            }
            check_dim(&dim, d, vl)?;
            if d != grid.dim() {
                return Err(err(
                    vl,
                    &format!("vertices have {d} components, run uses dim {}", grid.dim()),
                ));
            }
            let pts: Vec<Point> = verts.into_iter().map(|(p, _)| p).collect();
            ConvexBody::polytope(&pts, grid)
        }
        "support" => {
            forbid(&center, "center", &kind)?;
            forbid(&radius, "radius", &kind)?;
            forbid(&vertices, "vertices", &kind)?;
            let (dl, d) = dim.ok_or_else(|| err(0, "support requires `dim`"))?;
            let (nl, n) = directions.ok_or_else(|| err(0, "support requires `directions`"))?;
            let (vl, vals) = values.ok_or_else(|| err(0, "support requires `values`"))?;
            if d != grid.dim() {
                return Err(err(dl, &format!("dim {d} does not match run dim {}", grid.dim())));
            }
            if n != grid.len() {
                return Err(err(
                    nl,
                    &format!("{n} directions do not match the run grid of {}", grid.len()),
                ));
            }
            if vals.len() != n {
                return Err(err(vl, &format!("{} values for {n} directions", vals.len())));
            }
            ConvexBody::from_support(vals, grid)
        }
        other => Err(err(type_line, &format!("unknown body type `{other}`"))),
    }
}

fn err(line: usize, message: &str) -> GeometryError {
    GeometryError::BodyFile {
        line,
        message: message.to_string(),
    }
}

fn set<T>(slot: &mut Option<(usize, T)>, line: usize, key: &str, value: T) -> Result<(), GeometryError> {
    if slot.is_some() {
        return Err(err(line, &format!("duplicate key `{key}`")));
    }
    *slot = Some((line, value));
    Ok(())
}

fn forbid<T>(slot: &Option<(usize, T)>, key: &str, kind: &str) -> Result<(), GeometryError> {
    if let Some((line, _)) = slot {
        return Err(err(*line, &format!("`{key}` is not valid for type {kind}")));
    }
    Ok(())
}

fn check_dim(dim: &Option<(usize, usize)>, inferred: usize, line: usize) -> Result<(), GeometryError> {
    if let Some((dl, d)) = dim {
        if *d != inferred {
            return Err(err(*dl, &format!("dim {d} conflicts with {inferred}-component coordinates")));
        }
        if *d != 2 && *d != 3 {
            return Err(err(*dl, "dim must be 2 or 3"));
        }
    } else if inferred != 2 && inferred != 3 {
        return Err(err(line, "coordinates must have 2 or 3 components"));
    }
    Ok(())
}

/// Two-component points are padded with a zero third coordinate; the
/// original component count rides along for dimension checks.
fn parse_point(line: usize, text: &str) -> Result<(Point, usize), GeometryError> {
    let comps = text
        .split(',')
        .map(|v| parse_f64(line, "coordinate", v))
        .collect::<Result<Vec<_>, _>>()?;
    match comps.len() {
        2 => Ok(([comps[0], comps[1], 0.0], 2)),
        3 => Ok(([comps[0], comps[1], comps[2]], 3)),
        n => Err(err(line, &format!("point has {n} components, expected 2 or 3"))),
    }
}

fn parse_f64(line: usize, field: &str, text: &str) -> Result<f64, GeometryError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| err(line, &format!("cannot parse {field} `{}`", text.trim())))?;
    if !v.is_finite() {
        return Err(err(line, &format!("{field} must be finite")));
    }
    Ok(v)
}

fn parse_usize(line: usize, field: &str, text: &str) -> Result<usize, GeometryError> {
    text.trim()
        .parse()
        .map_err(|_| err(line, &format!("cannot parse {field} `{}`", text.trim())))
}

#[cfg(test)]
mod tests {
    use super::super::Descriptor;
    use super::*;

    fn grid2() -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::uniform(2, 64).unwrap())
    }

    #[test]
    fn parses_ball() {
        let g = grid2();
        let body = parse_body_file("# disk\ntype = ball\ncenter = 0.5, -1.0\nradius = 2.0\n", &g).unwrap();
        match body.descriptor() {
            Some(Descriptor::Ball { center, radius }) => {
                assert_eq!(*center, [0.5, -1.0, 0.0]);
                assert_eq!(*radius, 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_polytope() {
        let g = grid2();
        let body =
            parse_body_file("type = polytope\nvertices = -1,-1; 1,-1; 1,1; -1,1\n", &g).unwrap();
        assert!(body.contains_point([0.9, 0.9, 0.0]));
        assert!(!body.contains_point([1.1, 0.0, 0.0]));
    }

    #[test]
    fn parses_support_sampling() {
        let g = grid2();
        let values: Vec<String> = (0..64).map(|_| "1.0".to_string()).collect();
        let text = format!(
            "type = support\ndim = 2\ndirections = 64\nvalues = {}\n",
            values.join(", ")
        );
        let body = parse_body_file(&text, &g).unwrap();
        assert!((body.min_width() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_key_with_line() {
        let g = grid2();
        let res = parse_body_file("type = ball\nshade = blue\n", &g);
        match res {
            Err(GeometryError::BodyFile { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("shade"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_number_and_duplicates() {
        let g = grid2();
        assert!(matches!(
            parse_body_file("type = ball\ncenter = 0, zero\nradius = 1\n", &g),
            Err(GeometryError::BodyFile { line: 2, .. })
        ));
        assert!(matches!(
            parse_body_file("type = ball\nradius = 1\nradius = 2\ncenter = 0,0\n", &g),
            Err(GeometryError::BodyFile { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_mismatched_support_length() {
        let g = grid2();
        let text = "type = support\ndim = 2\ndirections = 64\nvalues = 1.0, 1.0\n";
        assert!(matches!(
            parse_body_file(text, &g),
            Err(GeometryError::BodyFile { line: 4, .. })
        ));
    }

    #[test]
    fn ball_forbids_vertices() {
        let g = grid2();
        let text = "type = ball\ncenter = 0,0\nradius = 1\nvertices = 0,0; 1,0; 0,1\n";
        assert!(matches!(
            parse_body_file(text, &g),
            Err(GeometryError::BodyFile { line: 4, .. })
        ));
    }
}
