//! Parsers for list-valued settings shared by scenario files and the CLI.

use crate::error::{Error, Result};
use crate::geometry::Point;

fn bad(field: &str, message: impl Into<String>) -> Error {
    Error::invalid(field, message)
}

fn parse_usize(field: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| bad(field, format!("`{}` is not a non-negative integer", s.trim())))
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    let v = s
        .trim()
        .parse::<f64>()
        .map_err(|_| bad(field, format!("`{}` is not a number", s.trim())))?;
    if v.is_nan() {
        return Err(bad(field, "NaN is not allowed"));
    }
    Ok(v)
}

const MAX_LIST: usize = 1 << 16;

/// AP counts: `4..12` (inclusive), `4,6,8`, or a mix such as `2, 4..6`.
pub fn parse_counts(field: &str, s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(bad(field, "empty list element"));
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let lo = parse_usize(field, lo)?;
            let hi = parse_usize(field, hi)?;
            if hi < lo {
                return Err(bad(field, format!("empty range {lo}..{hi}")));
            }
            if hi - lo >= MAX_LIST || out.len() + (hi - lo) >= MAX_LIST {
                return Err(bad(field, "list too long"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_usize(field, part)?);
        }
    }
    Ok(out)
}

/// SNR grid in dB: `-10..30:5` (inclusive, step 5) or `-10, 0, 10`.
pub fn parse_grid(field: &str, s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Some((range, step)) = s.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| bad(field, "expected `start..stop:step`"))?;
        let (lo, hi, step) = (parse_f64(field, lo)?, parse_f64(field, hi)?, parse_f64(field, step)?);
        if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(bad(field, "grid needs finite start <= stop and step > 0"));
        }
        let n = ((hi - lo) / step + 1e-9).floor();
        if n >= MAX_LIST as f64 {
            return Err(bad(field, "grid too long"));
        }
        return Ok((0..=n as usize).map(|i| lo + step * i as f64).collect());
    }
    s.split(',').map(|p| parse_f64(field, p)).collect()
}

/// Permutations written with 1-based labels, `;`-separated:
/// `1 2 3 10 9 8 7 6 5 4; 1 7 4 10 5 2 8 3 9 6`. Returned 0-based.
pub fn parse_orderings(field: &str, s: &str) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for group in s.split(';') {
        let labels = group
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_usize(field, t))
            .collect::<Result<Vec<_>>>()?;
        if labels.is_empty() {
            return Err(bad(field, "empty ordering"));
        }
        if labels.len() > MAX_LIST {
            return Err(bad(field, "ordering too long"));
        }
        let mut zero_based = Vec::with_capacity(labels.len());
        for l in labels {
            if l == 0 {
                return Err(bad(field, "AP labels start at 1"));
            }
            zero_based.push(l - 1);
        }
        out.push(zero_based);
    }
    Ok(out)
}

/// Checks that `order` is a permutation of `0..n`.
pub fn check_permutation(field: &str, order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(bad(field, format!("ordering has {} entries, expected {n}", order.len())));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n {
            return Err(bad(field, format!("AP label {} out of range 1..={n}", i + 1)));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(bad(field, format!("AP label {} repeated", i + 1)));
        }
    }
    Ok(())
}

/// Point lists: `x y; x y` (planar) or `x y z; ...`.
pub fn parse_points(field: &str, s: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for group in s.split(';') {
        let coords = group
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_f64(field, t))
            .collect::<Result<Vec<_>>>()?;
        let p = match coords.as_slice() {
            [x, y] => Point::new(*x, *y),
            [x, y, z] => Point::new3(*x, *y, *z),
            _ => return Err(bad(field, format!("point needs 2 or 3 coordinates, got {}", coords.len()))),
        };
        if !p.is_finite() {
            return Err(bad(field, "coordinates must be finite"));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn render_points(points: &[Point], spatial: bool) -> String {
    points
        .iter()
        .map(|p| {
            if spatial {
                format!("{} {} {}", p.x, p.y, p.z)
            } else {
                format!("{} {}", p.x, p.y)
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn render_orderings(orderings: &[Vec<usize>]) -> String {
    orderings
        .iter()
        .map(|o| o.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn render_list<T: ToString>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_counts("c", "4..12").unwrap(), (4..=12).collect::<Vec<_>>());
        assert_eq!(parse_counts("c", "1, 3..4").unwrap(), vec![1, 3, 4]);
        assert!(parse_counts("c", "5..4").is_err());
        assert!(parse_counts("c", "a").is_err());
        assert!(parse_counts("c", "0..18446744073709551615").is_err());
    }

    #[test]
    fn grid() {
        let g = parse_grid("g", "-10..30:5").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[8], 30.0);
        assert_eq!(parse_grid("g", "10").unwrap(), vec![10.0]);
        assert!(parse_grid("g", "0..1:0").is_err());
        assert!(parse_grid("g", "nan").is_err());
    }

    #[test]
    fn orderings_are_one_based() {
        let o = parse_orderings("o", "1 2 3 10 9 8 7 6 5 4; 1,7,4,10,5,2,8,3,9,6").unwrap();
        assert_eq!(o[0][3], 9);
        check_permutation("o", &o[0], 10).unwrap();
        check_permutation("o", &o[1], 10).unwrap();
        assert!(check_permutation("o", &[0, 0, 1], 3).is_err());
        assert!(check_permutation("o", &[0, 1], 3).is_err());
        assert!(parse_orderings("o", "0 1").is_err());
        assert_eq!(render_orderings(&o), "1 2 3 10 9 8 7 6 5 4; 1 7 4 10 5 2 8 3 9 6");
    }

    #[test]
    fn points() {
        let p = parse_points("p", "0 0; 10.5 -2").unwrap();
        assert_eq!(p, vec![Point::new(0.0, 0.0), Point::new(10.5, -2.0)]);
        assert!(parse_points("p", "1").is_err());
        assert!(parse_points("p", "inf 0").is_err());
        assert_eq!(parse_points("p", &render_points(&p, false)).unwrap(), p);
    }
}
