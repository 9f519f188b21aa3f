//! z-grid specifications.
//!
//! A spec is one or more `+`-joined parts:
//! `tensor:HALF_WIDTH:POINTS`, `radial:R_MAX:RADII`, or
//! `list:z;z;...` with comma-separated components (`list:` is empty).

use stableforce::mc::{radial_grid, tensor_grid};

use crate::CliError;

pub const DEFAULT_GRID: &str = "tensor:5:21+radial:5:20";

pub fn parse_grid(spec: &str, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |msg: String| CliError::Config(format!("grid spec '{spec}': {msg}"));
    let mut out: Vec<Vec<f64>> = vec![];
    for part in spec.split('+') {
        let part = part.trim();
        let (kind, rest) = part.split_once(':').ok_or_else(|| bad(format!("missing ':' in '{part}'")))?;
        match kind {
            "tensor" | "radial" => {
                let (a, b) = rest.split_once(':').ok_or_else(|| bad(format!("'{kind}' needs two parameters")))?;
                let x: f64 = a.trim().parse().map_err(|e| bad(format!("{e}")))?;
                let n: usize = b.trim().parse().map_err(|e| bad(format!("{e}")))?;
                if !(x > 0.0 && x.is_finite()) {
                    return Err(bad("extent must be positive".into()));
                }
                let pts = if kind == "tensor" { tensor_grid(dim, x, n) } else { radial_grid(dim, x, n) };
                out.extend(pts);
            }
            "list" => {
                for z in rest.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                    let v: Vec<f64> = z
                        .split(',')
                        .map(|c| c.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| bad(format!("{e}")))?;
                    if v.len() != dim {
                        return Err(bad(format!("point '{z}' has {} components, expected {dim}", v.len())));
                    }
                    out.push(v);
                }
            }
            other => return Err(bad(format!("unknown grid kind '{other}'"))),
        }
    }
    // Drop exact duplicates (the radial origin repeats the tensor origin).
    let mut seen = std::collections::HashSet::new();
    out.retain(|z| seen.insert(z.iter().map(|c| c.to_bits()).collect::<Vec<u64>>()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_parts() {
        assert_eq!(parse_grid("tensor:5:21", 1).unwrap().len(), 21);
        assert_eq!(parse_grid("list:1,2;0.5,-1", 2).unwrap(), vec![vec![1.0, 2.0], vec![0.5, -1.0]]);
        assert!(parse_grid("list:", 3).unwrap().is_empty());
        assert!(parse_grid("list:1,2", 3).is_err());
        assert!(parse_grid("spiral:1:2", 2).is_err());
        let g = parse_grid(DEFAULT_GRID, 1).unwrap();
        assert_eq!(g.iter().filter(|z| z[0] == 0.0).count(), 1);
    }
}
