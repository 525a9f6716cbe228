//! Text format for profiles: a header `r,u` (radial) or `t,w` (half-line),
//! then one comma-separated pair per line with a strictly increasing first
//! column that starts at 0. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{HalfLineInterp, HalfLineProfile, RadialInterp, RadialProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFile {
    Radial(RadialProfile),
    HalfLine(HalfLineProfile),
}

fn parse_pair(line: &str, lineno: usize) -> Result<(f64, f64)> {
    let mut it = line.split(',').map(str::trim);
    let parse = |s: Option<&str>| -> Result<f64> {
        let s = s.ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "expected two comma-separated numbers".into(),
        })?;
        s.parse::<f64>().map_err(|e| Error::Parse {
            line: lineno,
            msg: format!("{s:?}: {e}"),
        })
    };
    let x = parse(it.next())?;
    let y = parse(it.next())?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            msg: "more than two columns".into(),
        });
    }
    Ok((x, y))
}

pub fn parse_profile(text: &str) -> Result<ProfileFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty profile file".into(),
    })?;
    let radial = match header.replace(' ', "").as_str() {
        "r,u" => true,
        "t,w" => false,
        other => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must be `r,u` or `t,w`, got {other:?}"),
            })
        }
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, l) in lines {
        let (x, y) = parse_pair(l, n)?;
        xs.push(x);
        ys.push(y);
    }
    if radial {
        Ok(ProfileFile::Radial(RadialProfile::new(xs, ys)?))
    } else {
        Ok(ProfileFile::HalfLine(HalfLineProfile::new(xs, ys)?))
    }
}

pub fn read_profile(path: impl AsRef<Path>) -> Result<ProfileFile> {
    parse_profile(&std::fs::read_to_string(path)?)
}

/// Serializes node data. Only plain piecewise-linear profiles are
/// representable; other interpolations are rejected.
pub fn format_profile(p: &ProfileFile) -> Result<String> {
    let (header, xs, ys) = match p {
        ProfileFile::Radial(u) => {
            if u.interp() != RadialInterp::LINEAR {
                return Err(Error::InvalidProfile(
                    "only piecewise-linear radial profiles can be written".into(),
                ));
            }
            ("r,u", u.grid(), u.values())
        }
        ProfileFile::HalfLine(w) => {
            if w.interp() != HalfLineInterp::Linear {
                return Err(Error::InvalidProfile(
                    "only piecewise-linear half-line profiles can be written".into(),
                ));
            }
            ("t,w", w.grid(), w.values())
        }
    };
    let mut out = String::with_capacity(32 * xs.len());
    out.push_str(header);
    out.push('\n');
    for (x, y) in xs.iter().zip(ys) {
        // `{:?}` prints the shortest representation that round-trips.
        writeln!(out, "{x:?},{y:?}").unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_radial_and_halfline() {
        let r = parse_profile("r,u\n0,1\n0.5,0.5\n1,0\n").unwrap();
        assert!(matches!(r, ProfileFile::Radial(ref u) if u.grid().len() == 3));
        let w = parse_profile("# comment\nt,w\n0,0\n\n2,1\n").unwrap();
        assert!(matches!(w, ProfileFile::HalfLine(ref p) if p.t_max() == 2.0));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(matches!(parse_profile(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_profile("x,y\n0,0\n1,0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_profile("r,u\n0,1\n1,abc"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_profile("r,u\n0,1,2\n1,0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            parse_profile("r,u\n0,1\n0.5,0\n0.4,0"),
            Err(Error::InvalidProfile(_))
        ));
        assert!(matches!(parse_profile("t,w\n0,1\n1,1"), Err(Error::InvalidProfile(_))));
    }

    proptest! {
        #[test]
        fn radial_round_trip(steps in prop::collection::vec((1e-6f64..1.0, -5.0f64..5.0), 1..40)) {
            let mut grid = vec![0.0];
            let mut values = vec![1.0];
            for (dx, v) in steps {
                grid.push(grid.last().unwrap() + dx);
                values.push(v);
            }
            let p = ProfileFile::Radial(RadialProfile::new(grid, values).unwrap());
            let text = format_profile(&p).unwrap();
            prop_assert_eq!(parse_profile(&text).unwrap(), p);
        }
    }
}
