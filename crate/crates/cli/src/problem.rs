//! Problem files and map files.

use std::path::{Path, PathBuf};

use lgb_core::kernel::{
    parse_phase_vectors, parse_polynomial, parse_polynomial_in, rat, Field, Modulus, ParseError, Polynomial, Rational,
    UPoly,
};

use crate::CliError;

/// Contents of a problem file, before any algebra is done.
#[derive(Clone, Debug, Default)]
pub struct Problem {
    /// `W` first, then each `V` in file order.
    pub polys: Vec<String>,
    pub vars: Option<Vec<String>>,
    pub group: Option<String>,
    pub map: Option<PathBuf>,
}

fn located(what: &str, line: Option<usize>, text: &str, e: ParseError) -> CliError {
    let col = text[..e.pos.min(text.len())].chars().count() + 1;
    match line {
        Some(line) => CliError::Input(format!("{what}, line {line}, column {col}: {e}")),
        None => CliError::Input(format!("{what}, column {col}: {e}")),
    }
}

/// Splits `key: value`, skipping blanks and `#` comments.
fn entries(text: &str) -> impl Iterator<Item = (usize, Option<(&str, &str)>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return None;
        }
        Some((i + 1, line.split_once(':').map(|(k, v)| (k.trim(), v.trim()))))
    })
}

impl Problem {
    pub fn parse(text: &str, base: &Path) -> Result<Problem, CliError> {
        let mut p = Problem::default();
        let mut w = None;
        let mut vs = Vec::new();
        for (line, entry) in entries(text) {
            let Some((key, value)) = entry else {
                return Err(CliError::Input(format!("problem file, line {line}: expected `key: value`")));
            };
            match key {
                "W" if w.is_some() => return Err(CliError::Input(format!("problem file, line {line}: W given twice"))),
                "W" => w = Some(value.to_string()),
                "V" => vs.push(value.to_string()),
                "vars" => p.vars = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
                "group" => p.group = Some(value.to_string()),
                "map" => p.map = Some(base.join(value)),
                other => return Err(CliError::Input(format!("problem file, line {line}: unknown key `{other}`"))),
            }
        }
        let Some(w) = w else {
            return Err(CliError::Input("problem file has no `W:` line".into()));
        };
        p.polys.push(w);
        p.polys.extend(vs);
        Ok(p)
    }

    /// Parses every polynomial over one variable order: `vars` when given,
    /// otherwise order of first appearance across `W` and then each `V`.
    pub fn polynomials(&self) -> Result<Vec<Polynomial>, CliError> {
        let mut names: Vec<String> = match &self.vars {
            Some(v) => v.clone(),
            None => {
                let mut names = Vec::new();
                for (k, text) in self.polys.iter().enumerate() {
                    let p = parse_polynomial(text, None).map_err(|e| located(&label(k), None, text, e))?;
                    for n in p.vars().names() {
                        if !names.contains(n) {
                            names.push(n.clone());
                        }
                    }
                }
                names
            }
        };
        names.dedup();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.polys
            .iter()
            .enumerate()
            .map(|(k, text)| parse_polynomial(text, Some(&refs)).map_err(|e| located(&label(k), None, text, e)))
            .collect()
    }

    pub fn generators(&self) -> Result<Vec<Vec<Rational>>, CliError> {
        match &self.group {
            None => Ok(Vec::new()),
            Some(text) => parse_phase_vectors(text).map_err(|e| located("group", None, text, e)),
        }
    }
}

fn label(k: usize) -> String {
    if k == 0 {
        "W".into()
    } else {
        format!("V #{k}")
    }
}

/// One line `source_monomial -> image` of a map file.
#[derive(Clone, Debug)]
pub struct MapLine {
    pub source: Polynomial,
    pub image: Polynomial,
}

#[derive(Clone, Debug)]
pub struct MapFile {
    pub field: Field,
    pub lines: Vec<MapLine>,
}

fn parse_modulus(text: &str, line: usize) -> Result<Modulus, CliError> {
    let p = parse_polynomial(text, None).map_err(|e| located("map file modulus", Some(line), text, e))?;
    if p.nvars() != 1 {
        return Err(CliError::Input(format!("map file, line {line}: modulus must use exactly one symbol")));
    }
    let deg = p.monomials().map(|m| m.exp(0) as usize).max().unwrap_or(0);
    let mut coeffs = vec![rat(0, 1); deg + 1];
    for (m, c) in p.terms() {
        coeffs[m.exp(0) as usize] = c.to_rational().expect("parsed over Q");
    }
    Modulus::new_lenient(p.vars().names()[0].clone(), UPoly::new(coeffs))
        .map_err(|e| CliError::Input(format!("map file, line {line}: {e}")))
}

impl MapFile {
    /// Lines `monomial -> scalar * monomial`, plus an optional
    /// `modulus: <poly in one symbol>` line naming the scalar field.
    pub fn parse(text: &str, vars: &[String]) -> Result<MapFile, CliError> {
        let mut field = Field::rationals();
        let mut pending = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("modulus:") {
                if !field.is_rational() {
                    return Err(CliError::Input(format!("map file, line {}: modulus given twice", i + 1)));
                }
                field = Field::extension(parse_modulus(rest.trim(), i + 1)?);
                continue;
            }
            let Some((lhs, rhs)) = line.split_once("->") else {
                return Err(CliError::Input(format!("map file, line {}: expected `monomial -> image`", i + 1)));
            };
            pending.push((i + 1, lhs.trim().to_string(), rhs.trim().to_string()));
        }
        let mut lines = Vec::new();
        for (n, lhs, rhs) in pending {
            let source = parse_polynomial_in(&lhs, Some(vars), &Field::rationals())
                .map_err(|e| located("map file source", Some(n), &lhs, e))?;
            if source.num_terms() != 1 || !source.terms().next().is_some_and(|(_, c)| c.is_one()) {
                return Err(CliError::Input(format!("map file, line {n}: left side must be a single monomial")));
            }
            let image = parse_polynomial_in(&rhs, Some(vars), &field)
                .map_err(|e| located("map file image", Some(n), &rhs, e))?;
            lines.push(MapLine { source, image });
        }
        Ok(MapFile { field, lines })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_keys() {
        let p =
            Problem::parse("# pair\nW: x^2 + y^6\nV: x^2 + x*y^3\ngroup: 1/2,1/2\nmap: phi.txt\n", Path::new("/tmp"))
                .unwrap();
        assert_eq!(p.polys.len(), 2);
        assert_eq!(p.map.as_deref(), Some(Path::new("/tmp/phi.txt")));
        assert_eq!(p.generators().unwrap().len(), 1);
        let polys = p.polynomials().unwrap();
        assert_eq!(polys[0].vars(), polys[1].vars());
    }

    #[test]
    fn problem_errors_carry_locations() {
        assert!(Problem::parse("V: x^2\n", Path::new(".")).is_err());
        let e = Problem::parse("W: x^2\nfoo: 1\n", Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let p = Problem::parse("W: x^2 + $y\n", Path::new(".")).unwrap();
        let e = p.polynomials().unwrap_err();
        assert!(e.to_string().contains("column 7"), "{e}");
    }

    #[test]
    fn map_file_with_modulus() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let m = MapFile::parse("modulus: c^6 + 4\n1 -> 1\ny -> c * y\ny^2 -> -1/2*c^2 * y^2\n", &vars).unwrap();
        assert_eq!(m.field.degree(), 6);
        assert_eq!(m.lines.len(), 3);
        assert!(MapFile::parse("y -> c*y\n", &vars).is_err());
        assert!(MapFile::parse("2*y -> y\n", &vars).is_err());
    }
}
