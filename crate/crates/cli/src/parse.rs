//! Text input formats.
//!
//! Databases: one atom `R(e1,...,en)` per line. Graphs: one edge
//! `source label target` per line. Examples: one tuple `(e1,...,en)` per
//! line, or a bare identifier for unary tuples. Identifiers match
//! `[A-Za-z0-9_']+`; `#` starts a comment; blank lines are skipped.

use std::fs;
use std::path::Path;

use qbe_core::{Database, GraphDatabase};

use crate::CliError;

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn malformed(source: &str, line: usize, what: &str) -> CliError {
    CliError::Parse {
        file: source.to_owned(),
        line,
        message: what.to_owned(),
    }
}

/// Splits `(a, b, c)` into identifiers.
fn parenthesized<'a>(body: &'a str, source: &str, line: usize) -> Result<Vec<&'a str>, CliError> {
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| malformed(source, line, "expected a parenthesized list"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if let Some(bad) = parts.iter().find(|p| !is_ident(p)) {
        return Err(malformed(source, line, &format!("invalid identifier `{bad}`")));
    }
    Ok(parts)
}

pub fn parse_database_str(text: &str, source: &str) -> Result<Database, CliError> {
    let mut facts = Vec::new();
    for (n, line) in content_lines(text) {
        let open = line
            .find('(')
            .ok_or_else(|| malformed(source, n, "expected `R(e1,...,en)`"))?;
        let rel = line[..open].trim();
        if !is_ident(rel) {
            return Err(malformed(source, n, &format!("invalid relation name `{rel}`")));
        }
        let args = parenthesized(&line[open..], source, n)?;
        facts.push((rel.to_owned(), args.into_iter().map(str::to_owned).collect::<Vec<_>>()));
    }
    Database::from_facts(facts).map_err(|e| CliError::Input {
        file: source.to_owned(),
        error: e,
    })
}

pub fn parse_graph_str(text: &str, source: &str) -> Result<GraphDatabase, CliError> {
    let mut edges = Vec::new();
    for (n, line) in content_lines(text) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(malformed(source, n, "expected `source label target`"));
        }
        if let Some(bad) = parts.iter().find(|p| !is_ident(p)) {
            return Err(malformed(source, n, &format!("invalid identifier `{bad}`")));
        }
        edges.push((parts[0].to_owned(), parts[1].to_owned(), parts[2].to_owned()));
    }
    Ok(GraphDatabase::from_edges(edges))
}

/// Tuples as element names, in file order, duplicates kept.
pub fn parse_examples_str(text: &str, source: &str) -> Result<Vec<Vec<String>>, CliError> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for (n, line) in content_lines(text) {
        let tuple: Vec<String> = if line.starts_with('(') {
            parenthesized(line, source, n)?.into_iter().map(str::to_owned).collect()
        } else if is_ident(line) {
            vec![line.to_owned()]
        } else {
            return Err(malformed(source, n, "expected `(e1,...,en)` or an identifier"));
        };
        if let Some(first) = out.first() {
            if first.len() != tuple.len() {
                return Err(malformed(
                    source,
                    n,
                    &format!("tuple of arity {} after tuples of arity {}", tuple.len(), first.len()),
                ));
            }
        }
        out.push(tuple);
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_database(path: &Path) -> Result<Database, CliError> {
    parse_database_str(&read(path)?, &path.display().to_string())
}

pub fn parse_graph(path: &Path) -> Result<GraphDatabase, CliError> {
    parse_graph_str(&read(path)?, &path.display().to_string())
}

pub fn parse_examples(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    parse_examples_str(&read(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn database_lines() {
        let db = parse_database_str("R(a,b)\nS(c,d)\n", "t").unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.domain_size(), 4);
        let db = parse_database_str("# nothing\n\n", "t").unwrap();
        assert!(db.is_empty());
        assert!(db.schema().is_empty());
        let spaced = parse_database_str("  R( a , b ) # note\n", "t").unwrap();
        assert_eq!(spaced, parse_database_str("R(a,b)", "t").unwrap());
    }

    #[test]
    fn database_errors() {
        assert!(matches!(
            parse_database_str("R(a,b)\nR(a)", "t"),
            Err(CliError::Input { error: qbe_core::Error::ArityConflict { .. }, .. })
        ));
        match parse_database_str("R(a,b)\nR a b\n", "t") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_database_str("R(a,b-c)", "t").is_err());
        assert!(parse_database_str("R()", "t").is_err());
    }

    #[test]
    fn graph_lines() {
        let g = parse_graph_str("1 a 2\n2 a 1\n", "t").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert!(parse_graph_str("", "t").unwrap().is_empty());
        let six: String = (1..=6).map(|i| format!("{i} a {}\n", i % 6 + 1)).collect();
        assert_eq!(parse_graph_str(&six, "t").unwrap().edge_count(), 6);
        assert!(parse_graph_str("1 a\n", "t").is_err());
    }

    #[test]
    fn example_lines() {
        let ex = parse_examples_str("(a,b)\n(c,d)\n", "t").unwrap();
        assert_eq!(ex, vec![vec!["a", "b"], vec!["c", "d"]]);
        let ex = parse_examples_str("1\n1'\n", "t").unwrap();
        assert_eq!(ex, vec![vec!["1"], vec!["1'"]]);
        assert!(parse_examples_str("(a,b)\n(c)\n", "t").is_err());
    }
}
