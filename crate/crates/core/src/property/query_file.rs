//! Query files: one property per block. Lines starting with `--` are
//! comments. Each block opens with `name: <name>`, optionally followed by
//! `scope: all|legit`, and the property text runs until the next `name:`
//! line or the end of the file.

use thiserror::Error;

use super::{parse_property, IdsScope, ParseError, PropertyAst};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedQuery {
    pub name: String,
    pub scope: IdsScope,
    /// Property text with comment lines removed and whitespace trimmed.
    pub text: String,
    pub ast: PropertyAst,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryFileError {
    #[error("line {line}: property text before the first `name:` header")]
    MissingName { line: usize },
    #[error("line {line}: invalid query name `{name}`")]
    BadName { line: usize, name: String },
    #[error("line {line}: invalid scope `{value}` (expected `all` or `legit`)")]
    BadScope { line: usize, value: String },
    #[error("line {line}: duplicate query name `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("query `{name}` has no property text")]
    Empty { name: String },
    #[error("query `{name}`: {error}")]
    Parse { name: String, error: ParseError },
}

struct Block {
    name: String,
    scope: IdsScope,
    first_line: usize,
    lines: Vec<(usize, String)>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn parse_query_file(text: &str) -> Result<Vec<NamedQuery>, QueryFileError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with("--") {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("name:") {
            let name = rest.trim().to_string();
            if !valid_name(&name) {
                return Err(QueryFileError::BadName { line, name });
            }
            if blocks.iter().any(|b| b.name == name) {
                return Err(QueryFileError::Duplicate { line, name });
            }
            blocks.push(Block { name, scope: IdsScope::All, first_line: line + 1, lines: Vec::new() });
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            if trimmed.is_empty() {
                continue;
            }
            return Err(QueryFileError::MissingName { line });
        };
        if let Some(rest) = trimmed.strip_prefix("scope:") {
            if block.lines.iter().all(|(_, l)| l.trim().is_empty()) {
                block.scope = match rest.trim() {
                    "all" => IdsScope::All,
                    "legit" => IdsScope::LegitOnly,
                    other => return Err(QueryFileError::BadScope { line, value: other.to_string() }),
                };
                continue;
            }
        }
        block.lines.push((line, raw.to_string()));
    }

    blocks
        .into_iter()
        .map(|b| {
            // Keep blank lines so parse errors report file positions.
            let start = b.lines.first().map(|(l, _)| *l).unwrap_or(b.first_line);
            let mut body = String::new();
            let mut expected_line = start;
            for (l, text) in &b.lines {
                while expected_line < *l {
                    body.push('\n');
                    expected_line += 1;
                }
                body.push_str(text);
            }
            let text = b.lines.iter().map(|(_, l)| l.trim()).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
            if text.is_empty() {
                return Err(QueryFileError::Empty { name: b.name });
            }
            let ast = parse_property(&body).map_err(|mut error| {
                error.line += start - 1;
                QueryFileError::Parse { name: b.name.clone(), error }
            })?;
            Ok(NamedQuery { name: b.name, scope: b.scope, text, ast })
        })
        .collect()
}
