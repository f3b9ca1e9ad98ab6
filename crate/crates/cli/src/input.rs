//! Reading area lists from flags and files.

use std::fmt;
use std::path::Path;

/// Malformed input, located by line (files) or item (flag lists).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// Flag name or file path the text came from.
    pub origin: String,
    /// 1-based line, for file input.
    pub line: Option<usize>,
    /// 1-based column in the line, or 1-based item index in a flag list.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}:{}: {}", self.origin, line, self.position, self.message),
            None => write!(f, "{}: item {}: {}", self.origin, self.position, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn number(token: &str) -> Result<f64, String> {
    let token = token.trim();
    if token.is_empty() {
        return Err("empty value".into());
    }
    token.parse::<f64>().map_err(|_| format!("`{token}` is not a number"))
}

/// Parses a comma-separated list such as `9,6,5,4`.
pub fn parse_list(origin: &str, text: &str) -> Result<Vec<f64>, ParseError> {
    text.split(',')
        .enumerate()
        .map(|(i, tok)| {
            number(tok).map_err(|message| ParseError {
                origin: origin.to_string(),
                line: None,
                position: i + 1,
                message,
            })
        })
        .collect()
}

/// Parses values given one per occurrence of a repeated flag.
pub fn parse_repeated(origin: &str, values: &[String]) -> Result<Vec<f64>, ParseError> {
    values
        .iter()
        .enumerate()
        .map(|(i, tok)| {
            number(tok).map_err(|message| ParseError {
                origin: origin.to_string(),
                line: None,
                position: i + 1,
                message,
            })
        })
        .collect()
}

/// Parses file contents: a JSON array of numbers, or one number per line with
/// `#` starting a comment.
pub fn parse_text(origin: &str, text: &str) -> Result<Vec<f64>, ParseError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(text).map_err(|e| ParseError {
            origin: origin.to_string(),
            line: Some(e.line()),
            position: e.column(),
            message: e.to_string(),
        });
    }
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let column = content.len() - content.trim_start().len() + 1;
        let value = number(content).map_err(|message| ParseError {
            origin: origin.to_string(),
            line: Some(i + 1),
            position: column,
            message,
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Reads and parses an input file.
pub fn read_file(path: &Path) -> Result<Vec<f64>, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
    parse_text(&path.display().to_string(), &text).map_err(InputError::Parse)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    Parse(ParseError),
    Io(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Parse(e) => e.fmt(f),
            InputError::Io(msg) => f.write_str(msg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comma_list() {
        assert_eq!(
            parse_list("--areas", "9,6,5,4,3,2,1,1").unwrap(),
            vec![9.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 1.0]
        );
        assert_eq!(parse_list("--areas", " 1.5 , 2e1").unwrap(), vec![1.5, 20.0]);
    }

    #[test]
    fn empty_item_is_located() {
        let err = parse_list("--areas", "1,,2").unwrap_err();
        assert_eq!(err.position, 2);
        assert_eq!(err.line, None);
        assert_eq!(err.to_string(), "--areas: item 2: empty value");
    }

    #[test]
    fn text_with_comments() {
        assert_eq!(parse_text("f", "1\n1\n# note\n1\n1\n").unwrap(), vec![1.0; 4]);
        assert_eq!(parse_text("f", "2 # trailing\n\n  3\n").unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn text_error_has_line_and_column() {
        let err = parse_text("areas.txt", "1\n  x1\n").unwrap_err();
        assert_eq!((err.line, err.position), (Some(2), 3));
        assert!(err.to_string().starts_with("areas.txt:2:3:"));
    }

    #[test]
    fn json_array() {
        assert_eq!(parse_text("f", " [1, 2.5,\n 3]").unwrap(), vec![1.0, 2.5, 3.0]);
        let err = parse_text("f", "[1,\n \"a\"]").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn repeated_flag() {
        let v = vec!["1".to_string(), "2".to_string()];
        assert_eq!(parse_repeated("--area", &v).unwrap(), vec![1.0, 2.0]);
        let bad = vec!["1".to_string(), "nope".to_string()];
        assert_eq!(parse_repeated("--area", &bad).unwrap_err().position, 2);
    }
}
