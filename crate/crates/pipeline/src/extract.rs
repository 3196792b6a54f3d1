//! Pulling a logic program out of a model completion.

use deduce_core::parse_program;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no logic program found in completion")]
pub struct ExtractionFailure;

/// Returns the body of the last fenced code block. Without fences, returns
/// the longest suffix of lines that parses as a program with at least one
/// clause. An unterminated final fence runs to the end of the text.
pub fn extract_program(completion: &str) -> Result<String, ExtractionFailure> {
    if let Some(block) = last_fenced_block(completion) {
        return Ok(block);
    }
    let lines: Vec<&str> = completion.lines().collect();
    for start in 0..lines.len() {
        let candidate = lines[start..].join("\n");
        if candidate.trim().is_empty() {
            break;
        }
        if matches!(parse_program(&candidate), Ok(p) if !p.clauses.is_empty()) {
            return Ok(candidate);
        }
    }
    Err(ExtractionFailure)
}

fn last_fenced_block(text: &str) -> Option<String> {
    let mut last = None;
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        let is_fence = line.trim_start().starts_with("```");
        match current.take() {
            None if is_fence => current = Some(Vec::new()),
            None => {}
            Some(body) if is_fence => last = Some(body),
            Some(mut body) => {
                body.push(line);
                current = Some(body);
            }
        }
    }
    if let Some(body) = current {
        last = Some(body);
    }
    last.map(|body| {
        let mut s = body.join("\n");
        s.push('\n');
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenced_blocks() {
        let c = "Here:\n```prolog\na(1).\n```\ntext\n```\nb(2).\n% note\n```\nbye";
        assert_eq!(extract_program(c).unwrap(), "b(2).\n% note\n");
        assert_eq!(extract_program("```\nopen(1).").unwrap(), "open(1).\n");
    }

    #[test]
    fn unfenced_suffix() {
        let c = "Here is my program:\n% facts\nedge(a, b).\nedge(b, c).";
        assert_eq!(extract_program(c).unwrap(), "% facts\nedge(a, b).\nedge(b, c).");
        assert_eq!(extract_program("I cannot solve this problem."), Err(ExtractionFailure));
        assert_eq!(extract_program("I'm not sure what to do."), Err(ExtractionFailure));
        assert_eq!(extract_program(""), Err(ExtractionFailure));
    }
}
