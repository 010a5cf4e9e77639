//! Parser for the tree/forest input grammar.
//!
//! ```text
//! forest    := tree ("+" tree)*
//! tree      := node | shorthand
//! node      := "(" node ("," node)* ")" | "*"
//! shorthand := "S(" int ("," int)* ")"      path-tree, every int >= 1
//! ```
//!
//! Whitespace is ignored. `*` is a leaf; a parenthesized node is a vertex
//! whose neighbors are the listed children — literally, so a root with two
//! children is a legal degree-2 inner vertex. A bare `*` is rejected: a tree
//! needs at least one edge.

use std::fmt;

use thiserror::Error;

use crate::forest::{Forest, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl fmt::Display) -> Self {
        ParseError {
            position,
            message: message.to_string(),
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => Err(ParseError::new(
                self.pos,
                format!("expected '{}', found '{}'", c as char, got as char),
            )),
            None => Err(ParseError::new(
                self.pos,
                format!("expected '{}', found end of input", c as char),
            )),
        }
    }

    fn parse_forest(&mut self) -> Result<Forest, ParseError> {
        let mut forest = Forest::empty();
        self.parse_tree(&mut forest)?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            self.parse_tree(&mut forest)?;
        }
        self.skip_ws();
        if self.pos < self.bytes.len() {
            return Err(ParseError::new(
                self.pos,
                format!("unexpected '{}'", self.bytes[self.pos] as char),
            ));
        }
        Ok(forest)
    }

    fn parse_tree(&mut self, forest: &mut Forest) -> Result<(), ParseError> {
        match self.peek() {
            Some(b'S') => self.parse_shorthand(forest),
            Some(b'(') => {
                let at = self.pos;
                let root = self.parse_node(forest)?;
                if forest.degree(root) == 0 {
                    // cannot happen through the grammar, but keep the guard
                    return Err(ParseError::new(at, "a tree needs at least one edge"));
                }
                Ok(())
            }
            Some(b'*') => Err(ParseError::new(
                self.pos,
                "a bare leaf is not a tree; a tree needs at least one edge",
            )),
            Some(c) => Err(ParseError::new(
                self.pos,
                format!("expected a tree, found '{}'", c as char),
            )),
            None => Err(ParseError::new(
                self.pos,
                "expected a tree, found end of input",
            )),
        }
    }

    /// Parses a node and returns its vertex. Children are attached here.
    fn parse_node(&mut self, forest: &mut Forest) -> Result<VertexId, ParseError> {
        match self.bump() {
            Some(b'*') => Ok(forest.push_vertex()),
            Some(b'(') => {
                let vertex = forest.push_vertex();
                loop {
                    let child = self.parse_node(forest)?;
                    forest
                        .try_push_edge(vertex, child)
                        .map_err(|e| ParseError::new(self.pos, e))?;
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => {
                            return Err(ParseError::new(
                                self.pos,
                                format!("expected ',' or ')', found '{}'", c as char),
                            ))
                        }
                        None => {
                            return Err(ParseError::new(self.pos, "unclosed '('"));
                        }
                    }
                }
                Ok(vertex)
            }
            Some(c) => Err(ParseError::new(
                self.pos - 1,
                format!("expected '*' or '(', found '{}'", c as char),
            )),
            None => Err(ParseError::new(
                self.pos,
                "expected a node, found end of input",
            )),
        }
    }

    fn parse_shorthand(&mut self, forest: &mut Forest) -> Result<(), ParseError> {
        self.expect(b'S')?;
        self.expect(b'(')?;
        let mut counts = Vec::new();
        loop {
            counts.push(self.parse_count()?);
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(c) => {
                    return Err(ParseError::new(
                        self.pos,
                        format!("expected ',' or ')', found '{}'", c as char),
                    ))
                }
                None => return Err(ParseError::new(self.pos, "unclosed 'S('")),
            }
        }
        let mut prev: Option<VertexId> = None;
        for count in counts {
            let spine = forest.push_vertex();
            if let Some(p) = prev {
                forest
                    .try_push_edge(p, spine)
                    .map_err(|e| ParseError::new(self.pos, e))?;
            }
            for _ in 0..count {
                let leaf = forest.push_vertex();
                forest
                    .try_push_edge(spine, leaf)
                    .map_err(|e| ParseError::new(self.pos, e))?;
            }
            prev = Some(spine);
        }
        Ok(())
    }

    fn parse_count(&mut self) -> Result<usize, ParseError> {
        let at = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.pos,
            Some(c) => {
                return Err(ParseError::new(
                    self.pos,
                    format!("expected a leaf count, found '{}'", c as char),
                ))
            }
            None => return Err(ParseError::new(self.pos, "expected a leaf count")),
        };
        let mut end = at;
        while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
            end += 1;
        }
        let text = std::str::from_utf8(&self.bytes[at..end]).unwrap();
        self.pos = end;
        let n: usize = text
            .parse()
            .map_err(|_| ParseError::new(at, format!("leaf count '{text}' out of range")))?;
        if n == 0 {
            return Err(ParseError::new(at, "leaf counts must be at least 1"));
        }
        Ok(n)
    }
}

/// Parses the grammar above into a [`Forest`].
pub fn parse_forest(text: &str) -> Result<Forest, ParseError> {
    Parser::new(text).parse_forest()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_key;

    #[test]
    fn parses_the_three_input_kinds() {
        let star = parse_forest("(*,*,*)").unwrap();
        assert_eq!(canonical_key(&star), canonical_key(&Forest::star(3)));

        let running = parse_forest("S(2,1,2)").unwrap();
        assert_eq!(running.edge_count(), 7);
        let mut degs: Vec<usize> = running
            .inner_vertices()
            .iter()
            .map(|&v| running.degree(v))
            .collect();
        degs.sort();
        assert_eq!(degs, [3, 3, 3]);

        let double = parse_forest("((*,*),*,*)").unwrap();
        assert_eq!(
            canonical_key(&double),
            canonical_key(&Forest::path_tree(&[2, 2]))
        );
    }

    #[test]
    fn forest_sums_and_whitespace() {
        let f = parse_forest(" (*,*,*) + S(1) ").unwrap();
        assert_eq!(f.components().len(), 2);
        assert_eq!(f.edge_count(), 4);
    }

    #[test]
    fn degree_two_roots_are_legal() {
        let f = parse_forest("((*,*),*)").unwrap();
        assert!(f.has_degree_two_vertex());
    }

    #[test]
    fn error_positions_are_reported() {
        for (text, pos) in [
            ("", 0),
            ("*", 0),
            ("S()", 2),
            ("S(0)", 2),
            ("S(2,)", 4),
            ("(*,*", 4),
            ("(*,*))", 5),
            ("()", 1),
            ("(*,*,*) extra", 8),
        ] {
            let err = parse_forest(text).unwrap_err();
            assert_eq!(err.position, pos, "input {text:?}: {err}");
        }
    }
}
