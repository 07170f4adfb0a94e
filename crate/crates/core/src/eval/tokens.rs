use std::fmt;

use crate::hierarchy::{Hierarchy, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    BlockOpen,
    BlockClose,
    GroupOpen,
    GroupClose,
    Text,
    NonText,
}

impl Token {
    pub fn as_str(self) -> &'static str {
        match self {
            Token::BlockOpen => "(",
            Token::BlockClose => ")",
            Token::GroupOpen => "[",
            Token::GroupClose => "]",
            Token::Text => "t",
            Token::NonText => "n",
        }
    }

    pub fn parse(s: &str) -> Option<Token> {
        Some(match s {
            "(" => Token::BlockOpen,
            ")" => Token::BlockClose,
            "[" => Token::GroupOpen,
            "]" => Token::GroupClose,
            "t" => Token::Text,
            "n" => Token::NonText,
            _ => return None,
        })
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type TokenSeq = Vec<Token>;

pub fn node_tokens(node: &Node, out: &mut TokenSeq) {
    match node {
        Node::Leaf(w) => out.push(if w.is_text() { Token::Text } else { Token::NonText }),
        Node::Block { children, .. } => {
            out.push(Token::BlockOpen);
            children.iter().for_each(|c| node_tokens(c, out));
            out.push(Token::BlockClose);
        }
        Node::Group(children) => {
            out.push(Token::GroupOpen);
            children.iter().for_each(|c| node_tokens(c, out));
            out.push(Token::GroupClose);
        }
    }
}

/// Depth-first token sequence of the whole hierarchy.
pub fn serialize(h: &Hierarchy) -> TokenSeq {
    let mut out = Vec::new();
    h.children.iter().for_each(|n| node_tokens(n, &mut out));
    out
}

/// One token sequence per block node, in depth-first order.
pub fn block_sequences(h: &Hierarchy) -> Vec<TokenSeq> {
    h.blocks()
        .into_iter()
        .map(|b| {
            let mut seq = Vec::new();
            node_tokens(b, &mut seq);
            seq
        })
        .collect()
}

pub fn to_string(seq: &[Token]) -> String {
    seq.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" ")
}

/// Parses a whitespace-separated token string.
pub fn parse(s: &str) -> Option<TokenSeq> {
    s.split_whitespace().map(Token::parse).collect()
}

/// Brackets balanced and properly nested.
pub fn is_balanced(seq: &[Token]) -> bool {
    let mut stack = Vec::new();
    for t in seq {
        match t {
            Token::BlockOpen | Token::GroupOpen => stack.push(*t),
            Token::BlockClose if stack.pop() != Some(Token::BlockOpen) => return false,
            Token::GroupClose if stack.pop() != Some(Token::GroupOpen) => return false,
            _ => {}
        }
    }
    stack.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BBox, Widget, WidgetId};
    use crate::hierarchy::Orientation;

    fn text(id: u32, t: u32) -> Node {
        Node::Leaf(Widget::text(WidgetId(id), BBox::new(100, t, 200, t + 20).unwrap(), "x"))
    }

    fn image(id: u32, t: u32) -> Node {
        Node::Leaf(Widget::non_text(WidgetId(id), BBox::new(0, t, 40, t + 40).unwrap()))
    }

    #[test]
    fn block_of_two_texts() {
        let h = Hierarchy::new(
            None,
            None,
            vec![Node::block(
                Some(Orientation::Vertical),
                vec![Node::Group(vec![text(0, 0)]), Node::Group(vec![text(1, 50)])],
            )],
        );
        assert_eq!(to_string(&serialize(&h)), "( [ t ] [ t ] )");
    }

    #[test]
    fn list_of_three_items() {
        let groups = (0..3).map(|i| Node::Group(vec![image(2 * i, 60 * i), text(2 * i + 1, 60 * i + 10)])).collect();
        let h = Hierarchy::new(None, None, vec![Node::block(Some(Orientation::Vertical), groups)]);
        assert_eq!(to_string(&serialize(&h)), "( [ n t ] [ n t ] [ n t ] )");
        assert_eq!(block_sequences(&h).len(), 1);
    }

    #[test]
    fn empty_hierarchy() {
        assert!(serialize(&Hierarchy::default()).is_empty());
    }

    #[test]
    fn parse_and_balance() {
        let s = parse("( [ n t ] )").unwrap();
        assert!(is_balanced(&s));
        assert_eq!(to_string(&s), "( [ n t ] )");
        assert!(!is_balanced(&parse("( [ n ) ]").unwrap()));
        assert!(parse("( x )").is_none());
    }
}
