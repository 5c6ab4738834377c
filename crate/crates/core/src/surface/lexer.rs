use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Dot,
    Backslash,
    Arrow,
    Equals,
    Number(u64),
    Numeral(u64),
    Ident(String),
    Catch,
    Throw,
    Cons,
    Lrec,
    Def,
    Main,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Numeral(n) => format!("numeral `#{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Catch => "`catch`".into(),
            Tok::Throw => "`throw`".into(),
            Tok::Cons => "`cons`".into(),
            Tok::Lrec => "`lrec`".into(),
            Tok::Def => "`def`".into(),
            Tok::Main => "`main`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    // position of the last character, used for errors at end of input
    let mut last = (1usize, 1usize);

    fn advance(n: usize, i: &mut usize, col: &mut usize) {
        *i += n;
        *col += n;
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            last = (line, col);
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        last = (line, col);
        if c.is_ascii_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                last = (line, col);
                advance(1, &mut i, &mut col);
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            '.' => Some(Tok::Dot),
            '\\' => Some(Tok::Backslash),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, line: tl, column: tc });
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Spanned { tok: Tok::Arrow, line: tl, column: tc });
            advance(2, &mut i, &mut col);
            continue;
        }
        if c == '#' || c.is_ascii_digit() {
            let start = if c == '#' { i + 1 } else { i };
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j == start {
                return Err(ParseError::new(tl, tc, "expected digits after `#`", vec!["digits".into()]));
            }
            let digits: String = chars[start..j].iter().collect();
            let n: u64 = digits
                .parse()
                .map_err(|_| ParseError::new(tl, tc, format!("number `{digits}` is too large"), vec![]))?;
            let tok = if c == '#' { Tok::Numeral(n) } else { Tok::Number(n) };
            out.push(Spanned { tok, line: tl, column: tc });
            let n = j - i;
            advance(n, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let tok = match word.as_str() {
                "catch" => Tok::Catch,
                "throw" => Tok::Throw,
                "cons" => Tok::Cons,
                "lrec" => Tok::Lrec,
                "def" => Tok::Def,
                "main" => Tok::Main,
                _ => Tok::Ident(word),
            };
            out.push(Spanned { tok, line: tl, column: tc });
            let n = j - i;
            advance(n, &mut i, &mut col);
            continue;
        }
        return Err(ParseError::new(tl, tc, format!("unexpected character `{c}`"), vec![]));
    }
    out.push(Spanned { tok: Tok::Eof, line: last.0, column: last.1 });
    Ok(out)
}
