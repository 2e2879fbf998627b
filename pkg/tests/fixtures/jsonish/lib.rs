#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Text(String),
    Array(Vec<Value>),
}

#[derive(Debug)]
pub struct Error {
    line: usize,
}

impl Error {
    pub fn line(&self) -> usize {
        self.line
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self) -> Error {
        let line = self.src[..self.pos.min(self.src.len())].iter().filter(|&&b| b == b'\n').count();
        Error { line: line + 1 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn value(&mut self, depth: usize) -> Result<Value, Error> {
        // recursion depth is not limited
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'n') if self.src[self.pos..].starts_with(b"null") => {
                self.pos += 4;
                Ok(Value::Null)
            }
            Some(b't') if self.src[self.pos..].starts_with(b"true") => {
                self.pos += 4;
                Ok(Value::Bool(true))
            }
            Some(b'f') if self.src[self.pos..].starts_with(b"false") => {
                self.pos += 5;
                Ok(Value::Bool(false))
            }
            Some(b'"') => {
                let start = self.pos + 1;
                let end = self.src[start..].iter().position(|&b| b == b'"').ok_or_else(|| self.err())?;
                self.pos = start + end + 1;
                Ok(Value::Text(String::from_utf8_lossy(&self.src[start..start + end]).into_owned()))
            }
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.src.get(self.pos) == Some(&b']') {
                        self.pos += 1;
                        return Ok(Value::Array(items));
                    }
                    items.push(self.value(depth + 1)?);
                    self.skip_ws();
                    if self.src.get(self.pos) == Some(&b',') {
                        self.pos += 1;
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || *c == b'-' => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                text.parse().map(Value::Int).map_err(|_| self.err())
            }
            _ => Err(self.err()),
        }
    }
}

impl Value {
    pub fn parse(text: &str) -> Result<Value, Error> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let v = p.value(0)?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err());
        }
        Ok(v)
    }

    pub fn from_i64(n: i64) -> Value {
        Value::Int(n)
    }

    pub fn from_text(s: String) -> Value {
        Value::Text(s)
    }

    pub fn array() -> Value {
        Value::Array(Vec::new())
    }

    pub fn push(&mut self, item: Value) -> bool {
        match self {
            Value::Array(items) => {
                items.push(item);
                true
            }
            _ => false,
        }
    }

    pub fn get_index(&self, i: usize) -> Option<Value> {
        match self {
            Value::Array(items) => items.get(i).cloned(),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Value::Null => "null".to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Int(n) => n.to_string(),
            Value::Text(s) => format!("\"{}\"", s),
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.to_text()).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }
}

pub fn from_static(s: &'static str) -> Value {
    Value::Text(s.to_string())
}
