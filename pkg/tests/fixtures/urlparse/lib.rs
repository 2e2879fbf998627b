#[derive(Debug, Clone)]
pub struct Url {
    scheme: String,
    host: String,
    port: Option<u16>,
    path: String,
    query: String,
}

#[derive(Debug)]
pub struct ParseError {
    kind: u8,
}

#[derive(Debug)]
pub struct Pairs {
    pairs: Vec<(String, String)>,
}

impl ParseError {
    pub fn kind(&self) -> u8 {
        self.kind
    }
}

impl Url {
    pub fn parse(text: &str) -> Result<Url, ParseError> {
        let (scheme, rest) = text.split_once("://").ok_or(ParseError { kind: 1 })?;
        if scheme.is_empty() || !scheme.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(ParseError { kind: 2 });
        }
        let (authority, tail) = match rest.find('/') {
            Some(i) => (&rest[..i], &rest[i..]),
            None => (rest, "/"),
        };
        let (path, query) = tail.split_once('?').unwrap_or((tail, ""));
        let (host, port) = match authority.rsplit_once(':') {
            Some((h, p)) => (h, Some(p.parse::<u16>().map_err(|_| ParseError { kind: 3 })?)),
            None => (authority, None),
        };
        Ok(Url {
            scheme: scheme.to_ascii_lowercase(),
            host: host.to_string(),
            port,
            path: path.to_string(),
            query: query.to_string(),
        })
    }

    pub fn join(&self, reference: &str) -> Result<Url, ParseError> {
        if reference.contains("://") {
            return Url::parse(reference);
        }
        let mut out = self.clone();
        if reference.starts_with('/') {
            out.path = reference.to_string();
        } else {
            let base = match self.path.rfind('/') {
                Some(i) => &self.path[..=i],
                None => "/",
            };
            out.path = format!("{}{}", base, reference);
        }
        out.query.clear();
        Ok(out)
    }

    pub fn set_path(&mut self, path: &str) {
        self.path = if path.starts_with('/') { path.to_string() } else { format!("/{}", path) };
    }

    pub fn set_port(&mut self, port: Option<u16>) -> bool {
        self.port = port;
        true
    }

    pub fn host(&self) -> Option<String> {
        if self.host.is_empty() { None } else { Some(self.host.clone()) }
    }

    pub fn port(&self) -> Option<u16> {
        self.port
    }

    pub fn as_text(&self) -> String {
        let port = self.port.map(|p| format!(":{}", p)).unwrap_or_default();
        let query = if self.query.is_empty() { String::new() } else { format!("?{}", self.query) };
        format!("{}://{}{}{}{}", self.scheme, self.host, port, self.path, query)
    }

    pub fn query_pairs(&self) -> Pairs {
        let pairs = self
            .query
            .split('&')
            .filter(|s| !s.is_empty())
            .map(|kv| {
                let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
                (k.to_string(), v.to_string())
            })
            .collect();
        Pairs { pairs }
    }
}

impl Pairs {
    pub fn count_pairs(&self) -> usize {
        self.pairs.len()
    }
}

pub fn form_urlencoded(data: &[u8]) -> String {
    let mut out = String::new();
    for &b in data {
        if b.is_ascii_alphanumeric() || b"-._~".contains(&b) {
            out.push(b as char);
        } else if b == b' ' {
            out.push('+');
        } else {
            out.push_str(&format!("%{:02X}", b));
        }
    }
    out
}
