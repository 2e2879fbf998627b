#[derive(Debug)]
pub struct Reader {
    lines: Vec<String>,
    next: usize,
    delim: char,
    headers: bool,
}

#[derive(Debug, Clone)]
pub struct Record {
    fields: Vec<String>,
}

#[derive(Debug)]
pub struct Writer {
    delim: char,
    out: String,
}

impl Reader {
    pub fn from_text(text: &str, delim: u8) -> Reader {
        Reader {
            lines: text.lines().map(|l| l.to_string()).collect(),
            next: 0,
            delim: delim as char,
            headers: false,
        }
    }

    pub fn has_headers(&mut self, yes: bool) {
        self.headers = yes;
    }

    pub fn next_record(&mut self) -> Option<Record> {
        if self.headers && self.next == 0 {
            self.next = 1;
        }
        let line = self.lines.get(self.next)?;
        self.next += 1;
        Some(Record { fields: line.split(self.delim).map(|f| f.to_string()).collect() })
    }
}

impl Record {
    pub fn from_fields(joined: &str) -> Record {
        Record { fields: joined.split(',').map(|f| f.to_string()).collect() }
    }

    pub fn get(&self, i: usize) -> Option<String> {
        self.fields.get(i).cloned()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }
}

impl Writer {
    pub fn new(delim: u8) -> Writer {
        Writer { delim: delim as char, out: String::new() }
    }

    pub fn write_record(&mut self, rec: &Record) {
        let sep = self.delim.to_string();
        self.out.push_str(&rec.fields.join(&sep));
        self.out.push('\n');
    }

    pub fn into_text(self) -> String {
        self.out
    }
}

pub fn for_each_field<F: FnMut(&str)>(rec: &Record, mut f: F) {
    for field in &rec.fields {
        f(field);
    }
}
