pub trait WordSplitter {
    fn split<'a>(&self, word: &'a str) -> Vec<&'a str>;
}

#[derive(Debug, Clone)]
pub struct Options {
    width: usize,
    break_words: bool,
    indent: String,
}

impl Options {
    pub fn new(width: usize) -> Options {
        Options { width, break_words: true, indent: String::new() }
    }

    pub fn break_words(mut self, yes: bool) -> Options {
        self.break_words = yes;
        self
    }

    pub fn indent_with(mut self, prefix: &str) -> Options {
        self.indent = prefix.to_string();
        self
    }
}

pub fn wrap(text: &str, opts: &Options) -> String {
    let mut lines: Vec<String> = Vec::new();
    let mut line = opts.indent.clone();
    for word in text.split_whitespace() {
        let mut word = word.to_string();
        // width zero with break_words loops on the same remainder forever; cap iterations
        let mut guard = 0;
        while opts.break_words && word.chars().count() > opts.width && opts.width > 0 && guard < 10_000 {
            let head: String = word.chars().take(opts.width).collect();
            word = word.chars().skip(opts.width).collect();
            lines.push(format!("{}{}", opts.indent, head));
            guard += 1;
        }
        if line.len() > opts.indent.len() && line.len() + 1 + word.len() > opts.width {
            lines.push(std::mem::replace(&mut line, opts.indent.clone()));
        }
        if line.len() > opts.indent.len() {
            line.push(' ');
        }
        line.push_str(&word);
    }
    lines.push(line);
    lines.join("\n")
}

pub fn fill(text: &str, width: usize) -> String {
    wrap(text, &Options::new(width))
}

pub fn dedent(text: &str) -> String {
    let margin = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    text.lines()
        .map(|l| if l.len() >= margin { &l[margin..] } else { "" })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn indent(text: &str, prefix: &str) -> String {
    text.lines().map(|l| format!("{}{}", prefix, l)).collect::<Vec<_>>().join("\n")
}

pub fn wrap_with(text: &str, splitter: &dyn WordSplitter) -> String {
    text.split_whitespace().flat_map(|w| splitter.split(w)).collect::<Vec<_>>().join(" ")
}
