//! Lowercasing tokenizer with CJK character bigrams.

use std::collections::HashSet;

/// CJK ideographs, kana and hangul syllables.
fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xAC00..=0xD7AF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF)
}

#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
}

impl Tokenizer {
    pub fn new<I, S>(stopwords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self { stopwords: stopwords.into_iter().map(|s| s.as_ref().to_lowercase()).collect() }
    }

    /// Parses a stopword file: one token per line, blank lines ignored.
    pub fn from_stopword_list(contents: &str) -> Self {
        Self::new(contents.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut latin = String::new();
        let mut cjk: Vec<char> = Vec::new();

        for c in text.chars().flat_map(char::to_lowercase) {
            if is_cjk(c) {
                self.flush_latin(&mut latin, &mut out);
                cjk.push(c);
            } else if c.is_alphanumeric() {
                self.flush_cjk(&mut cjk, &mut out);
                latin.push(c);
            } else {
                self.flush_latin(&mut latin, &mut out);
                self.flush_cjk(&mut cjk, &mut out);
            }
        }
        self.flush_latin(&mut latin, &mut out);
        self.flush_cjk(&mut cjk, &mut out);
        out
    }

    fn push(&self, token: String, out: &mut Vec<String>) {
        if !self.stopwords.contains(&token) {
            out.push(token);
        }
    }

    fn flush_latin(&self, run: &mut String, out: &mut Vec<String>) {
        if !run.is_empty() {
            self.push(std::mem::take(run), out);
        }
    }

    fn flush_cjk(&self, run: &mut Vec<char>, out: &mut Vec<String>) {
        match run.len() {
            0 => {}
            1 => self.push(run[0].to_string(), out),
            _ => {
                for pair in run.windows(2) {
                    self.push(pair.iter().collect(), out);
                }
            }
        }
        run.clear();
    }
}

/// Word count used for cell sizing: Latin words plus individual CJK characters.
pub fn word_count(text: &str) -> usize {
    let mut count = 0;
    let mut in_word = false;
    for c in text.chars() {
        if is_cjk(c) {
            count += 1;
            in_word = false;
        } else if c.is_alphanumeric() {
            if !in_word {
                count += 1;
            }
            in_word = true;
        } else {
            in_word = false;
        }
    }
    count
}
