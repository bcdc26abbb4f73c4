use std::collections::HashMap;

/// Interns tokens as integer symbols. Sentences coded against one table
/// share a vocabulary, so equal tokens get equal codes.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    codes: HashMap<String, u32>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn code(&mut self, token: &str) -> u32 {
        if let Some(&c) = self.codes.get(token) {
            return c;
        }
        let c = self.codes.len() as u32;
        self.codes.insert(token.to_string(), c);
        c
    }

    pub fn encode<S: AsRef<str>>(&mut self, tokens: &[S]) -> SymbolCodedSentence {
        SymbolCodedSentence {
            tokens: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
            codes: tokens.iter().map(|t| self.code(t.as_ref())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolCodedSentence {
    tokens: Vec<String>,
    codes: Vec<u32>,
}

impl SymbolCodedSentence {
    /// Codes two sentences over their joint vocabulary.
    pub fn code_pair<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> (Self, Self) {
        let mut table = SymbolTable::new();
        (table.encode(a), table.encode(b))
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Unit-cost edit distance with each word as one symbol.
pub fn word_levenshtein(a: &SymbolCodedSentence, b: &SymbolCodedSentence) -> usize {
    strsim::generic_levenshtein(&a.codes, &b.codes)
}
