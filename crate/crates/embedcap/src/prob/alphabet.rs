use super::ProbError;

/// A named finite alphabet. Symbols are ordered; all indexing throughout the
/// crate is by position in this list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlphabet {
    name: String,
    symbols: Vec<String>,
}

impl FiniteAlphabet {
    pub fn new(name: impl Into<String>, symbols: Vec<String>) -> Result<Self, ProbError> {
        let name = name.into();
        if symbols.is_empty() {
            return Err(ProbError::BadAlphabet(name));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(ProbError::BadAlphabet(name));
            }
        }
        Ok(Self { name, symbols })
    }

    /// Alphabet `{0, 1, ..., size-1}` with numeric labels.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self, ProbError> {
        Self::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    /// Binary alphabet `{0, 1}`.
    pub fn binary(name: impl Into<String>) -> Self {
        Self::indexed(name, 2).expect("binary alphabet is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Same symbol list, possibly different name.
    pub fn same_symbols(&self, other: &FiniteAlphabet) -> bool {
        self.symbols == other.symbols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicates() {
        assert!(FiniteAlphabet::new("a", vec![]).is_err());
        assert!(FiniteAlphabet::new("a", vec!["x".into(), "x".into()]).is_err());
    }

    #[test]
    fn indexed_labels() {
        let a = FiniteAlphabet::indexed("t1", 3).unwrap();
        assert_eq!(a.symbols(), &["0", "1", "2"]);
        assert_eq!(a.index_of("2"), Some(2));
        assert_eq!(a.index_of("3"), None);
    }
}
