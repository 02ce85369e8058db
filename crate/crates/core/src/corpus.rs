// Copyright 2026 The chsh-concepts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact-string and collocate counting over a directory of documents.
//!
//! Tokens are maximal runs of alphanumeric characters, case-folded. There is
//! no lemmatization, so "growls" and "growl" are different words. Counting
//! windows never cross document boundaries.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::chsh::{CoincidenceTable, CountingMode, ExperimentSuite, Setting, Sign};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Collocate window used when none is given: nine words on each side.
pub const DEFAULT_WINDOW: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub source: String,
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn new(source: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenStream {
            source: source.into(),
            tokens,
        }
    }

    /// Tokenizes raw bytes, which must be UTF-8.
    pub fn from_bytes(source: &str, bytes: &[u8]) -> Result<Self> {
        let text = String::from_utf8(bytes.to_vec()).map_err(|e| Error::Encoding {
            document: source.to_string(),
            source: e,
        })?;
        Ok(TokenStream::new(source, tokenize(&text).tokens))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn tokenize(text: &str) -> TokenStream {
    let tokens = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect();
    TokenStream::new("", tokens)
}

/// Positions i with tokens[i] = first and tokens[i+1] = second.
pub fn count_exact(stream: &TokenStream, first: &str, second: &str) -> u64 {
    stream
        .tokens
        .windows(2)
        .filter(|w| w[0] == first && w[1] == second)
        .count() as u64
}

/// Index pairs (i, j) with tokens[i] = target, tokens[j] = collocate and
/// 1 ≤ |i − j| ≤ window, on either side of the target.
pub fn count_collocate(stream: &TokenStream, target: &str, collocate: &str, window: usize) -> u64 {
    let toks = &stream.tokens;
    let mut n = 0;
    for (i, t) in toks.iter().enumerate() {
        if t != target {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(toks.len().saturating_sub(1));
        n += (lo..=hi).filter(|&j| j != i && toks[j] == collocate).count() as u64;
    }
    n
}

/// Like [`count_collocate`] but only with the collocate after the target
/// (1 ≤ j − i ≤ window). With window 1 this is [`count_exact`].
pub fn count_collocate_ordered(
    stream: &TokenStream,
    target: &str,
    collocate: &str,
    window: usize,
) -> u64 {
    let toks = &stream.tokens;
    let mut n = 0;
    for (i, t) in toks.iter().enumerate() {
        if t != target {
            continue;
        }
        let hi = (i + window).min(toks.len().saturating_sub(1));
        n += (i + 1..=hi).filter(|&j| toks[j] == collocate).count() as u64;
    }
    n
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PairQuery {
    pub first: String,
    pub second: String,
    pub sign: Sign,
}

impl PairQuery {
    pub fn new(first: &str, second: &str, sign: Sign) -> Self {
        PairQuery {
            first: first.to_string(),
            second: second.to_string(),
            sign,
        }
    }

    pub fn label(&self) -> String {
        format!("{} {}", self.first, self.second)
    }
}

/// The four searches of one coincidence setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountQuery {
    pub pairs: [PairQuery; 4],
    pub mode: CountingMode,
    pub window: usize,
}

impl CountQuery {
    pub fn count(&self, stream: &TokenStream) -> [u64; 4] {
        std::array::from_fn(|k| {
            let p = &self.pairs[k];
            match self.mode {
                CountingMode::Collocates => count_collocate(stream, &p.first, &p.second, self.window),
                _ => count_exact(stream, &p.first, &p.second),
            }
        })
    }
}

/// One [`CountQuery`] per setting, sharing mode and window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    pub mode: CountingMode,
    pub window: usize,
    pub queries: BTreeMap<Setting, CountQuery>,
}

impl QuerySet {
    pub fn new(
        mode: CountingMode,
        window: usize,
        settings: impl IntoIterator<Item = (Setting, [PairQuery; 4])>,
    ) -> Result<Self> {
        if mode == CountingMode::Direct {
            return Err(Error::InvalidQuery("mode Direct has nothing to count".into()));
        }
        if window == 0 {
            return Err(Error::InvalidQuery("window must be at least 1".into()));
        }
        let mut queries = BTreeMap::new();
        for (setting, pairs) in settings {
            for p in &pairs {
                for w in [&p.first, &p.second] {
                    let toks = tokenize(w).tokens;
                    if toks.len() != 1 || &toks[0] != w {
                        return Err(Error::InvalidQuery(format!(
                            "'{w}' in setting {setting} is not a single lowercase word"
                        )));
                    }
                }
            }
            let plus = pairs.iter().filter(|p| p.sign == Sign::Plus).count();
            if plus != 2 {
                return Err(Error::InvalidQuery(format!(
                    "setting {setting} needs two +1 and two -1 pairs"
                )));
            }
            if queries
                .insert(setting, CountQuery { pairs, mode, window })
                .is_some()
            {
                return Err(Error::InvalidQuery(format!("setting {setting} given twice")));
            }
        }
        if let Some(s) = Setting::ALL.into_iter().find(|s| !queries.contains_key(s)) {
            return Err(Error::MissingSetting(s));
        }
        Ok(QuerySet { mode, window, queries })
    }

    /// Animal ∈ {horse, bear} / {tiger, cat} against act ∈ {growls, whinnies}
    /// / {snorts, meows}, with the conventional signs.
    pub fn animal_acts(mode: CountingMode, window: usize) -> Result<Self> {
        let setting = |a: [&str; 2], b: [&str; 2]| -> [PairQuery; 4] {
            std::array::from_fn(|k| PairQuery::new(a[k / 2], b[k % 2], Sign::STANDARD[k]))
        };
        Self::new(
            mode,
            window,
            [
                (Setting::AB, setting(["horse", "bear"], ["growls", "whinnies"])),
                (Setting::ABp, setting(["horse", "bear"], ["snorts", "meows"])),
                (Setting::ApB, setting(["tiger", "cat"], ["growls", "whinnies"])),
                (Setting::ApBp, setting(["tiger", "cat"], ["snorts", "meows"])),
            ],
        )
    }

    fn count_document(&self, stream: &TokenStream) -> BTreeMap<Setting, [u64; 4]> {
        self.queries
            .iter()
            .map(|(&s, q)| (s, q.count(stream)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub bytes: Vec<u8>,
}

/// A set of documents, kept sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: impl IntoIterator<Item = Document>) -> Self {
        let mut documents: Vec<Document> = documents.into_iter().collect();
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        Corpus { documents }
    }

    pub fn from_texts<I, S, T>(texts: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Self::new(texts.into_iter().map(|(id, text)| Document {
            id: id.into(),
            bytes: text.into().into_bytes(),
        }))
    }

    /// Every regular, non-hidden file directly inside `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let io_err = |path: &Path, source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut documents = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
            let entry = entry.map_err(|e| io_err(dir, e))?;
            let path = entry.path();
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.starts_with('.') || !path.is_file() {
                continue;
            }
            let bytes = fs::read(&path).map_err(|e| io_err(&path, e))?;
            documents.push(Document { id: name, bytes });
        }
        Ok(Self::new(documents))
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Per-setting counts summed over all documents.
pub fn count_corpus(
    corpus: &Corpus,
    queries: &QuerySet,
    exec: Execution,
) -> Result<BTreeMap<Setting, [u64; 4]>> {
    let per_doc = exec.map(corpus.documents(), |doc| {
        TokenStream::from_bytes(&doc.id, &doc.bytes).map(|s| queries.count_document(&s))
    });
    let mut totals: BTreeMap<Setting, [u64; 4]> =
        queries.queries.keys().map(|&s| (s, [0; 4])).collect();
    for counts in per_doc {
        for (setting, c) in counts? {
            let t = totals.get_mut(&setting).expect("same settings");
            for k in 0..4 {
                t[k] += c[k];
            }
        }
    }
    Ok(totals)
}

/// Counts every query over the corpus and turns the totals into a suite.
pub fn build_suite(
    corpus: &Corpus,
    queries: &QuerySet,
    name: &str,
    exec: Execution,
) -> Result<ExperimentSuite> {
    let totals = count_corpus(corpus, queries, exec)?;
    let mut tables = Vec::with_capacity(4);
    for (setting, query) in &queries.queries {
        let labels: Vec<String> = query.pairs.iter().map(PairQuery::label).collect();
        let labels: [&str; 4] = std::array::from_fn(|k| labels[k].as_str());
        let signs = std::array::from_fn(|k| query.pairs[k].sign);
        tables.push(CoincidenceTable::from_counts(
            *setting,
            labels,
            totals[setting],
            signs,
        )?);
    }
    Ok(ExperimentSuite::new(name, queries.mode, tables)?.with_window(queries.window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream(words: &[&str]) -> TokenStream {
        TokenStream::new("t", words.iter().map(|w| w.to_string()).collect())
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The Horse whinnies.").tokens, ["the", "horse", "whinnies"]);
        assert_eq!(tokenize("bear-growls?!").tokens, ["bear", "growls"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("  Ünïcode\tWORDS\n").tokens, ["ünïcode", "words"]);
    }

    #[test]
    fn invalid_utf8_names_the_document() {
        let err = TokenStream::from_bytes("broken.txt", &[0x66, 0xff, 0x66]).unwrap_err();
        assert!(err.to_string().contains("broken.txt"), "{err}");
    }

    #[test]
    fn exact_examples() {
        assert_eq!(count_exact(&stream(&["the", "horse", "whinnies"]), "horse", "whinnies"), 1);
        let s = stream(&["horse", "whinnies", "and", "the", "horse", "whinnies"]);
        assert_eq!(count_exact(&s, "horse", "whinnies"), 2);
        assert_eq!(count_exact(&stream(&["horse", "loudly", "whinnies"]), "horse", "whinnies"), 0);
    }

    #[test]
    fn collocate_examples() {
        let s = stream(&["the", "horse", "ran", "across", "the", "field", "and", "whinnies"]);
        assert_eq!(count_collocate(&s, "horse", "whinnies", 9), 1);
        assert_eq!(count_collocate(&s, "horse", "whinnies", 2), 0);
        assert_eq!(count_collocate(&stream(&["horse", "whinnies"]), "horse", "whinnies", 1), 1);
        // left side counts too
        assert_eq!(count_collocate(&stream(&["whinnies", "horse"]), "horse", "whinnies", 1), 1);
        assert_eq!(count_collocate_ordered(&stream(&["whinnies", "horse"]), "horse", "whinnies", 1), 0);
    }

    #[test]
    fn collocate_never_pairs_a_token_with_itself() {
        let s = stream(&["buffalo", "buffalo"]);
        assert_eq!(count_collocate(&s, "buffalo", "buffalo", 5), 2);
        assert_eq!(count_collocate(&stream(&["buffalo"]), "buffalo", "buffalo", 5), 0);
    }

    #[test]
    fn query_validation() {
        assert!(QuerySet::animal_acts(CountingMode::ExactString, 0).is_err());
        assert!(QuerySet::animal_acts(CountingMode::Direct, 9).is_err());
        let bad = QuerySet::new(
            CountingMode::ExactString,
            9,
            [(Setting::AB, std::array::from_fn(|k| PairQuery::new("Horse", "x", Sign::STANDARD[k])))],
        );
        assert!(matches!(bad, Err(Error::InvalidQuery(_))));
    }

    #[test]
    fn single_document_suite() {
        let corpus = Corpus::from_texts([
            ("a.txt", "the horse whinnies"),
            ("b.txt", "the horse snorts. the tiger growls. the cat meows."),
        ]);
        let q = QuerySet::animal_acts(CountingMode::ExactString, DEFAULT_WINDOW).unwrap();
        let suite = build_suite(&corpus, &q, "tiny", Execution::Sequential).unwrap();
        assert_eq!(suite.table(Setting::AB).unwrap().probabilities(), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(suite.table(Setting::AB).unwrap().cells[1].label, "horse whinnies");
        assert_eq!(suite.window, Some(9));
    }

    #[test]
    fn empty_setting_is_named() {
        let corpus = Corpus::from_texts([("a.txt", "the horse whinnies")]);
        let q = QuerySet::animal_acts(CountingMode::ExactString, DEFAULT_WINDOW).unwrap();
        let err = build_suite(&corpus, &q, "x", Execution::Sequential).unwrap_err();
        assert_eq!(err.to_string(), "empty coincidence operation in setting AB'");
    }

    fn words() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["horse", "whinnies", "bear", "growls"]), 0..60)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn ordered_window_one_is_exact(toks in words()) {
            let s = TokenStream::new("t", toks);
            for (a, b) in [("horse", "whinnies"), ("bear", "growls"), ("horse", "horse")] {
                prop_assert_eq!(count_collocate_ordered(&s, a, b, 1), count_exact(&s, a, b));
            }
        }

        #[test]
        fn symmetric_is_sum_of_both_orders(toks in words(), w in 1usize..12) {
            let s = TokenStream::new("t", toks);
            let rev = TokenStream::new("t", s.tokens.iter().rev().cloned().collect());
            prop_assert_eq!(
                count_collocate(&s, "horse", "whinnies", w),
                count_collocate_ordered(&s, "horse", "whinnies", w) + count_collocate_ordered(&rev, "horse", "whinnies", w)
            );
        }

        #[test]
        fn counts_add_over_separated_documents(a in words(), b in words(), w in 1usize..12) {
            let sa = TokenStream::new("a", a.clone());
            let sb = TokenStream::new("b", b.clone());
            // a separator run longer than the window isolates the two parts
            let mut joined = a;
            joined.extend(std::iter::repeat_n("sep".to_string(), w));
            joined.extend(b);
            let sj = TokenStream::new("j", joined);
            prop_assert_eq!(
                count_collocate(&sj, "horse", "whinnies", w),
                count_collocate(&sa, "horse", "whinnies", w) + count_collocate(&sb, "horse", "whinnies", w)
            );
            prop_assert_eq!(
                count_exact(&sj, "bear", "growls"),
                count_exact(&sa, "bear", "growls") + count_exact(&sb, "bear", "growls")
            );
        }
    }
}
