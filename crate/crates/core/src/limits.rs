/// Size guards shared by every module that materializes tensors.
///
/// The ambient space of a word of length `k` has dimension `N^k`, so both
/// the word length and the number of stored tensor entries are capped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Limits {
    pub max_word_len: usize,
    pub max_entries: usize,
}

impl Limits {
    pub const DEFAULT_MAX_WORD_LEN: usize = 10;
    pub const DEFAULT_MAX_ENTRIES: usize = 10_000_000;
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_word_len: Self::DEFAULT_MAX_WORD_LEN,
            max_entries: Self::DEFAULT_MAX_ENTRIES,
        }
    }
}

/// `base^exp`, or `None` once it exceeds `bound`.
pub(crate) fn bounded_pow(base: usize, exp: usize, bound: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > bound {
            return None;
        }
    }
    Some(acc)
}
