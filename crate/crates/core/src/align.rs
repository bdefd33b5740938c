//! Minimal-cost character alignment between lemma and inflected form.
//!
//! Alignment operates on Unicode code points (the corpus layer guarantees
//! NFC, so code-point comparison is sufficient). All edits have unit cost.

use std::ops::Range;

use thiserror::Error;

/// One alignment step over the source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Copy,
    Substitute(char),
    Insert(char),
    Delete,
}

/// An ordered edit script; applying it to the source yields the target.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    /// Number of non-COPY operations; equals the Levenshtein distance for
    /// scripts produced by [`align`].
    pub fn cost(&self) -> usize {
        self.ops.iter().filter(|op| !matches!(op, EditOp::Copy)).count()
    }

    /// Source characters consumed (COPY, SUBSTITUTE and DELETE advance the
    /// source pointer).
    pub fn source_len(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| !matches!(op, EditOp::Insert(_)))
            .count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScriptError {
    #[error("script consumes {consumed} source characters, source has {source_len}")]
    LengthMismatch { consumed: usize, source_len: usize },
}

/// Standard unit-cost edit distance over code points.
pub fn levenshtein_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = if ca == cb { diag } else { diag + 1 };
            let next = cost.min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Computes a minimal-cost edit script turning `a` into `b`.
///
/// Ties are broken deterministically during backtrace by preferring
/// COPY > SUBSTITUTE > DELETE > INSERT.
pub fn align(a: &str, b: &str) -> EditScript {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let mut dist = vec![vec![0usize; m + 1]; n + 1];
    for i in 0..=n {
        dist[i][0] = i;
    }
    for j in 0..=m {
        dist[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dist[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            dist[i][j] = sub.min(dist[i - 1][j] + 1).min(dist[i][j - 1] + 1);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let d = dist[i][j];
        if i > 0 && j > 0 && a[i - 1] == b[j - 1] && dist[i - 1][j - 1] == d {
            ops.push(EditOp::Copy);
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && dist[i - 1][j - 1] + 1 == d {
            ops.push(EditOp::Substitute(b[j - 1]));
            i -= 1;
            j -= 1;
        } else if i > 0 && dist[i - 1][j] + 1 == d {
            ops.push(EditOp::Delete);
            i -= 1;
        } else {
            ops.push(EditOp::Insert(b[j - 1]));
            j -= 1;
        }
    }
    ops.reverse();
    EditScript { ops }
}

/// Replays an edit script over `a`.
pub fn apply_script(a: &str, script: &EditScript) -> Result<String, ScriptError> {
    let chars: Vec<char> = a.chars().collect();
    let consumed = script.source_len();
    if consumed != chars.len() {
        return Err(ScriptError::LengthMismatch {
            consumed,
            source_len: chars.len(),
        });
    }
    let mut out = String::new();
    let mut pos = 0usize;
    for op in &script.ops {
        match op {
            EditOp::Copy => {
                out.push(chars[pos]);
                pos += 1;
            }
            EditOp::Substitute(c) => {
                out.push(*c);
                pos += 1;
            }
            EditOp::Insert(c) => out.push(*c),
            EditOp::Delete => pos += 1,
        }
    }
    Ok(out)
}

/// The maximal contiguous COPY run of a script: char ranges into the source
/// and target. Serves as the stem anchor for rule extraction and
/// hallucination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemAnchor {
    pub source: Range<usize>,
    pub target: Range<usize>,
}

impl StemAnchor {
    pub fn len(&self) -> usize {
        self.source.end - self.source.start
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }
}

/// Finds the maximal contiguous COPY run, leftmost on ties. `None` when the
/// script contains no COPY at all.
pub fn stem_anchor(script: &EditScript) -> Option<StemAnchor> {
    let mut best: Option<StemAnchor> = None;
    let (mut src, mut tgt) = (0usize, 0usize);
    let mut run: Option<(usize, usize, usize)> = None; // (src_start, tgt_start, len)
    for op in script.ops.iter().chain(std::iter::once(&EditOp::Delete)) {
        // the trailing sentinel is never a Copy, so it flushes the last run
        if matches!(op, EditOp::Copy) {
            run = match run {
                Some((s, t, l)) => Some((s, t, l + 1)),
                None => Some((src, tgt, 1)),
            };
        } else if let Some((s, t, l)) = run.take() {
            let longer = best.as_ref().map_or(true, |b| l > b.len());
            if longer {
                best = Some(StemAnchor {
                    source: s..s + l,
                    target: t..t + l,
                });
            }
        }
        match op {
            EditOp::Copy | EditOp::Substitute(_) => {
                src += 1;
                tgt += 1;
            }
            EditOp::Delete => src += 1,
            EditOp::Insert(_) => tgt += 1,
        }
    }
    best
}

/// Source and target split around the stem anchor of their alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchoredSplit {
    pub source_prefix: String,
    pub stem: String,
    pub source_suffix: String,
    pub target_prefix: String,
    pub target_suffix: String,
}

/// Aligns `source` against `target` and splits both at the stem anchor.
/// `None` when the alignment has no COPY run.
pub fn anchored_split(source: &str, target: &str) -> Option<AnchoredSplit> {
    let script = align(source, target);
    let anchor = stem_anchor(&script)?;
    let s: Vec<char> = source.chars().collect();
    let t: Vec<char> = target.chars().collect();
    let slice = |v: &[char], r: Range<usize>| v[r].iter().collect::<String>();
    Some(AnchoredSplit {
        source_prefix: slice(&s, 0..anchor.source.start),
        stem: slice(&s, anchor.source.clone()),
        source_suffix: slice(&s, anchor.source.end..s.len()),
        target_prefix: slice(&t, 0..anchor.target.start),
        target_suffix: slice(&t, anchor.target.end..t.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: plain recursive distance with memoization,
    /// deliberately structured unlike the DP in `levenshtein_distance`.
    pub(crate) fn brute_distance(a: &str, b: &str) -> usize {
        fn go(
            a: &[char],
            b: &[char],
            i: usize,
            j: usize,
            memo: &mut std::collections::HashMap<(usize, usize), usize>,
        ) -> usize {
            if i == a.len() {
                return b.len() - j;
            }
            if j == b.len() {
                return a.len() - i;
            }
            if let Some(&d) = memo.get(&(i, j)) {
                return d;
            }
            let mut best = usize::MAX;
            if a[i] == b[j] {
                best = best.min(go(a, b, i + 1, j + 1, memo));
            }
            best = best.min(1 + go(a, b, i + 1, j + 1, memo)); // substitute
            best = best.min(1 + go(a, b, i + 1, j, memo)); // delete
            best = best.min(1 + go(a, b, i, j + 1, memo)); // insert
            memo.insert((i, j), best);
            best
        }
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        go(&a, &b, 0, 0, &mut std::collections::HashMap::new())
    }

    pub(crate) fn random_word(rng: &mut impl Rng, max_len: usize) -> String {
        let alphabet = ['a', 'b', 'c', 'd', 'e', 'n', 'r', 't', 'w', 'y', 'ä', 'ḡ'];
        let len = rng.gen_range(0..=max_len);
        (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(levenshtein_distance("aka", "aka"), 0);
        // hand-verified against the brute-force oracle below
        assert_eq!(brute_distance("tar", "ytanan"), 4);
        assert_eq!(levenshtein_distance("tar", "ytanan"), 4);
        assert_eq!(levenshtein_distance("", "abc"), 3);
        assert_eq!(levenshtein_distance("abc", ""), 3);
    }

    #[test]
    fn align_prefix_insertion() {
        let script = align("aka", "yaka");
        assert_eq!(
            script.ops,
            vec![EditOp::Insert('y'), EditOp::Copy, EditOp::Copy, EditOp::Copy]
        );
    }

    #[test]
    fn apply_script_examples() {
        let all_copy = EditScript {
            ops: vec![EditOp::Copy; 3],
        };
        assert_eq!(apply_script("abc", &all_copy).unwrap(), "abc");
        let drop_first = EditScript {
            ops: vec![EditOp::Delete, EditOp::Copy, EditOp::Copy],
        };
        assert_eq!(apply_script("abc", &drop_first).unwrap(), "bc");
        assert_eq!(
            apply_script("tar", &align("tar", "ytanan")).unwrap(),
            "ytanan"
        );
        assert_eq!(
            apply_script("ab", &all_copy),
            Err(ScriptError::LengthMismatch {
                consumed: 3,
                source_len: 2
            })
        );
    }

    #[test]
    fn alignment_properties_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = random_word(&mut rng, 12);
            let b = random_word(&mut rng, 12);
            let script = align(&a, &b);
            assert_eq!(apply_script(&a, &script).unwrap(), b, "a={a:?} b={b:?}");
            assert_eq!(script.cost(), brute_distance(&a, &b), "a={a:?} b={b:?}");
            assert_eq!(script.cost(), levenshtein_distance(&a, &b));
        }
    }

    #[test]
    fn metric_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let a = random_word(&mut rng, 10);
            let b = random_word(&mut rng, 10);
            let c = random_word(&mut rng, 10);
            assert_eq!(levenshtein_distance(&a, &a), 0);
            assert_eq!(
                levenshtein_distance(&a, &b),
                levenshtein_distance(&b, &a)
            );
            assert!(
                levenshtein_distance(&a, &c)
                    <= levenshtein_distance(&a, &b) + levenshtein_distance(&b, &c)
            );
        }
    }

    #[test]
    fn stem_anchor_is_leftmost_maximal() {
        // abcs -> yabcta: anchor is "abc"
        let split = anchored_split("abcs", "yabcta").unwrap();
        assert_eq!(split.source_prefix, "");
        assert_eq!(split.stem, "abc");
        assert_eq!(split.source_suffix, "s");
        assert_eq!(split.target_prefix, "y");
        assert_eq!(split.target_suffix, "ta");

        // two equally long runs: leftmost wins
        let script = align("abXcd", "abYcd");
        let anchor = stem_anchor(&script).unwrap();
        assert_eq!(anchor.source, 0..2);

        // no copy at all
        assert!(anchored_split("ab", "xy").is_none());
    }

    #[test]
    fn anchor_handles_identity() {
        let split = anchored_split("m", "m").unwrap();
        assert_eq!(split.stem, "m");
        assert_eq!(split.source_prefix, "");
        assert_eq!(split.target_suffix, "");
    }
}
