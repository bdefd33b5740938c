//! Toolkit for inflection experiments on verb systems with distributed
//! exponence: a configurable paradigm generator/analyzer, a learnable
//! non-neural inflection baseline, corpus sampling and hallucination
//! machinery, and an evaluation suite with a hierarchical error taxonomy
//! and a syncretism probe.

pub mod align;
pub mod augment;
pub mod baseline;
pub mod corpus;
pub mod evaluate;
pub mod grammar;
pub mod sampling;

pub use align::{align, apply_script, levenshtein_distance, EditOp, EditScript};
pub use corpus::{
    classify_verb, parse_corpus, serialize_corpus, Corpus, FeatureBundle, Triple, VerbClass,
};
pub use grammar::{stem_for, GrammarConfig, ParadigmCell};
