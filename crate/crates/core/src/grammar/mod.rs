//! Slot-template grammar with unification-driven exponent selection and
//! ordered morphophonological rewrites.
//!
//! A [`GrammarConfig`] declares an attribute inventory (every tag belongs to
//! exactly one attribute), an ordered slot template with one stem slot, an
//! exponent list per slot, unification rules, and rewrite rules. Generation
//! picks exactly one exponent per non-stem slot whose constraints unify with
//! the bundle, concatenates surfaces in template order, and applies rewrites
//! in index order. Analysis is generate-and-filter over the enumerated
//! paradigm; paradigms here stay small enough that nothing cleverer is
//! needed.
//!
//! Distributed exponence enters through suffix classes: an exponent carrying
//! a class is only selectable when the TAM table maps (bundle series, class)
//! to the bundle's TAM value, so tense/aspect/mood is fixed jointly by a
//! prefix series and a suffix class, never by a single marker.

mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{FeatureBundle, VerbClass};

/// Reserved marker joining slot surfaces while boundary rewrites run.
pub const BOUNDARY: char = '+';

/// Name of the stem slot in templates.
pub const STEM_SLOT: &str = "stem";

/// Replacement budget per rewrite rule per application; guards
/// non-terminating configs.
pub const REWRITE_BUDGET: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid grammar config: {0}")]
    Validation(String),
    #[error("unknown tag {0:?}")]
    UnknownTag(String),
    #[error("tags {first:?} and {second:?} both assign attribute {attr:?}")]
    DuplicateAttribute {
        attr: String,
        first: String,
        second: String,
    },
    #[error("bundle matches no declared verb class ({detail})")]
    NoMatchingClass { detail: String },
    #[error("verb class {0} is not supported by this grammar")]
    UnsupportedClass(VerbClass),
    #[error("cell undefined at slot {slot:?}: {reason}")]
    CellUndefined { slot: String, reason: String },
    #[error("ambiguous cell at slot {slot:?}: exponents {candidates:?} all match (config bug)")]
    AmbiguousCell {
        slot: String,
        candidates: Vec<String>,
    },
    #[error("rewrite rule {index} exceeded its budget of {budget} replacements")]
    RewriteBudget { index: u32, budget: usize },
    #[error("segment {0:?} contains the reserved boundary marker '+'")]
    ReservedBoundary(String),
}

/// Semantically underspecified prefix series; acquires meaning only upon
/// unification with a suffix class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Series {
    Alpha,
    Beta,
    Gamma,
}

impl Series {
    pub fn as_tag(self) -> &'static str {
        match self {
            Series::Alpha => "ALPHA",
            Series::Beta => "BETA",
            Series::Gamma => "GAMMA",
        }
    }
}

impl FromStr for Series {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ALPHA" => Ok(Series::Alpha),
            "BETA" => Ok(Series::Beta),
            "GAMMA" => Ok(Series::Gamma),
            other => Err(format!("unknown series {other:?}")),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub optional: bool,
}

impl Slot {
    pub fn is_stem(&self) -> bool {
        self.name == STEM_SLOT
    }
}

/// Ordered slot sequence; exactly one slot is the stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotTemplate {
    pub slots: Vec<Slot>,
}

impl Default for SlotTemplate {
    fn default() -> Self {
        let slot = |name: &str, optional| Slot {
            name: name.to_string(),
            optional,
        };
        SlotTemplate {
            slots: vec![
                slot("undergoer_prefix", false),
                slot("fut_imp_prefix", true),
                slot("directional", true),
                slot(STEM_SLOT, false),
                slot("thematic", true),
                slot("desinence", false),
            ],
        }
    }
}

/// Allowed values for one attribute in an exponent constraint. `allow_unset`
/// admits bundles that leave the attribute unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    pub values: BTreeSet<String>,
    pub allow_unset: bool,
}

impl ConstraintSet {
    fn admits(&self, value: Option<&str>) -> bool {
        match value {
            Some(v) => self.values.contains(v),
            None => self.allow_unset,
        }
    }
}

/// One slot filler with its unification constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exponent {
    pub slot: String,
    pub surface: String,
    pub constraints: BTreeMap<String, ConstraintSet>,
    /// Series membership, derived from the series-attribute constraint when
    /// it pins exactly one value.
    pub series: Option<Series>,
    /// Suffix class feeding the TAM table.
    pub class: Option<String>,
}

impl Exponent {
    fn matches(&self, asg: &Assignment) -> bool {
        self.constraints
            .iter()
            .all(|(attr, cset)| cset.admits(asg.get(attr.as_str()).map(String::as_str)))
    }

    fn label(&self) -> String {
        if self.surface.is_empty() {
            "<empty>".to_string()
        } else {
            self.surface.clone()
        }
    }
}

/// `when conditions hold, attr must take one of the allowed values`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequireRule {
    pub conditions: BTreeMap<String, BTreeSet<String>>,
    pub attr: String,
    pub allowed: ConstraintSet,
}

/// `when conditions hold, a derived attribute resolves to a value`.
/// Resolutions document how partial exponents combine (e.g. a non-singular
/// undergoer plus a non-dual thematic resolves to plural); they do not
/// constrain generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub conditions: BTreeMap<String, BTreeSet<String>>,
    pub attr: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnificationRules {
    pub series_attr: Option<String>,
    pub tam_attr: Option<String>,
    pub requires: Vec<RequireRule>,
    pub resolutions: Vec<Resolution>,
    /// (prefix series, suffix class) -> TAM value.
    pub tam_table: BTreeMap<(Series, String), String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteStage {
    /// Applied to the slot-joined string while `+` markers are present.
    Boundary,
    /// Applied after boundary markers are stripped.
    Late,
}

/// An ordered string rewrite, optionally context-restricted. Patterns and
/// contexts may mention the `+` slot boundary in the boundary stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub index: u32,
    pub pattern: String,
    pub replacement: String,
    pub left: Option<String>,
    pub right: Option<String>,
    pub stage: RewriteStage,
    /// Whether a surface form containing an unapplied instance of this rule
    /// counts as violating the grammar (used by the evaluator).
    pub surface_check: bool,
}

impl RewriteRule {
    /// Leftmost match position of the rule in `s`, honoring contexts.
    fn find(&self, s: &str, pattern: &str, left: Option<&str>, right: Option<&str>) -> Option<usize> {
        if pattern.is_empty() {
            return None;
        }
        for (pos, m) in s.match_indices(pattern) {
            let left_ok = left.map_or(true, |l| s[..pos].ends_with(l));
            let right_ok = right.map_or(true, |r| s[pos + m.len()..].starts_with(r));
            if left_ok && right_ok {
                return Some(pos);
            }
        }
        None
    }

    fn apply_fixpoint(&self, mut s: String) -> Result<String, GrammarError> {
        let mut budget = REWRITE_BUDGET;
        while let Some(pos) = self.find(&s, &self.pattern, self.left.as_deref(), self.right.as_deref())
        {
            if budget == 0 {
                return Err(GrammarError::RewriteBudget {
                    index: self.index,
                    budget: REWRITE_BUDGET,
                });
            }
            budget -= 1;
            s.replace_range(pos..pos + self.pattern.len(), &self.replacement);
        }
        Ok(s)
    }

    /// True when `form` (a finished surface string, no markers) contains an
    /// unapplied instance of this rule.
    fn surface_violation(&self, form: &str) -> bool {
        if !self.surface_check {
            return false;
        }
        let strip = |s: &str| s.replace(BOUNDARY, "");
        let pattern = match self.stage {
            RewriteStage::Boundary => strip(&self.pattern),
            RewriteStage::Late => self.pattern.clone(),
        };
        if pattern.is_empty() {
            return false;
        }
        let left = self.left.as_deref().map(strip);
        let right = self.right.as_deref().map(strip);
        self.find(form, &pattern, left.as_deref(), right.as_deref())
            .is_some()
    }
}

/// Which attributes a verb class requires and which it may leave unset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpec {
    pub class: VerbClass,
    pub required: Vec<String>,
    pub optional: Vec<String>,
}

/// A fully validated grammar fragment.
#[derive(Debug, Clone)]
pub struct GrammarConfig {
    pub template: SlotTemplate,
    /// Declared inventory: attribute name -> ordered value list. Values double
    /// as bundle tags, so they are globally unique.
    pub attributes: Vec<(String, Vec<String>)>,
    pub exponents: Vec<Exponent>,
    pub unification: UnificationRules,
    pub rewrites: Vec<RewriteRule>,
    pub classes: Vec<ClassSpec>,
    tag_to_attr: HashMap<String, String>,
}

/// One (bundle, form) pair of a lexeme's paradigm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmCell {
    pub bundle: FeatureBundle,
    pub form: String,
}

type Assignment = BTreeMap<String, String>;

enum Outcome {
    Defined {
        segments: Vec<(String, String)>,
        form: String,
    },
    Undefined {
        slot: Option<String>,
        reason: String,
    },
}

impl GrammarConfig {
    /// Parses and validates a grammar from its plain-text config format.
    pub fn from_text(text: &str) -> Result<Self, GrammarError> {
        let mut config = parse::parse(text)?;
        config.build_tag_index()?;
        config.validate()?;
        Ok(config)
    }

    /// The verb fragment shipped with the toolkit; see
    /// `src/grammar/nen_fragment.grammar` for the documented source.
    pub fn nen_fragment() -> Self {
        GrammarConfig::from_text(include_str!("nen_fragment.grammar"))
            .expect("embedded fragment is valid")
    }

    pub(crate) fn new_unchecked(
        template: SlotTemplate,
        attributes: Vec<(String, Vec<String>)>,
        exponents: Vec<Exponent>,
        unification: UnificationRules,
        rewrites: Vec<RewriteRule>,
        classes: Vec<ClassSpec>,
    ) -> Self {
        GrammarConfig {
            template,
            attributes,
            exponents,
            unification,
            rewrites,
            classes,
            tag_to_attr: HashMap::new(),
        }
    }

    fn build_tag_index(&mut self) -> Result<(), GrammarError> {
        let mut index = HashMap::new();
        for (attr, values) in &self.attributes {
            for value in values {
                if let Some(previous) = index.insert(value.clone(), attr.clone()) {
                    return Err(GrammarError::Validation(format!(
                        "value {value:?} declared under both {previous:?} and {attr:?}"
                    )));
                }
            }
        }
        self.tag_to_attr = index;
        Ok(())
    }

    fn validate(&mut self) -> Result<(), GrammarError> {
        let err = |msg: String| Err(GrammarError::Validation(msg));

        let mut names = BTreeSet::new();
        for (attr, values) in &self.attributes {
            if attr == "class" {
                return err("attribute name \"class\" is reserved".into());
            }
            if !names.insert(attr.clone()) {
                return err(format!("attribute {attr:?} declared twice"));
            }
            if values.is_empty() {
                return err(format!("attribute {attr:?} has no values"));
            }
            for v in values {
                if v.is_empty()
                    || v.contains(';')
                    || v.contains(',')
                    || v.contains(BOUNDARY)
                    || v.chars().any(char::is_whitespace)
                {
                    return err(format!("attribute value {v:?} is not a usable tag"));
                }
            }
        }

        let mut slot_names = BTreeSet::new();
        let mut stem_count = 0;
        for slot in &self.template.slots {
            if !slot_names.insert(slot.name.clone()) {
                return err(format!("slot {:?} declared twice", slot.name));
            }
            if slot.is_stem() {
                stem_count += 1;
            }
        }
        if stem_count != 1 {
            return err(format!("template must contain exactly one stem slot, found {stem_count}"));
        }

        let declared = |attr: &str| self.attributes.iter().any(|(a, _)| a == attr);
        let declared_value = |attr: &str, value: &str| {
            self.attributes
                .iter()
                .find(|(a, _)| a == attr)
                .map_or(false, |(_, vs)| vs.iter().any(|v| v == value))
        };

        // derive exponent series markers from the series attribute
        let series_attr = self.unification.series_attr.clone();
        for exp in &mut self.exponents {
            if let (Some(sa), None) = (&series_attr, exp.series) {
                if let Some(cset) = exp.constraints.get(sa) {
                    if cset.values.len() == 1 && !cset.allow_unset {
                        exp.series = cset.values.iter().next().unwrap().parse().ok();
                    }
                }
            }
        }

        for exp in &self.exponents {
            let slot = self
                .template
                .slots
                .iter()
                .find(|s| s.name == exp.slot)
                .ok_or_else(|| {
                    GrammarError::Validation(format!("exponent for undeclared slot {:?}", exp.slot))
                })?;
            if slot.is_stem() {
                return err("exponents may not target the stem slot".into());
            }
            if exp.surface.is_empty() && !slot.optional {
                return err(format!(
                    "empty exponent in non-optional slot {:?}",
                    exp.slot
                ));
            }
            if exp.surface.contains(BOUNDARY) || exp.surface.chars().any(char::is_whitespace) {
                return err(format!("exponent surface {:?} is not usable", exp.surface));
            }
            for (attr, cset) in &exp.constraints {
                if !declared(attr) {
                    return err(format!("exponent constrains undeclared attribute {attr:?}"));
                }
                for v in &cset.values {
                    if !declared_value(attr, v) {
                        return err(format!("exponent uses undeclared value {v:?} for {attr:?}"));
                    }
                }
            }
            if exp.class.is_some()
                && (self.unification.tam_attr.is_none() || self.unification.series_attr.is_none())
            {
                return err(format!(
                    "exponent {:?} carries a suffix class but the config declares no \
                     tam/series attributes",
                    exp.label()
                ));
            }
        }

        let mut class_names = BTreeSet::new();
        for spec in &self.classes {
            if !class_names.insert(spec.class) {
                return err(format!("verb class {} declared twice", spec.class));
            }
            for attr in spec.required.iter().chain(&spec.optional) {
                if !declared(attr) {
                    return err(format!(
                        "class {} references undeclared attribute {attr:?}",
                        spec.class
                    ));
                }
            }
        }

        if let Some(sa) = &self.unification.series_attr {
            if !declared(sa) {
                return err(format!("series attribute {sa:?} is not declared"));
            }
            let values = &self.attributes.iter().find(|(a, _)| a == sa).unwrap().1;
            for v in values {
                if v.parse::<Series>().is_err() {
                    return err(format!("series attribute value {v:?} is not a series"));
                }
            }
        }
        if let Some(ta) = &self.unification.tam_attr {
            if !declared(ta) {
                return err(format!("tam attribute {ta:?} is not declared"));
            }
        }
        if !self.unification.tam_table.is_empty() {
            let ta = self.unification.tam_attr.as_deref().ok_or_else(|| {
                GrammarError::Validation("tam table requires a tam-attribute declaration".into())
            })?;
            let classes: BTreeSet<&String> =
                self.exponents.iter().filter_map(|e| e.class.as_ref()).collect();
            for ((series, class), value) in &self.unification.tam_table {
                if !classes.contains(class) {
                    return err(format!(
                        "tam table references suffix class {class:?} ({series}) with no exponent"
                    ));
                }
                if !declared_value(ta, value) {
                    return err(format!("tam table output {value:?} is not a {ta:?} value"));
                }
            }
        }

        for rule in &self.unification.requires {
            for (attr, values) in &rule.conditions {
                if !declared(attr) {
                    return err(format!("require rule conditions on undeclared {attr:?}"));
                }
                for v in values {
                    if !declared_value(attr, v) {
                        return err(format!("require rule condition value {v:?} undeclared"));
                    }
                }
            }
            if !declared(&rule.attr) {
                return err(format!("require rule targets undeclared {:?}", rule.attr));
            }
            for v in &rule.allowed.values {
                if !declared_value(&rule.attr, v) {
                    return err(format!("require rule allows undeclared value {v:?}"));
                }
            }
        }
        for res in &self.unification.resolutions {
            for (attr, values) in &res.conditions {
                if !declared(attr) {
                    return err(format!("resolution conditions on undeclared {attr:?}"));
                }
                for v in values {
                    if !declared_value(attr, v) {
                        return err(format!("resolution condition value {v:?} undeclared"));
                    }
                }
            }
        }

        let mut last_index = None;
        for rule in &self.rewrites {
            if rule.pattern.is_empty() {
                return err(format!("rewrite rule {} has an empty pattern", rule.index));
            }
            if let Some(prev) = last_index {
                if rule.index <= prev {
                    return err(format!(
                        "rewrite indices must be strictly increasing ({} after {prev})",
                        rule.index
                    ));
                }
            }
            last_index = Some(rule.index);
        }

        Ok(())
    }

    /// Maps a bundle onto an attribute assignment. Every tag must belong to a
    /// declared attribute and no two tags may assign the same attribute.
    pub fn assignment(&self, bundle: &FeatureBundle) -> Result<Assignment, GrammarError> {
        let mut asg = Assignment::new();
        for tag in bundle.iter() {
            let attr = self
                .tag_to_attr
                .get(tag)
                .ok_or_else(|| GrammarError::UnknownTag(tag.to_string()))?;
            if let Some(previous) = asg.insert(attr.clone(), tag.to_string()) {
                return Err(GrammarError::DuplicateAttribute {
                    attr: attr.clone(),
                    first: previous,
                    second: tag.to_string(),
                });
            }
        }
        Ok(asg)
    }

    fn class_spec(&self, class: VerbClass) -> Option<&ClassSpec> {
        self.classes.iter().find(|s| s.class == class)
    }

    pub fn supports_class(&self, class: VerbClass) -> bool {
        self.class_spec(class).is_some()
    }

    pub fn supported_classes(&self) -> Vec<VerbClass> {
        self.classes.iter().map(|s| s.class).collect()
    }

    /// Finds the declared verb class whose attribute profile the assignment
    /// fits: all required attributes assigned, nothing assigned outside
    /// required + optional.
    fn infer_class(&self, asg: &Assignment) -> Result<&ClassSpec, GrammarError> {
        for spec in &self.classes {
            let complete = spec.required.iter().all(|a| asg.contains_key(a));
            let contained = asg
                .keys()
                .all(|a| spec.required.contains(a) || spec.optional.contains(a));
            if complete && contained {
                return Ok(spec);
            }
        }
        Err(GrammarError::NoMatchingClass {
            detail: format!(
                "assigned attributes: {}",
                asg.keys().cloned().collect::<Vec<_>>().join(", ")
            ),
        })
    }

    fn check_requires(&self, asg: &Assignment) -> Result<(), String> {
        for rule in &self.unification.requires {
            let applies = rule
                .conditions
                .iter()
                .all(|(attr, values)| asg.get(attr).map_or(false, |v| values.contains(v)));
            if applies && !rule.allowed.admits(asg.get(&rule.attr).map(String::as_str)) {
                return Err(format!(
                    "unification rule on {:?} rejects {}",
                    rule.attr,
                    asg.get(&rule.attr).cloned().unwrap_or_else(|| "<unset>".into())
                ));
            }
        }
        Ok(())
    }

    /// Whether a classed exponent is licensed by the TAM table for this
    /// assignment. Unclassed exponents always pass.
    fn tam_licensed(&self, exp: &Exponent, asg: &Assignment) -> bool {
        let Some(class) = &exp.class else { return true };
        let (Some(sa), Some(ta)) = (
            self.unification.series_attr.as_deref(),
            self.unification.tam_attr.as_deref(),
        ) else {
            return true;
        };
        let Some(series) = asg.get(sa).and_then(|v| v.parse::<Series>().ok()) else {
            return false;
        };
        let Some(tam) = asg.get(ta) else { return false };
        self.unification.tam_table.get(&(series, class.clone())) == Some(tam)
    }

    fn realize(&self, stem: &str, asg: &Assignment) -> Result<Outcome, GrammarError> {
        if stem.contains(BOUNDARY) {
            return Err(GrammarError::ReservedBoundary(stem.to_string()));
        }
        if let Err(reason) = self.check_requires(asg) {
            return Ok(Outcome::Undefined { slot: None, reason });
        }
        let mut segments = Vec::with_capacity(self.template.slots.len());
        for slot in &self.template.slots {
            if slot.is_stem() {
                segments.push((slot.name.clone(), stem.to_string()));
                continue;
            }
            let mut candidates: Vec<&Exponent> = self
                .exponents
                .iter()
                .filter(|e| e.slot == slot.name && e.matches(asg) && self.tam_licensed(e, asg))
                .collect();
            match candidates.len() {
                0 => {
                    return Ok(Outcome::Undefined {
                        slot: Some(slot.name.clone()),
                        reason: "no exponent satisfiable".into(),
                    })
                }
                1 => {
                    let exp = candidates.remove(0);
                    segments.push((slot.name.clone(), exp.surface.clone()));
                }
                _ => {
                    return Err(GrammarError::AmbiguousCell {
                        slot: slot.name.clone(),
                        candidates: candidates.iter().map(|e| e.label()).collect(),
                    })
                }
            }
        }
        let surfaces: Vec<&str> = segments.iter().map(|(_, s)| s.as_str()).collect();
        let form = self.apply_rewrites(&surfaces)?;
        Ok(Outcome::Defined { segments, form })
    }

    /// Generates the surface form of a complete bundle.
    pub fn generate(&self, stem: &str, bundle: &FeatureBundle) -> Result<String, GrammarError> {
        self.generate_segmented(stem, bundle).map(|(_, form)| form)
    }

    /// Like [`GrammarConfig::generate`] but also reports the pre-rewrite slot
    /// segmentation.
    pub fn generate_segmented(
        &self,
        stem: &str,
        bundle: &FeatureBundle,
    ) -> Result<(Vec<(String, String)>, String), GrammarError> {
        let asg = self.assignment(bundle)?;
        self.infer_class(&asg)?;
        match self.realize(stem, &asg)? {
            Outcome::Defined { segments, form } => Ok((segments, form)),
            Outcome::Undefined { slot, reason } => Err(GrammarError::CellUndefined {
                slot: slot.unwrap_or_else(|| "-".into()),
                reason,
            }),
        }
    }

    /// Enumerates every defined cell for `stem` under the given verb class,
    /// each bundle exactly once. Syncretic cells appear as distinct bundles
    /// possibly sharing a form.
    pub fn enumerate_paradigm(
        &self,
        stem: &str,
        class: VerbClass,
    ) -> Result<Vec<ParadigmCell>, GrammarError> {
        let spec = self
            .class_spec(class)
            .ok_or(GrammarError::UnsupportedClass(class))?;

        // axes: required attributes range over their values, optional ones
        // additionally over "unassigned"
        let mut axes: Vec<(&str, Vec<Option<&str>>)> = Vec::new();
        for attr in &spec.required {
            let values = &self.attributes.iter().find(|(a, _)| a == attr).unwrap().1;
            axes.push((attr, values.iter().map(|v| Some(v.as_str())).collect()));
        }
        for attr in &spec.optional {
            let values = &self.attributes.iter().find(|(a, _)| a == attr).unwrap().1;
            let mut choices: Vec<Option<&str>> = vec![None];
            choices.extend(values.iter().map(|v| Some(v.as_str())));
            axes.push((attr, choices));
        }

        let mut cells = Vec::new();
        let mut odometer = vec![0usize; axes.len()];
        loop {
            let mut asg = Assignment::new();
            for (i, (attr, choices)) in axes.iter().enumerate() {
                if let Some(value) = choices[odometer[i]] {
                    asg.insert(attr.to_string(), value.to_string());
                }
            }
            if let Outcome::Defined { form, .. } = self.realize(stem, &asg)? {
                let bundle = FeatureBundle::new(asg.values().cloned())
                    .expect("assignments are never empty for declared classes");
                cells.push(ParadigmCell { bundle, form });
            }

            let mut i = axes.len();
            loop {
                if i == 0 {
                    return Ok(cells);
                }
                i -= 1;
                odometer[i] += 1;
                if odometer[i] < axes[i].1.len() {
                    break;
                }
                odometer[i] = 0;
            }
        }
    }

    /// All bundles whose generated form equals `form`, across every
    /// supported verb class. Empty set when the form is not generable.
    pub fn analyze(
        &self,
        stem: &str,
        form: &str,
    ) -> Result<BTreeSet<FeatureBundle>, GrammarError> {
        let mut out = BTreeSet::new();
        for spec in &self.classes {
            for cell in self.enumerate_paradigm(stem, spec.class)? {
                if cell.form == form {
                    out.insert(cell.bundle);
                }
            }
        }
        Ok(out)
    }

    /// Concatenates slot surfaces and applies the rewrite cascade: boundary
    /// rules over the `+`-joined string in index order, each left-to-right to
    /// fixpoint, then late rules after markers are stripped.
    pub fn apply_rewrites<S: AsRef<str>>(&self, segments: &[S]) -> Result<String, GrammarError> {
        let mut nonempty = Vec::new();
        for seg in segments {
            let seg = seg.as_ref();
            if seg.contains(BOUNDARY) {
                return Err(GrammarError::ReservedBoundary(seg.to_string()));
            }
            if !seg.is_empty() {
                nonempty.push(seg);
            }
        }
        let mut s = nonempty.join(&BOUNDARY.to_string());
        for rule in self.rewrites.iter().filter(|r| r.stage == RewriteStage::Boundary) {
            s = rule.apply_fixpoint(s)?;
        }
        s = s.replace(BOUNDARY, "");
        for rule in self.rewrites.iter().filter(|r| r.stage == RewriteStage::Late) {
            s = rule.apply_fixpoint(s)?;
        }
        Ok(s)
    }

    /// True when `form` contains an unapplied instance of a rewrite marked
    /// for surface checking; such a form misapplies the grammar's
    /// morphophonology even if it is otherwise well-shaped.
    pub fn violates_surface_rules(&self, form: &str) -> bool {
        self.rewrites.iter().any(|r| r.surface_violation(form))
    }

    /// Derived attribute values licensed by the resolution rules for this
    /// bundle, in declaration order.
    pub fn resolve(&self, bundle: &FeatureBundle) -> Result<Vec<(String, String)>, GrammarError> {
        let asg = self.assignment(bundle)?;
        let mut out = Vec::new();
        for res in &self.unification.resolutions {
            let applies = res
                .conditions
                .iter()
                .all(|(attr, values)| asg.get(attr).map_or(false, |v| values.contains(v)));
            if applies {
                out.push((res.attr.clone(), res.value.clone()));
            }
        }
        Ok(out)
    }
}

/// Maps a lemma to the stem the grammar operates on: prefixing lemmas are
/// stems verbatim; ambifixing and middle lemmas carry an infinitive `-s`
/// which is stripped (one character, when present).
pub fn stem_for(lemma: &str, class: VerbClass) -> String {
    match class {
        VerbClass::Prefixing => lemma.to_string(),
        VerbClass::Ambifixing | VerbClass::Middle => {
            lemma.strip_suffix('s').unwrap_or(lemma).to_string()
        }
    }
}

#[cfg(test)]
mod tests;
