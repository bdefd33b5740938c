//! Plain-text grammar config format.
//!
//! The format is line-oriented with `[section]` headers. Blank lines and
//! lines starting with `#` are skipped. Tokens are whitespace-separated; the
//! token `""` denotes the empty string. Sections:
//!
//! ```text
//! [attributes]     name = VALUE VALUE ...
//! [slots]          name [optional]          # the slot named "stem" is the stem
//! [classes]        name = req req ... [/ opt opt ...]
//! [exponents]      slot surface attr=V1,V2[,@none] ... [class=NAME]
//! [unification]    series-attribute = attr
//!                  tam-attribute = attr
//!                  require attr=V,... ... => attr=V[,@none],...
//!                  resolve attr=V,... ... => attr=value
//!                  tam SERIES CLASS => VALUE
//! [rewrites]       index pattern -> replacement [left=CTX] [right=CTX]
//!                                   [late] [surface-check]
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::{
    ClassSpec, ConstraintSet, Exponent, GrammarConfig, GrammarError, RequireRule, Resolution,
    RewriteRule, RewriteStage, Slot, SlotTemplate, UnificationRules,
};
use crate::corpus::VerbClass;

const UNSET_TOKEN: &str = "@none";

fn perr(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Parse {
        line,
        message: message.into(),
    }
}

fn unquote(token: &str) -> &str {
    if token == "\"\"" {
        ""
    } else {
        token
    }
}

/// `attr=V1,V2,@none` -> (attr, constraint set)
fn parse_constraint(line: usize, token: &str) -> Result<(String, ConstraintSet), GrammarError> {
    let (attr, raw) = token
        .split_once('=')
        .ok_or_else(|| perr(line, format!("expected attr=values, found {token:?}")))?;
    if attr.is_empty() || raw.is_empty() {
        return Err(perr(line, format!("malformed constraint {token:?}")));
    }
    let mut cset = ConstraintSet::default();
    for value in raw.split(',') {
        if value == UNSET_TOKEN {
            cset.allow_unset = true;
        } else if value.is_empty() {
            return Err(perr(line, format!("empty value in constraint {token:?}")));
        } else {
            cset.values.insert(value.to_string());
        }
    }
    Ok((attr.to_string(), cset))
}

fn parse_conditions(
    line: usize,
    tokens: &[&str],
) -> Result<BTreeMap<String, BTreeSet<String>>, GrammarError> {
    let mut conditions = BTreeMap::new();
    for token in tokens {
        let (attr, cset) = parse_constraint(line, token)?;
        if cset.allow_unset {
            return Err(perr(line, format!("{UNSET_TOKEN} not allowed in conditions")));
        }
        conditions.insert(attr, cset.values);
    }
    Ok(conditions)
}

pub(super) fn parse(text: &str) -> Result<GrammarConfig, GrammarError> {
    let mut attributes: Vec<(String, Vec<String>)> = Vec::new();
    let mut slots: Vec<Slot> = Vec::new();
    let mut classes: Vec<ClassSpec> = Vec::new();
    let mut exponents: Vec<Exponent> = Vec::new();
    let mut unification = UnificationRules::default();
    let mut rewrites: Vec<RewriteRule> = Vec::new();

    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(name.to_string());
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match section.as_deref() {
            Some("attributes") => {
                let eq = tokens
                    .iter()
                    .position(|t| *t == "=")
                    .ok_or_else(|| perr(line, "expected: name = VALUE ..."))?;
                if eq != 1 || tokens.len() < 3 {
                    return Err(perr(line, "expected: name = VALUE ..."));
                }
                let values = tokens[2..].iter().map(|t| t.to_string()).collect();
                attributes.push((tokens[0].to_string(), values));
            }
            Some("slots") => {
                let optional = match tokens.len() {
                    1 => false,
                    2 if tokens[1] == "optional" => true,
                    _ => return Err(perr(line, "expected: name [optional]")),
                };
                slots.push(Slot {
                    name: tokens[0].to_string(),
                    optional,
                });
            }
            Some("classes") => {
                let eq = tokens
                    .iter()
                    .position(|t| *t == "=")
                    .ok_or_else(|| perr(line, "expected: name = required... [/ optional...]"))?;
                if eq != 1 {
                    return Err(perr(line, "expected: name = required... [/ optional...]"));
                }
                let class: VerbClass = tokens[0]
                    .parse()
                    .map_err(|e: String| perr(line, e))?;
                let rest = &tokens[2..];
                let split = rest.iter().position(|t| *t == "/").unwrap_or(rest.len());
                let required = rest[..split].iter().map(|t| t.to_string()).collect();
                let optional = rest
                    .get(split + 1..)
                    .unwrap_or(&[])
                    .iter()
                    .map(|t| t.to_string())
                    .collect();
                classes.push(ClassSpec {
                    class,
                    required,
                    optional,
                });
            }
            Some("exponents") => {
                if tokens.len() < 2 {
                    return Err(perr(line, "expected: slot surface [constraints...]"));
                }
                let mut exp = Exponent {
                    slot: tokens[0].to_string(),
                    surface: unquote(tokens[1]).to_string(),
                    constraints: BTreeMap::new(),
                    series: None,
                    class: None,
                };
                for token in &tokens[2..] {
                    if let Some(class) = token.strip_prefix("class=") {
                        if class.is_empty() {
                            return Err(perr(line, "empty suffix class"));
                        }
                        exp.class = Some(class.to_string());
                    } else {
                        let (attr, cset) = parse_constraint(line, token)?;
                        exp.constraints.insert(attr, cset);
                    }
                }
                exponents.push(exp);
            }
            Some("unification") => match tokens[0] {
                "series-attribute" | "tam-attribute" => {
                    if tokens.len() != 3 || tokens[1] != "=" {
                        return Err(perr(line, format!("expected: {} = attr", tokens[0])));
                    }
                    let value = Some(tokens[2].to_string());
                    if tokens[0] == "series-attribute" {
                        unification.series_attr = value;
                    } else {
                        unification.tam_attr = value;
                    }
                }
                "require" => {
                    let arrow = tokens
                        .iter()
                        .position(|t| *t == "=>")
                        .ok_or_else(|| perr(line, "expected: require conds... => attr=values"))?;
                    if arrow < 2 || arrow + 2 != tokens.len() {
                        return Err(perr(line, "expected: require conds... => attr=values"));
                    }
                    let conditions = parse_conditions(line, &tokens[1..arrow])?;
                    let (attr, allowed) = parse_constraint(line, tokens[arrow + 1])?;
                    unification.requires.push(RequireRule {
                        conditions,
                        attr,
                        allowed,
                    });
                }
                "resolve" => {
                    let arrow = tokens
                        .iter()
                        .position(|t| *t == "=>")
                        .ok_or_else(|| perr(line, "expected: resolve conds... => attr=value"))?;
                    if arrow < 2 || arrow + 2 != tokens.len() {
                        return Err(perr(line, "expected: resolve conds... => attr=value"));
                    }
                    let conditions = parse_conditions(line, &tokens[1..arrow])?;
                    let (attr, value) = tokens[arrow + 1]
                        .split_once('=')
                        .ok_or_else(|| perr(line, "expected attr=value after =>"))?;
                    unification.resolutions.push(Resolution {
                        conditions,
                        attr: attr.to_string(),
                        value: value.to_string(),
                    });
                }
                "tam" => {
                    if tokens.len() != 5 || tokens[3] != "=>" {
                        return Err(perr(line, "expected: tam SERIES CLASS => VALUE"));
                    }
                    let series = tokens[1]
                        .parse()
                        .map_err(|e: String| perr(line, e))?;
                    let key = (series, tokens[2].to_string());
                    if unification
                        .tam_table
                        .insert(key, tokens[4].to_string())
                        .is_some()
                    {
                        return Err(perr(line, "duplicate tam table entry"));
                    }
                }
                other => return Err(perr(line, format!("unknown unification directive {other:?}"))),
            },
            Some("rewrites") => {
                if tokens.len() < 4 || tokens[2] != "->" {
                    return Err(perr(
                        line,
                        "expected: index pattern -> replacement [flags...]",
                    ));
                }
                let index: u32 = tokens[0]
                    .parse()
                    .map_err(|_| perr(line, format!("bad rewrite index {:?}", tokens[0])))?;
                let mut rule = RewriteRule {
                    index,
                    pattern: unquote(tokens[1]).to_string(),
                    replacement: unquote(tokens[3]).to_string(),
                    left: None,
                    right: None,
                    stage: RewriteStage::Boundary,
                    surface_check: false,
                };
                for token in &tokens[4..] {
                    if let Some(ctx) = token.strip_prefix("left=") {
                        rule.left = Some(unquote(ctx).to_string());
                    } else if let Some(ctx) = token.strip_prefix("right=") {
                        rule.right = Some(unquote(ctx).to_string());
                    } else if *token == "late" {
                        rule.stage = RewriteStage::Late;
                    } else if *token == "surface-check" {
                        rule.surface_check = true;
                    } else {
                        return Err(perr(line, format!("unknown rewrite flag {token:?}")));
                    }
                }
                rewrites.push(rule);
            }
            Some(other) => return Err(perr(line, format!("unknown section [{other}]"))),
            None => return Err(perr(line, "content before any [section] header")),
        }
    }

    let template = if slots.is_empty() {
        SlotTemplate::default()
    } else {
        SlotTemplate { slots }
    };

    Ok(GrammarConfig::new_unchecked(
        template,
        attributes,
        exponents,
        unification,
        rewrites,
        classes,
    ))
}
