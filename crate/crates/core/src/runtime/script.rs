//! Line-oriented scenario scripts: `TICK set name=value ...` and
//! `TICK query model`; `#` starts a comment.

use std::str::FromStr;

use super::RuntimeError;

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Raw `(name, value)` pairs; values are parsed against the context type.
    Set(Vec<(String, String)>),
    Query(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptEntry {
    pub tick: u64,
    pub action: Action,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioScript {
    pub entries: Vec<ScriptEntry>,
}

impl FromStr for ScenarioScript {
    type Err = RuntimeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut entries: Vec<ScriptEntry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| RuntimeError::Script { line: i + 1, message: message.to_string() };
            let mut words = line.split_whitespace();
            let tick: u64 = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| err("expected a tick number"))?;
            if entries.last().is_some_and(|e| e.tick > tick) {
                return Err(err("ticks must not decrease"));
            }
            let action = match words.next() {
                Some("set") => {
                    let mut pairs = Vec::new();
                    for w in words {
                        let (n, v) = w.split_once('=').ok_or_else(|| err("expected `name=value`"))?;
                        if n.is_empty() || v.is_empty() {
                            return Err(err("expected `name=value`"));
                        }
                        pairs.push((n.to_string(), v.to_string()));
                    }
                    if pairs.is_empty() {
                        return Err(err("`set` needs at least one assignment"));
                    }
                    Action::Set(pairs)
                }
                Some("query") => {
                    let model = words.next().ok_or_else(|| err("`query` needs a model name"))?;
                    if words.next().is_some() {
                        return Err(err("`query` takes one model name"));
                    }
                    Action::Query(model.to_string())
                }
                _ => return Err(err("expected `set` or `query`")),
            };
            entries.push(ScriptEntry { tick, action });
        }
        Ok(ScenarioScript { entries })
    }
}
