use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{Automaton, AutomatonBuilder, StateId};
use crate::menagerie::state_name;

/// Longest category sequence a pattern may read.
pub const MAX_PATTERN_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reading {
    pub category: String,
    pub senses: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub lemma: String,
    #[serde(default)]
    pub features: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDoc {
    pub sequence: Vec<String>,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRule {
    pub property: String,
    pub word: String,
    pub senses: BTreeSet<String>,
}

/// Lexicon, morphology, patterns and context rules as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarDoc {
    pub lexicon: BTreeMap<String, Vec<Reading>>,
    #[serde(default)]
    pub morphology: BTreeMap<String, Analysis>,
    pub patterns: Vec<PatternDoc>,
    #[serde(default)]
    pub rules: Vec<ContextRule>,
}

/// A category pattern run as a chain machine: one state per category read,
/// with the last state emitting the result category.
#[derive(Debug, Clone)]
pub struct Pattern {
    pub machine: Automaton,
    pub result: String,
}

impl Pattern {
    pub fn new(sequence: &[String], result: &str) -> Result<Self> {
        if sequence.is_empty() || sequence.len() > MAX_PATTERN_LEN {
            return Err(Error::Invalid(format!(
                "patterns read 1 to {MAX_PATTERN_LEN} categories, got {}",
                sequence.len()
            )));
        }
        let k = sequence.len() + 1;
        let mut b = AutomatonBuilder::new(format!("{} -> {result}", sequence.join(" ")))
            .states((0..k).map(state_name))
            .initial(state_name(0))
            .output(state_name(k - 1), result);
        let cats: BTreeSet<&String> = sequence.iter().collect();
        b = b.inputs(cats.into_iter().cloned());
        for (i, c) in sequence.iter().enumerate() {
            b = b.edge(state_name(i), c.clone(), state_name(i + 1));
        }
        Ok(Self {
            machine: b.build()?,
            result: result.to_string(),
        })
    }

    /// Where the chain goes from `q` on a category, if it accepts it.
    fn advance(&self, q: StateId, category: &str) -> Option<StateId> {
        let s = self.machine.symbol_index(category).ok()?;
        self.machine.successors(q, s).next()
    }
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub lexicon: BTreeMap<String, Vec<Reading>>,
    pub morphology: BTreeMap<String, Analysis>,
    pub patterns: Vec<Pattern>,
    pub rules: Vec<ContextRule>,
}

impl Grammar {
    pub fn from_doc(doc: &GrammarDoc) -> Result<Self> {
        for (w, rs) in &doc.lexicon {
            if rs.is_empty() || rs.iter().any(|r| r.senses.is_empty()) {
                return Err(Error::Invalid(format!("`{w}` needs readings with senses")));
            }
        }
        Ok(Self {
            lexicon: doc.lexicon.clone(),
            morphology: doc.morphology.clone(),
            patterns: doc
                .patterns
                .iter()
                .map(|p| Pattern::new(&p.sequence, &p.result))
                .collect::<Result<_>>()?,
            rules: doc.rules.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    /// Four words, three patterns and three context rules: enough for
    /// "Eleanor broke the record".
    pub fn demo() -> Self {
        Self::from_json(include_str!("../../data/demo_grammar.json")).expect("bundled grammar is valid")
    }

    /// Splits an inflected form into lemma and features.
    pub fn analyze(&self, word: &str) -> Analysis {
        self.morphology.get(word).cloned().unwrap_or_else(|| Analysis {
            lemma: word.to_string(),
            features: Vec::new(),
        })
    }

    pub fn add_reading(&mut self, word: &str, reading: Reading) {
        self.lexicon.entry(word.to_string()).or_default().push(reading);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ParseItem {
    /// Word indices `[start, end)`.
    pub span: (usize, usize),
    pub category: String,
    pub senses: BTreeSet<String>,
    /// Lemma and features for words; absent for built constituents.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ParseItem>,
}

impl ParseItem {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// This item and all items below it, parents first.
    pub fn walk(&self) -> Vec<&ParseItem> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.walk());
        }
        out
    }

    /// Children are adjacent and cover the parent span exactly.
    pub fn tiles(&self) -> bool {
        if self.is_leaf() {
            return self.span.1 == self.span.0 + 1;
        }
        let mut at = self.span.0;
        for c in &self.children {
            if c.span.0 != at || !c.tiles() {
                return false;
            }
            at = c.span.1;
        }
        at == self.span.1
    }

    fn refresh_senses(&mut self) {
        if !self.is_leaf() {
            for c in &mut self.children {
                c.refresh_senses();
            }
            self.senses = self.children.iter().flat_map(|c| c.senses.iter().cloned()).collect();
        }
    }
}

impl fmt::Display for ParseItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.category)?;
        if let Some(w) = &self.word {
            write!(f, " {w}")?;
            let lemma = w.split('.').next().unwrap_or(w);
            if self.senses.len() > 1 || !self.senses.contains(lemma) {
                let s: Vec<&str> = self.senses.iter().map(String::as_str).collect();
                write!(f, " {{{}}}", s.join(","))?;
            }
        }
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseResult {
    pub words: Vec<String>,
    /// Built constituents covering the whole sentence.
    pub full: Vec<ParseItem>,
    /// Built constituents that no larger one uses.
    pub islands: Vec<ParseItem>,
    /// Every built constituent, surviving or not.
    #[serde(skip)]
    pub built: Vec<ParseItem>,
}

impl ParseResult {
    /// Items of the surviving structures, words included.
    pub fn items(&self) -> BTreeSet<&ParseItem> {
        self.islands.iter().flat_map(ParseItem::walk).collect()
    }
}

/// Order in which the agenda is worked off. The chart it reaches does not
/// depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AgendaOrder {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Leaf(usize, usize),
    Built(String, usize, usize, Vec<usize>),
}

struct Node {
    start: usize,
    end: usize,
    category: String,
    leaf: Option<usize>,
    children: Vec<usize>,
}

#[derive(Clone)]
struct Active {
    pattern: usize,
    state: StateId,
    start: usize,
    end: usize,
    children: Vec<usize>,
}

pub fn parse(sentence: &str, g: &Grammar) -> Result<ParseResult> {
    parse_with(sentence, g, AgendaOrder::Fifo)
}

/// Bottom-up island parsing. Every word offers all its categories; each
/// pattern starts a fresh chain at every item and extends it over adjacent
/// items; a chain reaching its emitting state yields a new item.
pub fn parse_with(sentence: &str, g: &Grammar, order: AgendaOrder) -> Result<ParseResult> {
    let words: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
    let mut leaves: Vec<(String, Reading)> = Vec::new();
    let mut leaf_pos: Vec<usize> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let a = g.analyze(w);
        let readings = g
            .lexicon
            .get(&a.lemma)
            .ok_or_else(|| Error::UnknownWord(w.clone()))?;
        let label = std::iter::once(a.lemma.clone())
            .chain(a.features.iter().cloned())
            .collect::<Vec<_>>()
            .join(".");
        for r in readings {
            leaves.push((label.clone(), r.clone()));
            leaf_pos.push(i);
        }
    }

    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut by_start: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut actives: Vec<Active> = Vec::new();
    let mut active_seen: BTreeSet<(usize, usize, usize, usize, Vec<usize>)> = BTreeSet::new();
    let mut waiting: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut agenda: VecDeque<(Key, Node)> = VecDeque::new();

    for (l, (_, r)) in leaves.iter().enumerate() {
        let i = leaf_pos[l];
        agenda.push_back((
            Key::Leaf(i, l),
            Node {
                start: i,
                end: i + 1,
                category: r.category.clone(),
                leaf: Some(l),
                children: Vec::new(),
            },
        ));
    }

    let pop = |agenda: &mut VecDeque<(Key, Node)>| match order {
        AgendaOrder::Fifo => agenda.pop_front(),
        AgendaOrder::Lifo => agenda.pop_back(),
    };

    // Pushes the extension of `a` by `item` and any completion it yields.
    fn extend(
        g: &Grammar,
        nodes: &[Node],
        a: &Active,
        item: usize,
        actives: &mut Vec<Active>,
        seen: &mut BTreeSet<(usize, usize, usize, usize, Vec<usize>)>,
        agenda: &mut VecDeque<(Key, Node)>,
    ) -> Option<usize> {
        let p = &g.patterns[a.pattern];
        let n = &nodes[item];
        let q = p.advance(a.state, &n.category)?;
        let mut children = a.children.clone();
        children.push(item);
        let next = Active {
            pattern: a.pattern,
            state: q,
            start: a.start,
            end: n.end,
            children,
        };
        if !seen.insert((next.pattern, next.state.index(), next.start, next.end, next.children.clone())) {
            return None;
        }
        if p.machine.is_signaling(q) {
            agenda.push_back((
                Key::Built(p.result.clone(), next.start, next.end, next.children.clone()),
                Node {
                    start: next.start,
                    end: next.end,
                    category: p.result.clone(),
                    leaf: None,
                    children: next.children.clone(),
                },
            ));
        }
        actives.push(next);
        Some(actives.len() - 1)
    }

    while let Some((key, node)) = pop(&mut agenda) {
        if index.contains_key(&key) {
            continue;
        }
        let id = nodes.len();
        let start = node.start;
        nodes.push(node);
        index.insert(key, id);
        by_start.entry(start).or_default().push(id);

        // Chains already waiting at this item's start.
        let mut fresh: Vec<usize> = Vec::new();
        for &a in waiting.get(&start).cloned().unwrap_or_default().iter() {
            let act = actives[a].clone();
            fresh.extend(extend(g, &nodes, &act, id, &mut actives, &mut active_seen, &mut agenda));
        }
        // A fresh chain of every pattern anchored at this item.
        for p in 0..g.patterns.len() {
            let seed = Active {
                pattern: p,
                state: g.patterns[p].machine.initial(),
                start,
                end: start,
                children: Vec::new(),
            };
            fresh.extend(extend(g, &nodes, &seed, id, &mut actives, &mut active_seen, &mut agenda));
        }
        // New chains pick up items already in the chart, until nothing changes.
        while let Some(a) = fresh.pop() {
            let act = actives[a].clone();
            waiting.entry(act.end).or_default().push(a);
            for &item in by_start.get(&act.end).cloned().unwrap_or_default().iter() {
                fresh.extend(extend(g, &nodes, &act, item, &mut actives, &mut active_seen, &mut agenda));
            }
        }
    }

    let build = |id: usize| -> ParseItem {
        fn go(nodes: &[Node], leaves: &[(String, Reading)], id: usize) -> ParseItem {
            let n = &nodes[id];
            match n.leaf {
                Some(l) => ParseItem {
                    span: (n.start, n.end),
                    category: n.category.clone(),
                    senses: leaves[l].1.senses.clone(),
                    word: Some(leaves[l].0.clone()),
                    children: Vec::new(),
                },
                None => {
                    let children: Vec<ParseItem> = n.children.iter().map(|&c| go(nodes, leaves, c)).collect();
                    ParseItem {
                        span: (n.start, n.end),
                        category: n.category.clone(),
                        senses: children.iter().flat_map(|c| c.senses.iter().cloned()).collect(),
                        word: None,
                        children,
                    }
                }
            }
        }
        go(&nodes, &leaves, id)
    };

    let used: BTreeSet<usize> = nodes.iter().flat_map(|n| n.children.iter().copied()).collect();
    let built_ids: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].leaf.is_none()).collect();
    let mut built: Vec<ParseItem> = built_ids.iter().map(|&i| build(i)).collect();
    built.sort();
    let mut full: Vec<ParseItem> = built
        .iter()
        .filter(|it| it.span == (0, words.len()))
        .cloned()
        .collect();
    full.sort();
    let mut islands: Vec<ParseItem> = built_ids
        .iter()
        .filter(|i| !used.contains(i))
        .map(|&i| build(i))
        .collect();
    islands.sort();
    Ok(ParseResult {
        words,
        full,
        islands,
        built,
    })
}

/// Subject-property facts such as `Eleanor: athlete`.
pub type Context = Vec<(String, String)>;

/// Narrows ambiguous word senses with the rules whose property some subject
/// in the item has. Several applicable rules allow the union of their senses.
pub fn disambiguate(item: &ParseItem, context: &Context, rules: &[ContextRule]) -> Result<ParseItem> {
    let subjects: BTreeSet<&str> = item
        .walk()
        .into_iter()
        .filter_map(|i| i.word.as_deref())
        .collect();
    let properties: BTreeSet<&str> = context
        .iter()
        .filter(|(s, _)| subjects.contains(s.as_str()))
        .map(|(_, p)| p.as_str())
        .collect();
    let mut out = item.clone();
    narrow(&mut out, &properties, rules)?;
    out.refresh_senses();
    Ok(out)
}

fn narrow(item: &mut ParseItem, properties: &BTreeSet<&str>, rules: &[ContextRule]) -> Result<()> {
    for c in &mut item.children {
        narrow(c, properties, rules)?;
    }
    let Some(word) = &item.word else {
        return Ok(());
    };
    let lemma = word.split('.').next().unwrap_or(word);
    let allowed: BTreeSet<&String> = rules
        .iter()
        .filter(|r| r.word == lemma && properties.contains(r.property.as_str()))
        .flat_map(|r| r.senses.iter())
        .collect();
    if allowed.is_empty() || item.senses.len() < 2 {
        return Ok(());
    }
    let kept: BTreeSet<String> = item
        .senses
        .iter()
        .filter(|s| allowed.contains(s))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::Contradiction(word.clone()));
    }
    item.senses = kept;
    Ok(())
}
