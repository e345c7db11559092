//! The `.ugt` text format.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    exclusions_between, Arena, ArenaIdx, ArenaNode, Game, InfosetDecl, Player, Tree, TreeDef, NATURE,
};
use crate::rational::{fmt_q, zero, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), col });
        } else if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            if i >= chars.len() {
                return Err(perr(lineno, col, "unterminated string"));
            }
            out.push(Token { tok: Tok::Str(chars[start..i].iter().collect()), col });
            i += 1;
        } else if "{}.,=</-".contains(c) {
            out.push(Token { tok: Tok::Punct(c), col });
            i += 1;
        } else {
            return Err(perr(lineno, col, &format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn perr(line: usize, col: usize, message: &str) -> Error {
    Error::Parse { line, col, message: message.to_string() }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn err(&self, expected: &str) -> Error {
        let found = match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Word(w), .. }) => format!("'{w}'"),
            Some(Token { tok: Tok::Str(s), .. }) => format!("\"{s}\""),
            Some(Token { tok: Tok::Punct(p), .. }) => format!("'{p}'"),
            None => "end of line".into(),
        };
        perr(self.line, self.col(), &format!("expected {expected}, found {found}"))
    }

    fn peek_punct(&self, p: char) -> bool {
        matches!(self.toks.get(self.pos), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    fn peek_word(&self, w: &str) -> bool {
        matches!(self.toks.get(self.pos), Some(Token { tok: Tok::Word(q), .. }) if q == w)
    }

    fn punct(&mut self, p: char) -> Result<()> {
        if self.peek_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("'{p}'")))
        }
    }

    fn keyword(&mut self, w: &str) -> Result<()> {
        if self.peek_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("'{w}'")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Word(w), .. }) => {
                self.pos += 1;
                Ok(w.clone())
            }
            _ => Err(self.err("identifier")),
        }
    }

    fn string(&mut self) -> Result<String> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Str(s), .. }) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.err("quoted string")),
        }
    }

    fn uint(&mut self) -> Result<usize> {
        let col = self.col();
        let w = self.ident().map_err(|_| self.err("integer"))?;
        w.parse().map_err(|_| perr(self.line, col, "expected integer"))
    }

    fn rational(&mut self) -> Result<Q> {
        let col = self.col();
        let neg = if self.peek_punct('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let num = self.ident().map_err(|_| self.err("rational"))?;
        let mut text = if neg { format!("-{num}") } else { num };
        if self.peek_punct('/') {
            self.pos += 1;
            let den = self.ident().map_err(|_| self.err("denominator"))?;
            text = format!("{text}/{den}");
        }
        crate::rational::parse_q(&text).ok_or_else(|| perr(self.line, col, &format!("invalid rational {text}")))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.peek_punct(',') {
            self.pos += 1;
            out.push(item(self)?);
        }
        Ok(out)
    }

    /// `<a>.<b>` pair of identifiers.
    fn dotted(&mut self) -> Result<(String, String)> {
        let a = self.ident()?;
        self.punct('.')?;
        let b = self.ident()?;
        Ok((a, b))
    }

    fn done(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            Err(self.err("end of line"))
        } else {
            Ok(())
        }
    }
}

/// A node line inside the tree block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeDecl {
    pub name: String,
    pub movers: Vec<Player>,
    pub actions: Vec<Vec<String>>,
    pub parent: Option<(String, Vec<String>)>,
    pub probs: Option<Vec<Q>>,
    pub payoffs: Option<Vec<Q>>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeDecl {
    pub name: String,
    pub base: String,
    pub exclude: Vec<(String, String)>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfosetLine {
    pub player: Player,
    pub at: (String, String),
    pub members: Vec<(String, String)>,
    pub line: usize,
}

/// Declarations in source order, before references are resolved.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GameDocument {
    pub name: String,
    pub players: usize,
    pub nature: bool,
    pub tree: String,
    pub nodes: Vec<NodeDecl>,
    pub subtrees: Vec<SubtreeDecl>,
    pub orders: Vec<(String, String, usize)>,
    pub infosets: Vec<InfosetLine>,
}

pub fn parse(text: &str) -> Result<Game> {
    assemble(&parse_document(text)?)
}

pub fn parse_document(text: &str) -> Result<GameDocument> {
    let mut doc = GameDocument::default();
    let mut header = 0;
    let mut tree_state = 0; // 0 none yet, 1 inside, 2 closed
    let mut last_line = 1;
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        last_line = lineno;
        let toks = lex(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor { toks: &toks, pos: 0, line: lineno, end_col: raw.chars().count() + 1 };
        if header == 0 {
            c.keyword("game").map_err(|_| perr(lineno, 1, "missing header"))?;
            doc.name = c.string()?;
            c.done()?;
            header = 1;
            continue;
        }
        if header == 1 {
            c.keyword("players")?;
            let col = c.col();
            doc.players = c.uint()?;
            if doc.players == 0 {
                return Err(perr(lineno, col, "at least one player is required"));
            }
            if c.peek_word("nature") {
                c.pos += 1;
                doc.nature = true;
            }
            c.done()?;
            header = 2;
            continue;
        }
        if tree_state == 1 {
            if c.peek_punct('}') {
                c.pos += 1;
                c.done()?;
                tree_state = 2;
                continue;
            }
            doc.nodes.push(node_line(&mut c, &doc)?);
            continue;
        }
        if c.peek_word("tree") {
            if tree_state == 2 {
                return Err(perr(lineno, c.col(), "duplicate declaration: only one tree block is allowed"));
            }
            c.pos += 1;
            doc.tree = c.ident()?;
            c.punct('{')?;
            c.done()?;
            tree_state = 1;
        } else if c.peek_word("subtree") {
            c.pos += 1;
            let name = c.ident()?;
            c.keyword("of")?;
            let base = c.ident()?;
            c.keyword("exclude")?;
            let exclude = c.list(|c| c.dotted())?;
            c.done()?;
            doc.subtrees.push(SubtreeDecl { name, base, exclude, line: lineno });
        } else if c.peek_word("order") {
            c.pos += 1;
            let lo = c.ident()?;
            c.punct('<')?;
            let hi = c.ident()?;
            c.done()?;
            doc.orders.push((lo, hi, lineno));
        } else if c.peek_word("infoset") {
            c.pos += 1;
            c.keyword("player")?;
            let player = c.uint()?;
            c.keyword("at")?;
            let at = c.dotted()?;
            c.punct('=')?;
            c.punct('{')?;
            let members = c.list(|c| c.dotted())?;
            c.punct('}')?;
            c.done()?;
            doc.infosets.push(InfosetLine { player, at, members, line: lineno });
        } else {
            return Err(c.err("one of 'tree', 'subtree', 'order', 'infoset'"));
        }
    }
    match (header, tree_state) {
        (0, _) => Err(perr(1, 1, "missing header")),
        (1, _) => Err(perr(last_line + 1, 1, "expected 'players'")),
        (_, 0) => Err(perr(last_line + 1, 1, "missing tree block")),
        (_, 1) => Err(perr(last_line + 1, 1, "unterminated tree block, expected '}'")),
        _ => Ok(doc),
    }
}

fn node_line(c: &mut Cursor, doc: &GameDocument) -> Result<NodeDecl> {
    let line = c.line;
    if c.peek_word("terminal") {
        c.pos += 1;
        let name = c.ident()?;
        let parent = if c.peek_word("parent") {
            c.pos += 1;
            Some(edge(c)?)
        } else {
            None
        };
        c.keyword("payoffs")?;
        let col = c.col();
        let payoffs = c.list(|c| c.rational())?;
        if payoffs.len() != doc.players {
            return Err(perr(
                line,
                col,
                &format!("arity mismatch: {} payoffs for {} players", payoffs.len(), doc.players),
            ));
        }
        c.done()?;
        return Ok(NodeDecl { name, movers: vec![], actions: vec![], parent, probs: None, payoffs: Some(payoffs), line });
    }
    c.keyword("node").map_err(|_| c.err("'node', 'terminal' or '}'"))?;
    let name = c.ident()?;
    c.keyword("player")?;
    let mcol = c.col();
    let movers = c.list(|c| c.uint())?;
    for (k, m) in movers.iter().enumerate() {
        if *m > doc.players || (*m == NATURE && !doc.nature) {
            return Err(perr(line, mcol, &format!("unknown player {m}")));
        }
        if movers[..k].contains(m) {
            return Err(perr(line, mcol, &format!("duplicate declaration of player {m}")));
        }
    }
    let parent = if c.peek_word("parent") {
        c.pos += 1;
        Some(edge(c)?)
    } else {
        None
    };
    c.keyword("actions")?;
    let acol = c.col();
    let mut actions = vec![c.list(|c| c.ident())?];
    while c.peek_punct('/') {
        c.pos += 1;
        actions.push(c.list(|c| c.ident())?);
    }
    if actions.len() != movers.len() {
        return Err(perr(line, acol, &format!("arity mismatch: {} action lists for {} movers", actions.len(), movers.len())));
    }
    for list in &actions {
        let set: BTreeSet<&String> = list.iter().collect();
        if set.len() != list.len() {
            return Err(perr(line, acol, "duplicate declaration of an action"));
        }
    }
    let probs = if c.peek_word("probs") {
        c.pos += 1;
        let col = c.col();
        let k = movers.iter().position(|m| *m == NATURE).ok_or_else(|| perr(line, col, "probs given at a node where nature does not move"))?;
        let p = c.list(|c| c.rational())?;
        if p.len() != actions[k].len() {
            return Err(perr(line, col, "arity mismatch: probs and nature actions"));
        }
        if p.iter().any(|q| *q < zero()) || p.iter().sum::<Q>() != crate::rational::one() {
            return Err(perr(line, col, "probs must be nonnegative and sum to 1"));
        }
        Some(p)
    } else {
        None
    };
    c.done()?;
    // Sort movers ascending, keeping action lists aligned.
    let mut paired: Vec<(Player, Vec<String>)> = movers.into_iter().zip(actions).collect();
    paired.sort_by_key(|(m, _)| *m);
    let (movers, actions) = paired.into_iter().unzip();
    Ok(NodeDecl { name, movers, actions, parent, probs, payoffs: None, line })
}

fn edge(c: &mut Cursor) -> Result<(String, Vec<String>)> {
    let node = c.ident()?;
    c.punct('.')?;
    let acts = c.list(|c| c.ident())?;
    Ok((node, acts))
}

/// Resolves references and materializes the game.
pub fn assemble(doc: &GameDocument) -> Result<Game> {
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    let mut root = None;
    let mut kids: Vec<Vec<(Vec<usize>, usize)>> = vec![Vec::new(); doc.nodes.len()];
    for (k, n) in doc.nodes.iter().enumerate() {
        if by_name.insert(&n.name, k).is_some() {
            return Err(perr(n.line, 1, &format!("duplicate declaration of node {}", n.name)));
        }
        match &n.parent {
            None => {
                if root.replace(k).is_some() {
                    return Err(perr(n.line, 1, &format!("node {} has no parent but a root exists", n.name)));
                }
            }
            Some((p, acts)) => {
                let pi = *by_name
                    .get(p.as_str())
                    .filter(|pi| **pi != k)
                    .ok_or_else(|| perr(n.line, 1, &format!("unknown reference to node {p}")))?;
                let pd = &doc.nodes[pi];
                if pd.payoffs.is_some() {
                    return Err(perr(n.line, 1, &format!("parent {p} is terminal")));
                }
                if acts.len() != pd.movers.len() {
                    return Err(perr(n.line, 1, &format!("arity mismatch: edge from {p} needs {} actions", pd.movers.len())));
                }
                let mut pos = Vec::new();
                for (a, list) in acts.iter().zip(&pd.actions) {
                    let ai = list
                        .iter()
                        .position(|x| x == a)
                        .ok_or_else(|| perr(n.line, 1, &format!("unknown reference to action {a} at {p}")))?;
                    pos.push(ai);
                }
                if kids[pi].iter().any(|(q, _)| *q == pos) {
                    return Err(perr(n.line, 1, &format!("duplicate declaration of edge {p}.{}", acts.join(","))));
                }
                kids[pi].push((pos, k));
            }
        }
    }
    let root = root.ok_or_else(|| perr(doc.nodes.first().map(|n| n.line).unwrap_or(1), 1, "tree block has no root"))?;
    for (k, n) in doc.nodes.iter().enumerate() {
        let expected: usize = n.actions.iter().map(|a| a.len()).product();
        if n.payoffs.is_none() && kids[k].len() != expected {
            return Err(perr(n.line, 1, &format!("node {} lacks successors for some action profiles", n.name)));
        }
        kids[k].sort();
    }
    // Preorder with children in action-list order.
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(k) = stack.pop() {
        order.push(k);
        for (_, c) in kids[k].iter().rev() {
            stack.push(*c);
        }
    }
    let mut pos_of = vec![usize::MAX; doc.nodes.len()];
    for (i, k) in order.iter().enumerate() {
        pos_of[*k] = i;
    }
    let mut action_names: Vec<String> = Vec::new();
    let mut action_id: HashMap<String, usize> = HashMap::new();
    for k in &order {
        for list in &doc.nodes[*k].actions {
            for a in list {
                if !action_id.contains_key(a) {
                    action_id.insert(a.clone(), action_names.len());
                    action_names.push(a.clone());
                }
            }
        }
    }
    let mut nodes = Vec::with_capacity(order.len());
    for k in &order {
        let d = &doc.nodes[*k];
        let actions: Vec<Vec<usize>> = d.actions.iter().map(|l| l.iter().map(|a| action_id[a]).collect()).collect();
        let to_ids = |nd: &NodeDecl, pos: &[usize]| -> Vec<usize> {
            pos.iter().zip(&nd.actions).map(|(p, l)| action_id[&l[*p]]).collect()
        };
        let parent = d.parent.as_ref().map(|(p, _)| {
            let pi = by_name[p.as_str()];
            let pos = kids[pi].iter().find(|(_, c)| c == k).unwrap().0.clone();
            (pos_of[pi], to_ids(&doc.nodes[pi], &pos))
        });
        let children = kids[*k].iter().map(|(pos, c)| (to_ids(d, pos), pos_of[*c])).collect();
        nodes.push(ArenaNode {
            name: d.name.clone(),
            parent,
            movers: d.movers.clone(),
            actions,
            children,
            payoffs: d.payoffs.clone().unwrap_or_default(),
            chance: d.probs.clone(),
        });
    }
    let arena = Arena { nodes, action_names };
    let arena_idx = |name: &str, line: usize| -> Result<ArenaIdx> {
        arena.node_by_name(name).ok_or_else(|| perr(line, 1, &format!("unknown reference to node {name}")))
    };

    let mut trees = vec![Tree { name: doc.tree.clone(), def: TreeDef::Full, members: vec![true; arena.nodes.len()] }];
    for s in &doc.subtrees {
        if trees.iter().any(|t| t.name == s.name) {
            return Err(perr(s.line, 1, &format!("duplicate declaration of tree {}", s.name)));
        }
        let base = trees
            .iter()
            .find(|t| t.name == s.base)
            .ok_or_else(|| perr(s.line, 1, &format!("unknown reference to tree {}", s.base)))?
            .members
            .clone();
        let mut exclude = Vec::new();
        for (n, a) in &s.exclude {
            let ni = arena_idx(n, s.line)?;
            let ai = arena.action_by_name(a).filter(|ai| arena.nodes[ni].actions.iter().any(|l| l.contains(ai)));
            let ai = ai.ok_or_else(|| perr(s.line, 1, &format!("unknown reference to action {a} at {n}")))?;
            if !base[ni] {
                return Err(perr(s.line, 1, &format!("node {n} is not in tree {}", s.base)));
            }
            exclude.push((ni, ai));
        }
        let members = arena.members_excluding(&base, &exclude);
        trees.push(Tree {
            name: s.name.clone(),
            def: TreeDef::Subtree { base: s.base.clone(), exclude },
            members,
        });
    }
    for (lo, hi, line) in &doc.orders {
        let find = |n: &str| {
            trees.iter().find(|t| t.name == n).ok_or_else(|| perr(*line, 1, &format!("unknown reference to tree {n}")))
        };
        let (a, b) = (find(lo)?, find(hi)?);
        if !a.members.iter().zip(&b.members).all(|(x, y)| !*x || *y) {
            return Err(perr(*line, 1, &format!("order {lo} < {hi} contradicts node inclusion")));
        }
    }
    let mut decls = Vec::new();
    let mut seen = BTreeSet::new();
    for d in &doc.infosets {
        let resolve = |(t, n): &(String, String)| -> Result<(String, ArenaIdx)> {
            let tree = trees
                .iter()
                .find(|x| x.name == *t)
                .ok_or_else(|| perr(d.line, 1, &format!("unknown reference to tree {t}")))?;
            let ai = arena_idx(n, d.line)?;
            if !tree.members[ai] {
                return Err(perr(d.line, 1, &format!("node {n} is not in tree {t}")));
            }
            Ok((t.clone(), ai))
        };
        let at = resolve(&d.at)?;
        let an = &arena.nodes[at.1];
        if d.player == NATURE || d.player > doc.players || !(an.is_terminal() || an.movers.contains(&d.player)) {
            return Err(perr(d.line, 1, &format!("player {} is not active at {}.{}", d.player, d.at.0, d.at.1)));
        }
        if !seen.insert((d.player, at.clone())) {
            return Err(perr(d.line, 1, "duplicate declaration of an information set"));
        }
        let members = d.members.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        decls.push(InfosetDecl { player: d.player, at, members });
    }
    Game::build(doc.name.clone(), doc.players, doc.nature, arena, trees, &decls)
}

/// Canonical text form.
pub fn serialize(g: &Game) -> String {
    let mut out = String::new();
    let top = &g.trees[0];
    let a = &g.arena;
    let _ = writeln!(out, "game \"{}\"", g.name);
    let _ = writeln!(out, "players {}{}", g.num_players, if g.nature { " nature" } else { "" });
    let _ = writeln!(out, "tree {} {{", top.name);
    let names = |ids: &[usize]| ids.iter().map(|x| a.action_name(*x)).collect::<Vec<_>>().join(",");
    for n in &a.nodes {
        let parent = n
            .parent
            .as_ref()
            .map(|(p, pr)| format!(" parent {}.{}", a.nodes[*p].name, names(pr)))
            .unwrap_or_default();
        if n.is_terminal() {
            let pay = n.payoffs.iter().map(fmt_q).collect::<Vec<_>>().join(",");
            let _ = writeln!(out, "  terminal {}{} payoffs {}", n.name, parent, pay);
        } else {
            let movers = n.movers.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
            let acts = n.actions.iter().map(|l| names(l)).collect::<Vec<_>>().join(" / ");
            let probs = n
                .chance
                .as_ref()
                .map(|p| format!(" probs {}", p.iter().map(fmt_q).collect::<Vec<_>>().join(",")))
                .unwrap_or_default();
            let _ = writeln!(out, "  node {} player {}{} actions {}{}", n.name, movers, parent, acts, probs);
        }
    }
    out.push_str("}\n");
    for t in &g.trees[1..] {
        let ex = exclusions_between(a, &top.members, &t.members);
        let ex = ex
            .iter()
            .map(|(n, x)| format!("{}.{}", a.nodes[*n].name, a.action_name(*x)))
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "subtree {} of {} exclude {}", t.name, top.name, ex);
    }
    let nt = g.trees.len();
    for lo in 0..nt {
        for hi in 0..nt {
            let covers = lo != hi
                && g.leq(lo, hi)
                && !(0..nt).any(|m| m != lo && m != hi && g.leq(lo, m) && g.leq(m, hi));
            if covers {
                let _ = writeln!(out, "order {} < {}", g.trees[lo].name, g.trees[hi].name);
            }
        }
    }
    for ((p, n), members) in g.assignment() {
        if members != [n] {
            let list = members.iter().map(|m| g.node_label(*m)).collect::<Vec<_>>().join(", ");
            let _ = writeln!(out, "infoset player {} at {} = {{ {} }}", p, g.node_label(n), list);
        }
    }
    out
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn game_hash(g: &Game) -> String {
    let digest = Sha256::digest(serialize(g).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
