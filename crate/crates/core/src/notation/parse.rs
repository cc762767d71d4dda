use std::collections::{BTreeMap, HashMap, HashSet};

use super::lexer::{lex_line, Lexeme, Tok};
use super::{ParseDiagnostic, Severity, SourceSpan};
use crate::feature::{is_identifier, FeatureStructure, FeatureValue, Symbol, VarId};
use crate::grammar::{Category, Grammar, Rule};

/// Parses grammar text. Any error yields the full list of diagnostics and no grammar.
pub fn parse_grammar(text: &str) -> Result<Grammar, Vec<ParseDiagnostic>> {
    let (grammar, diagnostics) = parse_grammar_with_warnings(text);
    match grammar {
        Some(g) => Ok(g),
        None => Err(diagnostics.into_iter().filter(|d| d.severity == Severity::Error).collect()),
    }
}

/// Like [`parse_grammar`] but also reports warnings (such as singleton variables).
pub fn parse_grammar_with_warnings(text: &str) -> (Option<Grammar>, Vec<ParseDiagnostic>) {
    let mut diags = Vec::new();
    let mut start: Option<(Symbol, usize)> = None;
    let mut rules: Vec<Rule> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let lexemes = match lex_line(line) {
            Ok(l) => l,
            Err(e) => {
                diags.push(error(line_no, e.column, e.length, e.message));
                continue;
            }
        };
        if lexemes.is_empty() {
            continue;
        }
        let end_col = line.chars().count() + 1;
        let mut p = LineParser { lexemes: &lexemes, pos: 0, line: line_no, end_col };
        if p.is_start_decl() {
            match p.start_decl() {
                Ok(name) => {
                    if let Some((_, first)) = &start {
                        diags.push(error(
                            line_no,
                            1,
                            lexemes.last().map(|l| l.column + l.length - 1).unwrap_or(0),
                            format!("duplicate start declaration (first on line {first})"),
                        ));
                    } else {
                        start = Some((name, line_no));
                    }
                }
                Err(d) => diags.push(d),
            }
            continue;
        }
        match p.rule() {
            Ok(rule) => {
                for w in singleton_warnings(&rule, &lexemes, line_no) {
                    diags.push(w);
                }
                rules.push(rule);
            }
            Err(d) => diags.push(d),
        }
    }

    let start = match start {
        Some((s, _)) => Some(s),
        None => rules.first().and_then(|r| r.head.name().cloned()),
    };
    if start.is_none() && !diags.iter().any(|d| d.severity == Severity::Error) {
        diags.push(error(1, 1, 0, "grammar has neither a start declaration nor any rule".into()));
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return (None, diags);
    }
    let grammar = classify(start.expect("checked above"), rules);
    (Some(grammar), diags)
}

fn error(line: usize, column: usize, length: usize, message: String) -> ParseDiagnostic {
    ParseDiagnostic { span: SourceSpan { line, column, length }, message, severity: Severity::Error }
}

/// Marks names whose rules are all lexical as preterminals and splits the
/// rule list accordingly, keeping file order within each list.
fn classify(start: Symbol, rules: Vec<Rule>) -> Grammar {
    let mut all_lexical: HashMap<Symbol, bool> = HashMap::new();
    for r in &rules {
        if let Some(name) = r.head.name() {
            let e = all_lexical.entry(name.clone()).or_insert(true);
            *e &= r.is_lexical();
        }
    }
    let preterminals: HashSet<Symbol> =
        all_lexical.into_iter().filter(|(_, lexical)| *lexical).map(|(n, _)| n).collect();
    let convert = |c: Category| match c {
        Category::Nonterminal { name, features } if preterminals.contains(&name) => {
            Category::Preterminal { name, features }
        }
        other => other,
    };
    let mut syntactic = Vec::new();
    let mut lexical = Vec::new();
    for r in rules {
        let rule = Rule {
            head: convert(r.head),
            body: r.body.into_iter().map(convert).collect(),
            scope_closing: r.scope_closing,
            var_names: r.var_names,
        };
        if matches!(rule.head, Category::Preterminal { .. }) {
            lexical.push(rule);
        } else {
            syntactic.push(rule);
        }
    }
    Grammar::new(&start, syntactic, lexical)
}

fn singleton_warnings(rule: &Rule, lexemes: &[Lexeme], line: usize) -> Vec<ParseDiagnostic> {
    let mut counts: BTreeMap<VarId, usize> = BTreeMap::new();
    for c in rule.categories() {
        for v in c.vars() {
            *counts.entry(v).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|(_, n)| *n == 1)
        .filter_map(|(v, _)| {
            let name = rule.var_names.get(&v)?;
            let lx = lexemes.iter().find(|l| matches!(&l.tok, Tok::Var(n) if **n == **name))?;
            Some(ParseDiagnostic {
                span: SourceSpan { line, column: lx.column, length: lx.length },
                message: format!("variable `${name}` occurs only once"),
                severity: Severity::Warning,
            })
        })
        .collect()
}

struct LineParser<'a> {
    lexemes: &'a [Lexeme],
    pos: usize,
    line: usize,
    end_col: usize,
}

type PResult<T> = Result<T, ParseDiagnostic>;

struct RuleVars {
    ids: HashMap<String, VarId>,
}

impl RuleVars {
    fn id(&mut self, name: &str) -> VarId {
        let next = VarId(self.ids.len() as u32);
        *self.ids.entry(name.to_string()).or_insert(next)
    }
}

impl LineParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.lexemes.get(self.pos).map(|l| &l.tok)
    }

    fn bump(&mut self) -> Option<&Lexeme> {
        let l = self.lexemes.get(self.pos);
        self.pos += 1;
        l
    }

    fn err_here(&self, message: impl Into<String>) -> ParseDiagnostic {
        match self.lexemes.get(self.pos) {
            Some(l) => error(self.line, l.column, l.length, message.into()),
            None => error(self.line, self.end_col, 0, message.into()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn is_start_decl(&self) -> bool {
        matches!(
            (self.lexemes.first().map(|l| &l.tok), self.lexemes.get(1).map(|l| &l.tok)),
            (Some(Tok::Word(w)), Some(Tok::Colon)) if w == "start"
        )
    }

    fn start_decl(&mut self) -> PResult<Symbol> {
        self.pos = 2;
        let name = match self.peek() {
            Some(Tok::Word(w)) if is_identifier(w) => Symbol::from(w.as_str()),
            _ => return Err(self.err_here("expected a category name after `start:`")),
        };
        self.pos += 1;
        if self.pos < self.lexemes.len() {
            return Err(self.err_here("unexpected input after start declaration"));
        }
        Ok(name)
    }

    fn rule(&mut self) -> PResult<Rule> {
        let mut vars = RuleVars { ids: HashMap::new() };
        let head = self.category(&mut vars)?;
        let scope_closing = match self.peek() {
            Some(Tok::Arrow) => false,
            Some(Tok::ScopeArrow) => true,
            _ => return Err(self.err_here("expected `=>` or `~>`")),
        };
        self.pos += 1;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            if self.pos < self.lexemes.len() {
                return Err(self.err_here("`.` marks an empty body and must stand alone"));
            }
        } else {
            if self.pos >= self.lexemes.len() {
                return Err(self.err_here("expected a rule body (write `.` for an empty body)"));
            }
            while self.pos < self.lexemes.len() {
                if self.peek() == Some(&Tok::Dot) {
                    return Err(self.err_here("`.` marks an empty body and must stand alone"));
                }
                body.push(self.category(&mut vars)?);
            }
        }
        let var_names = vars.ids.into_iter().map(|(n, id)| (id, Symbol::from(n))).collect();
        Ok(Rule { head, body, scope_closing, var_names })
    }

    fn category(&mut self, vars: &mut RuleVars) -> PResult<Category> {
        match self.peek().cloned() {
            Some(Tok::Word(w)) if is_identifier(&w) => {
                self.pos += 1;
                let features = if self.peek() == Some(&Tok::LParen) {
                    self.features(vars)?
                } else {
                    FeatureStructure::new()
                };
                Ok(Category::Nonterminal { name: w.as_str().into(), features })
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let token = match self.peek().cloned() {
                    Some(Tok::Word(w)) => w,
                    Some(Tok::Quoted(q)) if !q.is_empty() => q,
                    Some(Tok::Quoted(_)) => return Err(self.err_here("terminal token must not be empty")),
                    _ => return Err(self.err_here("expected a token inside `[...]`")),
                };
                self.pos += 1;
                if self.peek() != Some(&Tok::RBracket) {
                    return Err(self.err_here("expected `]` (one token per terminal)"));
                }
                self.pos += 1;
                Ok(Category::Terminal(token.as_str().into()))
            }
            Some(Tok::Gt) | Some(Tok::Lt) => {
                let fwd = self.peek() == Some(&Tok::Gt);
                self.pos += 1;
                let features = if self.peek() == Some(&Tok::LParen) {
                    self.features(vars)?
                } else {
                    FeatureStructure::new()
                };
                Ok(if fwd { Category::FwdRef(features) } else { Category::BwdRef(features) })
            }
            Some(Tok::Slashes) => {
                self.pos += 1;
                Ok(Category::ScopeOpener)
            }
            _ => Err(self.err_here("expected a category")),
        }
    }

    fn features(&mut self, vars: &mut RuleVars) -> PResult<FeatureStructure> {
        self.expect(Tok::LParen, "`(`")?;
        let mut entries: Vec<(Symbol, FeatureValue)> = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(FeatureStructure::new());
        }
        loop {
            let name = match self.peek().cloned() {
                Some(Tok::Word(w)) if is_identifier(&w) => w,
                _ => return Err(self.err_here("expected a feature name")),
            };
            self.pos += 1;
            self.expect(Tok::Colon, "`:` after feature name")?;
            let value = match self.peek().cloned() {
                Some(Tok::Var(v)) => FeatureValue::Var(vars.id(&v)),
                Some(Tok::Word(w)) => FeatureValue::Atom(w.as_str().into()),
                Some(Tok::Quoted(q)) if !q.is_empty() => FeatureValue::Atom(q.as_str().into()),
                Some(Tok::Quoted(_)) => return Err(self.err_here("atoms must not be empty")),
                _ => return Err(self.err_here("expected a value (atom or $Variable)")),
            };
            self.pos += 1;
            entries.push((name.as_str().into(), value));
            match self.bump().map(|l| l.tok.clone()) {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => {
                    self.pos -= 1;
                    return Err(self.err_here("expected `,` or `)`"));
                }
            }
        }
        // Duplicates are kept; the validator reports them.
        Ok(FeatureStructure::from_entries_unchecked(entries))
    }
}
