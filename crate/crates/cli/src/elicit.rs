//! The interactive question loop.

use std::io::{self, BufRead, Write};

use ttm_core::{ObjectId, Pairing};
use ttm_session::{Judgment, Phase, Session};

use crate::error::{CliError, Result};

/// What the user said at a prompt.
enum Answer {
    Pick(ObjectId),
    Cards(u32),
    Tie,
    Bye,
}

/// One round's pairs; `None` on the right is a bye.
type Pairs = Vec<(ObjectId, Option<ObjectId>)>;

pub struct Prompter<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> Prompter<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Self { input, output }
    }

    pub fn output(&mut self) -> &mut W {
        &mut self.output
    }

    /// Prints `question` and reads one trimmed line; `None` at end of input.
    fn ask(&mut self, question: &str) -> io::Result<Option<String>> {
        write!(self.output, "{question} ")?;
        self.output.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            writeln!(self.output)?;
            return Ok(None);
        }
        Ok(Some(line.trim().to_string()))
    }

    /// Repeats `question` until `parse` accepts the answer.
    fn ask_until<F>(&mut self, question: &str, mut parse: F) -> io::Result<Option<Answer>>
    where
        F: FnMut(&str) -> std::result::Result<Answer, String>,
    {
        loop {
            let Some(line) = self.ask(question)? else { return Ok(None) };
            match parse(&line) {
                Ok(answer) => return Ok(Some(answer)),
                Err(hint) => writeln!(self.output, "{hint}")?,
            }
        }
    }
}

fn stdout_error(err: io::Error) -> CliError {
    CliError::Usage(format!("terminal: {err}"))
}

/// Finds an object by name, case-insensitively when unambiguous.
fn lookup(session: &Session, candidates: &[ObjectId], answer: &str) -> Option<ObjectId> {
    let objects = session.objects();
    candidates.iter().copied().find(|&id| objects.name(id) == answer).or_else(|| {
        let folded: Vec<_> =
            candidates.iter().copied().filter(|&id| objects.name(id).eq_ignore_ascii_case(answer)).collect();
        (folded.len() == 1).then(|| folded[0])
    })
}

/// Runs prompts until the tournament finishes or input ends. `save` is
/// called after every recorded answer. Returns whether the tournament
/// finished.
pub fn run<R, W, S>(session: &mut Session, prompter: &mut Prompter<R, W>, mut save: S) -> Result<bool>
where
    R: BufRead,
    W: Write,
    S: FnMut(&Session) -> Result<()>,
{
    let mut announced = 0;
    while session.phase == Phase::Eliciting {
        let round = session.tournament.round();
        if round != announced {
            writeln!(prompter.output(), "Round {round}").map_err(stdout_error)?;
            announced = round;
        }
        if session.tournament.awaiting_pairings() {
            let Some(pairs) = ask_pairings(session, prompter).map_err(stdout_error)? else { return Ok(false) };
            session.set_pairings(pairs).map_err(|e| CliError::session("pairings", e))?;
            save(session)?;
            continue;
        }
        let pairing = session.open_pairings()[0];
        let Some(judgment) = ask_match(session, &pairing, prompter).map_err(stdout_error)? else { return Ok(false) };
        session.submit(pairing.pairing_id, judgment).map_err(|e| CliError::session("match", e))?;
        save(session)?;
    }
    Ok(true)
}

fn ask_match<R: BufRead, W: Write>(
    session: &Session,
    pairing: &Pairing,
    prompter: &mut Prompter<R, W>,
) -> io::Result<Option<Judgment>> {
    let rules = session.config().rules;
    let (left, right) = (pairing.left, pairing.right.expect("open pairings are never byes"));
    let names = session.objects();
    let question = format!("Which do you prefer, {} or {}?", names.name(left), names.name(right));
    let pick = prompter.ask_until(&question, |answer| {
        if rules.allow_ties && answer.eq_ignore_ascii_case("tie") {
            return Ok(Answer::Tie);
        }
        lookup(session, &[left, right], answer)
            .map(Answer::Pick)
            .ok_or_else(|| format!("Please answer {} or {}.", names.name(left), names.name(right)))
    })?;
    let winner = match pick {
        None => return Ok(None),
        Some(Answer::Tie) => return Ok(Some(Judgment::Tie)),
        Some(Answer::Pick(id)) => id,
        Some(_) => unreachable!("preference prompt yields a pick or a tie"),
    };
    let cards = prompter.ask_until("How many cards between them?", |answer| {
        if rules.allow_ties && answer.eq_ignore_ascii_case("tie") {
            return Ok(Answer::Tie);
        }
        let cards: u32 = answer.parse().map_err(|_| "Please enter a whole number of cards.".to_string())?;
        rules.check_cards(cards).map(Answer::Cards).map_err(|e| format!("{e}."))
    })?;
    Ok(match cards {
        None => None,
        Some(Answer::Tie) => Some(Judgment::Tie),
        Some(Answer::Cards(cards)) => Some(Judgment::Winner { winner, cards }),
        Some(_) => unreachable!("card prompt yields a count or a tie"),
    })
}

/// Asks for an opponent for each unpaired object in turn. With an odd
/// number left one object may answer `bye`; the last one left gets it
/// automatically.
fn ask_pairings<R: BufRead, W: Write>(session: &Session, prompter: &mut Prompter<R, W>) -> io::Result<Option<Pairs>> {
    let names = session.objects();
    let mut open: Vec<ObjectId> = session.tournament.alive().to_vec();
    let mut bye_free = open.len() % 2 == 1;
    let mut pairs = Vec::new();
    while let Some(first) = open.first().copied() {
        open.remove(0);
        if open.is_empty() {
            writeln!(prompter.output(), "{} gets a bye.", names.name(first))?;
            pairs.push((first, None));
            break;
        }
        let listed: Vec<&str> = open.iter().map(|&id| names.name(id)).collect();
        let question = format!(
            "Who plays {}? ({}{})",
            names.name(first),
            listed.join(", "),
            if bye_free { ", or bye" } else { "" }
        );
        let answer = prompter.ask_until(&question, |answer| {
            if bye_free && answer.eq_ignore_ascii_case("bye") {
                return Ok(Answer::Bye);
            }
            lookup(session, &open, answer)
                .map(Answer::Pick)
                .ok_or_else(|| format!("Please answer one of: {}.", listed.join(", ")))
        })?;
        match answer {
            None => return Ok(None),
            Some(Answer::Bye) => {
                bye_free = false;
                pairs.push((first, None));
            }
            Some(Answer::Pick(other)) => {
                open.retain(|&id| id != other);
                pairs.push((first, Some(other)));
            }
            Some(_) => unreachable!("pairing prompt yields a pick or a bye"),
        }
    }
    Ok(Some(pairs))
}
