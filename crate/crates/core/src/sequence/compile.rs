use rug::Float;
use serde::{Deserialize, Serialize};

use super::{Delay, Fraction, Level, SequenceSpec};
use crate::mpmatrix::PrecisionContext;
use crate::pauli::Pauli;

/// Free evolution for `delay` minimum intervals, then `pulse`.
///
/// `pulse` is the phase-free product of every pulse applied at zero gap after
/// the delay; `I` means no pulse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub delay: Delay,
    pub pulse: Pauli,
}

/// Snapshot position: after the delay of `events[event]` and the part
/// `partial` of its merged pulse that precedes the checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub j: usize,
    pub event: usize,
    pub partial: Pauli,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub events: Vec<Event>,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Serialize)]
struct ExportedEvent {
    delay_in_tau: String,
    pulse: Pauli,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checkpoint: Vec<ExportedCheckpoint>,
}

#[derive(Serialize)]
struct ExportedCheckpoint {
    j: usize,
    partial: Pauli,
}

impl PulseSchedule {
    pub fn free() -> Self {
        Self {
            events: vec![Event {
                delay: Delay::unit(),
                pulse: Pauli::I,
            }],
            checkpoints: Vec::new(),
        }
    }

    pub fn checkpoint(&self, j: usize) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.j == j)
    }

    /// Sum of all delays, in units of the minimum interval.
    pub fn total_delay(&self, ctx: &PrecisionContext) -> Float {
        let mut acc = Float::new(ctx.bits());
        for e in &self.events {
            acc += e.delay.value::<Float>(ctx);
        }
        acc
    }

    /// JSON array of `{delay_in_tau, pulse, checkpoint?}` with delays printed
    /// to 40 significant digits.
    pub fn to_json(&self) -> String {
        let ctx = PrecisionContext::new(60).expect("valid precision");
        let exported: Vec<ExportedEvent> = self
            .events
            .iter()
            .enumerate()
            .map(|(idx, e)| ExportedEvent {
                delay_in_tau: decimal_string(&e.delay.value::<Float>(&ctx), 40),
                pulse: e.pulse,
                checkpoint: self
                    .checkpoints
                    .iter()
                    .filter(|c| c.event == idx)
                    .map(|c| ExportedCheckpoint { j: c.j, partial: c.partial })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&exported).expect("schedule serializes")
    }
}

/// Positional decimal notation with `sig` significant digits.
fn decimal_string(x: &Float, sig: usize) -> String {
    let (negative, digits, exp) = x.to_sign_string_exp(10, Some(sig));
    let sign = if negative { "-" } else { "" };
    let Some(exp) = exp else {
        return format!("0.{}", "0".repeat(sig - 1));
    };
    let point = exp as isize;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (head, tail) = digits.split_at(point as usize);
        format!("{head}.{tail}")
    };
    format!("{sign}{body}")
}

enum Token {
    Free(Delay),
    Pulse(Pauli),
    Mark(usize),
}

fn expand(levels: &[Level], k: usize, base: &Delay, marks: bool, out: &mut Vec<Token>) {
    let Level { axis, order } = levels[k];
    for j in 1..=order + 1 {
        let d = base.times(Fraction::new(order, j));
        if k == 0 {
            out.push(Token::Free(d));
        } else {
            expand(levels, k - 1, &d, false, out);
        }
        if marks {
            out.push(Token::Mark(j as usize));
        }
        if j <= order {
            out.push(Token::Pulse(axis.pauli()));
        }
    }
    if order % 2 == 1 {
        out.push(Token::Pulse(axis.pauli()));
    }
    if marks {
        out.push(Token::Mark(order as usize + 2));
    }
}

/// Flattens a nested sequence into delay/pulse events.
///
/// Every level of order `N` interleaves `N+1` slots with `N` pulses and
/// appends one more pulse when `N` is odd, so each level returns the frame to
/// the identity. Checkpoints `1..=N+1` sit after each slot of the outermost
/// level (before its pulse); checkpoint `N+2` follows the trailing pulse.
pub fn compile(spec: &SequenceSpec) -> PulseSchedule {
    let levels = spec.levels();
    let mut tokens = Vec::new();
    expand(levels, levels.len() - 1, &Delay::unit(), true, &mut tokens);

    let mut events: Vec<Event> = Vec::new();
    let mut checkpoints = Vec::new();
    for token in tokens {
        match token {
            Token::Free(delay) => events.push(Event { delay, pulse: Pauli::I }),
            Token::Pulse(p) => {
                let last = events.last_mut().expect("sequences start with a free slot");
                last.pulse = p.mul(last.pulse);
            }
            Token::Mark(j) => {
                let event = events.len() - 1;
                checkpoints.push(Checkpoint {
                    j,
                    event,
                    partial: events[event].pulse,
                });
            }
        }
    }
    PulseSchedule { events, checkpoints }
}

/// Number of non-identity merged pulses in the compiled schedule.
pub fn pulse_count(spec: &SequenceSpec) -> usize {
    compile(spec).events.iter().filter(|e| e.pulse != Pauli::I).count()
}
