use std::fmt;
use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Doppler,
    Eit,
    Pump,
    MwInit,
    Excite,
    HeraldSuccess,
    HeraldFail,
    Convert,
    Gate,
    Measure,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::Doppler => "doppler",
            EventKind::Eit => "eit",
            EventKind::Pump => "pump",
            EventKind::MwInit => "mw_init",
            EventKind::Excite => "excite",
            EventKind::HeraldSuccess => "herald_success",
            EventKind::HeraldFail => "herald_fail",
            EventKind::Convert => "convert",
            EventKind::Gate => "gate",
            EventKind::Measure => "measure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub payload: String,
}

/// Timed record of one trial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventTrace {
    pub events: Vec<Event>,
}

impl EventTrace {
    /// Appends an event; times must not go backwards.
    pub fn push(&mut self, time: f64, kind: EventKind, payload: String) {
        debug_assert!(self.events.last().is_none_or(|e| e.time <= time), "event times went backwards");
        self.events.push(Event { time, kind, payload });
    }

    pub fn is_ordered(&self) -> bool {
        self.events.windows(2).all(|w| w[0].time <= w[1].time)
            && self.events.iter().filter(|e| e.kind == EventKind::HeraldSuccess).count() <= 1
    }

    /// `time_s,kind,payload` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time_s,kind,payload")?;
        for e in &self.events {
            writeln!(w, "{:.9},{},{}", e.time, e.kind, e.payload)?;
        }
        Ok(())
    }
}
