use std::fmt;

use super::{lossy, HashError};

/// Timezone offset as written in git person lines (`+HHMM` / `-HHMM`).
///
/// git distinguishes `-0000` from `+0000`, so the sign of a zero offset is
/// kept separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TzOffset {
    minutes: i32,
    negative_zero: bool,
}

impl TzOffset {
    pub const UTC: TzOffset = TzOffset {
        minutes: 0,
        negative_zero: false,
    };

    const MAX_MINUTES: i32 = 99 * 60 + 59;

    pub fn from_minutes(minutes: i32) -> Result<Self, HashError> {
        if minutes.abs() > Self::MAX_MINUTES {
            return Err(HashError::MalformedRecord(format!(
                "timezone offset {minutes} minutes is out of range"
            )));
        }
        Ok(TzOffset {
            minutes,
            negative_zero: false,
        })
    }

    /// The `-0000` offset.
    pub fn negative_utc() -> Self {
        TzOffset {
            minutes: 0,
            negative_zero: true,
        }
    }

    pub fn minutes(&self) -> i32 {
        self.minutes
    }

    pub fn parse(text: &[u8]) -> Result<Self, HashError> {
        let bad = || HashError::MalformedRecord(format!("invalid timezone {:?}", lossy(text)));
        let [sign, h1, h2, m1, m2] = text else {
            return Err(bad());
        };
        let negative = match sign {
            b'+' => false,
            b'-' => true,
            _ => return Err(bad()),
        };
        let digits = [*h1, *h2, *m1, *m2];
        if !digits.iter().all(u8::is_ascii_digit) {
            return Err(bad());
        }
        let d = |i: usize| i32::from(digits[i] - b'0');
        let (hours, mins) = (d(0) * 10 + d(1), d(2) * 10 + d(3));
        if mins >= 60 {
            return Err(bad());
        }
        let total = hours * 60 + mins;
        if negative && total == 0 {
            return Ok(Self::negative_utc());
        }
        Self::from_minutes(if negative { -total } else { total })
    }
}

impl fmt::Display for TzOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.minutes < 0 || self.negative_zero {
            '-'
        } else {
            '+'
        };
        let abs = self.minutes.abs();
        write!(f, "{sign}{:02}{:02}", abs / 60, abs % 60)
    }
}

/// Author, committer or tagger line: `Name <email> <timestamp> <±HHMM>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PersonStamp {
    pub name: Vec<u8>,
    pub email: Vec<u8>,
    pub timestamp: i64,
    pub tz: TzOffset,
}

impl PersonStamp {
    pub fn new(
        name: impl Into<Vec<u8>>,
        email: impl Into<Vec<u8>>,
        timestamp: i64,
        tz: TzOffset,
    ) -> Self {
        PersonStamp {
            name: name.into(),
            email: email.into(),
            timestamp,
            tz,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.name.len() + self.email.len() + 24);
        out.extend_from_slice(&self.name);
        out.extend_from_slice(b" <");
        out.extend_from_slice(&self.email);
        out.extend_from_slice(b"> ");
        out.extend_from_slice(format!("{} {}", self.timestamp, self.tz).as_bytes());
        out
    }

    pub(crate) fn check(&self) -> Result<(), HashError> {
        let forbidden = |b: &u8| matches!(b, b'\n' | b'<' | b'>' | 0);
        if self.name.iter().any(forbidden) || self.email.iter().any(forbidden) {
            return Err(HashError::MalformedRecord(format!(
                "person {:?} contains a newline, NUL or angle bracket",
                lossy(&self.to_bytes())
            )));
        }
        Ok(())
    }

    /// Parses the value of an `author`/`committer`/`tagger` header.
    ///
    /// Only lines that re-serialize to the same bytes are accepted.
    pub fn parse(line: &[u8]) -> Result<Self, HashError> {
        let bad = || HashError::MalformedRecord(format!("invalid person line {:?}", lossy(line)));
        let close = line.iter().rposition(|&b| b == b'>').ok_or_else(bad)?;
        let open = line[..close]
            .iter()
            .rposition(|&b| b == b'<')
            .ok_or_else(bad)?;
        let name = line[..open].strip_suffix(b" ").ok_or_else(bad)?;
        let email = &line[open + 1..close];
        let date = line[close + 1..].strip_prefix(b" ").ok_or_else(bad)?;
        let mut parts = date.splitn(2, |&b| b == b' ');
        let ts = parts.next().ok_or_else(bad)?;
        let tz = parts.next().ok_or_else(bad)?;
        let timestamp: i64 = std::str::from_utf8(ts)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(bad)?;
        let person = PersonStamp::new(name, email, timestamp, TzOffset::parse(tz)?);
        if person.to_bytes() != line {
            return Err(bad());
        }
        Ok(person)
    }
}
