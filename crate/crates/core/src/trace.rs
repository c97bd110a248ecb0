//! Recording and checking the order of user-application callbacks.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CallbackTag {
    ConstructGeometry,
    InitGeometry,
    GeneratePrimaries,
    BeginEvent,
    BeginPrimary,
    PreTrack,
    Stepping,
    PostTrack,
    FinishPrimary,
    FinishEvent,
}

impl fmt::Display for CallbackTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("callback trace violates the run grammar at position {position}: {message}")]
pub struct TraceError {
    pub position: usize,
    pub message: String,
}

/// The ordered callbacks of one run.
///
/// A valid trace is
///
/// ```text
/// run     := ConstructGeometry InitGeometry event*
/// event   := GeneratePrimaries BeginEvent primary* FinishEvent
/// primary := BeginPrimary track+ FinishPrimary
/// track   := PreTrack Stepping+ PostTrack
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallbackTrace {
    tags: Vec<CallbackTag>,
}

impl CallbackTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, tag: CallbackTag) {
        self.tags.push(tag);
    }

    pub fn tags(&self) -> &[CallbackTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn count(&self, tag: CallbackTag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        Parser {
            tags: &self.tags,
            pos: 0,
        }
        .run()
    }
}

impl From<Vec<CallbackTag>> for CallbackTrace {
    fn from(tags: Vec<CallbackTag>) -> Self {
        Self { tags }
    }
}

struct Parser<'a> {
    tags: &'a [CallbackTag],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<CallbackTag> {
        self.tags.get(self.pos).copied()
    }

    fn expect(&mut self, tag: CallbackTag) -> Result<(), TraceError> {
        match self.peek() {
            Some(t) if t == tag => {
                self.pos += 1;
                Ok(())
            }
            found => Err(TraceError {
                position: self.pos,
                message: format!("expected {tag}, found {found:?}"),
            }),
        }
    }

    fn run(mut self) -> Result<(), TraceError> {
        use CallbackTag::*;
        self.expect(ConstructGeometry)?;
        self.expect(InitGeometry)?;
        while self.peek().is_some() {
            self.expect(GeneratePrimaries)?;
            self.expect(BeginEvent)?;
            while self.peek() == Some(BeginPrimary) {
                self.pos += 1;
                self.track()?;
                while self.peek() == Some(PreTrack) {
                    self.track()?;
                }
                self.expect(FinishPrimary)?;
            }
            self.expect(FinishEvent)?;
        }
        Ok(())
    }

    fn track(&mut self) -> Result<(), TraceError> {
        use CallbackTag::*;
        self.expect(PreTrack)?;
        self.expect(Stepping)?;
        while self.peek() == Some(Stepping) {
            self.pos += 1;
        }
        self.expect(PostTrack)
    }
}

#[cfg(test)]
mod tests {
    use super::CallbackTag::*;
    use super::*;

    fn check(tags: Vec<CallbackTag>) -> Result<(), TraceError> {
        CallbackTrace::from(tags).validate()
    }

    #[test]
    fn accepts_runs() {
        assert!(check(vec![ConstructGeometry, InitGeometry]).is_ok());
        assert!(check(vec![
            ConstructGeometry,
            InitGeometry,
            GeneratePrimaries,
            BeginEvent,
            FinishEvent,
            GeneratePrimaries,
            BeginEvent,
            BeginPrimary,
            PreTrack,
            Stepping,
            Stepping,
            PostTrack,
            PreTrack,
            Stepping,
            PostTrack,
            FinishPrimary,
            FinishEvent,
        ])
        .is_ok());
    }

    #[test]
    fn rejects_malformed() {
        assert!(check(vec![InitGeometry, ConstructGeometry]).is_err());
        // BeginEvent before GeneratePrimaries
        assert!(check(vec![
            ConstructGeometry,
            InitGeometry,
            BeginEvent,
            GeneratePrimaries,
            FinishEvent
        ])
        .is_err());
        // track without steps
        assert!(check(vec![
            ConstructGeometry,
            InitGeometry,
            GeneratePrimaries,
            BeginEvent,
            BeginPrimary,
            PreTrack,
            PostTrack,
            FinishPrimary,
            FinishEvent,
        ])
        .is_err());
        // primary bracket without tracks
        let err = check(vec![
            ConstructGeometry,
            InitGeometry,
            GeneratePrimaries,
            BeginEvent,
            BeginPrimary,
            FinishPrimary,
            FinishEvent,
        ])
        .unwrap_err();
        assert_eq!(err.position, 5);
        // truncated event
        assert!(check(vec![ConstructGeometry, InitGeometry, GeneratePrimaries, BeginEvent]).is_err());
    }
}
