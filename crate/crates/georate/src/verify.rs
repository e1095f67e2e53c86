//! Acceptance checklist.
