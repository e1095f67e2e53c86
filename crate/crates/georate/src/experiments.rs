//! Verification harnesses (experiment runners).
