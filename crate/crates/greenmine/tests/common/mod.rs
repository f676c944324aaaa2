//! Shared helpers for the integration test targets.

pub mod fixture_server;
pub mod oracle;
