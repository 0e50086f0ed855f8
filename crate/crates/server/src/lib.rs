//! HTTP/WebSocket service and command-line front end for `ndswarm`.

pub mod api;
pub mod cli;
