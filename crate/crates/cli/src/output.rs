use std::io::{self, Write};

use serde::Serialize;

pub const TOOL: &str = "trinomial";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every emitted JSON record starts with the tool name and version.
#[derive(Serialize)]
pub struct Stamped<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    #[serde(flatten)]
    pub body: T,
}

pub fn json_line<W: Write, T: Serialize>(out: &mut W, command: &str, body: T) -> io::Result<()> {
    let record = Stamped {
        tool: TOOL,
        version: VERSION,
        command,
        body,
    };
    serde_json::to_writer(&mut *out, &record)?;
    writeln!(out)
}
