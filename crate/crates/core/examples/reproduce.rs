//! The reproduction table, driven from the library.
//!
//!     cargo run --release --example reproduce

use cheatlab::report::{render_text, reproduce, Suite};
use cheatlab::solver::SolverOptions;

fn main() -> cheatlab::Result<()> {
    let rows = reproduce(Suite::Quick, &SolverOptions::ipm())?;
    print!("{}", render_text(&rows));
    Ok(())
}
