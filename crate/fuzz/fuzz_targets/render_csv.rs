//! CSV tables from untrusted input, rendered to SVG.

#![no_main]

use impatience::csv::Table;
use impatience::svg::{render_svg, Style};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = Table::parse(text) else { return };
    let reparsed = Table::parse(&table.to_csv()).expect("written table parses");
    assert_eq!(reparsed.columns(), table.columns());
    if let Ok(svg) = render_svg(&table, &Style::default()) {
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
});
