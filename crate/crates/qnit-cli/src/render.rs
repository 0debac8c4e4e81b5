//! Grid rendering for two-particle nit sets.
//!
//! A valid k = 2 nit set tiles the n x n state grid twice over: cell
//! (r, c) holds state (r-1)·n + c, and each partition groups the cells
//! into n blocks of n. ASCII output shows both groupings in one combined
//! grid (block letters for the first partition, bracket styles for the
//! second); SVG output shows three panels — first partition as fill hue,
//! second as hatching, and the combined view layering both — so every
//! one-block-from-each intersection is visibly a single cell.
//!
//! Output is deterministic: byte-identical for identical input.

use qnit::partitions::NitSet;
use qnit::{Error, Result};

const BRACKETS: [(char, char); 6] = [
    ('(', ')'),
    ('[', ']'),
    ('{', '}'),
    ('<', '>'),
    ('|', '|'),
    ('/', '/'),
];

const HUES: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a045", "#e15759", "#b07aa1", "#edc948",
];

const CELL: usize = 40;
const MARGIN: usize = 10;
const GAP: usize = 20;
const TITLE_BAND: usize = 30;

/// The canonicalized set plus per-state block memberships, checked for
/// the k = 2, n <= 6 rendering domain.
struct Grid {
    n: usize,
    /// 0-based first-partition block per state, indexed by state - 1.
    first: Vec<usize>,
    /// 0-based second-partition block per state, indexed by state - 1.
    second: Vec<usize>,
    set: NitSet,
}

fn grid_for(set: &NitSet) -> Result<Grid> {
    set.require_valid()?;
    if set.params.k() != 2 {
        return Err(Error::Unsupported(format!(
            "tessellation needs exactly 2 partitions (a two-particle grid); this set has {}",
            set.params.k()
        )));
    }
    let n = set.params.n() as usize;
    if n > BRACKETS.len() {
        return Err(Error::Unsupported(format!(
            "tessellation styles cover up to {} blocks per partition; this set has {n}",
            BRACKETS.len()
        )));
    }
    let canonical = set.canonicalize();
    let n_states = canonical.params.state_count();
    let first = canonical.partitions[0].membership(n_states)?;
    let second = canonical.partitions[1].membership(n_states)?;
    Ok(Grid {
        n,
        first,
        second,
        set: canonical,
    })
}

fn block_letter(b: usize) -> char {
    char::from(b'A' + b as u8)
}

fn block_list(block: &[u32]) -> String {
    let items: Vec<String> = block.iter().map(u32::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

/// One combined grid: `B(5)` means state 5 lies in first-partition block
/// B and in the second-partition block drawn with `(...)`.
pub fn render_ascii(set: &NitSet) -> Result<String> {
    let grid = grid_for(set)?;
    let n = grid.n;
    let digits = (n * n).to_string().len();
    let mut out = String::new();
    for r in 0..n {
        let mut cells = Vec::with_capacity(n);
        for c in 0..n {
            let state = r * n + c + 1;
            let letter = block_letter(grid.first[state - 1]);
            let (open, close) = BRACKETS[grid.second[state - 1]];
            cells.push(format!("{letter}{open}{state:>digits$}{close}"));
        }
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out.push('\n');
    out.push_str("letters (first partition):\n");
    for (b, block) in grid.set.partitions[0].blocks.iter().enumerate() {
        out.push_str(&format!("  {} = {}\n", block_letter(b), block_list(block)));
    }
    out.push_str("brackets (second partition):\n");
    for (b, block) in grid.set.partitions[1].blocks.iter().enumerate() {
        let (open, close) = BRACKETS[b];
        out.push_str(&format!("  {open}.{close} = {}\n", block_list(block)));
    }
    Ok(out)
}

/// Hatch pattern definitions, one visual texture per block index.
fn pattern_defs() -> String {
    let body: [&str; 6] = [
        r##"<path d="M0 8L8 0" stroke="#000000" stroke-width="1"/>"##,
        r##"<path d="M0 0L8 8" stroke="#000000" stroke-width="1"/>"##,
        r##"<path d="M0 4L8 4" stroke="#000000" stroke-width="1"/>"##,
        r##"<path d="M4 0L4 8" stroke="#000000" stroke-width="1"/>"##,
        r##"<path d="M0 4L8 4" stroke="#000000" stroke-width="1"/><path d="M4 0L4 8" stroke="#000000" stroke-width="1"/>"##,
        r##"<circle cx="4" cy="4" r="1" fill="#000000"/>"##,
    ];
    let mut defs = String::from("<defs>\n");
    for (i, shapes) in body.iter().enumerate() {
        defs.push_str(&format!(
            "<pattern id=\"hatch{}\" patternUnits=\"userSpaceOnUse\" width=\"8\" height=\"8\">{shapes}</pattern>\n",
            i + 1
        ));
    }
    defs.push_str("</defs>\n");
    defs
}

/// Three panels: first partition (fill hue), second partition (hatching),
/// and the combined tiling layering both channels.
pub fn render_svg(set: &NitSet) -> Result<String> {
    let grid = grid_for(set)?;
    let n = grid.n;
    let panel = n * CELL;
    let width = 2 * MARGIN + 3 * panel + 2 * GAP;
    let height = TITLE_BAND + panel + MARGIN;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&pattern_defs());

    let titles = ["first partition", "second partition", "combined"];
    for (panel_index, title) in titles.iter().enumerate() {
        let x0 = MARGIN + panel_index * (panel + GAP);
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\">{title}</text>\n",
            x0
        ));
        svg.push_str(&format!("<g transform=\"translate({x0},{TITLE_BAND})\">\n"));
        for r in 0..n {
            for c in 0..n {
                let state = r * n + c + 1;
                let x = c * CELL;
                let y = r * CELL;
                let hue = HUES[grid.first[state - 1]];
                let hatch = grid.second[state - 1] + 1;
                match panel_index {
                    0 => svg.push_str(&format!(
                        "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{hue}\" stroke=\"#000000\"/>\n"
                    )),
                    1 => svg.push_str(&format!(
                        "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#ffffff\" stroke=\"#000000\"/>\n<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"url(#hatch{hatch})\" stroke=\"none\"/>\n"
                    )),
                    _ => svg.push_str(&format!(
                        "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{hue}\" stroke=\"#000000\"/>\n<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"url(#hatch{hatch})\" stroke=\"none\"/>\n"
                    )),
                }
                svg.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\">{state}</text>\n",
                    x + CELL / 2,
                    y + CELL / 2 + 5
                ));
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
