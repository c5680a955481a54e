//! PD and signed Gauss code import/export.
//!
//! PD records `X[a,b,c,d]` list the four edge labels of a crossing
//! counterclockwise, starting at the incoming under-strand.

use std::collections::BTreeMap;

use crate::diagram::LinkDiagram;
use crate::error::DiagramError;
use crate::map::{rot_next, Dart, PlanarMap, Vertex};

/// Parses a PD code such as `X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]`.
///
/// Records may be separated by `;`, `,` or whitespace and may be wrapped in
/// `PD[...]`.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let records = pd_records(text)?;
    if records.is_empty() {
        return Err(DiagramError::MalformedCode("no crossing records".into()));
    }
    diagram_from_records(&records)
}

fn pd_records(text: &str) -> Result<Vec<[u32; 4]>, DiagramError> {
    let mut s = text.trim();
    if let Some(inner) = s.strip_prefix("PD[").and_then(|r| r.strip_suffix(']')) {
        s = inner;
    }
    let mut records = Vec::new();
    let mut rest = s;
    loop {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ';' || c == ',');
        if rest.is_empty() {
            break;
        }
        let body = rest
            .strip_prefix("X[")
            .ok_or_else(|| DiagramError::MalformedCode(format!("expected X[ at {:?}", head(rest))))?;
        let close = body.find(']').ok_or_else(|| DiagramError::MalformedCode("unterminated record".into()))?;
        let labels: Vec<u32> = body[..close]
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .ok()
                    .filter(|&x| x > 0)
                    .ok_or_else(|| DiagramError::MalformedCode(format!("bad label {:?}", t.trim())))
            })
            .collect::<Result<_, _>>()?;
        if labels.len() != 4 {
            return Err(DiagramError::MalformedCode(format!("crossing record has {} labels", labels.len())));
        }
        records.push([labels[0], labels[1], labels[2], labels[3]]);
        rest = &body[close + 1..];
    }
    Ok(records)
}

fn head(s: &str) -> String {
    s.chars().take(12).collect()
}

fn diagram_from_records(records: &[[u32; 4]]) -> Result<LinkDiagram, DiagramError> {
    let mut occurrences: BTreeMap<u32, Vec<Dart>> = BTreeMap::new();
    for (v, r) in records.iter().enumerate() {
        for (s, &label) in r.iter().enumerate() {
            occurrences.entry(label).or_default().push(4 * v + s);
        }
    }
    let mut twin = vec![0; 4 * records.len()];
    for (&label, darts) in &occurrences {
        if darts.len() != 2 {
            return Err(DiagramError::NonQuadrivalent { label, count: darts.len() });
        }
        twin[darts[0]] = darts[1];
        twin[darts[1]] = darts[0];
    }
    let vertices = vec![Vertex::Crossing { odd_over: true }; records.len()];
    let map = PlanarMap::new(vertices, twin)?;
    map.check_planar()?;
    // slot 0 enters along the under-strand
    let mut hints = vec![None; map.num_darts()];
    for v in 0..records.len() {
        hints[4 * v] = Some(false);
        hints[4 * v + 2] = Some(true);
    }
    let outgoing = crate::diagram::orient_strands(&map, &hints)?;
    LinkDiagram::with_orientation(map, outgoing)
}

/// Serializes a diagram as PD code. Edge labels run consecutively along each
/// oriented component.
pub fn to_pd(d: &LinkDiagram) -> String {
    let map = d.map();
    let mut label = vec![0u32; map.num_darts()];
    let mut next = 1;
    for comp in d.strand_components() {
        for dart in comp {
            label[dart] = next;
            label[map.twin(dart)] = next;
            next += 1;
        }
    }
    (0..map.num_vertices())
        .map(|v| {
            let start = (4 * v..4 * v + 4)
                .find(|&x| !map.is_over(x) && !d.is_outgoing(x))
                .expect("every crossing has an incoming under dart");
            let mut ls = [0; 4];
            let mut x = start;
            for l in ls.iter_mut() {
                *l = label[x];
                x = rot_next(x);
            }
            format!("X[{},{},{},{}]", ls[0], ls[1], ls[2], ls[3])
        })
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct GaussToken {
    over: bool,
    crossing: u32,
    positive: bool,
}

/// Parses a one-component signed Gauss code such as `O1+U2+O3+U1+O2+U3+`.
pub fn parse_gauss(text: &str) -> Result<LinkDiagram, DiagramError> {
    let tokens = gauss_tokens(text)?;
    if tokens.is_empty() {
        return Err(DiagramError::MalformedCode("empty Gauss code".into()));
    }
    let mut seen: BTreeMap<u32, (Option<usize>, Option<usize>, bool)> = BTreeMap::new();
    for (i, t) in tokens.iter().enumerate() {
        let e = seen.entry(t.crossing).or_insert((None, None, t.positive));
        if e.2 != t.positive {
            return Err(DiagramError::MalformedCode(format!("crossing {} has two signs", t.crossing)));
        }
        let slot = if t.over { &mut e.0 } else { &mut e.1 };
        if slot.replace(i).is_some() {
            return Err(DiagramError::MalformedCode(format!("crossing {} repeated", t.crossing)));
        }
    }
    let len = tokens.len();
    // edge k runs from occurrence k to occurrence k+1
    let incoming = |i: usize| ((i + len - 1) % len + 1) as u32;
    let outgoing = |i: usize| (i + 1) as u32;
    let mut records = Vec::new();
    for (&c, &(over, under, positive)) in &seen {
        let (Some(o), Some(u)) = (over, under) else {
            return Err(DiagramError::MalformedCode(format!("crossing {c} occurs once")));
        };
        let (over_in, over_out) = (incoming(o), outgoing(o));
        let (b, d) = if positive { (over_out, over_in) } else { (over_in, over_out) };
        records.push([incoming(u), b, outgoing(u), d]);
    }
    match diagram_from_records(&records) {
        Err(DiagramError::NonPlanar { .. }) => Err(DiagramError::NonRealizable),
        other => other,
    }
}

fn gauss_tokens(text: &str) -> Result<Vec<GaussToken>, DiagramError> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let over = match chars[i].to_ascii_uppercase() {
            'O' => true,
            'U' => false,
            c => return Err(DiagramError::MalformedCode(format!("unexpected {c:?}"))),
        };
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let crossing: u32 = chars[start..i]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| DiagramError::MalformedCode("missing crossing number".into()))?;
        let positive = match chars.get(i) {
            Some('+') => true,
            Some('-') => false,
            _ => return Err(DiagramError::MalformedCode("missing crossing sign".into())),
        };
        i += 1;
        out.push(GaussToken { over, crossing, positive });
    }
    Ok(out)
}

/// Parses PD when the text contains an `X[` record, signed Gauss code otherwise.
pub fn parse_any(text: &str) -> Result<LinkDiagram, DiagramError> {
    if text.contains("X[") {
        parse_pd(text)
    } else {
        parse_gauss(text)
    }
}
