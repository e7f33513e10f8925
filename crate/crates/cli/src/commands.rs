use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use deltaconf::hex::{
    self, check_hex_valid, check_polylines, count_bends, hex_area, ortho_to_hex, parse_polylines,
};
use deltaconf::ortho::{check_ortho_valid, layout_upward_ortho, ortho_area, root_at_leaf};
use deltaconf::radial::{layout_radial_trident, radial_conflicts};
use deltaconf::render::{build_drawing, check_smoothness, parse_svg, LayoutRef};
use deltaconf::tree::{build_delta_tree, validate_tree};
use deltaconf::{
    eliminate, gen_dh_random, max_dh_subgraph_bruteforce, parse_graph, DeltaTree, ExtensionWeights,
    Graph, HexLayout, OrthoLayout, RecognitionError, RenderOptions,
};

use crate::{
    DrawArgs, Failure, LayoutKind, EXIT_GUARD, EXIT_INTERNAL, EXIT_INVALID, EXIT_IO, EXIT_NOT_DH,
};

type CmdResult = Result<(), Failure>;

fn read_input(input: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if input == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(input).map(|t| text = t)
    };
    res.map_err(|e| Failure::new(EXIT_IO, format!("{input}: {e}")))?;
    Ok(text)
}

fn read_graph(input: &str) -> Result<Graph, Failure> {
    parse_graph(&read_input(input)?).map_err(|e| Failure::new(EXIT_IO, format!("{input}: {e}")))
}

fn write_output(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, format!("stdout: {e}"))),
    }
}

fn recognition_failure(e: RecognitionError) -> Failure {
    match e {
        RecognitionError::TooLarge { .. } => Failure::new(EXIT_GUARD, e.to_string()),
        RecognitionError::InvalidSequence(_) => Failure::new(EXIT_INTERNAL, e.to_string()),
        _ => {
            println!("not distance-hereditary");
            Failure::new(EXIT_NOT_DH, e.to_string())
        }
    }
}

fn internal(context: &str, e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_INTERNAL, format!("{context}: {e}"))
}

pub fn recognize(input: &str) -> CmdResult {
    let g = read_graph(input)?;
    let seq = eliminate(&g).map_err(recognition_failure)?;
    print!("{seq}");
    Ok(())
}

fn delta_tree(input: &str) -> Result<(Graph, DeltaTree), Failure> {
    let g = read_graph(input)?;
    let seq = eliminate(&g).map_err(recognition_failure)?;
    let t = build_delta_tree(&g, &seq).map_err(|e| internal("tree construction", e))?;
    Ok((g, t))
}

pub fn tree(input: &str, out: Option<&Path>) -> CmdResult {
    let (_, t) = delta_tree(input)?;
    write_output(out, &t.to_string())
}

fn ensure_empty<T: std::fmt::Display>(what: &str, violations: &[T]) -> CmdResult {
    match violations.first() {
        None => Ok(()),
        Some(first) => Err(internal(
            what,
            format!("{first} ({} violations)", violations.len()),
        )),
    }
}

pub fn draw(args: &DrawArgs) -> CmdResult {
    let opts = RenderOptions {
        cell_size: args.cell_size,
        junction_radius: args.junction_radius,
        labels: args.labels,
        theme: args.theme,
    };
    if !(opts.cell_size > 0.0 && opts.junction_radius > 0.0) {
        return Err(Failure::new(
            EXIT_IO,
            "--cell-size and --junction-radius must be positive",
        ));
    }
    let bound = deltaconf::radial::trident_ratio_bound();
    if args.layout == LayoutKind::Radial && !(args.ratio > 0.0 && args.ratio < bound) {
        return Err(Failure::new(
            EXIT_IO,
            format!("--ratio must lie in (0, {bound:.4})"),
        ));
    }
    if args.layout == LayoutKind::Radial && args.layout_out.is_some() {
        return Err(Failure::new(
            EXIT_IO,
            "--layout-out supports the ortho and hex layouts only",
        ));
    }
    let (g, t) = delta_tree(&args.input)?;
    let mut metrics = vec![
        format!("layout={:?}", args.layout).to_lowercase(),
        format!("vertices={}", g.vertex_count()),
        format!("edges={}", g.edge_count()),
        format!("tree_nodes={}", t.node_count()),
    ];
    let ortho;
    let hex;
    let radial;
    let layout: LayoutRef<'_> = match args.layout {
        LayoutKind::Ortho | LayoutKind::Hex => {
            let rbt = root_at_leaf(&t, None).map_err(|e| internal("rooting", e))?;
            ortho = layout_upward_ortho(&rbt);
            ensure_empty("ortho layout", &check_ortho_valid(&ortho))?;
            metrics.push(format!("ortho_area={}", ortho_area(&ortho)));
            metrics.push(format!("max_edge={}", ortho.max_edge_length()));
            if args.layout == LayoutKind::Ortho {
                write_layout(args.layout_out.as_deref(), &ortho.to_string())?;
                LayoutRef::Ortho(&ortho)
            } else {
                let mut h = hex::resolve_overlaps(&ortho_to_hex(&ortho))
                    .map_err(|e| internal("hex layout", e))?;
                if args.reduce_bends {
                    h = hex::reduce_bends(&h).map_err(|e| internal("bend reduction", e))?;
                }
                ensure_empty("hex layout", &check_hex_valid(&h))?;
                let bends = count_bends(&h).map_err(|e| internal("hex layout", e))?;
                metrics.push(format!(
                    "hex_area={}",
                    hex_area(&h).map_err(|e| internal("hex layout", e))?
                ));
                metrics.push(format!(
                    "bends={} max_bends={}",
                    bends.total, bends.max_per_edge
                ));
                hex = h;
                write_layout(args.layout_out.as_deref(), &hex.to_string())?;
                LayoutRef::Hex(&hex)
            }
        }
        LayoutKind::Radial => {
            radial =
                layout_radial_trident(&t, args.ratio).map_err(|e| internal("radial layout", e))?;
            let conflicts = radial_conflicts(&radial);
            if !conflicts.is_empty() {
                return Err(internal(
                    "radial layout",
                    format!("{} crossing segment pairs", conflicts.len()),
                ));
            }
            LayoutRef::Radial(&radial)
        }
    };
    let drawing = build_drawing(&t, layout, &opts).map_err(|e| internal("render", e))?;
    let crossings = drawing.crossings();
    if !crossings.is_empty() {
        return Err(internal(
            "render",
            format!("{} crossing track pairs", crossings.len()),
        ));
    }
    if !check_smoothness(&drawing.smoothness_paths(), 0.0) {
        return Err(internal(
            "render",
            "a rendered path turns by 90 degrees or more",
        ));
    }
    write_output(args.out.as_deref(), &drawing.to_svg(&opts))?;
    eprintln!("{}", metrics.join(" "));
    Ok(())
}

fn write_layout(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => write_output(Some(p), text),
        None => Ok(()),
    }
}

pub fn gen(n: usize, seed: u64, weights: ExtensionWeights, out: Option<&Path>) -> CmdResult {
    let (g, trace) =
        gen_dh_random(n, seed, weights).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    write_output(out, &format!("{trace}{}", g.to_edge_list()))
}

pub fn maxsub(input: &str, k: usize) -> CmdResult {
    let g = read_graph(input)?;
    match max_dh_subgraph_bruteforce(&g, k) {
        Ok(Some(set)) => {
            let listed: Vec<String> = set.iter().map(ToString::to_string).collect();
            println!("{}", listed.join(" "));
            Ok(())
        }
        Ok(None) => {
            println!("none");
            Ok(())
        }
        Err(e @ RecognitionError::TooLarge { .. }) => Err(Failure::new(EXIT_GUARD, e.to_string())),
        Err(e) => Err(internal("maxsub", e)),
    }
}

enum Artifact {
    Svg,
    Polylines,
    Hex,
    Ortho,
    Tree,
}

fn detect(text: &str) -> Option<Artifact> {
    if text.contains("<svg") {
        return Some(Artifact::Svg);
    }
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))?;
    match first.split_whitespace().next()? {
        "polyline" => Some(Artifact::Polylines),
        "node" if first.contains("u=") => Some(Artifact::Hex),
        "node" => Some(Artifact::Ortho),
        "leaf" | "junction" => Some(Artifact::Tree),
        _ => None,
    }
}

fn strings<T: std::fmt::Display>(v: Vec<T>) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn violations_of(text: &str, tolerance: f64) -> Result<Vec<String>, String> {
    Ok(match detect(text).ok_or("unrecognized file format")? {
        Artifact::Svg => {
            let d = parse_svg(text).map_err(|e| e.to_string())?;
            let mut out: Vec<String> = d
                .crossings()
                .iter()
                .map(|c| {
                    format!(
                        "track crossing between pieces {} and {}",
                        c.first.0, c.second.0
                    )
                })
                .collect();
            if !check_smoothness(&d.smoothness_paths(), tolerance) {
                out.push(format!(
                    "sharp turn: a rendered path turns by {} degrees or more",
                    90.0 - tolerance
                ));
            }
            out
        }
        Artifact::Polylines => strings(check_polylines(
            &parse_polylines(text).map_err(|e| e.to_string())?,
        )),
        Artifact::Hex => strings(check_hex_valid(
            &text.parse::<HexLayout>().map_err(|e| e.to_string())?,
        )),
        Artifact::Ortho => strings(check_ortho_valid(
            &text.parse::<OrthoLayout>().map_err(|e| e.to_string())?,
        )),
        Artifact::Tree => strings(validate_tree(
            &text.parse::<DeltaTree>().map_err(|e| e.to_string())?,
        )),
    })
}

pub fn check(files: &[PathBuf], tolerance: f64) -> CmdResult {
    let mut invalid = false;
    for path in files {
        let name = path.display();
        let text =
            fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{name}: {e}")))?;
        let found = violations_of(&text, tolerance)
            .map_err(|e| Failure::new(EXIT_IO, format!("{name}: {e}")))?;
        if found.is_empty() {
            println!("{name}: ok");
        }
        for v in &found {
            println!("{name}: {v}");
        }
        invalid |= !found.is_empty();
    }
    if invalid {
        Err(Failure::new(EXIT_INVALID, String::new()))
    } else {
        Ok(())
    }
}
