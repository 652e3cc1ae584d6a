use std::collections::HashMap;
use std::f64::consts::PI;

use super::{DomainSpec, ElementOrder, Mesh, TRIANGLE_EDGES};
use crate::{Error, Result};

/// Generates a structured mesh of `spec` with element diameter about
/// `target_h` (never above `2 * target_h`).
///
/// Intervals are split uniformly, rectangles into crossed cells (four
/// triangles around a cell center), and disks/annuli into concentric rings
/// whose node counts follow the ring circumference.
pub fn generate_mesh(spec: DomainSpec, target_h: f64, order: ElementOrder) -> Result<Mesh> {
    spec.validate()?;
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::InvalidMeshParameter(format!("target_h = {target_h}")));
    }
    if target_h > spec.diameter() {
        return Err(Error::InvalidMeshParameter(format!(
            "target_h = {target_h} exceeds the domain diameter {}",
            spec.diameter()
        )));
    }
    let (nodes, cells) = match spec {
        DomainSpec::Interval { a, b } => interval(a, b, target_h),
        DomainSpec::Rectangle { x0, x1, y0, y1 } => crossed_rectangle(x0, x1, y0, y1, target_h),
        DomainSpec::Disk { cx, cy, r } => disk(cx, cy, r, target_h),
        DomainSpec::Annulus { cx, cy, r_in, r_out } => annulus(cx, cy, r_in, r_out, target_h),
    };
    Mesh::new(spec, nodes, cells, order)
}

fn divisions(length: f64, h: f64) -> usize {
    ((length / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn interval(a: f64, b: f64, h: f64) -> (Vec<[f64; 2]>, Vec<usize>) {
    let n = divisions(b - a, h);
    let nodes = (0..=n)
        .map(|i| [a + (b - a) * i as f64 / n as f64, 0.0])
        .collect();
    let cells = (0..n).flat_map(|i| [i, i + 1]).collect();
    (nodes, cells)
}

fn crossed_rectangle(x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> (Vec<[f64; 2]>, Vec<usize>) {
    let nx = divisions(x1 - x0, h);
    let ny = divisions(y1 - y0, h);
    let (dx, dy) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([x0 + dx * i as f64, y0 + dy * j as f64]);
        }
    }
    let corner = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(12 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let c = nodes.len();
            nodes.push([x0 + dx * (i as f64 + 0.5), y0 + dy * (j as f64 + 0.5)]);
            let (a, b, q, d) = (corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1));
            cells.extend_from_slice(&[a, b, c, b, q, c, q, d, c, d, a, c]);
        }
    }
    (nodes, cells)
}

fn ring(cx: f64, cy: f64, r: f64, n: usize) -> impl Iterator<Item = [f64; 2]> {
    (0..n).map(move |k| {
        let t = 2.0 * PI * k as f64 / n as f64;
        [cx + r * t.cos(), cy + r * t.sin()]
    })
}

/// Triangulates the strip between two concentric node rings, both starting at
/// angle zero, by advancing on whichever ring has the smaller next angle.
fn zip_rings(nodes: &[[f64; 2]], inner: &[usize], outer: &[usize], cells: &mut Vec<usize>) {
    let (na, nb) = (inner.len(), outer.len());
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let next_a = (i + 1) as f64 / na as f64;
        let next_b = (j + 1) as f64 / nb as f64;
        let tri = if j == nb || (i < na && next_a < next_b - 1e-12) {
            let t = [inner[i], inner[(i + 1) % na], outer[j % nb]];
            i += 1;
            t
        } else {
            let t = [inner[i % na], outer[(j + 1) % nb], outer[j]];
            j += 1;
            t
        };
        push_ccw(nodes, tri, cells);
    }
}

fn push_ccw(nodes: &[[f64; 2]], t: [usize; 3], cells: &mut Vec<usize>) {
    let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    let area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if area >= 0.0 {
        cells.extend_from_slice(&t);
    } else {
        cells.extend_from_slice(&[t[0], t[2], t[1]]);
    }
}

fn disk(cx: f64, cy: f64, r: f64, h: f64) -> (Vec<[f64; 2]>, Vec<usize>) {
    let nr = divisions(r, h);
    let mut nodes = vec![[cx, cy]];
    let mut cells = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for i in 1..=nr {
        let start = nodes.len();
        nodes.extend(ring(cx, cy, r * i as f64 / nr as f64, 6 * i));
        let cur: Vec<usize> = (start..nodes.len()).collect();
        if i == 1 {
            for k in 0..6 {
                push_ccw(&nodes, [0, cur[k], cur[(k + 1) % 6]], &mut cells);
            }
        } else {
            zip_rings(&nodes, &prev, &cur, &mut cells);
        }
        prev = cur;
    }
    (nodes, cells)
}

fn annulus(cx: f64, cy: f64, r_in: f64, r_out: f64, h: f64) -> (Vec<[f64; 2]>, Vec<usize>) {
    let nr = divisions(r_out - r_in, h);
    let dr = (r_out - r_in) / nr as f64;
    let mut nodes = Vec::new();
    let mut cells = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for i in 0..=nr {
        let radius = r_in + dr * i as f64;
        // even counts keep the rings symmetric under x -> -x and x -> -x, y -> -y
        let mut n = ((2.0 * PI * radius / dr) * (1.0 - 1e-12)).ceil().max(6.0) as usize;
        n += n % 2;
        let start = nodes.len();
        nodes.extend(ring(cx, cy, radius, n));
        let cur: Vec<usize> = (start..nodes.len()).collect();
        if i > 0 {
            zip_rings(&nodes, &prev, &cur, &mut cells);
        }
        prev = cur;
    }
    (nodes, cells)
}

/// Uniform refinement: intervals are bisected and triangles split into four
/// through their edge midpoints. New nodes on curved boundary edges are
/// projected onto the exact circle. Existing node indices are preserved; cell
/// `e` of the input owns children `2e, 2e+1` (1D) or `4e..4e+4` (2D).
pub fn refine(mesh: &Mesh) -> Result<Mesh> {
    let mut nodes = mesh.nodes().to_vec();
    let n_cells = mesh.n_cells();
    let mut cells = Vec::with_capacity(2 * mesh.cells_flat().len() * if mesh.dim() == 1 { 1 } else { 2 });
    if mesh.dim() == 1 {
        for e in 0..n_cells {
            let c = mesh.cell(e);
            let m = nodes.len();
            nodes.push([0.5 * (nodes[c[0]][0] + nodes[c[1]][0]), 0.0]);
            cells.extend_from_slice(&[c[0], m, m, c[1]]);
        }
    } else {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for e in 0..n_cells {
            let c = mesh.cell(e);
            for &(i, j) in &TRIANGLE_EDGES {
                *count.entry((c[i].min(c[j]), c[i].max(c[j]))).or_insert(0) += 1;
            }
        }
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let domain = *mesh.domain();
        for e in 0..n_cells {
            let c = [mesh.cell(e)[0], mesh.cell(e)[1], mesh.cell(e)[2]];
            let mut m = [0usize; 3];
            for (k, &(i, j)) in TRIANGLE_EDGES.iter().enumerate() {
                let key = (c[i].min(c[j]), c[i].max(c[j]));
                m[k] = *midpoint.entry(key).or_insert_with(|| {
                    let (a, b) = (nodes[key.0], nodes[key.1]);
                    let mut x = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                    if count[&key] == 1 {
                        x = domain.project_to_boundary(x);
                    }
                    nodes.push(x);
                    nodes.len() - 1
                });
            }
            // m = [m01, m12, m20]
            cells.extend_from_slice(&[c[0], m[0], m[2]]);
            cells.extend_from_slice(&[m[0], c[1], m[1]]);
            cells.extend_from_slice(&[m[2], m[1], c[2]]);
            cells.extend_from_slice(&[m[0], m[1], m[2]]);
        }
    }
    Mesh::new(*mesh.domain(), nodes, cells, mesh.order())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inscribed_polygon_area(r: f64, n: usize) -> f64 {
        0.5 * n as f64 * r * r * (2.0 * PI / n as f64).sin()
    }

    #[test]
    fn interval_half() {
        let m = generate_mesh(DomainSpec::Interval { a: 0.0, b: 1.0 }, 0.5, ElementOrder::P1)
            .unwrap();
        assert_eq!(m.n_nodes(), 3);
        assert_eq!(m.n_cells(), 2);
        assert_eq!(m.boundary_nodes(), &[0, 2]);
    }

    #[test]
    fn unit_square_area_partition() {
        for h in [0.5, 0.3, 0.1] {
            let m = generate_mesh(DomainSpec::unit_square(), h, ElementOrder::P1).unwrap();
            assert!((m.total_measure() - 1.0).abs() < 1e-12);
            assert!(m.max_diameter() <= 2.0 * h);
        }
    }

    #[test]
    fn disk_area_matches_inscribed_polygon() {
        let m = generate_mesh(DomainSpec::unit_disk(), 0.1, ElementOrder::P1).unwrap();
        // 10 rings, 60 boundary nodes
        assert_eq!(m.boundary_nodes().len(), 60);
        let oracle = inscribed_polygon_area(1.0, 60);
        assert!((m.total_measure() - oracle).abs() < 1e-12);
        assert!((m.total_measure() - PI).abs() < 0.02);
        assert!(m.max_diameter() <= 0.2);
    }

    #[test]
    fn annulus_area_and_boundary() {
        let spec = DomainSpec::Annulus { cx: 0.0, cy: 0.0, r_in: 0.25, r_out: 1.0 };
        let m = generate_mesh(spec, 0.1, ElementOrder::P1).unwrap();
        assert!((m.total_measure() - spec.measure()).abs() < 0.03);
        assert!(m.max_diameter() <= 0.2);
        for &b in m.boundary_nodes() {
            assert!(spec.boundary_distance(m.nodes()[b]) < 1e-12);
        }
        // every node on a circle is a boundary node
        let on_circle = m.nodes().iter().filter(|x| spec.boundary_distance(**x) < 1e-10).count();
        assert_eq!(on_circle, m.boundary_nodes().len());
    }

    #[test]
    fn rejects_bad_parameters() {
        let sq = DomainSpec::unit_square();
        assert!(generate_mesh(sq, 0.0, ElementOrder::P1).is_err());
        assert!(generate_mesh(sq, -1.0, ElementOrder::P1).is_err());
        assert!(generate_mesh(sq, 2.0, ElementOrder::P1).is_err());
        assert!(generate_mesh(DomainSpec::Interval { a: 0.0, b: 0.0 }, 0.1, ElementOrder::P1).is_err());
    }

    #[test]
    fn refine_interval_preserves_nodes() {
        let m = generate_mesh(DomainSpec::Interval { a: 0.0, b: 1.0 }, 0.5, ElementOrder::P1)
            .unwrap();
        let r = refine(&m).unwrap();
        assert_eq!(r.n_cells(), 4);
        assert_eq!(&r.nodes()[..3], m.nodes());
        assert!((r.total_measure() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn refine_square_conserves_area() {
        let m = generate_mesh(DomainSpec::unit_square(), 0.5, ElementOrder::P2).unwrap();
        let r = refine(&m).unwrap();
        assert_eq!(r.n_cells(), 4 * m.n_cells());
        assert!(r.n_nodes() > m.n_nodes());
        assert!((r.total_measure() - m.total_measure()).abs() < 1e-12);
    }

    #[test]
    fn refine_disk_area_increases_toward_pi() {
        let m0 = generate_mesh(DomainSpec::unit_disk(), 0.25, ElementOrder::P1).unwrap();
        let m1 = refine(&m0).unwrap();
        let m2 = refine(&m1).unwrap();
        let (a0, a1, a2) = (m0.total_measure(), m1.total_measure(), m2.total_measure());
        assert!(a0 < a1 && a1 < a2 && a2 < PI, "{a0} {a1} {a2}");
        for &b in m2.boundary_nodes() {
            assert!(m2.domain().boundary_distance(m2.nodes()[b]) < 1e-12);
        }
        // a refined boundary with 4 * 24 = 96 nodes is the inscribed 96-gon
        assert_eq!(m2.boundary_nodes().len(), 96);
        assert!((a2 - PI).abs() < (a0 - PI).abs());
    }
}
