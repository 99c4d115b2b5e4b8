use std::io::Write;

use multidiff_core::net::{empirical_degree_distribution, generate_er, generate_regular, load_network};
use multidiff_core::sim::stream_rng;
use multidiff_core::Error;

#[test]
fn saved_network_loads_back() {
    let mut rng = stream_rng(4, 0);
    let net = generate_regular(300, 3, &mut rng).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    net.save(&path).unwrap();
    let back = load_network(&path).unwrap();
    assert_eq!(back.n_edges(), net.n_edges());
    // a random 3-regular graph of this size is connected with overwhelming probability
    assert_eq!(back.n_nodes(), 300);
    let mut a: Vec<(String, String)> = net.edges().map(|(u, v)| (net.id(u), net.id(v))).collect();
    let mut b: Vec<(String, String)> = back
        .edges()
        .map(|(u, v)| {
            let (x, y) = (back.id(u), back.id(v));
            let (x, y) = if x.parse::<usize>().unwrap() < y.parse::<usize>().unwrap() { (x, y) } else { (y, x) };
            (x, y)
        })
        .collect();
    for e in a.iter_mut() {
        if e.0.parse::<usize>().unwrap() > e.1.parse::<usize>().unwrap() {
            *e = (e.1.clone(), e.0.clone());
        }
    }
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn loader_keeps_the_largest_component() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edges.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# comment").unwrap();
    writeln!(f, "alice bob\nbob\tcarol\n  carol alice\nalice alice\nbob alice\n\ndave erin").unwrap();
    drop(f);
    let net = load_network(&path).unwrap();
    assert_eq!(net.n_nodes(), 3);
    assert_eq!(net.n_edges(), 3);
    let mut ids: Vec<String> = (0..3).map(|i| net.id(i)).collect();
    ids.sort();
    assert_eq!(ids, ["alice", "bob", "carol"]);
    let dd = empirical_degree_distribution(&net);
    assert_eq!(dd.k_max, 2);
    assert!((dd.mean_degree - 2.0).abs() < 1e-12);
}

#[test]
fn loader_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    assert!(matches!(load_network(&empty), Err(Error::EmptyInput)));
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n3\n").unwrap();
    assert!(matches!(load_network(&bad), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(load_network(dir.path().join("missing.txt")), Err(Error::Io(_))));
}

#[test]
fn generated_graphs_are_simple() {
    let mut rng = stream_rng(8, 1);
    for net in [generate_er(500, 6.0, &mut rng).unwrap(), generate_regular(500, 6, &mut rng).unwrap()] {
        for i in 0..net.n_nodes() {
            let nb = net.neighbors(i);
            assert!(!nb.contains(&i));
            let mut sorted = nb.to_vec();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), nb.len());
            for &j in nb {
                assert!(net.neighbors(j).contains(&i));
            }
        }
    }
    assert!(matches!(generate_regular(7, 3, &mut rng), Err(Error::Parity { .. })));
}
