use dynwalk::catalog::{all_graphs, connected_graphs};

#[test]
fn eight_vertex_classes() {
    let all = all_graphs(8).unwrap();
    assert_eq!(all.len(), 12346);
    assert_eq!(connected_graphs(8).unwrap().len(), 11117);
    assert_eq!(all.iter().map(|g| g.m()).max(), Some(28));
}
