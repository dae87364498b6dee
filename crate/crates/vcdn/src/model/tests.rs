use super::*;

pub fn minimal_scenario_json() -> &'static str {
    r#"{
        "nodes": [0, 1],
        "links": [
            {"from": 1, "to": 0, "capacity": 100},
            {"from": 0, "to": 1, "capacity": 100}
        ],
        "servers": [{"node": 1, "storage_capacity": 50, "stream_capacity": 200}],
        "client_groups": [0],
        "vcdns": [{"id": 0, "size": 10, "origin": 1}],
        "demands": [{"client": 0, "vcdn": 0, "throughput": 40}],
        "cost_policy": {"mode": "hop-distance-times-size"}
    }"#
}

#[test]
fn parse_minimal_scenario() {
    let s = Scenario::parse(minimal_scenario_json()).unwrap();
    assert_eq!(s.servers.len(), 1);
    assert_eq!(s.client_groups.len(), 1);
    assert_eq!(s.vcdns.len(), 1);
    assert_eq!(s.demands[0].throughput, Rat::int(40));
}

#[test]
fn dangling_origin_rejected() {
    let text = minimal_scenario_json().replace(r#""origin": 1"#, r#""origin": 9"#);
    let err = Scenario::parse(&text).unwrap_err();
    assert!(matches!(err, ModelError::DanglingReference(_)), "{err}");
}

#[test]
fn unknown_key_rejected() {
    let text = minimal_scenario_json().replace(r#""nodes""#, r#""bogus": 1, "nodes""#);
    assert!(matches!(Scenario::parse(&text), Err(ModelError::Schema(_))));
}

#[test]
fn disconnected_graph_rejected() {
    let text = r#"{
        "nodes": [0, 1, 2],
        "links": [
            {"from": 0, "to": 1, "capacity": 10},
            {"from": 1, "to": 0, "capacity": 10}
        ],
        "servers": [
            {"node": 1, "storage_capacity": 50, "stream_capacity": 200},
            {"node": 2, "storage_capacity": 50, "stream_capacity": 200}
        ],
        "client_groups": [0],
        "vcdns": [{"id": 0, "size": 10, "origin": 1}],
        "demands": []
    }"#;
    assert!(matches!(Scenario::parse(text), Err(ModelError::Disconnected)));
}

#[test]
fn round_trip_preserves_scenario() {
    let s = Scenario::parse(minimal_scenario_json()).unwrap();
    let back = Scenario::parse(&s.to_json()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn warnings_flag_unsatisfiable_demand() {
    let mut s = Scenario::parse(minimal_scenario_json()).unwrap();
    s.servers[0].stream_capacity = Rat::int(30);
    let warnings = validate_solution_inputs(&s);
    assert!(warnings.iter().any(|w| w.contains("demand unsatisfiable")), "{warnings:?}");
}

#[test]
fn warnings_empty_for_zero_demand() {
    let mut s = Scenario::parse(minimal_scenario_json()).unwrap();
    for d in &mut s.demands {
        d.throughput = Rat::zero();
    }
    assert!(validate_solution_inputs(&s).is_empty());
}

#[test]
fn warnings_empty_when_some_server_has_slack() {
    // One server short of the 40 Mbps demand, another with slack.
    let text = r#"{
        "nodes": [0, 1, 2],
        "links": [
            {"from": 0, "to": 1, "capacity": 10},
            {"from": 1, "to": 0, "capacity": 10},
            {"from": 0, "to": 2, "capacity": 100},
            {"from": 2, "to": 0, "capacity": 100}
        ],
        "servers": [
            {"node": 1, "storage_capacity": 50, "stream_capacity": 10},
            {"node": 2, "storage_capacity": 50, "stream_capacity": 100}
        ],
        "client_groups": [0],
        "vcdns": [{"id": 0, "size": 10, "origin": 1}],
        "demands": [{"client": 0, "vcdn": 0, "throughput": 40}]
    }"#;
    let s = Scenario::parse(text).unwrap();
    assert!(validate_solution_inputs(&s).is_empty());
}

#[test]
fn three_tier_minimal_layering() {
    let s = gen_three_tier(1, 1, 1, 0, (50, 100)).unwrap();
    assert_eq!(s.nodes.len(), 3);
    // Two inter-layer undirected links, stored as four directed entries.
    assert_eq!(s.links.len(), 4);
    assert_eq!(s.client_groups.len(), 1);
    assert_eq!(s.servers.len(), 2);
}

#[test]
fn generators_are_deterministic() {
    let a = gen_three_tier(6, 3, 2, 42, (50, 150)).unwrap();
    let b = gen_three_tier(6, 3, 2, 42, (50, 150)).unwrap();
    assert_eq!(a, b);
    let c = gen_erdos_renyi(20, 30, 7, (50, 150)).unwrap();
    let d = gen_erdos_renyi(20, 30, 7, (50, 150)).unwrap();
    assert_eq!(c, d);
    assert_ne!(c, gen_erdos_renyi(20, 30, 8, (50, 150)).unwrap());
}

#[test]
fn erdos_renyi_exact_counts() {
    let s = gen_erdos_renyi(100, 200, 1, (50, 150)).unwrap();
    assert_eq!(s.nodes.len(), 100);
    assert_eq!(s.links.len(), 400);
    assert!(s.is_connected());
    let s = gen_erdos_renyi(2, 1, 0, (50, 150)).unwrap();
    assert_eq!(s.links.len(), 2);
}

#[test]
fn erdos_renyi_edge_count_bounds() {
    assert!(gen_erdos_renyi(10, 8, 0, (50, 150)).is_err());
    assert!(gen_erdos_renyi(10, 46, 0, (50, 150)).is_err());
}

#[test]
fn generated_scenarios_round_trip() {
    for seed in 0..5 {
        let s = gen_three_tier(8, 4, 2, seed, (50, 150)).unwrap();
        assert_eq!(Scenario::parse(&s.to_json()).unwrap(), s);
        let s = gen_erdos_renyi(15, 25, seed, (50, 150)).unwrap();
        assert_eq!(Scenario::parse(&s.to_json()).unwrap(), s);
    }
}

#[test]
fn attachment_prefers_explicit_then_nearest() {
    let mut s = Scenario::parse(minimal_scenario_json()).unwrap();
    assert_eq!(s.attachment_server(NodeId(0)), Some(NodeId(1)));
    s.cost_policy.attachments.push(Attachment { client: NodeId(0), server: NodeId(1) });
    assert_eq!(s.attachment_server(NodeId(0)), Some(NodeId(1)));
}

#[test]
fn default_migration_cost_is_size_times_hops() {
    let s = gen_three_tier(2, 2, 1, 3, (50, 150)).unwrap();
    let f = &s.vcdns[0];
    assert_eq!(s.migration_cost(f.origin, f.id), Rat::zero());
    let other = s.servers.iter().map(|x| x.node).find(|&n| n != f.origin).unwrap();
    let hops = s.hop_distances(f.origin)[&other];
    assert_eq!(s.migration_cost(other, f.id), f.size * Rat::int(hops as i64));
}

#[test]
fn restrict_vcdns_drops_demands() {
    let s = gen_three_tier(6, 3, 2, 42, (50, 150)).unwrap();
    let r = s.restrict_vcdns(3);
    assert_eq!(r.vcdns.len(), 3);
    assert!(r.demands.iter().all(|d| d.vcdn.0 < 3));
    r.validate().unwrap();
}
