use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pact_core::check::committee_breaches;
use pact_core::model::ElectionConfig;
use pact_core::monthey;
use pact_core::solver::SolverOptions;
use pact_server::{router, ApiState, ServeOptions};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> (Arc<ApiState>, Router) {
    let state = Arc::new(ApiState::new(monthey::config(), monthey::votes()));
    (state.clone(), router(state, &ServeOptions::default()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

fn committee(outcome: &Value) -> Vec<String> {
    serde_json::from_value(outcome["committee"].clone()).unwrap()
}

fn assert_satisfies(outcome: &Value, config: &ElectionConfig) {
    let members = committee(outcome);
    assert!(committee_breaches(members.iter().map(String::as_str), config).is_empty());
}

fn set_bound(attribute: &str, category: &str, bound: Value) -> Value {
    json!({"edits": [{"op": "set_bound", "attribute": attribute, "category": category, "bound": bound}]})
}

#[tokio::test]
async fn election_snapshot() {
    let (_, app) = app();
    let (status, body) = call(&app, "GET", "/election", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["version"], 1);
    assert_eq!(body["config"]["roster"].as_array().unwrap().len(), 28);
    assert_eq!(body["votes"]["A"], 166);
}

#[tokio::test]
async fn outcome_with_reports() {
    let (_, app) = app();
    let (status, body) = call(&app, "GET", "/outcome", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["outcome"]["status"], "OPTIMAL");
    assert_eq!(body["outcome"]["objective"], 1440);
    assert_eq!(body["outcome"]["forced"], json!(["I", "M", "T", "Z"]));
    assert_eq!(body["price"]["price"], 67);
    assert_eq!(body["price"]["price_pct"], 3.4);
    assert_eq!(body["displacement"]["records"].as_array().unwrap().len(), 4);
    assert_satisfies(&body["outcome"], &monthey::config());

    let (_, again) = call(&app, "GET", "/outcome", None).await;
    assert_eq!(body, again);
}

#[tokio::test]
async fn empty_whatif_matches_outcome() {
    let (_, app) = app();
    let (_, outcome) = call(&app, "GET", "/outcome", None).await;
    let (status, whatif) = call(&app, "POST", "/whatif", Some(json!({}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(whatif["outcome"], outcome["outcome"]);
    assert_eq!(whatif["price"], outcome["price"]);
    assert_eq!(whatif["feasibility"]["status"], "FEASIBLE");
}

#[tokio::test]
async fn raising_senior_bound_past_supply_frees_a_seat() {
    let (_, app) = app();
    let request = set_bound("age", "+65", json!({"AT_LEAST": 5}));
    let (status, body) = call(&app, "POST", "/whatif", Some(request)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["feasibility"]["status"], "INFEASIBLE");
    assert_eq!(body["outcome"]["status"], "RELAXED_OPTIMAL");
    let records = body["outcome"]["applied_relaxations"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["action"], "FREE_SEATS");
    assert_eq!(records[0]["old_bound"], json!({"AT_LEAST": 5}));
    assert_eq!(records[0]["new_bound"], json!({"AT_LEAST": 4}));
    assert_eq!(records[0]["freed_seats"], 1);
    // Relaxed back to the original bound, so the original optimum returns.
    assert_eq!(body["outcome"]["objective"], 1440);
    let config: ElectionConfig = serde_json::from_value(body["config"].clone()).unwrap();
    assert_satisfies(
        &body["outcome"],
        &pact_core::solver::relax_until_feasible(&config).unwrap().0,
    );
}

#[tokio::test]
async fn removing_criteria() {
    let (_, app) = app();
    let remove = |attrs: &[&str]| json!({"edits": attrs.iter().map(|a| json!({"op": "remove_criterion", "attribute": a})).collect::<Vec<_>>()});
    // The age criterion alone still forces all four seniors in.
    let (status, body) = call(&app, "POST", "/whatif", Some(remove(&["gender"]))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["outcome"]["objective"], 1440);

    let (_, body) = call(&app, "POST", "/whatif", Some(remove(&["gender", "age", "region"]))).await;
    assert_eq!(body["outcome"]["objective"], 1507);
    assert_eq!(body["price"]["price"], 0);
}

#[tokio::test]
async fn hypothetical_candidate() {
    let (_, app) = app();
    let request = json!({
        "add_candidates": [{
            "candidate": {"candidate_id": "NEW", "display_name": "Newcomer",
                          "attributes": {"gender": "Male", "age": "+65", "region": "Region 3"}},
            "votes": 100
        }]
    });
    let (status, body) = call(&app, "POST", "/whatif", Some(request)).await;
    assert_eq!(status, StatusCode::OK);
    assert!(committee(&body["outcome"]).contains(&"NEW".to_string()));
    assert!(!body["outcome"]["forced"].as_array().unwrap().contains(&json!("NEW")));
}

#[tokio::test]
async fn errors_map_to_status_codes() {
    let (_, app) = app();
    let (status, body) = call(
        &app,
        "POST",
        "/whatif",
        Some(json!({"edits": [{"op": "remove_criterion", "attribute": "height"}]})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "INVALID_EDIT");

    let (status, _) = call(&app, "POST", "/whatif", Some(json!({"edits": "nope"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let mut strict = set_bound("age", "+65", json!({"AT_LEAST": 5}));
    strict["relaxation_policy"] = json!("FAIL");
    let (status, body) = call(&app, "POST", "/whatif", Some(strict)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["deficits"][0]["kind"], "CATEGORY_SHORTFALL");
    assert_eq!(body["deficits"][0]["category"], "+65");
}

#[tokio::test]
async fn tiny_budget_is_unavailable() {
    let state = Arc::new(ApiState::with_options(
        monthey::config(),
        monthey::votes(),
        SolverOptions::default(),
        SolverOptions::with_budget(10),
    ));
    let app = router(state, &ServeOptions::default());
    let (status, body) = call(&app, "POST", "/whatif", Some(json!({}))).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["error"], "NODE_BUDGET_EXCEEDED");
}

#[tokio::test]
async fn whatif_is_stateless() {
    let (_, app) = app();
    let (_, election) = call(&app, "GET", "/election", None).await;
    let (_, outcome) = call(&app, "GET", "/outcome", None).await;
    for request in [
        set_bound("age", "+65", json!({"AT_LEAST": 5})),
        json!({"remove_candidates": ["A", "B"]}),
        json!({"edits": [{"op": "remove_criterion", "attribute": "region"}]}),
    ] {
        let (status, _) = call(&app, "POST", "/whatif", Some(request)).await;
        assert_eq!(status, StatusCode::OK);
    }
    assert_eq!(call(&app, "GET", "/election", None).await.1, election);
    assert_eq!(call(&app, "GET", "/outcome", None).await.1, outcome);
}

#[tokio::test]
async fn parallel_identical_requests_agree() {
    let (_, app) = app();
    let request = json!({"edits": [{"op": "set_bound", "attribute": "region", "category": "Region 3",
                                    "bound": {"AT_LEAST": 4}}]});
    let calls = (0..8).map(|_| {
        let app = app.clone();
        let request = request.clone();
        tokio::spawn(async move { call(&app, "POST", "/whatif", Some(request)).await })
    });
    let mut bodies = Vec::new();
    for handle in calls {
        let (status, body) = handle.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        bodies.push(body);
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[tokio::test]
async fn reload_swaps_snapshot() {
    let (state, app) = app();
    let (_, before) = call(&app, "GET", "/outcome", None).await;
    assert_eq!(before["version"], 1);

    let version = state.reload(monthey::config().without_criteria(), monthey::votes());
    assert_eq!(version, 2);
    let (_, after) = call(&app, "GET", "/outcome", None).await;
    assert_eq!(after["version"], 2);
    assert_eq!(after["outcome"]["objective"], 1507);
}

#[tokio::test]
async fn feasibility_of_a_pool() {
    let (_, app) = app();
    let pool: Vec<_> = monthey::candidates()
        .into_iter()
        .filter(|c| c.candidate_id != "Z")
        .collect();
    let (status, body) = call(&app, "POST", "/feasibility", Some(json!({"pool": pool}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "INFEASIBLE");
    assert_eq!(body["deficits"][0]["category"], "+65");

    let (status, body) = call(
        &app,
        "POST",
        "/feasibility",
        Some(json!({"pool": monthey::candidates()})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "FEASIBLE");
    assert_eq!(body["forced"], json!(["I", "M", "T", "Z"]));

    let stray = json!({"pool": [{"candidate_id": "x", "display_name": "X", "attributes": {}}]});
    let (status, _) = call(&app, "POST", "/feasibility", Some(stray)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn cors_for_configured_origin() {
    let state = Arc::new(ApiState::new(monthey::config(), monthey::votes()));
    let options = ServeOptions {
        cors_origins: vec!["http://localhost:5173".into()],
    };
    let app = router(state, &options);
    let request = Request::builder()
        .uri("/election")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let response = app.oneshot(request).await.unwrap();
    assert_eq!(
        response.headers().get("access-control-allow-origin").unwrap(),
        "http://localhost:5173"
    );
}
