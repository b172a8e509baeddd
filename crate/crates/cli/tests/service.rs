use axum::body::Body;
use axum::http::{Request, StatusCode};
use goldsand_cli::service::{router, AppState, Session};
use serde_json::{json, Value};
use tower::ServiceExt;

fn arrangement(kind: &str, max_level: u32, sand: &[(u32, &str, f64)]) -> Value {
    json!({
        "kind": kind,
        "maxLevel": max_level,
        "sand": sand.iter().map(|(l, p, a)| json!({ "level": l, "path": p, "amount": a })).collect::<Vec<_>>(),
    })
}

async fn call(state: &AppState, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(state: &AppState, body: Value) -> (StatusCode, Value) {
    call(state, "POST", "/v1/sessions", Some(body)).await
}

fn symmetric_pair() -> Value {
    arrangement("property_b", 2, &[(2, "1", 1.0), (2, "2", 1.0)])
}

#[tokio::test]
async fn value_endpoint_reports_one_for_four_fresh_level_three_chips() {
    let state = AppState::default();
    let (status, v) =
        call(&state, "POST", "/v1/value", Some(json!({ "arrangement": arrangement("property_b", 3, &[(3, "0", 4.0)]) })))
            .await;
    assert_eq!(status, StatusCode::OK);
    assert!((v["e"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{v}");
    assert!((v["pStar"].as_f64().unwrap() - 0.5).abs() < 1e-6, "{v}");
}

#[tokio::test]
async fn human_pusher_running_path_one_unit_gets_tau_two() {
    let state = AppState::default();
    let (status, created) = create(&state, json!({ "kind": "property_b", "arrangement": symmetric_pair(), "humanRole": "Pusher" })).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["sessionId"].as_str().unwrap().to_string();
    assert_eq!(created["session"]["turn"], "pusher");

    let split = json!({ "split": [{ "level": 2, "path": "1", "amount": 1.0 }] });
    let (status, moved) = call(&state, "POST", &format!("/v1/sessions/{id}/move"), Some(split)).await;
    assert_eq!(status, StatusCode::OK, "{moved}");
    assert_eq!(moved["move"]["engine"], json!({ "role": "remover", "tau": 2 }));
    assert_eq!(moved["move"]["round"]["harvested"], 0.0);
    assert_eq!(moved["session"]["harvested"], 0.0);

    let (status, view) = call(&state, "GET", &format!("/v1/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["rounds"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn remover_hint_after_all_run_split_on_symmetric_arrangement_is_tau_one() {
    let state = AppState::default();
    let body = json!({ "arrangement": symmetric_pair(), "humanRole": "Remover", "pusherPolicy": "all-run" });
    let (status, created) = create(&state, body).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["sessionId"].as_str().unwrap();
    assert_eq!(created["session"]["turn"], "remover");
    assert_eq!(created["session"]["pendingSplit"].as_array().unwrap().len(), 2);
    let (status, hint) = call(&state, "POST", &format!("/v1/sessions/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::OK, "{hint}");
    assert_eq!(hint["tau"], 1);
}

#[tokio::test]
async fn finished_session_rejects_moves_with_conflict() {
    let state = AppState::default();
    // One level-1 chip on each live path: the human Remover answers the
    // engine's all-run split, after which only level-0 sand can remain.
    let x = arrangement("property_b", 1, &[(1, "1", 1.0), (1, "2", 1.0)]);
    let (status, created) = create(&state, json!({ "arrangement": x, "humanRole": "remover", "pusherPolicy": "all-run" })).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["sessionId"].as_str().unwrap();
    let (status, moved) = call(&state, "POST", &format!("/v1/sessions/{id}/move"), Some(json!({ "tau": 1 }))).await;
    assert_eq!(status, StatusCode::OK, "{moved}");
    assert_eq!(moved["session"]["status"], "finished");
    assert_eq!(moved["session"]["harvested"], 1.0);
    let (status, err) = call(&state, "POST", &format!("/v1/sessions/{id}/move"), Some(json!({ "tau": 1 }))).await;
    assert_eq!(status, StatusCode::CONFLICT, "{err}");
    assert!(err["error"].is_string());
    let (status, _) = call(&state, "POST", &format!("/v1/sessions/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn unknown_and_malformed_sessions() {
    let state = AppState::default();
    let unknown = uuid::Uuid::new_v4();
    let (status, _) = call(&state, "GET", &format!("/v1/sessions/{unknown}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&state, "POST", &format!("/v1/sessions/{unknown}/move"), Some(json!({ "tau": 1 }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&state, "DELETE", &format!("/v1/sessions/{unknown}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&state, "GET", "/v1/sessions/not-a-uuid", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn invalid_moves_are_rejected_and_leave_the_session_untouched() {
    let state = AppState::default();
    let (_, created) = create(&state, json!({ "arrangement": symmetric_pair(), "humanRole": "pusher" })).await;
    let id = created["sessionId"].as_str().unwrap();
    let uri = format!("/v1/sessions/{id}/move");
    let too_much = json!({ "split": [{ "level": 2, "path": "1", "amount": 1.5 }] });
    assert_eq!(call(&state, "POST", &uri, Some(too_much)).await.0, StatusCode::BAD_REQUEST);
    // A human Pusher cannot answer with a label.
    assert_eq!(call(&state, "POST", &uri, Some(json!({ "tau": 1 }))).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&state, "POST", &uri, Some(json!({ "split": [] }))).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&state, "POST", &uri, Some(json!({ "bogus": 1 }))).await.0, StatusCode::BAD_REQUEST);
    let (_, view) = call(&state, "GET", &format!("/v1/sessions/{id}"), None).await;
    assert_eq!(view["rounds"].as_array().unwrap().len(), 0);
    assert_eq!(view["arrangement"], created["session"]["arrangement"]);
}

#[tokio::test]
async fn human_remover_cannot_send_a_split_or_a_foreign_label() {
    let state = AppState::default();
    let (_, created) = create(&state, json!({ "arrangement": symmetric_pair(), "humanRole": "remover" })).await;
    let id = created["sessionId"].as_str().unwrap();
    let uri = format!("/v1/sessions/{id}/move");
    let split = json!({ "split": [{ "level": 2, "path": "1", "amount": 1.0 }] });
    assert_eq!(call(&state, "POST", &uri, Some(split)).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&state, "POST", &uri, Some(json!({ "tau": 3 }))).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn out_of_bounds_and_malformed_requests_are_rejected() {
    let state = AppState::default();
    let deep = arrangement("property_b", 17, &[(17, "0", 1.0)]);
    assert_eq!(create(&state, json!({ "arrangement": deep, "humanRole": "pusher" })).await.0, StatusCode::BAD_REQUEST);
    let empty = arrangement("property_b", 2, &[]);
    assert_eq!(create(&state, json!({ "arrangement": empty, "humanRole": "pusher" })).await.0, StatusCode::BAD_REQUEST);
    let mismatch = json!({ "kind": "list", "arrangement": symmetric_pair(), "humanRole": "pusher" });
    assert_eq!(create(&state, mismatch).await.0, StatusCode::BAD_REQUEST);
    let negative = arrangement("property_b", 2, &[(2, "1", -1.0)]);
    assert_eq!(create(&state, json!({ "arrangement": negative, "humanRole": "pusher" })).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&state, "POST", "/v1/value", Some(json!({ "nope": 1 }))).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn delete_removes_the_session() {
    let state = AppState::default();
    let (_, created) = create(&state, json!({ "arrangement": symmetric_pair(), "humanRole": "pusher" })).await;
    let id = created["sessionId"].as_str().unwrap();
    assert_eq!(call(&state, "DELETE", &format!("/v1/sessions/{id}"), None).await.0, StatusCode::NO_CONTENT);
    assert_eq!(call(&state, "GET", &format!("/v1/sessions/{id}"), None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(state.session_count().await, 0);
}

#[tokio::test]
async fn engine_remover_keeps_the_e_meter_non_increasing() {
    let state = AppState::default();
    let x = arrangement("property_b", 3, &[(3, "0", 3.0), (2, "1", 1.0), (1, "2", 2.0)]);
    let (_, created) = create(&state, json!({ "arrangement": x, "humanRole": "pusher" })).await;
    let id = created["sessionId"].as_str().unwrap().to_string();
    let mut last_e = created["session"]["e"].as_f64().unwrap();
    for _ in 0..10 {
        let (status, hint) = call(&state, "POST", &format!("/v1/sessions/{id}/hint"), None).await;
        if status == StatusCode::CONFLICT {
            break;
        }
        let split = hint["split"].clone();
        if split.as_array().unwrap().is_empty() {
            break;
        }
        let (status, moved) = call(&state, "POST", &format!("/v1/sessions/{id}/move"), Some(json!({ "split": split }))).await;
        assert_eq!(status, StatusCode::OK, "{moved}");
        let round = &moved["move"]["round"];
        let e = round["e"].as_f64().unwrap();
        assert!(e + round["harvested"].as_f64().unwrap() <= last_e + 1e-9, "e rose from {last_e} to {e}");
        last_e = e;
    }
}

#[tokio::test]
async fn snapshots_round_trip_and_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::with_state_dir(dir.path()).unwrap();
    let (_, created) = create(&state, json!({ "arrangement": symmetric_pair(), "humanRole": "remover" })).await;
    let id = created["sessionId"].as_str().unwrap().to_string();
    let (status, _) = call(&state, "POST", &format!("/v1/sessions/{id}/move"), Some(json!({ "tau": 2 }))).await;
    assert_eq!(status, StatusCode::OK);

    let text = std::fs::read_to_string(dir.path().join(format!("{id}.json"))).unwrap();
    let session: Session = serde_json::from_str(&text).unwrap();
    assert_eq!(session.snapshot(), text);

    let (_, before) = call(&state, "GET", &format!("/v1/sessions/{id}"), None).await;
    let restarted = AppState::with_state_dir(dir.path()).unwrap();
    assert_eq!(restarted.session_count().await, 1);
    let (status, after) = call(&restarted, "GET", &format!("/v1/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);

    assert_eq!(call(&restarted, "DELETE", &format!("/v1/sessions/{id}"), None).await.0, StatusCode::NO_CONTENT);
    assert!(!dir.path().join(format!("{id}.json")).exists());
}

#[tokio::test]
async fn replaying_a_session_offline_reproduces_the_engine_replies() {
    let state = AppState::default();
    let x = arrangement("property_b", 3, &[(3, "0", 2.0), (2, "1", 1.0), (2, "2", 0.5)]);
    let (_, created) = create(&state, json!({ "arrangement": x, "humanRole": "remover" })).await;
    let id = created["sessionId"].as_str().unwrap().to_string();
    let mut taus = Vec::new();
    for round in 0..20 {
        let (status, view) = call(&state, "GET", &format!("/v1/sessions/{id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if view["status"] == "finished" {
            break;
        }
        let tau = 1 + round % 2;
        taus.push(tau);
        let (status, moved) = call(&state, "POST", &format!("/v1/sessions/{id}/move"), Some(json!({ "tau": tau }))).await;
        assert_eq!(status, StatusCode::OK, "{moved}");
    }
    let live = state.session(id.parse().unwrap()).await.unwrap().lock().await.clone();

    // Same arrangement, same engine, same human labels: same splits.
    let mut replay =
        Session::new(live.initial.clone(), live.human_role, live.config, live.pusher_policy).unwrap();
    for &tau in &taus {
        replay.human_move(&serde_json::from_value(json!({ "tau": tau })).unwrap()).unwrap();
    }
    assert_eq!(replay.rounds, live.rounds);
    assert_eq!(replay.arrangement, live.arrangement);
}
