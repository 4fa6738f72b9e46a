use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use linkcensus::census::{census, CensusKind};
use linkcensus::embeddings::fan_embedding;
use linkcensus::Diagram;
use linkcensus_cli::service::{router, Session, GENERATION_HEADER};

struct Harness {
    app: Router,
    session: Arc<Session>,
    _dir: tempfile::TempDir,
    workfile: std::path::PathBuf,
}

fn harness() -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let workfile = dir.path().join("session.json");
    let session = Session::open(workfile.clone()).unwrap();
    Harness { app: router(session.clone()), session, _dir: dir, workfile }
}

impl Harness {
    async fn call(&self, method: &str, uri: &str, body: Option<String>, generation: Option<u64>) -> (StatusCode, String) {
        let mut req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
        if let Some(g) = generation {
            req = req.header(GENERATION_HEADER, g.to_string());
        }
        let resp = self.app.clone().oneshot(req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    async fn json(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (s, text) = self.call(method, uri, body.map(|b| b.to_string()), None).await;
        (s, serde_json::from_str(&text).unwrap())
    }

    async fn put(&self, d: &Diagram) -> Value {
        let (s, text) = self.call("PUT", "/diagram", Some(d.to_json()), None).await;
        assert_eq!(s, StatusCode::OK, "{text}");
        serde_json::from_str(&text).unwrap()
    }
}

#[tokio::test]
async fn census_of_fan_k331() {
    let h = harness();
    let (s, _) = h.call("GET", "/census", None, None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let d = fan_embedding(&[3, 3, 1]).unwrap();
    h.put(&d).await;
    let (s, text) = h.call("GET", "/census?kind=links", None, None).await;
    assert_eq!(s, StatusCode::OK);
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["links"]["total"], 1);
    // same bytes as the library, and so as the CLI
    let (_, both) = h.call("GET", "/census", None, None).await;
    assert_eq!(both, census(&d, CensusKind::Both).unwrap().to_json());
    let (s, _) = h.call("GET", "/census?kind=everything", None, None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn diagram_roundtrip_and_workfile() {
    let h = harness();
    let d = fan_embedding(&[4, 4]).unwrap();
    let put = h.put(&d).await;
    assert_eq!(put["generation"], 1);
    let (s, text) = h.call("GET", "/diagram", None, None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(text, d.to_json());
    assert_eq!(std::fs::read_to_string(&h.workfile).unwrap(), d.to_json());
    // a fresh session on the same file resumes it
    let again = Session::open(h.workfile.clone()).unwrap();
    let (s, text) = Harness { app: router(again.clone()), session: again, _dir: tempfile::tempdir().unwrap(), workfile: h.workfile.clone() }
        .call("GET", "/diagram", None, None)
        .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(text, d.to_json());
}

#[tokio::test]
async fn flip_is_an_involution() {
    let h = harness();
    let d = fan_embedding(&[3, 3, 1]).unwrap();
    h.put(&d).await;
    let (_, before) = h.call("GET", "/census", None, None).await;
    let key = serde_json::to_value(d.crossings()[0].key).unwrap();
    let (s, first) = h.json("POST", "/flip", Some(json!({ "key": key }))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(first["generation"], 2);
    let (s, _) = h.json("POST", "/flip", Some(json!({ "key": key }))).await;
    assert_eq!(s, StatusCode::OK);
    let (_, after) = h.call("GET", "/census", None, None).await;
    assert_eq!(before, after);
    let (_, text) = h.call("GET", "/diagram", None, None).await;
    assert_eq!(text, d.to_json());
}

#[tokio::test]
async fn flip_unknown_key_is_404_and_changes_nothing() {
    let h = harness();
    let d = fan_embedding(&[3, 3, 1]).unwrap();
    h.put(&d).await;
    let (s, body) = h.json("POST", "/flip", Some(json!({ "key": { "a": 0, "sa": 0, "b": 1, "sb": 0 } }))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(body["error"], "unknown_crossing");
    assert_eq!(h.session.generation(), 1);
    let (s, _) = h.call("POST", "/flip", Some("{\"nokey\":1}".into()), None).await;
    assert!(s.is_client_error());
}

#[tokio::test]
async fn move_vertex_validates_atomically() {
    let h = harness();
    let d = fan_embedding(&[3, 3, 1]).unwrap();
    h.put(&d).await;
    // onto another vertex: degenerate
    let (x, y) = d.drawing().positions()[1].to_f64();
    let (s, body) = h.json("POST", "/move-vertex", Some(json!({ "id": 0, "x": x, "y": y }))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "degenerate");
    assert!(!body["violations"].as_array().unwrap().is_empty());
    let (_, text) = h.call("GET", "/diagram", None, None).await;
    assert_eq!(text, d.to_json());
    assert_eq!(std::fs::read_to_string(&h.workfile).unwrap(), d.to_json());

    let (s, _) = h.json("POST", "/move-vertex", Some(json!({ "id": 99, "x": 1, "y": 1 }))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, _) = h.json("POST", "/move-vertex", Some(json!({ "id": 0, "x": [1], "y": 1 }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (x0, y0) = d.drawing().positions()[0].to_f64();
    let (s, body) = h.json("POST", "/move-vertex", Some(json!({ "id": 0, "x": format!("{}", x0 + 0.5), "y": y0 }))).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    let (_, text) = h.call("GET", "/diagram", None, None).await;
    assert_ne!(text, d.to_json());
    assert_eq!(std::fs::read_to_string(&h.workfile).unwrap(), text);
}

#[tokio::test]
async fn bad_put_keeps_state() {
    let h = harness();
    let d = fan_embedding(&[3, 3, 1]).unwrap();
    h.put(&d).await;
    let (s, body) = h.json("PUT", "/diagram", Some(json!({ "parts": [3, 3] }))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    let (s, _) = h.call("PUT", "/diagram", Some("not json".into()), None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, text) = h.call("GET", "/diagram", None, None).await;
    assert_eq!(text, d.to_json());
}

#[tokio::test]
async fn stale_generation_is_409() {
    let h = harness();
    let d = fan_embedding(&[3, 3, 1]).unwrap();
    h.put(&d).await;
    let key = serde_json::to_string(&json!({ "key": d.crossings()[0].key })).unwrap();
    let (s, _) = h.call("POST", "/flip", Some(key.clone()), Some(0)).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(h.session.generation(), 1);
    let (s, _) = h.call("POST", "/flip", Some(key), Some(1)).await;
    assert_eq!(s, StatusCode::OK);
    let (s, _) = h.call("POST", "/search", Some("{}".into()), Some(1)).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn link_and_knot_lists() {
    let h = harness();
    h.put(&fan_embedding(&[3, 3, 1]).unwrap()).await;
    let (s, links) = h.json("GET", "/links", None).await;
    assert_eq!(s, StatusCode::OK);
    let links = links.as_array().unwrap();
    assert_eq!(links.iter().filter(|r| r["lk"].as_i64() != Some(0)).count(), 1);
    let (s, knots) = h.json("GET", "/knots", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(knots.is_array());
}

#[tokio::test]
async fn search_installs_best() {
    let h = harness();
    let g = linkcensus::PartiteGraph::new(&[1; 6]).unwrap().into_graph();
    h.put(&linkcensus::embeddings::random_embedding(&g, 5)).await;
    let (s, body) = h.json("POST", "/search", Some(json!({ "objective": "links", "budget": 40, "seed": 1 }))).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    let best = body["search"]["best_score"].as_u64().unwrap();
    assert!(best >= 1);
    assert_eq!(body["search"]["options"]["seed"], 1);
    let (_, report) = h.json("GET", "/census?kind=links", None).await;
    assert_eq!(report["links"]["total"].as_u64(), Some(best));
    let (s, _) = h.json("POST", "/search", Some(json!({ "budget": 0 }))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn mutation_supersedes_running_search() {
    let h = Arc::new(harness());
    let g = linkcensus::PartiteGraph::new(&[1; 7]).unwrap().into_graph();
    let d = linkcensus::embeddings::random_embedding(&g, 9);
    h.put(&d).await;
    let runner = h.clone();
    let search = tokio::spawn(async move { runner.json("POST", "/search", Some(json!({ "budget": 1_000_000_000i64 }))).await });
    tokio::time::sleep(std::time::Duration::from_millis(300)).await;
    let key = json!({ "key": d.crossings()[0].key });
    let (s, _) = h.json("POST", "/flip", Some(key)).await;
    assert_eq!(s, StatusCode::OK);
    let (s, body) = tokio::time::timeout(std::time::Duration::from_secs(60), search).await.unwrap().unwrap();
    assert_eq!(s, StatusCode::CONFLICT, "{body}");
    assert_eq!(body["error"], "superseded");
    assert_eq!(h.session.generation(), 2);
}
