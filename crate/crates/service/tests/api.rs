use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use gesto_core::artwork::{encode, Artwork};
use gesto_service::{router, AppState, Store, CHECKSUM_HEADER, MAX_PAYLOAD_BYTES};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;
use uuid::Uuid;

struct Harness {
    app: Router,
    _dir: tempfile::TempDir,
}

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap()
    }
}

impl Harness {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let app = router(AppState::new(Store::open(dir.path()).unwrap()));
        Self { app, _dir: dir }
    }

    async fn call(&self, method: Method, uri: &str, token: Option<&str>, body: Vec<u8>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        let resp = self.app.clone().oneshot(req.body(Body::from(body)).unwrap()).await.unwrap();
        let status = resp.status();
        let headers = resp.headers().clone();
        let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, headers, body }
    }

    async fn login(&self, author: &str) -> String {
        let body = serde_json::to_vec(&serde_json::json!({ "author": author })).unwrap();
        let req = Request::post("/v1/sessions")
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(body))
            .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        assert_eq!(resp.status(), StatusCode::CREATED);
        let v: Value = serde_json::from_slice(&resp.into_body().collect().await.unwrap().to_bytes()).unwrap();
        v["token"].as_str().unwrap().to_owned()
    }
}

fn artwork(id: u128, author: &str, created_at: i64) -> Vec<u8> {
    encode(&Artwork::new(Uuid::from_u128(id), author, "piece", created_at).unwrap())
}

#[tokio::test]
async fn sessions() {
    let h = Harness::new();
    let a = h.login("a1").await;
    let b = h.login("a1").await;
    assert_eq!(a.len(), 32);
    assert!(a.chars().all(|c| c.is_ascii_hexdigit()));
    assert_ne!(a, b);

    for author in ["", &"x".repeat(65)] {
        let body = serde_json::to_vec(&serde_json::json!({ "author": author })).unwrap();
        let req = Request::post("/v1/sessions").header(header::CONTENT_TYPE, "application/json").body(Body::from(body)).unwrap();
        assert_eq!(h.app.clone().oneshot(req).await.unwrap().status(), StatusCode::BAD_REQUEST);
    }
}

#[tokio::test]
async fn upload_fetch_and_conflict() {
    let h = Harness::new();
    let token = h.login("a1").await;
    let bytes = artwork(7, "a1", 100);

    let r = h.call(Method::POST, "/v1/artworks", Some(&token), bytes.clone()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["artwork_id"], Uuid::from_u128(7).to_string());

    let uri = format!("/v1/artworks/{}", Uuid::from_u128(7));
    let first = h.call(Method::GET, &uri, None, vec![]).await;
    assert_eq!(first.status, StatusCode::OK);
    assert_eq!(first.body, bytes);
    assert_eq!(first.headers[header::CONTENT_TYPE], "application/octet-stream");
    assert_eq!(first.headers[CHECKSUM_HEADER].to_str().unwrap(), format!("{:08x}", crc32fast::hash(&bytes)));
    let second = h.call(Method::GET, &uri, None, vec![]).await;
    assert_eq!(second.body, first.body);

    let again = h.call(Method::POST, "/v1/artworks", Some(&token), bytes).await;
    assert_eq!(again.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn upload_errors() {
    let h = Harness::new();
    let token = h.login("a1").await;
    let bytes = artwork(1, "a1", 0);

    assert_eq!(h.call(Method::POST, "/v1/artworks", None, bytes.clone()).await.status, StatusCode::UNAUTHORIZED);
    assert_eq!(h.call(Method::POST, "/v1/artworks", Some("deadbeef"), bytes.clone()).await.status, StatusCode::UNAUTHORIZED);

    let mut bad = bytes.clone();
    bad[0] = b'X';
    let r = h.call(Method::POST, "/v1/artworks", Some(&token), bad).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert!(r.json()["error"].as_str().unwrap().contains("format error"));

    let r = h.call(Method::POST, "/v1/artworks", Some(&token), bytes[..bytes.len() - 4].to_vec()).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert!(r.json()["error"].as_str().unwrap().contains("corruption at byte"));

    let huge = vec![0u8; MAX_PAYLOAD_BYTES + 1];
    assert_eq!(h.call(Method::POST, "/v1/artworks", Some(&token), huge).await.status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn fetch_unknown() {
    let h = Harness::new();
    let uri = format!("/v1/artworks/{}", Uuid::from_u128(99));
    assert_eq!(h.call(Method::GET, &uri, None, vec![]).await.status, StatusCode::NOT_FOUND);
    assert_eq!(h.call(Method::GET, "/v1/artworks/not-a-uuid", None, vec![]).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn listing_and_pagination() {
    let h = Harness::new();
    let token = h.login("a1").await;
    for (id, t) in [(1, 10), (2, 30), (3, 20)] {
        let r = h.call(Method::POST, "/v1/artworks", Some(&token), artwork(id, if id == 2 { "b" } else { "a1" }, t)).await;
        assert_eq!(r.status, StatusCode::CREATED);
    }

    let all = h.call(Method::GET, "/v1/artworks", None, vec![]).await.json();
    let ids: Vec<_> = all["items"].as_array().unwrap().iter().map(|i| i["artwork_id"].as_str().unwrap().to_owned()).collect();
    assert_eq!(ids, [2, 3, 1].map(|i| Uuid::from_u128(i).to_string()));
    assert!(all["next"].is_null());
    let first = &all["items"][0];
    assert_eq!(first["author"], "b");
    assert_eq!(first["created_at"], 30);
    assert_eq!(first["byte_len"], artwork(2, "b", 30).len());

    let page1 = h.call(Method::GET, "/v1/artworks?limit=2", None, vec![]).await.json();
    assert_eq!(page1["items"].as_array().unwrap().len(), 2);
    let cursor = page1["next"].as_str().unwrap();
    let page2 = h.call(Method::GET, &format!("/v1/artworks?limit=2&after={cursor}"), None, vec![]).await.json();
    let rest: Vec<_> = page2["items"].as_array().unwrap().iter().map(|i| i["artwork_id"].clone()).collect();
    assert_eq!(rest, [Value::from(Uuid::from_u128(1).to_string())]);
    assert!(page2["next"].is_null());

    let mine = h.call(Method::GET, "/v1/artworks?author=a1", None, vec![]).await.json();
    assert_eq!(mine["items"].as_array().unwrap().len(), 2);
    let none = h.call(Method::GET, "/v1/artworks?author=nobody", None, vec![]).await.json();
    assert!(none["items"].as_array().unwrap().is_empty());
    assert!(none["next"].is_null());

    for q in ["limit=0", "limit=101", "limit=x", "after=%%%", "after=bm9wZQ"] {
        let r = h.call(Method::GET, &format!("/v1/artworks?{q}"), None, vec![]).await;
        assert_eq!(r.status, StatusCode::BAD_REQUEST, "{q}");
    }
}

#[tokio::test]
async fn delete_rules_and_health() {
    let h = Harness::new();
    let owner = h.login("a1").await;
    let other = h.login("a2").await;
    let health = |v: Value| v["artworks"].as_u64().unwrap();

    let fresh = h.call(Method::GET, "/v1/health", None, vec![]).await.json();
    assert_eq!(fresh["status"], "ok");
    assert_eq!(health(fresh), 0);

    for id in [1, 2] {
        h.call(Method::POST, "/v1/artworks", Some(&owner), artwork(id, "a1", 0)).await;
    }
    assert_eq!(health(h.call(Method::GET, "/v1/health", None, vec![]).await.json()), 2);

    let uri = format!("/v1/artworks/{}", Uuid::from_u128(1));
    assert_eq!(h.call(Method::DELETE, &uri, None, vec![]).await.status, StatusCode::UNAUTHORIZED);
    assert_eq!(h.call(Method::DELETE, &uri, Some(&other), vec![]).await.status, StatusCode::FORBIDDEN);
    assert_eq!(h.call(Method::GET, &uri, None, vec![]).await.status, StatusCode::OK);
    assert_eq!(h.call(Method::DELETE, &uri, Some(&owner), vec![]).await.status, StatusCode::NO_CONTENT);
    assert_eq!(h.call(Method::GET, &uri, None, vec![]).await.status, StatusCode::NOT_FOUND);
    assert_eq!(h.call(Method::DELETE, &uri, Some(&owner), vec![]).await.status, StatusCode::NOT_FOUND);
    assert_eq!(health(h.call(Method::GET, "/v1/health", None, vec![]).await.json()), 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn parallel_same_id_posts_yield_one_created() {
    let h = std::sync::Arc::new(Harness::new());
    let token = h.login("a1").await;
    let bytes = artwork(42, "a1", 0);
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let (h, token, bytes) = (h.clone(), token.clone(), bytes.clone());
            tokio::spawn(async move { h.call(Method::POST, "/v1/artworks", Some(&token), bytes).await.status })
        })
        .collect();
    let mut statuses = Vec::new();
    for t in tasks {
        statuses.push(t.await.unwrap());
    }
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::CREATED).count(), 1);
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::CONFLICT).count(), 7);
}
