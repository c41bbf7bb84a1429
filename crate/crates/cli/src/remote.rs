//! HTTP client side of login, push and pull.

use reqwest::blocking::{Client, Response};
use reqwest::header::{AUTHORIZATION, CONTENT_TYPE};

use crate::CliError;

fn url(server: &str, path: &str) -> String {
    format!("{}{path}", server.trim_end_matches('/'))
}

fn client() -> Client {
    Client::new()
}

fn transport(e: reqwest::Error) -> CliError {
    CliError::Transport(e.to_string())
}

/// Turns non-2xx answers into errors carrying status and body.
fn checked(resp: Response) -> Result<Response, CliError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp);
    }
    let body = resp.text().unwrap_or_default();
    Err(CliError::Http { status: status.as_u16(), body })
}

fn json_field(resp: Response, field: &str) -> Result<String, CliError> {
    let text = resp.text().map_err(transport)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Transport(format!("unexpected reply {text:?}: {e}")))?;
    value[field]
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| CliError::Transport(format!("reply has no {field:?}: {text}")))
}

pub fn login(server: &str, author: &str) -> Result<String, CliError> {
    let body = serde_json::json!({ "author": author }).to_string();
    let resp = client()
        .post(url(server, "/v1/sessions"))
        .header(CONTENT_TYPE, "application/json")
        .body(body)
        .send()
        .map_err(transport)?;
    json_field(checked(resp)?, "token")
}

pub fn push(server: &str, token: &str, bytes: Vec<u8>) -> Result<String, CliError> {
    let resp = client()
        .post(url(server, "/v1/artworks"))
        .header(AUTHORIZATION, format!("Bearer {token}"))
        .header(CONTENT_TYPE, "application/octet-stream")
        .body(bytes)
        .send()
        .map_err(transport)?;
    json_field(checked(resp)?, "artwork_id")
}

pub fn pull(server: &str, token: Option<&str>, id: &str) -> Result<Vec<u8>, CliError> {
    let mut req = client().get(url(server, &format!("/v1/artworks/{id}")));
    if let Some(t) = token {
        req = req.header(AUTHORIZATION, format!("Bearer {t}"));
    }
    let resp = checked(req.send().map_err(transport)?)?;
    Ok(resp.bytes().map_err(transport)?.to_vec())
}
