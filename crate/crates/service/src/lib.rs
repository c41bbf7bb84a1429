//! Persistence service for GSTB artworks: a file-backed store and the
//! HTTP v1 API in front of it.

pub mod api;
pub mod config;
pub mod store;

pub use api::{router, AppState, CHECKSUM_HEADER, MAX_PAYLOAD_BYTES};
pub use config::ServerConfig;
pub use store::{ArtworkRecord, CrashPoint, Recovery, Store, StoreError};

use std::net::SocketAddr;

/// Opens the store and serves until the listener fails or shutdown resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: Store,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let app = router(AppState::new(store));
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

/// Binds an ephemeral local port and serves on a background task.
/// Returns the bound address; the server lives as long as the runtime.
pub async fn spawn_local(store: Store) -> std::io::Result<SocketAddr> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(serve(listener, store, std::future::pending()));
    Ok(addr)
}
