use std::process::ExitCode;

use gesto_service::{serve, ServerConfig, Store};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_target(false)
        .init();

    let config = match ServerConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let (store, recovery) = match Store::open_with_report(&config.data_dir) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot open store at {}: {e}", config.data_dir.display());
            return ExitCode::from(1);
        }
    };
    tracing::info!(
        records = recovery.records,
        adopted = recovery.adopted,
        dropped = recovery.dropped,
        temp_removed = recovery.temp_files_removed,
        dir = %config.data_dir.display(),
        "store opened"
    );
    let listener = match tokio::net::TcpListener::bind(config.addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("cannot bind {}: {e}", config.addr);
            return ExitCode::from(1);
        }
    };
    tracing::info!(addr = %config.addr, "listening");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match serve(listener, store, shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("server error: {e}");
            ExitCode::from(1)
        }
    }
}
