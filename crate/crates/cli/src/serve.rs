use std::net::TcpListener;
use std::time::Duration;

use anyhow::Context;
use ragscope_service::ServiceConfig;
use tracing_subscriber::EnvFilter;

use crate::{CmdResult, ServeArgs};

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}

pub fn cmd_serve(args: &ServeArgs) -> CmdResult {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            EnvFilter::try_from_env("RAGSCOPE_LOG")
                .unwrap_or_else(|_| EnvFilter::new("info,tower_http=debug")),
        )
        .init();

    let addr = format!("{}:{}", args.host, args.port);
    let listener = TcpListener::bind(&addr).with_context(|| format!("cannot listen on {addr}"))?;
    listener
        .set_nonblocking(true)
        .context("cannot configure listener")?;
    let local = listener.local_addr().context("cannot read bound address")?;
    // Scripts read this line to find an ephemeral port.
    println!("listening on http://{local}");

    let config = ServiceConfig {
        max_upload_bytes: args.max_upload_bytes,
        session_ttl: Duration::from_secs(args.session_ttl_secs),
        memory_budget_bytes: args.memory_budget_bytes,
        default_iterations: args.iterations,
        permissive_cors: args.cors,
    };
    let runtime = tokio::runtime::Runtime::new().context("cannot start runtime")?;
    runtime.block_on(async {
        let listener =
            tokio::net::TcpListener::from_std(listener).context("cannot register listener")?;
        ragscope_service::serve(listener, config, shutdown_signal())
            .await
            .context("server error")
    })?;
    Ok(())
}
