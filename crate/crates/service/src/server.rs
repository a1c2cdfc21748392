//! axum adapter: every request goes through [`Api::handle`] on the blocking
//! pool, since some of them run t-SNE inline.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderName, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response as HttpResponse};
use axum::Router;
use tokio::net::TcpListener;

use crate::api::{Api, Request};

pub fn router(api: Arc<Api>) -> Router {
    Router::new().fallback(dispatch).with_state(api)
}

async fn dispatch(State(api): State<Arc<Api>>, method: Method, uri: Uri, body: Bytes) -> HttpResponse {
    let path = uri.path().to_string();
    let query = uri.query().map(str::to_string);
    let result = tokio::task::spawn_blocking(move || {
        api.handle(&Request { method: method.as_str(), path: &path, query: query.as_deref(), body: &body })
    })
    .await;
    let r = match result {
        Ok(r) => r,
        Err(e) => {
            tracing::error!("handler panicked: {e}");
            return (StatusCode::INTERNAL_SERVER_ERROR, "internal error").into_response();
        }
    };
    let mut out = (StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR), r.body).into_response();
    let headers = out.headers_mut();
    for (name, value) in r.headers {
        if let Ok(v) = HeaderValue::from_str(&value) {
            headers.insert(HeaderName::from_static(name), v);
        }
    }
    headers.insert("access-control-allow-origin", HeaderValue::from_static("*"));
    out
}

/// Serves on an already bound listener until ctrl-c.
pub async fn serve_on(listener: TcpListener, api: Arc<Api>) -> std::io::Result<()> {
    axum::serve(listener, router(api))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub async fn serve(api: Arc<Api>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    serve_on(listener, api).await
}
