//! HTTP facade over a counted election: read the election and its outcome,
//! evaluate what-if variants, and check feasibility of candidate pools.
//!
//! The service holds one immutable [`Snapshot`] at a time. Requests read
//! whichever snapshot is current when they start; [`ApiState::reload`] swaps
//! in a new one atomically. What-if requests never modify the snapshot.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use pact_core::explain::{build_report, DeficitReport, DisplacementReport, PriceReport};
use pact_core::model::{validate_config, CandidateRecord, ElectionConfig, Violation, Votes};
use pact_core::solver::{
    check_feasibility, find_forced_candidates, solve_with, Deficit, Feasibility, SolveOutcome, SolveStatus,
    SolverOptions, WHATIF_NODE_BUDGET,
};
use pact_core::whatif::{evaluate, WhatIfRequest, WhatIfResponse};
use serde::{Deserialize, Serialize};
use tokio::sync::OnceCell;
use tower_http::cors::CorsLayer;

/// One version of the election data. Immutable once published.
#[derive(Debug)]
pub struct Snapshot {
    pub version: u64,
    pub config: ElectionConfig,
    pub votes: Votes,
    outcome: OnceCell<Result<Arc<OutcomeBody>, ApiError>>,
}

#[derive(Debug)]
pub struct ApiState {
    current: RwLock<Arc<Snapshot>>,
    versions: AtomicU64,
    options: SolverOptions,
    whatif_options: SolverOptions,
}

impl ApiState {
    pub fn new(config: ElectionConfig, votes: Votes) -> Self {
        Self::with_options(
            config,
            votes,
            SolverOptions::default(),
            SolverOptions::with_budget(WHATIF_NODE_BUDGET),
        )
    }

    pub fn with_options(
        config: ElectionConfig,
        votes: Votes,
        options: SolverOptions,
        whatif_options: SolverOptions,
    ) -> Self {
        Self {
            current: RwLock::new(Arc::new(Snapshot {
                version: 1,
                config,
                votes,
                outcome: OnceCell::new(),
            })),
            versions: AtomicU64::new(1),
            options,
            whatif_options,
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    /// Publish new election data; returns the new version.
    pub fn reload(&self, config: ElectionConfig, votes: Votes) -> u64 {
        let version = self.versions.fetch_add(1, Ordering::SeqCst) + 1;
        let next = Arc::new(Snapshot {
            version,
            config,
            votes,
            outcome: OnceCell::new(),
        });
        *self.current.write().expect("snapshot lock poisoned") = next;
        version
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// Origins allowed to call the API from a browser. Empty disables CORS.
    pub cors_origins: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deficits: Vec<Deficit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, message: String) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.into(),
                message,
                deficits: Vec::new(),
                violations: Vec::new(),
            },
        }
    }

    fn infeasible(deficits: Vec<Deficit>) -> Self {
        let mut e = Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "INFEASIBLE",
            "no committee satisfies the criteria and relaxation is disabled".into(),
        );
        e.body.deficits = deficits;
        e
    }
}

impl From<pact_core::Error> for ApiError {
    fn from(err: pact_core::Error) -> Self {
        use pact_core::Error as E;
        let message = err.to_string();
        match err {
            E::NodeBudgetExceeded { .. } => Self::new(StatusCode::SERVICE_UNAVAILABLE, "NODE_BUDGET_EXCEEDED", message),
            E::Infeasible(deficits) => {
                let mut e = Self::infeasible(deficits);
                e.body.message = message;
                e
            }
            E::UnsatisfiableEvenEmpty { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "UNSATISFIABLE_EVEN_EMPTY", message)
            }
            E::InvalidConfig(violations) => {
                let mut e = Self::new(StatusCode::BAD_REQUEST, "INVALID_EDIT", message);
                e.body.violations = violations;
                e
            }
            _ => Self::new(StatusCode::BAD_REQUEST, "INVALID_EDIT", message),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", rejection.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElectionBody {
    pub version: u64,
    pub config: ElectionConfig,
    pub votes: Votes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeBody {
    pub version: u64,
    pub outcome: SolveOutcome,
    pub committee_deficits: Option<DeficitReport>,
    pub price: Option<PriceReport>,
    pub displacement: Option<DisplacementReport>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FeasibilityRequest {
    pub pool: Vec<CandidateRecord>,
    /// Criteria and seat count to check against; defaults to the current
    /// election's.
    #[serde(default)]
    pub config: Option<ElectionConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityBody {
    #[serde(flatten)]
    pub feasibility: Feasibility,
    /// Candidates every feasible committee from the pool must contain.
    pub forced: Vec<String>,
}

/// Run CPU-bound work off the async executor.
async fn blocking<T, F>(work: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(work)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))?
}

fn solve_snapshot(snapshot: &Snapshot, options: &SolverOptions) -> Result<OutcomeBody, ApiError> {
    let outcome = solve_with(&snapshot.votes, &snapshot.config, options)?;
    if outcome.status == SolveStatus::Infeasible {
        return Err(ApiError::infeasible(outcome.deficits));
    }
    let report = build_report(&outcome, &snapshot.votes, &snapshot.config, options)?;
    Ok(OutcomeBody {
        version: snapshot.version,
        outcome,
        committee_deficits: report.committee_deficits,
        price: report.price,
        displacement: report.displacement,
    })
}

async fn get_election(State(state): State<Arc<ApiState>>) -> Json<ElectionBody> {
    let snapshot = state.snapshot();
    Json(ElectionBody {
        version: snapshot.version,
        config: snapshot.config.clone(),
        votes: snapshot.votes.clone(),
    })
}

async fn get_outcome(State(state): State<Arc<ApiState>>) -> Result<Json<OutcomeBody>, ApiError> {
    let snapshot = state.snapshot();
    let options = state.options;
    let cached = snapshot
        .outcome
        .get_or_init(|| {
            let snapshot = snapshot.clone();
            async move { blocking(move || solve_snapshot(&snapshot, &options).map(Arc::new)).await }
        })
        .await
        .clone()?;
    Ok(Json((*cached).clone()))
}

async fn post_whatif(
    State(state): State<Arc<ApiState>>,
    request: Result<Json<WhatIfRequest>, JsonRejection>,
) -> Result<Json<WhatIfResponse>, ApiError> {
    let Json(request) = request?;
    let snapshot = state.snapshot();
    let options = state.whatif_options;
    let response = blocking(move || Ok(evaluate(&snapshot.config, &snapshot.votes, &request, &options)?)).await?;
    if response.outcome.status == SolveStatus::Infeasible {
        return Err(ApiError::infeasible(response.outcome.deficits));
    }
    Ok(Json(response))
}

async fn post_feasibility(
    State(state): State<Arc<ApiState>>,
    request: Result<Json<FeasibilityRequest>, JsonRejection>,
) -> Result<Json<FeasibilityBody>, ApiError> {
    let Json(request) = request?;
    let mut config = request.config.unwrap_or_else(|| state.snapshot().config.clone());
    config.roster = request.pool;
    let violations = validate_config(&config);
    if !violations.is_empty() {
        return Err(pact_core::Error::InvalidConfig(violations).into());
    }
    blocking(move || {
        let feasibility = check_feasibility(&config.roster, &config);
        let forced = if feasibility.is_feasible() {
            find_forced_candidates(&config)?.into_iter().collect()
        } else {
            Vec::new()
        };
        Ok(Json(FeasibilityBody { feasibility, forced }))
    })
    .await
}

pub fn router(state: Arc<ApiState>, options: &ServeOptions) -> Router {
    let router = Router::new()
        .route("/election", get(get_election))
        .route("/outcome", get(get_outcome))
        .route("/whatif", post(post_whatif))
        .route("/feasibility", post(post_feasibility))
        .with_state(state);

    let origins: Vec<HeaderValue> = options
        .cors_origins
        .iter()
        .filter_map(|o| HeaderValue::from_str(o).ok())
        .collect();
    if origins.is_empty() {
        router
    } else {
        router.layer(
            CorsLayer::new()
                .allow_origin(origins)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([axum::http::header::CONTENT_TYPE]),
        )
    }
}

/// Serve until the listener fails.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<ApiState>,
    options: ServeOptions,
) -> std::io::Result<()> {
    axum::serve(listener, router(state, &options)).await
}
