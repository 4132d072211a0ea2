use std::collections::VecDeque;
use std::sync::Mutex;

use super::{BackendError, CompletionBackend, CompletionRequest};

type Responder = Box<dyn Fn(&CompletionRequest) -> Result<String, BackendError> + Send + Sync>;

enum Script {
    Queue(Mutex<VecDeque<Result<String, BackendError>>>),
    Func(Responder),
}

/// Test backend answering from a fixed queue or a closure, recording every
/// request it receives.
pub struct ScriptedBackend {
    id: String,
    script: Script,
    calls: Mutex<Vec<CompletionRequest>>,
}

impl ScriptedBackend {
    pub fn new<S: Into<String>>(id: &str, replies: impl IntoIterator<Item = S>) -> Self {
        Self::with_results(id, replies.into_iter().map(|s| Ok(s.into())))
    }

    pub fn with_results(
        id: &str,
        replies: impl IntoIterator<Item = Result<String, BackendError>>,
    ) -> Self {
        ScriptedBackend {
            id: id.to_string(),
            script: Script::Queue(Mutex::new(replies.into_iter().collect())),
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn from_fn(
        id: &str,
        f: impl Fn(&CompletionRequest) -> Result<String, BackendError> + Send + Sync + 'static,
    ) -> Self {
        ScriptedBackend {
            id: id.to_string(),
            script: Script::Func(Box::new(f)),
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn calls(&self) -> Vec<CompletionRequest> {
        self.calls.lock().unwrap().clone()
    }

    pub fn call_count(&self) -> usize {
        self.calls.lock().unwrap().len()
    }
}

impl CompletionBackend for ScriptedBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        self.calls.lock().unwrap().push(request.clone());
        match &self.script {
            Script::Queue(q) => q
                .lock()
                .unwrap()
                .pop_front()
                .unwrap_or_else(|| Err(BackendError::Transport("script exhausted".into()))),
            Script::Func(f) => f(request),
        }
    }
}
