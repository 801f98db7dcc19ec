use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::{BackendError, ChatBackend, Completion};
use crate::model::{GenerationParams, PromptBundle};

type Responder = dyn Fn(&PromptBundle, &GenerationParams) -> Completion + Send + Sync;

/// In-process backend answering from a closure, counting calls and concurrent requests.
pub struct MockBackend {
    responder: Box<Responder>,
    delay: Duration,
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    log: Mutex<Vec<PromptBundle>>,
}

impl MockBackend {
    pub fn new(responder: impl Fn(&PromptBundle, &GenerationParams) -> Completion + Send + Sync + 'static) -> Self {
        Self {
            responder: Box::new(responder),
            delay: Duration::ZERO,
            calls: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            max_in_flight: AtomicUsize::new(0),
            log: Mutex::new(Vec::new()),
        }
    }

    /// Always answers with `text`.
    pub fn constant(text: &str) -> Self {
        let text = text.to_string();
        Self::new(move |_, _| Completion::stop(text.clone()))
    }

    /// Holds each call open for `delay`, so overlapping calls become observable.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn max_in_flight(&self) -> usize {
        self.max_in_flight.load(Ordering::SeqCst)
    }

    /// Every request received, in arrival order.
    pub fn requests(&self) -> Vec<PromptBundle> {
        self.log.lock().unwrap().clone()
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        if bundle.messages.is_empty() {
            return Err(BackendError::EmptyRequest);
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.max_in_flight.fetch_max(now, Ordering::SeqCst);
        self.log.lock().unwrap().push(bundle.clone());
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        let out = (self.responder)(bundle, params);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        Ok(out)
    }
}
