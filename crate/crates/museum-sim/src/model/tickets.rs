//! Smart tickets, visit histories, and survey responses.

use super::objects::{LanguageCode, ObjectId};
use super::tags::HybridTag;
use crate::Timestamp;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a visitor's smart ticket.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TicketId(pub String);

impl TicketId {
    pub fn new(id: impl Into<String>) -> Self {
        TicketId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TicketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TicketId {
    fn from(s: &str) -> Self {
        TicketId(s.to_owned())
    }
}

/// One completed stop of a ticket at an exhibit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitEntry {
    pub object_id: ObjectId,
    pub arrival_time: Timestamp,
    pub dwell_seconds: u64,
}

/// One answered survey question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyAnswer {
    pub question_id: String,
    /// 1 (worst) to 5 (best).
    pub rating: u8,
    pub free_text: Option<String>,
}

/// A visitor's completed survey form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub ticket_id: TicketId,
    pub answers: Vec<SurveyAnswer>,
}

impl SurveyResponse {
    /// Question ids must be unique within one response.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.answers.iter().all(|a| {
            (1..=5).contains(&a.rating) && seen.insert(a.question_id.clone())
        })
    }
}

/// The visitor-carried device state as tracked by the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmartTicket {
    pub ticket_id: TicketId,
    pub tag: HybridTag,
    pub language: Option<LanguageCode>,
    pub paid: bool,
    pub visited: Vec<VisitEntry>,
    pub survey: Option<SurveyResponse>,
}

impl SmartTicket {
    pub fn issue(ticket_id: TicketId) -> Self {
        let tag = HybridTag::ticket(ticket_id.as_str());
        SmartTicket {
            ticket_id,
            tag,
            language: None,
            paid: false,
            visited: Vec::new(),
            survey: None,
        }
    }

    /// Record a completed stop. Arrival times must strictly increase.
    pub fn record_visit(&mut self, entry: VisitEntry) {
        debug_assert!(self
            .visited
            .last()
            .is_none_or(|prev| prev.arrival_time < entry.arrival_time));
        self.visited.push(entry);
    }

    pub fn visited_objects(&self) -> Vec<ObjectId> {
        self.visited.iter().map(|v| v.object_id.clone()).collect()
    }

    /// Mean observed dwell in seconds, `None` before the first stop.
    pub fn mean_dwell(&self) -> Option<f64> {
        if self.visited.is_empty() {
            return None;
        }
        let total: u64 = self.visited.iter().map(|v| v.dwell_seconds).sum();
        Some(total as f64 / self.visited.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_dwell_over_history() {
        let mut ticket = SmartTicket::issue(TicketId::new("t1"));
        assert_eq!(ticket.mean_dwell(), None);
        ticket.record_visit(VisitEntry {
            object_id: ObjectId::new("o1"),
            arrival_time: 10,
            dwell_seconds: 60,
        });
        ticket.record_visit(VisitEntry {
            object_id: ObjectId::new("o2"),
            arrival_time: 100,
            dwell_seconds: 120,
        });
        assert_eq!(ticket.mean_dwell(), Some(90.0));
    }

    #[test]
    fn survey_requires_unique_questions_and_valid_ratings() {
        let ok = SurveyResponse {
            ticket_id: TicketId::new("t1"),
            answers: vec![
                SurveyAnswer {
                    question_id: "q1".into(),
                    rating: 5,
                    free_text: None,
                },
                SurveyAnswer {
                    question_id: "q2".into(),
                    rating: 1,
                    free_text: Some("too crowded".into()),
                },
            ],
        };
        assert!(ok.is_well_formed());

        let dup = SurveyResponse {
            ticket_id: TicketId::new("t1"),
            answers: vec![
                SurveyAnswer {
                    question_id: "q1".into(),
                    rating: 5,
                    free_text: None,
                },
                SurveyAnswer {
                    question_id: "q1".into(),
                    rating: 2,
                    free_text: None,
                },
            ],
        };
        assert!(!dup.is_well_formed());
    }
}
