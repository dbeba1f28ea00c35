//! The manager report engine: fourteen report kinds computed purely from
//! the event log over a half-open interval `[from, to)`.
//!
//! Every payload is a deterministic function of (log, interval, params);
//! forecasts additionally read per-day history before the interval. Empty
//! logs yield zero-valued reports rather than errors.

use crate::model::{
    AlarmDetail, EventBody, EventLog, LanguageCode, NodeId, ObjectId, SensorChannel, Subject,
    TicketId,
};
use crate::museum::Museum;
use crate::Timestamp;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const SECONDS_PER_DAY: Timestamp = 86_400;
pub const SECONDS_PER_HOUR: Timestamp = 3_600;

/// Half-open time interval `[from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub from: Timestamp,
    pub to: Timestamp,
}

impl Interval {
    pub fn new(from: Timestamp, to: Timestamp) -> Self {
        debug_assert!(from <= to);
        Interval { from, to }
    }

    /// Interval covering a whole log.
    pub fn covering(log: &EventLog) -> Self {
        Interval {
            from: 0,
            to: log.last_timestamp().map_or(0, |t| t + 1),
        }
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.from <= t && t < self.to
    }

    pub fn length(&self) -> Timestamp {
        self.to - self.from
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("unknown report kind {0} (expected 1..=14)")]
    UnknownKind(u8),
}

/// The fourteen manager report kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    SurveyResults,
    VisitorCounts,
    PopularObjects,
    EntryExitControl,
    ObjectTracking,
    LanguageChoices,
    VisitDurations,
    BusyTimes,
    CrowdMonitoring,
    EnvironmentStatus,
    Income,
    VisitDependencies,
    VisitorForecast,
    ArrangementProposal,
}

impl ReportKind {
    pub fn from_number(kind: u8) -> Result<Self, ReportError> {
        use ReportKind::*;
        Ok(match kind {
            1 => SurveyResults,
            2 => VisitorCounts,
            3 => PopularObjects,
            4 => EntryExitControl,
            5 => ObjectTracking,
            6 => LanguageChoices,
            7 => VisitDurations,
            8 => BusyTimes,
            9 => CrowdMonitoring,
            10 => EnvironmentStatus,
            11 => Income,
            12 => VisitDependencies,
            13 => VisitorForecast,
            14 => ArrangementProposal,
            other => return Err(ReportError::UnknownKind(other)),
        })
    }

    pub fn number(&self) -> u8 {
        use ReportKind::*;
        match self {
            SurveyResults => 1,
            VisitorCounts => 2,
            PopularObjects => 3,
            EntryExitControl => 4,
            ObjectTracking => 5,
            LanguageChoices => 6,
            VisitDurations => 7,
            BusyTimes => 8,
            CrowdMonitoring => 9,
            EnvironmentStatus => 10,
            Income => 11,
            VisitDependencies => 12,
            VisitorForecast => 13,
            ArrangementProposal => 14,
        }
    }
}

/// Tuning knobs for report generation; every field has a sensible default.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportParams {
    /// Histogram bucket width for visitor counts (report 2).
    pub bucket_seconds: Timestamp,
    /// How many popular routes to keep (report 4).
    pub top_k: usize,
    /// Minimum co-visit support for dependency pairs (reports 12, 14).
    pub min_support: u64,
    /// Forecast horizon in days (report 13).
    pub horizon: usize,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams {
            bucket_seconds: SECONDS_PER_HOUR,
            top_k: 10,
            min_support: 1,
            horizon: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionStat {
    pub question_id: String,
    pub answers: u64,
    pub mean_rating: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyText {
    pub ticket_id: TicketId,
    pub question_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountBucket {
    pub start: Timestamp,
    pub entries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectReads {
    pub object_id: ObjectId,
    pub reads: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub ticket_id: TicketId,
    pub entry: Option<Timestamp>,
    pub exit: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteCount {
    /// Gate and object identifiers in visiting order.
    pub route: Vec<String>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixPoint {
    pub timestamp: Timestamp,
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectTrack {
    pub object_id: ObjectId,
    pub fixes: Vec<FixPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationRow {
    pub ticket_id: TicketId,
    pub entry: Timestamp,
    pub exit: Timestamp,
    pub duration_seconds: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayHourCount {
    pub day: u64,
    pub hour: u64,
    pub entries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrowdStat {
    pub object_id: ObjectId,
    pub max: u32,
    /// Time-weighted mean dweller count over the interval.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelStat {
    pub channel: SensorChannel,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvStat {
    pub object_id: ObjectId,
    pub samples: u64,
    pub channels: Vec<ChannelStat>,
    pub mechanical_events: u64,
    pub alarm_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyPair {
    pub a: ObjectId,
    pub b: ObjectId,
    /// Tickets whose in-interval visits include both objects.
    pub support: u64,
    /// P(a and b) / (P(a) * P(b)) over tickets in the interval.
    pub lift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayCount {
    pub day: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arrangement {
    /// Proposed adjacency sequence of objects.
    pub order: Vec<ObjectId>,
    /// Total lift over adjacent pairs in the proposal.
    pub score: f64,
    /// Exact optimum (by enumeration) when six or fewer objects.
    pub exhaustive_optimum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum ReportPayload {
    SurveyResults {
        responses: u64,
        questions: Vec<QuestionStat>,
        texts: Vec<SurveyText>,
    },
    VisitorCounts {
        entries: u64,
        exits: u64,
        /// In-interval entries minus exits.
        current: i64,
        buckets: Vec<CountBucket>,
    },
    PopularObjects {
        ranking: Vec<ObjectReads>,
    },
    EntryExitControl {
        ledger: Vec<LedgerRow>,
        popular_routes: Vec<RouteCount>,
    },
    ObjectTracking {
        objects: Vec<ObjectTrack>,
    },
    LanguageChoices {
        counts: BTreeMap<LanguageCode, u64>,
    },
    VisitDurations {
        rows: Vec<DurationRow>,
        /// Mean of (exit - entry); zero when no completed visits.
        average_seconds: f64,
    },
    BusyTimes {
        cells: Vec<DayHourCount>,
    },
    CrowdMonitoring {
        objects: Vec<CrowdStat>,
    },
    EnvironmentStatus {
        objects: Vec<EnvStat>,
    },
    Income {
        total_cents: i64,
        payments: u64,
    },
    VisitDependencies {
        tickets_considered: u64,
        pairs: Vec<DependencyPair>,
    },
    VisitorForecast {
        history: Vec<DayCount>,
        forecast: Vec<f64>,
    },
    ArrangementProposal(Arrangement),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: u8,
    pub name: ReportKind,
    pub interval: Interval,
    pub payload: ReportPayload,
}

/// Compute one report kind over `[interval.from, interval.to)`.
pub fn generate_report(
    log: &EventLog,
    kind: u8,
    interval: Interval,
    params: &ReportParams,
) -> Result<Report, ReportError> {
    let name = ReportKind::from_number(kind)?;
    let payload = match name {
        ReportKind::SurveyResults => survey_results(log, interval),
        ReportKind::VisitorCounts => visitor_counts(log, interval, params.bucket_seconds),
        ReportKind::PopularObjects => popular_objects(log, interval),
        ReportKind::EntryExitControl => entry_exit_control(log, interval, params.top_k),
        ReportKind::ObjectTracking => object_tracking(log, interval),
        ReportKind::LanguageChoices => language_choices(log, interval),
        ReportKind::VisitDurations => visit_durations(log, interval),
        ReportKind::BusyTimes => busy_times(log, interval),
        ReportKind::CrowdMonitoring => crowd_monitoring(log, interval),
        ReportKind::EnvironmentStatus => environment_status(log, interval),
        ReportKind::Income => income(log, interval),
        ReportKind::VisitDependencies => {
            let (tickets_considered, pairs) = find_dependencies(log, interval, params.min_support);
            ReportPayload::VisitDependencies {
                tickets_considered,
                pairs,
            }
        }
        ReportKind::VisitorForecast => visitor_forecast(log, interval, params.horizon),
        ReportKind::ArrangementProposal => {
            let (_, pairs) = find_dependencies(log, interval, params.min_support);
            let universe: BTreeSet<ObjectId> = log
                .events()
                .iter()
                .filter(|e| interval.contains(e.timestamp))
                .filter_map(|e| match &e.body {
                    EventBody::ObjectInfoRead { object_id, .. } => Some(object_id.clone()),
                    _ => None,
                })
                .collect();
            ReportPayload::ArrangementProposal(arrange_chain(&universe, &pairs))
        }
    };
    Ok(Report {
        schema_version: crate::model::SCHEMA_VERSION,
        kind,
        name,
        interval,
        payload,
    })
}

fn in_interval<'a>(
    log: &'a EventLog,
    interval: Interval,
) -> impl Iterator<Item = &'a crate::model::Event> {
    log.events()
        .iter()
        .filter(move |e| interval.contains(e.timestamp))
}

fn survey_results(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut responses = 0u64;
    let mut sums: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut texts = Vec::new();
    for event in in_interval(log, interval) {
        if let EventBody::SurveySubmitted { ticket_id, response, .. } = &event.body {
            responses += 1;
            for answer in &response.answers {
                let slot = sums.entry(answer.question_id.clone()).or_insert((0, 0));
                slot.0 += 1;
                slot.1 += u64::from(answer.rating);
                if let Some(text) = &answer.free_text {
                    texts.push(SurveyText {
                        ticket_id: ticket_id.clone(),
                        question_id: answer.question_id.clone(),
                        text: text.clone(),
                    });
                }
            }
        }
    }
    let questions = sums
        .into_iter()
        .map(|(question_id, (answers, total))| QuestionStat {
            question_id,
            answers,
            mean_rating: total as f64 / answers as f64,
        })
        .collect();
    ReportPayload::SurveyResults {
        responses,
        questions,
        texts,
    }
}

fn visitor_counts(log: &EventLog, interval: Interval, bucket_seconds: Timestamp) -> ReportPayload {
    let mut entries = 0u64;
    let mut exits = 0u64;
    let bucket_count = if interval.length() == 0 {
        0
    } else {
        (interval.length() + bucket_seconds - 1) / bucket_seconds
    };
    let mut buckets: Vec<CountBucket> = (0..bucket_count)
        .map(|i| CountBucket {
            start: interval.from + i * bucket_seconds,
            entries: 0,
        })
        .collect();
    for event in in_interval(log, interval) {
        match &event.body {
            EventBody::GateEntry { .. } => {
                entries += 1;
                let index = ((event.timestamp - interval.from) / bucket_seconds) as usize;
                buckets[index].entries += 1;
            }
            EventBody::GateExit { .. } => exits += 1,
            _ => {}
        }
    }
    ReportPayload::VisitorCounts {
        entries,
        exits,
        current: entries as i64 - exits as i64,
        buckets,
    }
}

fn popular_objects(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut reads: BTreeMap<ObjectId, u64> = BTreeMap::new();
    for event in in_interval(log, interval) {
        if let EventBody::ObjectInfoRead { object_id, .. } = &event.body {
            *reads.entry(object_id.clone()).or_insert(0) += 1;
        }
    }
    let mut ranking: Vec<ObjectReads> = reads
        .into_iter()
        .map(|(object_id, reads)| ObjectReads { object_id, reads })
        .collect();
    ranking.sort_by(|a, b| b.reads.cmp(&a.reads).then(a.object_id.cmp(&b.object_id)));
    ReportPayload::PopularObjects { ranking }
}

fn entry_exit_control(log: &EventLog, interval: Interval, top_k: usize) -> ReportPayload {
    let mut ledger: BTreeMap<TicketId, LedgerRow> = BTreeMap::new();
    let mut routes: BTreeMap<TicketId, Vec<String>> = BTreeMap::new();
    for event in in_interval(log, interval) {
        match &event.body {
            EventBody::GateEntry { ticket_id, gate_id, .. } => {
                let row = ledger.entry(ticket_id.clone()).or_insert(LedgerRow {
                    ticket_id: ticket_id.clone(),
                    entry: None,
                    exit: None,
                });
                if row.entry.is_none() {
                    row.entry = Some(event.timestamp);
                }
                routes
                    .entry(ticket_id.clone())
                    .or_default()
                    .push(gate_id.to_string());
            }
            EventBody::GateExit { ticket_id, gate_id } => {
                let row = ledger.entry(ticket_id.clone()).or_insert(LedgerRow {
                    ticket_id: ticket_id.clone(),
                    entry: None,
                    exit: None,
                });
                row.exit = Some(event.timestamp);
                routes
                    .entry(ticket_id.clone())
                    .or_default()
                    .push(gate_id.to_string());
            }
            EventBody::ObjectInfoRead { ticket_id, object_id, .. } => {
                routes
                    .entry(ticket_id.clone())
                    .or_default()
                    .push(object_id.to_string());
            }
            _ => {}
        }
    }

    let mut route_counts: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    for route in routes.into_values() {
        *route_counts.entry(route).or_insert(0) += 1;
    }
    let mut popular_routes: Vec<RouteCount> = route_counts
        .into_iter()
        .map(|(route, count)| RouteCount { route, count })
        .collect();
    popular_routes.sort_by(|a, b| b.count.cmp(&a.count).then(a.route.cmp(&b.route)));
    popular_routes.truncate(top_k);

    ReportPayload::EntryExitControl {
        ledger: ledger.into_values().collect(),
        popular_routes,
    }
}

fn object_tracking(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut tracks: BTreeMap<ObjectId, Vec<FixPoint>> = BTreeMap::new();
    for event in in_interval(log, interval) {
        if let EventBody::LocationFix {
            subject: Subject::Object(object_id),
            polar,
        } = &event.body
        {
            tracks.entry(object_id.clone()).or_default().push(FixPoint {
                timestamp: event.timestamp,
                r: polar.r,
                theta: polar.theta,
            });
        }
    }
    ReportPayload::ObjectTracking {
        objects: tracks
            .into_iter()
            .map(|(object_id, fixes)| ObjectTrack { object_id, fixes })
            .collect(),
    }
}

fn language_choices(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut counts: BTreeMap<LanguageCode, u64> = BTreeMap::new();
    for event in in_interval(log, interval) {
        if let EventBody::LanguageChosen { language, .. } = &event.body {
            *counts.entry(language.clone()).or_insert(0) += 1;
        }
    }
    ReportPayload::LanguageChoices { counts }
}

fn visit_durations(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut entries: BTreeMap<TicketId, Timestamp> = BTreeMap::new();
    let mut rows: BTreeMap<TicketId, DurationRow> = BTreeMap::new();
    for event in in_interval(log, interval) {
        match &event.body {
            EventBody::GateEntry { ticket_id, .. } => {
                entries.entry(ticket_id.clone()).or_insert(event.timestamp);
            }
            EventBody::GateExit { ticket_id, .. } => {
                if let Some(&entry) = entries.get(ticket_id) {
                    rows.entry(ticket_id.clone()).or_insert(DurationRow {
                        ticket_id: ticket_id.clone(),
                        entry,
                        exit: event.timestamp,
                        duration_seconds: event.timestamp - entry,
                    });
                }
            }
            _ => {}
        }
    }
    let rows: Vec<DurationRow> = rows.into_values().collect();
    let average_seconds = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.duration_seconds as f64).sum::<f64>() / rows.len() as f64
    };
    ReportPayload::VisitDurations {
        rows,
        average_seconds,
    }
}

fn busy_times(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut cells: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for event in in_interval(log, interval) {
        if let EventBody::GateEntry { .. } = &event.body {
            let day = event.timestamp / SECONDS_PER_DAY;
            let hour = (event.timestamp % SECONDS_PER_DAY) / SECONDS_PER_HOUR;
            *cells.entry((day, hour)).or_insert(0) += 1;
        }
    }
    ReportPayload::BusyTimes {
        cells: cells
            .into_iter()
            .map(|((day, hour), entries)| DayHourCount { day, hour, entries })
            .collect(),
    }
}

/// Time-weighted crowd per object, folded from the interval's own events:
/// an info read attaches a ticket to that object, the next read or a gate
/// exit detaches it.
fn crowd_monitoring(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut attribution: BTreeMap<TicketId, ObjectId> = BTreeMap::new();
    let mut counts: BTreeMap<ObjectId, u32> = BTreeMap::new();
    let mut stats: BTreeMap<ObjectId, (u32, f64)> = BTreeMap::new(); // (max, weighted sum)
    let mut last_time = interval.from;

    let mut integrate = |counts: &BTreeMap<ObjectId, u32>,
                         stats: &mut BTreeMap<ObjectId, (u32, f64)>,
                         dt: f64| {
        for (object_id, &count) in counts {
            let slot = stats.entry(object_id.clone()).or_insert((0, 0.0));
            slot.1 += f64::from(count) * dt;
        }
    };

    for event in in_interval(log, interval) {
        let dt = (event.timestamp - last_time) as f64;
        if dt > 0.0 {
            integrate(&counts, &mut stats, dt);
            last_time = event.timestamp;
        }
        let detach = |ticket: &TicketId,
                      attribution: &mut BTreeMap<TicketId, ObjectId>,
                      counts: &mut BTreeMap<ObjectId, u32>| {
            if let Some(previous) = attribution.remove(ticket) {
                if let Some(c) = counts.get_mut(&previous) {
                    *c -= 1;
                    if *c == 0 {
                        counts.remove(&previous);
                    }
                }
            }
        };
        match &event.body {
            EventBody::ObjectInfoRead { ticket_id, object_id, .. } => {
                detach(ticket_id, &mut attribution, &mut counts);
                attribution.insert(ticket_id.clone(), object_id.clone());
                let c = counts.entry(object_id.clone()).or_insert(0);
                *c += 1;
                let slot = stats.entry(object_id.clone()).or_insert((0, 0.0));
                slot.0 = slot.0.max(*c);
            }
            EventBody::GateExit { ticket_id, .. } => {
                detach(ticket_id, &mut attribution, &mut counts);
            }
            _ => {}
        }
    }
    let trailing = (interval.to - last_time) as f64;
    if trailing > 0.0 {
        integrate(&counts, &mut stats, trailing);
    }

    let span = interval.length() as f64;
    ReportPayload::CrowdMonitoring {
        objects: stats
            .into_iter()
            .map(|(object_id, (max, weighted))| CrowdStat {
                object_id,
                max,
                mean: if span > 0.0 { weighted / span } else { 0.0 },
            })
            .collect(),
    }
}

fn environment_status(log: &EventLog, interval: Interval) -> ReportPayload {
    struct Acc {
        samples: u64,
        mins: [f64; 6],
        maxs: [f64; 6],
        sums: [f64; 6],
        mechanical: u64,
        alarms: u64,
    }
    let mut accs: BTreeMap<ObjectId, Acc> = BTreeMap::new();
    for event in in_interval(log, interval) {
        match &event.body {
            EventBody::SensorTelemetry { reading } => {
                let acc = accs.entry(reading.object_id.clone()).or_insert(Acc {
                    samples: 0,
                    mins: [f64::INFINITY; 6],
                    maxs: [f64::NEG_INFINITY; 6],
                    sums: [0.0; 6],
                    mechanical: 0,
                    alarms: 0,
                });
                acc.samples += 1;
                for (i, channel) in SensorChannel::ALL.into_iter().enumerate() {
                    let v = reading.value(channel);
                    acc.mins[i] = acc.mins[i].min(v);
                    acc.maxs[i] = acc.maxs[i].max(v);
                    acc.sums[i] += v;
                }
                if reading.mechanical_event {
                    acc.mechanical += 1;
                }
            }
            EventBody::AlarmRaised { alarm } => {
                if matches!(alarm.detail, AlarmDetail::Environmental(_)) {
                    if let Some(acc) = accs.get_mut(&alarm.object_id) {
                        acc.alarms += 1;
                    } else {
                        accs.insert(
                            alarm.object_id.clone(),
                            Acc {
                                samples: 0,
                                mins: [f64::INFINITY; 6],
                                maxs: [f64::NEG_INFINITY; 6],
                                sums: [0.0; 6],
                                mechanical: 0,
                                alarms: 1,
                            },
                        );
                    }
                }
            }
            _ => {}
        }
    }
    ReportPayload::EnvironmentStatus {
        objects: accs
            .into_iter()
            .map(|(object_id, acc)| EnvStat {
                object_id,
                samples: acc.samples,
                channels: SensorChannel::ALL
                    .into_iter()
                    .enumerate()
                    .map(|(i, channel)| ChannelStat {
                        channel,
                        min: acc.mins[i],
                        max: acc.maxs[i],
                        mean: if acc.samples > 0 {
                            acc.sums[i] / acc.samples as f64
                        } else {
                            0.0
                        },
                    })
                    .collect(),
                mechanical_events: acc.mechanical,
                alarm_count: acc.alarms,
            })
            .collect(),
    }
}

fn income(log: &EventLog, interval: Interval) -> ReportPayload {
    let mut total_cents = 0i64;
    let mut payments = 0u64;
    for event in in_interval(log, interval) {
        if let EventBody::PaymentReceived { amount_cents, .. } = &event.body {
            total_cents += amount_cents;
            payments += 1;
        }
    }
    ReportPayload::Income {
        total_cents,
        payments,
    }
}

/// Co-visit dependency mining over tickets active in the interval.
///
/// A ticket's visited set is its in-interval info reads. For every
/// unordered object pair, support counts tickets visiting both; lift is
/// `P(a and b) / (P(a) * P(b))`. Pairs below `min_support` are omitted;
/// results sort by lift descending, ties by pair id. Returns
/// `(tickets_considered, pairs)`.
pub fn find_dependencies(
    log: &EventLog,
    interval: Interval,
    min_support: u64,
) -> (u64, Vec<DependencyPair>) {
    let mut visited: BTreeMap<TicketId, BTreeSet<ObjectId>> = BTreeMap::new();
    for event in in_interval(log, interval) {
        if let EventBody::ObjectInfoRead { ticket_id, object_id, .. } = &event.body {
            visited
                .entry(ticket_id.clone())
                .or_default()
                .insert(object_id.clone());
        }
    }
    let tickets = visited.len() as u64;
    if tickets == 0 {
        return (0, Vec::new());
    }

    let mut object_counts: BTreeMap<ObjectId, u64> = BTreeMap::new();
    let mut pair_counts: BTreeMap<(ObjectId, ObjectId), u64> = BTreeMap::new();
    for set in visited.values() {
        let objects: Vec<&ObjectId> = set.iter().collect();
        for (i, a) in objects.iter().enumerate() {
            *object_counts.entry((*a).clone()).or_insert(0) += 1;
            for b in objects.iter().skip(i + 1) {
                *pair_counts
                    .entry(((*a).clone(), (*b).clone()))
                    .or_insert(0) += 1;
            }
        }
    }

    let mut pairs: Vec<DependencyPair> = pair_counts
        .into_iter()
        .filter(|(_, support)| *support >= min_support.max(1))
        .map(|((a, b), support)| {
            let lift = (support as f64 * tickets as f64)
                / (object_counts[&a] as f64 * object_counts[&b] as f64);
            DependencyPair { a, b, support, lift }
        })
        .collect();
    pairs.sort_by(|x, y| {
        y.lift
            .partial_cmp(&x.lift)
            .expect("lift is always finite")
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });
    (tickets, pairs)
}

fn visitor_forecast(log: &EventLog, interval: Interval, horizon: usize) -> ReportPayload {
    // History: per-day entry counts for days completed before the interval.
    let days = interval.from / SECONDS_PER_DAY;
    let mut counts = vec![0u64; days as usize];
    for event in log.events() {
        if event.timestamp >= days * SECONDS_PER_DAY {
            break;
        }
        if let EventBody::GateEntry { .. } = &event.body {
            counts[(event.timestamp / SECONDS_PER_DAY) as usize] += 1;
        }
    }
    let forecast = forecast_visitors(&counts, horizon);
    ReportPayload::VisitorForecast {
        history: counts
            .into_iter()
            .enumerate()
            .map(|(day, count)| DayCount {
                day: day as u64,
                count,
            })
            .collect(),
        forecast,
    }
}

/// Forecast daily visitor counts from per-day history.
///
/// Ordinary least-squares linear trend over the day index, clamped at
/// zero; histories shorter than three days fall back to the historical
/// mean, and an empty history forecasts zeros.
pub fn forecast_visitors(history: &[u64], horizon: usize) -> Vec<f64> {
    if history.is_empty() {
        return vec![0.0; horizon];
    }
    let n = history.len() as f64;
    let mean = history.iter().sum::<u64>() as f64 / n;
    if history.len() < 3 {
        return vec![mean.max(0.0); horizon];
    }
    let sum_t: f64 = (0..history.len()).map(|t| t as f64).sum();
    let sum_y: f64 = history.iter().map(|&y| y as f64).sum();
    let sum_t2: f64 = (0..history.len()).map(|t| (t * t) as f64).sum();
    let sum_ty: f64 = history
        .iter()
        .enumerate()
        .map(|(t, &y)| t as f64 * y as f64)
        .sum();
    let denom = n * sum_t2 - sum_t * sum_t;
    let slope = (n * sum_ty - sum_t * sum_y) / denom;
    let intercept = (sum_y - slope * sum_t) / n;
    (0..horizon)
        .map(|i| {
            let t = (history.len() + i) as f64;
            (intercept + slope * t).max(0.0)
        })
        .collect()
}

/// Greedy adjacency proposal: seed with the highest-lift pair, then
/// repeatedly take the remaining object with the highest summed lift
/// toward the chain ends and attach it to its better end. Objects with no
/// mined pairs append in id order.
pub fn arrange_chain(universe: &BTreeSet<ObjectId>, pairs: &[DependencyPair]) -> Arrangement {
    let mut lift: BTreeMap<(ObjectId, ObjectId), f64> = BTreeMap::new();
    for pair in pairs {
        if universe.contains(&pair.a) && universe.contains(&pair.b) {
            lift.insert((pair.a.clone(), pair.b.clone()), pair.lift);
            lift.insert((pair.b.clone(), pair.a.clone()), pair.lift);
        }
    }
    let lift_of = |a: &ObjectId, b: &ObjectId, lift: &BTreeMap<(ObjectId, ObjectId), f64>| {
        lift.get(&(a.clone(), b.clone())).copied().unwrap_or(0.0)
    };

    let mut remaining: BTreeSet<ObjectId> = universe.clone();
    let mut chain: std::collections::VecDeque<ObjectId> = std::collections::VecDeque::new();

    // Seed: the highest-lift pair inside the universe (ties by pair id,
    // already the iteration order of the sorted pair list).
    let seed = pairs
        .iter()
        .filter(|p| universe.contains(&p.a) && universe.contains(&p.b))
        .max_by(|x, y| {
            x.lift
                .partial_cmp(&y.lift)
                .expect("lift is always finite")
                .then_with(|| (y.a.clone(), y.b.clone()).cmp(&(x.a.clone(), x.b.clone())))
        });
    if let Some(seed) = seed {
        chain.push_back(seed.a.clone());
        chain.push_back(seed.b.clone());
        remaining.remove(&seed.a);
        remaining.remove(&seed.b);
    } else if let Some(first) = remaining.iter().next().cloned() {
        chain.push_back(first.clone());
        remaining.remove(&first);
    }

    while !remaining.is_empty() {
        let front = chain.front().expect("chain is seeded").clone();
        let back = chain.back().expect("chain is seeded").clone();
        let candidate = remaining
            .iter()
            .map(|o| {
                let score = lift_of(o, &front, &lift) + lift_of(o, &back, &lift);
                (o.clone(), score)
            })
            .max_by(|(oa, sa), (ob, sb)| {
                sa.partial_cmp(sb)
                    .expect("scores are finite")
                    .then_with(|| ob.cmp(oa))
            })
            .map(|(o, _)| o)
            .expect("remaining is non-empty");
        remaining.remove(&candidate);
        if lift_of(&candidate, &back, &lift) >= lift_of(&candidate, &front, &lift) {
            chain.push_back(candidate);
        } else {
            chain.push_front(candidate);
        }
    }

    let order: Vec<ObjectId> = chain.into_iter().collect();
    let score = chain_score(&order, &lift);
    let exhaustive_optimum = (order.len() <= 6 && order.len() >= 2).then(|| {
        let mut best = f64::NEG_INFINITY;
        let mut objects: Vec<ObjectId> = order.clone();
        objects.sort();
        permute(&mut objects, 0, &mut |candidate| {
            best = best.max(chain_score(candidate, &lift));
        });
        best
    });

    Arrangement {
        order,
        score,
        exhaustive_optimum,
    }
}

fn chain_score(order: &[ObjectId], lift: &BTreeMap<(ObjectId, ObjectId), f64>) -> f64 {
    order
        .windows(2)
        .map(|w| lift.get(&(w[0].clone(), w[1].clone())).copied().unwrap_or(0.0))
        .sum()
}

fn permute<T, F: FnMut(&[T])>(items: &mut Vec<T>, k: usize, visit: &mut F) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Arrangement proposal over every exhibit in the museum.
pub fn suggest_arrangement(museum: &Museum, pairs: &[DependencyPair]) -> Arrangement {
    let universe: BTreeSet<ObjectId> = museum.objects.keys().cloned().collect();
    arrange_chain(&universe, pairs)
}

impl Report {
    /// Flat-table rendering; one table per kind, columns documented in
    /// `docs/formats.md`.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        match &self.payload {
            ReportPayload::SurveyResults { questions, .. } => {
                writer
                    .write_record(["question_id", "answers", "mean_rating"])
                    .unwrap();
                for q in questions {
                    writer
                        .write_record([
                            q.question_id.clone(),
                            q.answers.to_string(),
                            format_float(q.mean_rating),
                        ])
                        .unwrap();
                }
            }
            ReportPayload::VisitorCounts { buckets, .. } => {
                writer.write_record(["bucket_start", "entries"]).unwrap();
                for b in buckets {
                    writer
                        .write_record([b.start.to_string(), b.entries.to_string()])
                        .unwrap();
                }
            }
            ReportPayload::PopularObjects { ranking } => {
                writer.write_record(["object_id", "reads"]).unwrap();
                for r in ranking {
                    writer
                        .write_record([r.object_id.to_string(), r.reads.to_string()])
                        .unwrap();
                }
            }
            ReportPayload::EntryExitControl { popular_routes, .. } => {
                writer.write_record(["route", "count"]).unwrap();
                for r in popular_routes {
                    writer
                        .write_record([r.route.join("->"), r.count.to_string()])
                        .unwrap();
                }
            }
            ReportPayload::ObjectTracking { objects } => {
                writer
                    .write_record(["object_id", "timestamp", "r", "theta"])
                    .unwrap();
                for track in objects {
                    for fix in &track.fixes {
                        writer
                            .write_record([
                                track.object_id.to_string(),
                                fix.timestamp.to_string(),
                                format_float(fix.r),
                                format_float(fix.theta),
                            ])
                            .unwrap();
                    }
                }
            }
            ReportPayload::LanguageChoices { counts } => {
                writer.write_record(["language", "count"]).unwrap();
                for (language, count) in counts {
                    writer
                        .write_record([language.clone(), count.to_string()])
                        .unwrap();
                }
            }
            ReportPayload::VisitDurations { rows, .. } => {
                writer
                    .write_record(["ticket_id", "entry", "exit", "duration_seconds"])
                    .unwrap();
                for r in rows {
                    writer
                        .write_record([
                            r.ticket_id.to_string(),
                            r.entry.to_string(),
                            r.exit.to_string(),
                            r.duration_seconds.to_string(),
                        ])
                        .unwrap();
                }
            }
            ReportPayload::BusyTimes { cells } => {
                writer.write_record(["day", "hour", "entries"]).unwrap();
                for c in cells {
                    writer
                        .write_record([
                            c.day.to_string(),
                            c.hour.to_string(),
                            c.entries.to_string(),
                        ])
                        .unwrap();
                }
            }
            ReportPayload::CrowdMonitoring { objects } => {
                writer.write_record(["object_id", "max", "mean"]).unwrap();
                for o in objects {
                    writer
                        .write_record([
                            o.object_id.to_string(),
                            o.max.to_string(),
                            format_float(o.mean),
                        ])
                        .unwrap();
                }
            }
            ReportPayload::EnvironmentStatus { objects } => {
                writer
                    .write_record([
                        "object_id",
                        "channel",
                        "min",
                        "max",
                        "mean",
                        "samples",
                        "mechanical_events",
                        "alarm_count",
                    ])
                    .unwrap();
                for o in objects {
                    for c in &o.channels {
                        writer
                            .write_record([
                                o.object_id.to_string(),
                                c.channel.to_string(),
                                format_float(c.min),
                                format_float(c.max),
                                format_float(c.mean),
                                o.samples.to_string(),
                                o.mechanical_events.to_string(),
                                o.alarm_count.to_string(),
                            ])
                            .unwrap();
                    }
                }
            }
            ReportPayload::Income {
                total_cents,
                payments,
            } => {
                writer.write_record(["total_cents", "payments"]).unwrap();
                writer
                    .write_record([total_cents.to_string(), payments.to_string()])
                    .unwrap();
            }
            ReportPayload::VisitDependencies { pairs, .. } => {
                writer
                    .write_record(["object_a", "object_b", "support", "lift"])
                    .unwrap();
                for p in pairs {
                    writer
                        .write_record([
                            p.a.to_string(),
                            p.b.to_string(),
                            p.support.to_string(),
                            format_float(p.lift),
                        ])
                        .unwrap();
                }
            }
            ReportPayload::VisitorForecast { history, forecast } => {
                writer.write_record(["series", "index", "value"]).unwrap();
                for h in history {
                    writer
                        .write_record([
                            "history".to_string(),
                            h.day.to_string(),
                            h.count.to_string(),
                        ])
                        .unwrap();
                }
                for (i, value) in forecast.iter().enumerate() {
                    writer
                        .write_record([
                            "forecast".to_string(),
                            (history.len() + i).to_string(),
                            format_float(*value),
                        ])
                        .unwrap();
                }
            }
            ReportPayload::ArrangementProposal(arrangement) => {
                writer.write_record(["position", "object_id"]).unwrap();
                for (i, object_id) in arrangement.order.iter().enumerate() {
                    writer
                        .write_record([i.to_string(), object_id.to_string()])
                        .unwrap();
                }
            }
        }
        String::from_utf8(writer.into_inner().unwrap()).unwrap()
    }
}

fn format_float(v: f64) -> String {
    // Shortest representation that round-trips, like serde_json uses.
    let mut buffer = ryu_format(v);
    if buffer.ends_with(".0") {
        buffer.truncate(buffer.len() - 2);
    }
    buffer
}

fn ryu_format(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}
