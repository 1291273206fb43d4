"""The pipeline that ties every module together.

One Engine owns all mutable state and processes events strictly in virtual-
time order: advancing the clock fires scheduled work (memory rollover, watch
checks, the morning briefing, sporadic cloud sync) before the next event is
handled.  Everything observable is derived from (event stream, config, seed),
which is what makes replays byte-identical.

Thread model: a single RLock serializes all mutation, so API handlers and the
scenario runner are interchangeable single writers; reads return snapshots.
"""

from __future__ import annotations

import threading
from datetime import datetime, time, timedelta

import numpy as np

from . import automation, dialogue, diarization, fusion, gateway, memory, timeutil, vectors
from .config import Config
from .errors import HearthError
from .store import Store, TranscriptTurn


class ClockError(HearthError):
    pass


_STATUS_PARTS = set(dialogue.STATUS_VOCABULARY)


class Engine:
    def __init__(
        self,
        config: Config,
        data_dir: str | None = None,
        search_client: gateway.SearchClient | None = None,
        weather_client: gateway.WeatherClient | None = None,
        label_client: fusion.CloudLabelClient | None = None,
    ):
        self.config = config
        self.lock = threading.RLock()
        self.store = Store(data_dir or config.data_dir)
        self.provider = memory.HashEmbeddingProvider(config.d, config.seed)

        self.registry = diarization.SpeakerRegistry(config.d)
        self.cstate = diarization.ClusteringState(
            config.theta_reg, config.theta_anon, config.tau_owner
        )

        self.memstore = memory.MemoryStore(self.store.root, self.provider)
        self.workspace = memory.merge_into_workspace(
            [self.memstore.permanent, self.memstore.temporary], datetime.min
        )

        self.policy = dialogue.RolePolicy()
        self.manager = dialogue.DialogueManager(
            self.registry,
            self.policy,
            provider=self.provider,
            workspace_fn=lambda: self.workspace,
            answer_k=config.answer_k,
            emit=self._log_action,
        )
        self.summary_gen = dialogue.TemplateGenerator(
            "Session summary, {n} turns: {context}", snippet_chars=120
        )

        self.gate = gateway.EgressGate(config.offline, audit_dir=self.store.root)
        self.lexicon = (
            gateway.PiiLexicon.from_file(config.pii_lexicon_path)
            if config.pii_lexicon_path
            else gateway.PiiLexicon()
        )
        self.search_client = search_client
        self.weather_client = weather_client
        self.label_client = label_client

        self.label_store = fusion.LabelStore()
        self.readings: list[fusion.SensorReading] = []
        self._load_readings()

        self.har_thresholds = fusion.HarThresholds(
            config.cooking_door_window_s,
            config.eating_min_s,
            config.resting_min_s,
            config.gap_other_min_s,
        )
        self.pose_thresholds = fusion.PoseThresholds(
            config.pose_walk_hz, config.pose_lie_deg, config.pose_sit_var
        )

        self.watch_rules = (
            automation.load_watch_rules(config.watch_rules_path)
            if config.watch_rules_path
            else [automation.default_nightly_rule(config.night_start, config.night_end)]
        )
        self.last_triggers: dict[str, datetime] = {}
        self.schedule = automation.Schedule()
        self._schedule_started = False
        self._last_sync = datetime.min

        self.clock: datetime | None = None
        self.session_id = "default"
        self._session_open = False
        self._event_counter = 0
        self._hint_clusters: dict[str, str] = {}
        self._open_turn: tuple[str, float, float] | None = None  # (speaker, t0, t1)
        self.truth_turns: list[diarization.SpeakerTurn] = []
        self.hyp_turns: list[diarization.SpeakerTurn] = []
        self.pvad_scores: list[float] = []
        self.action_records: list[dict] = []
        self._synth_counter: dict[str, int] = {}
        self._replay_actions()

    # -- persistence plumbing ------------------------------------------------

    def _load_readings(self) -> None:
        for sensor_id, kind, room, value, ts in self.store.sensors.records():
            parsed: float | tuple[float, float, float]
            if "," in value:
                a, b, c = value.split(",")
                parsed = (float(a), float(b), float(c))
            else:
                parsed = float(value)
            self.readings.append(
                fusion.SensorReading(
                    sensor_id, fusion.SensorKind(kind), room or None, parsed,
                    timeutil.parse_timestamp(ts),
                )
            )

    def _replay_actions(self) -> None:
        for seq, rec in enumerate(self.store.actions.records()):
            ts, kind, addressee, text = rec
            self.action_records.append(
                {"seq": seq, "timestamp": ts, "kind": kind,
                 "addressee": addressee, "text": text, "supporting_ids": []}
            )

    def _log_action(self, action: dialogue.Action) -> dict:
        ts = self.now()
        seq = self.store.actions.append(
            ts, action.kind.value, action.addressee or "", action.text
        )
        record = {
            "seq": seq,
            "timestamp": timeutil.fmt_timestamp(ts),
            "kind": action.kind.value,
            "addressee": action.addressee or "",
            "text": action.text,
            "supporting_ids": list(action.supporting_ids),
        }
        self.action_records.append(record)
        return record

    # -- clock and schedule ----------------------------------------------------

    def now(self) -> datetime:
        if self.clock is None:
            raise ClockError("virtual clock not set; send a clock event first")
        return self.clock

    def advance_clock(self, ts: datetime) -> None:
        with self.lock:
            if self.clock is None:
                self.clock = ts
                # first clock of the run: rebuild the workspace against real time
                self.workspace = memory.merge_into_workspace(
                    [self.memstore.permanent, self.memstore.temporary], ts
                )
                self._start_schedule(ts)
                self._tick(ts)
                return
            if ts < self.clock:
                raise ClockError(f"clock may not move backwards ({ts} < {self.clock})")
            self.clock = ts
            self._tick(ts)

    def _start_schedule(self, start: datetime) -> None:
        if self._schedule_started:
            return
        self.schedule.add_daily("rollover", self.config.rollover_time, start)
        self.schedule.add_daily("watch", self.config.watch_check_time, start)
        self.schedule.add_daily("briefing", self.config.briefing_time, start)
        if self.label_client is not None:
            self.schedule.add_interval(
                "sync", timedelta(hours=self.config.sync_interval_hours), start
            )
        self._schedule_started = True
        self._last_sync = start

    def _tick(self, now: datetime) -> None:
        for action_id in automation.schedule_tick(now, self.schedule):
            if action_id == "rollover":
                self._run_rollover(now)
            elif action_id == "watch":
                self._run_watch_check(now)
            elif action_id == "briefing":
                self._run_briefing(now)
            elif action_id == "sync":
                self.sync_labels()

    def _run_rollover(self, now: datetime) -> None:
        self.workspace = memory.rollover_day(
            self.memstore.permanent, [self.memstore.temporary], now
        )
        self.memstore.compact_temporary()

    def _run_watch_check(self, now: datetime) -> None:
        history = self.watch_history(now)
        triggered = automation.evaluate_watch_rules(
            self.watch_rules, history, now, self.last_triggers,
            self.config.night_start, self.config.night_end,
        )
        for trig in triggered:
            self.last_triggers[trig.rule_id] = trig.triggered_at
            owner = self.registry.owner()
            addressee = owner.speaker_id if (trig.owner_only and owner) else None
            if trig.owner_only:
                self.store.owner_notes.append(now, trig.text)
            self._log_action(
                dialogue.Action(
                    dialogue.ActionKind.SPEAK, text=trig.text, addressee=addressee
                )
            )

    def _run_briefing(self, now: datetime) -> None:
        briefing = automation.morning_briefing(
            now.date(),
            self.store.agenda,
            lambda date: self.gate.weather(self.weather_client, date, now),
            self._first_morning_heart_rate(now),
        )
        owner = self.registry.owner()
        self._route_and_log(
            dialogue.Event(
                self._next_event_id(),
                dialogue.EventKind.SYSTEM,
                dialogue.Marker.RESPOND,
                briefing.spoken_text(),
                now,
                speaker=owner.speaker_id if owner else None,
                session_id=self.session_id,
            )
        )

    def _first_morning_heart_rate(self, now: datetime) -> tuple[float, datetime] | None:
        day_start = datetime.combine(now.date(), time(4, 0))
        for r in self.readings:
            if (
                r.kind is fusion.SensorKind.HEART_RATE
                and day_start <= r.timestamp <= now
                and isinstance(r.value, (int, float))
            ):
                return float(r.value), r.timestamp
        return None

    # -- watch-rule history ----------------------------------------------------

    def watch_history(self, now: datetime) -> list[automation.HistoryEvent]:
        """Sensor events plus freshly computed activity labels over the widest
        rule window; recomputed per check, so evaluation sees one snapshot."""
        span = max((r.window_nights for r in self.watch_rules), default=7) + 1
        t0 = now - timedelta(days=span)
        events = [
            automation.HistoryEvent("sensor", r.kind.value, r.room, r.timestamp)
            for r in self.readings
            if t0 <= r.timestamp <= now
        ]
        window_readings = [r for r in self.readings if t0 <= r.timestamp <= now]
        if window_readings:
            labels = fusion.har_label(window_readings, (t0, now), self.har_thresholds)
            events.extend(
                automation.HistoryEvent("activity", l.label.value, None, l.t_start)
                for l in labels
            )
        events.sort(key=lambda e: e.timestamp)
        return events

    # -- sessions ----------------------------------------------------------------

    def open_session(self, session_id: str) -> None:
        with self.lock:
            self._flush_open_turn()
            self.session_id = session_id
            self.cstate.reset_session()
            self._hint_clusters.clear()
            self.manager.reset_session(session_id)
            self.store.sessions.set(session_id, "date", self.now().date().isoformat())
            self._session_open = True

    def set_status(self, status: str) -> None:
        parts = [p.strip() for p in status.split(",")]
        bad = [p for p in parts if p not in _STATUS_PARTS]
        if bad:
            raise HearthError(f"status parts {bad} not in the fixed vocabulary")
        with self.lock:
            self._ensure_session()
            self.store.sessions.set(self.session_id, "status", ", ".join(parts))

    def _ensure_session(self) -> None:
        if not self._session_open:
            self.store.sessions.set(self.session_id, "date", self.now().date().isoformat())
            self._session_open = True

    # -- speakers ------------------------------------------------------------------

    def enroll(self, name: str, role: diarization.Role, n_samples: int = 20) -> diarization.SpeakerProfile:
        """Enroll from synthetic samples around the name's fixed direction."""
        with self.lock:
            direction = vectors.direction_for(self.config.seed, name, self.config.d)
            rng = vectors.seeded_rng(self.config.seed, "enroll", name)
            base = timeutil.to_epoch(self.now())
            samples = [
                diarization.SegmentEmbedding(
                    vectors.noisy_copy(rng, direction, 0.3), base + i, base + i + 1.0,
                    self.session_id,
                )
                for i in range(n_samples)
            ]
            return self.registry.enroll(name, role, samples)

    def resolve_hint(self, hint: str) -> str:
        """Registered name -> speaker id; anything else -> a stable per-session
        anonymous cluster for that hint.  Underscores in the hint stand in for
        spaces so multi-word names stay one scenario token."""
        profile = self.registry.by_name(hint.replace("_", " "))
        if profile is not None:
            return profile.speaker_id
        if hint in self._hint_clusters:
            return self._hint_clusters[hint]
        cluster = self.cstate.new_cluster(None)
        self._hint_clusters[hint] = cluster.cluster_id
        return cluster.cluster_id

    def promote(self, cluster_id: str, name: str, role: diarization.Role) -> diarization.SpeakerProfile:
        with self.lock:
            profile = diarization.promote_cluster(
                cluster_id, name, role, self.cstate, self.registry,
                alias_sink=self.store.transcripts.add_alias,
            )
            for hint, assigned in list(self._hint_clusters.items()):
                if assigned == cluster_id:
                    self._hint_clusters[hint] = profile.speaker_id
            return profile

    # -- event handling -----------------------------------------------------------

    def _next_event_id(self) -> str:
        self._event_counter += 1
        return f"ev{self._event_counter}"

    def _route_and_log(self, event: dialogue.Event) -> dict:
        action = self.manager.route_event(event)
        return self._log_action(action)

    def handle_utterance(self, hint: str, marker: dialogue.Marker, text: str) -> list[dict]:
        """The full utterance path: resolve the speaker, transcribe, ingest
        into memory, route, and execute whatever the action asks for."""
        with self.lock:
            ts = self.now()
            self._ensure_session()
            speaker_id = self.resolve_hint(hint)
            before = len(self.action_records)
            event = dialogue.Event(
                self._next_event_id(),
                dialogue.EventKind.UTTERANCE,
                marker,
                text,
                ts,
                speaker=speaker_id,
                session_id=self.session_id,
            )

            self._append_utterance_turn(speaker_id, text, ts)
            display = self._display_name(speaker_id)
            self._ingest_event(f"{display}: {text}", memory.Source.TRANSCRIPT)

            action = self.manager.route_event(event)
            if action.kind is dialogue.ActionKind.RUN_SUMMARY:
                self._execute_summary(event)
            elif action.kind is dialogue.ActionKind.RUN_RECALL:
                self._execute_recall(event)
            elif action.kind is dialogue.ActionKind.STORE_ONLY and marker is dialogue.Marker.ASK_NAME:
                self._execute_promotion(event)
            else:
                self._log_action(action)
            return self.action_records[before:]

    def _append_utterance_turn(self, speaker_id: str, text: str, ts: datetime) -> None:
        self._flush_open_turn()
        words = max(1, len(text.split()))
        # spoken turns may outlast the gap to the next event; never overlap
        last = self.store.transcripts.last_end(self.session_id)
        t0 = max(timeutil.to_epoch(ts), last if last is not None else float("-inf"))
        duration = round(2.0 + 0.4 * words, 1)
        self.store.transcripts.append_turn(
            TranscriptTurn(self.session_id, speaker_id, text, t0, t0 + duration)
        )

    def _display_name(self, speaker_id: str) -> str:
        profile = self.registry.get(speaker_id)
        return profile.name if profile else speaker_id

    def _ingest_event(self, text: str, source: memory.Source) -> list[memory.MemoryItem]:
        """Merge-as-they-arrive: new items land in the persisted temporary
        base and the live workspace in the same step."""
        items = memory.vectorize_document(
            text, source, self.provider, self.now(),
            self.config.chunk_size, self.config.chunk_overlap,
            ttl=timedelta(days=self.config.event_ttl_days),
        )
        for item in items:
            self.memstore.add_temporary(item)
            self.workspace.add(item)
        return items

    def _execute_summary(self, event: dialogue.Event) -> None:
        requester = self.registry.get(event.speaker)
        role = requester.role if requester else diarization.Role.GUEST
        target = event.payload.strip() or self.session_id
        if not self.store.sessions.known(target):
            target = self.session_id
        try:
            notes = [text for _, text in self.store.owner_notes.all()]
            text = dialogue.summarize_session(
                target, role, self.policy, self.store.transcripts,
                self.store.sessions, self.summary_gen,
                owner_notes=notes if role is diarization.Role.OWNER else (),
                display=self._display_name,
            )
            self._log_action(
                dialogue.Action(dialogue.ActionKind.SPEAK, text=text, addressee=event.speaker)
            )
        except dialogue.PermissionDenied:
            self._log_action(
                dialogue.Action(
                    dialogue.ActionKind.SPEAK,
                    text="I cannot share that information.",
                    addressee=event.speaker,
                )
            )

    def _execute_recall(self, event: dialogue.Event) -> None:
        params = dict(
            part.split("=", 1) for part in event.payload.split() if "=" in part
        )
        metric = params.get("metric", "")
        anchor = params.get("anchor", "wake")
        day = params.get("day", self.now().date().isoformat())
        try:
            result = dialogue.recall_query(
                metric, anchor, day, self.readings, self.store.anchors.all(),
                self.config.recall_window_s,
            )
            text = (
                f"{result.metric} was {result.value:g} at "
                f"{timeutil.fmt_timestamp(result.timestamp)}"
            )
        except dialogue.NoSuchMetric:
            text = f"I do not track a metric called {metric}."
        except dialogue.AnchorNotFound:
            text = f"I found no {anchor} event on {day}."
        except dialogue.NoReadingInWindow:
            text = f"I have no {metric} reading near {anchor} on {day}."
        self._log_action(
            dialogue.Action(dialogue.ActionKind.SPEAK, text=text, addressee=event.speaker)
        )

    def _execute_promotion(self, event: dialogue.Event) -> None:
        if event.speaker in self.registry:
            self._log_action(dialogue.Action(dialogue.ActionKind.STORE_ONLY))
            return
        name, role = event.payload, diarization.Role.GUEST
        if "," in event.payload:
            name, role_text = (p.strip() for p in event.payload.rsplit(",", 1))
            try:
                role = diarization.Role(role_text.lower())
            except ValueError:
                name = event.payload
        profile = self.promote(event.speaker, name.strip(), role)
        self._log_action(
            dialogue.Action(
                dialogue.ActionKind.SPEAK,
                text=f"Nice to meet you, {profile.name}.",
                addressee=profile.speaker_id,
            )
        )

    # -- segments -----------------------------------------------------------------

    def handle_segment(self, seg: diarization.SegmentEmbedding) -> diarization.SpeakerAssignment:
        with self.lock:
            self._ensure_session()
            assignment = diarization.assign_segment(seg, self.registry, self.cstate)
            owner = self.registry.owner()
            if owner is not None and owner.centroid is not None:
                self.pvad_scores.append(diarization.personal_vad_score(seg, owner))
            if self._open_turn is not None and self._open_turn[0] == assignment.id:
                self._open_turn = (assignment.id, self._open_turn[1], seg.t_end)
            else:
                self._flush_open_turn()
                self._open_turn = (assignment.id, seg.t_start, seg.t_end)
            return assignment

    def synth_segment(self, truth_name: str, t_start: float, t_end: float,
                      noise: float = 0.2) -> diarization.SpeakerAssignment:
        """Deterministic synthetic segment near the named voice's direction."""
        with self.lock:
            n = self._synth_counter.get(truth_name, 0)
            self._synth_counter[truth_name] = n + 1
            direction = vectors.direction_for(self.config.seed, truth_name, self.config.d)
            rng = vectors.seeded_rng(self.config.seed, "seg", truth_name, n)
            vec = vectors.noisy_copy(rng, direction, noise)
            return self.handle_segment(
                diarization.SegmentEmbedding(vec, t_start, t_end, self.session_id)
            )

    def _flush_open_turn(self) -> None:
        if self._open_turn is None:
            return
        speaker, t0, t1 = self._open_turn
        self._open_turn = None
        turn = diarization.SpeakerTurn(speaker, t0, t1)
        self.hyp_turns.append(turn)
        self.store.transcripts.append_turn(
            TranscriptTurn(self.session_id, speaker, "", t0, t1, frozenset({"audio"}))
        )

    def flush_turns(self) -> None:
        """Close the open diarization turn (end of stream or session)."""
        with self.lock:
            self._flush_open_turn()

    def record_truth(self, name: str, t_start: float, t_end: float) -> None:
        self.truth_turns.append(diarization.SpeakerTurn(name, t_start, t_end))

    def diarization_error_rate(self) -> float:
        with self.lock:
            self._flush_open_turn()
            return diarization.compute_der(self.truth_turns, self.hyp_turns)

    # -- sensors ------------------------------------------------------------------

    def handle_sensor(
        self,
        kind: fusion.SensorKind,
        room: str | None,
        value: float | tuple[float, float, float],
        alert: bool = False,
        sensor_id: str | None = None,
    ) -> dict:
        with self.lock:
            ts = self.now()
            self._ensure_session()
            sid = sensor_id or f"{kind.value}-{room or 'body'}"
            reading = fusion.SensorReading(sid, kind, room, value, ts)
            self.readings.append(reading)
            value_text = (
                ",".join(repr(float(v)) for v in value)
                if isinstance(value, tuple)
                else repr(float(value))
            )
            self.store.sensors.append(sid, kind.value, room or "", value_text, ts)

            summary = f"sensor {kind.value} {room or 'body'} {value_text} at {timeutil.fmt_timestamp(ts)}"
            self._ingest_event(summary, memory.Source.SENSOR_EVENT)

            marker = dialogue.Marker.ALERT if alert else dialogue.Marker.SILENT
            payload = (
                f"Alert: {kind.value} {room or ''} reads {value_text}".strip()
                if alert
                else summary
            )
            return self._route_and_log(
                dialogue.Event(
                    self._next_event_id(), dialogue.EventKind.SENSOR, marker,
                    payload, ts, session_id=self.session_id,
                )
            )

    def record_anchor(self, name: str) -> None:
        with self.lock:
            self.store.anchors.append(name, self.now())

    # -- documents, agenda, lifeline ------------------------------------------------

    def ingest_document(self, source: memory.Source, text: str) -> list[memory.MemoryItem]:
        with self.lock:
            now = self.now()
            ttl = None if source is memory.Source.DOMAIN_DOC else timedelta(
                days=self.config.temp_ttl_days
            )
            items = memory.vectorize_document(
                text, source, self.provider, now,
                self.config.chunk_size, self.config.chunk_overlap, ttl=ttl,
            )
            for item in items:
                if item.expires_at is None:
                    self.memstore.add_permanent(item)
                else:
                    self.memstore.add_temporary(item)
                self.workspace.add(item)
            return items

    def add_agenda(self, date: str, clock: str, text: str) -> None:
        with self.lock:
            self.store.agenda.add(date, clock, text)

    def add_lifeline(self, topic: str, text: str) -> None:
        with self.lock:
            self.store.lifeline.append(
                self.now().date().isoformat(), topic, text, self.session_id
            )

    # -- gateway-facing -------------------------------------------------------------

    def web_search(self, query: str) -> list[memory.MemoryItem]:
        with self.lock:
            return gateway.web_search(
                query, self.registry, self.lexicon, self.gate, self.search_client,
                self.memstore, self.workspace, self.now(),
                ttl=timedelta(days=self.config.temp_ttl_days),
                chunk_size=self.config.chunk_size, overlap=self.config.chunk_overlap,
            )

    def sync_labels(self) -> int:
        with self.lock:
            merged = fusion.sync_cloud_labels(
                self.label_client, self._last_sync, self.label_store, self.gate, self.now()
            )
            self._last_sync = self.now()
            return merged

    # -- read side --------------------------------------------------------------------

    def memory_search(self, query: str, k: int) -> list[tuple[memory.MemoryItem, float]]:
        with self.lock:
            return memory.retrieve(self.provider.embed(query), self.workspace, k, now=self.now())

    def summarize(self, session_id: str, role: diarization.Role) -> str:
        with self.lock:
            notes = [text for _, text in self.store.owner_notes.all()]
            return dialogue.summarize_session(
                session_id, role, self.policy, self.store.transcripts,
                self.store.sessions, self.summary_gen,
                owner_notes=notes if role is diarization.Role.OWNER else (),
                display=self._display_name,
            )

    def stats(self) -> dict:
        with self.lock:
            now = self.now()
            day_start = datetime.combine(now.date(), time(0, 0))
            occupancy: dict[str, float] = {}
            labels: list[fusion.ActivityLabel] = []
            if now > day_start:
                todays = [r for r in self.readings if day_start <= r.timestamp <= now]
                occupancy = fusion.room_occupancy_stats(todays, (day_start, now))
                if todays:
                    labels = fusion.har_label(todays, (day_start, now), self.har_thresholds)
            labels = list(labels) + self.label_store.labels(fusion.LabelOrigin.CLOUD)
            sed = fusion.sedentarization_level(
                occupancy, (now - day_start).total_seconds() or 1.0
            )
            latest_pose = None
            for r in reversed(self.readings):
                if r.kind is fusion.SensorKind.IMU and isinstance(r.value, tuple):
                    latest_pose = fusion.pose_classify(r.value, self.pose_thresholds).value
                    break
            return {
                "date": now.date().isoformat(),
                "occupancy_seconds": occupancy,
                "sedentarization": sed,
                "activity_labels": [
                    {
                        "label": l.label.value,
                        "t_start": timeutil.fmt_timestamp(l.t_start),
                        "t_end": timeutil.fmt_timestamp(l.t_end),
                        "origin": l.origin.value,
                    }
                    for l in labels
                ],
                "speakers": [
                    {
                        "id": p.speaker_id,
                        "name": p.name,
                        "role": p.role.value,
                        "samples": p.sample_count,
                    }
                    for p in self.registry.profiles.values()
                ],
                "clusters": [
                    {"id": c.cluster_id, "samples": c.sample_count}
                    for c in self.cstate.clusters.values()
                ],
                "latest_pose": latest_pose,
                "session": self.session_id,
                "actions": len(self.action_records),
                "mean_owner_voice_score": (
                    round(float(np.mean(self.pvad_scores)), 6) if self.pvad_scores else None
                ),
                "egress_invocations": self.gate.invocations,
            }

    def close(self) -> None:
        with self.lock:
            self._flush_open_turn()
            self.store.close()
            self.memstore.close()
            self.gate.close()
